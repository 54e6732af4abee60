#pragma once

#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhpd/errors.hpp"
#include "nhpd/kernels.hpp"
#include "nhpd/model.hpp"
#include "nhpd/sparse_ldlt.hpp"

namespace nhpd {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Dof : int { Ux = 0, Uy = 1, Rotation = 2 };

Dof parse_dof(std::string_view text);
const char* to_string(Dof dof) noexcept;

/// Value at load step i (1-based): table[i-1] when a table is given,
/// otherwise base + increment * i.
struct Schedule {
  double base = 0.0;
  double increment = 0.0;
  std::vector<double> table;

  double at(std::size_t step) const;
};

struct DisplacementCondition {
  std::string group;
  std::vector<std::size_t> points;
  Dof dof = Dof::Ux;
  Schedule value;
};

/// Total force split evenly over the group's points.
struct ForceLoad {
  std::string group;
  std::vector<std::size_t> points;
  Dof dof = Dof::Uy;
  Schedule total;
};

/// Where the force-displacement curve is sampled.
struct Monitor {
  std::string group;
  std::vector<std::size_t> points;
  Dof dof = Dof::Uy;
};

struct LoadProgram {
  std::size_t steps = 1;
  std::size_t break_batch = 10;          // o
  double energy_tolerance = 1e-4;        // epsilon
  std::size_t max_nr_iterations = 50;
  std::size_t max_break_rounds = 10000;  // per load step
  std::vector<DisplacementCondition> displacements;
  std::vector<ForceLoad> forces;
  Monitor monitor;
  /// Stop once |reaction| falls below this fraction of the peak seen so far
  /// (0 disables).
  double stop_below_peak_fraction = 0.0;

  void validate(std::size_t point_count) const;
};

/// K = sum of element matrices of unbroken bonds over the 3N dofs.
SparseMatrix assemble(const Model& model);

/// Free-dof block of K and the residual f - K u restricted to free dofs.
struct ReducedProblem {
  SparseMatrix stiffness;
  Eigen::VectorXd rhs;
  std::vector<std::size_t> free_dofs;
};

ReducedProblem reduce(const SparseMatrix& k, const Eigen::VectorXd& u, const Eigen::VectorXd& f,
                      const std::vector<bool>& prescribed);

/// Unbroken bonds with margin >= 0 ordered by (margin desc, bond index asc).
std::vector<std::size_t> rank_breakable(const Model& model, std::span<const double> margins);

/// Breaks the first `batch` bonds of rank_breakable. Returns the count.
std::size_t break_ranked(Model& model, std::span<const double> margins, std::size_t batch);

struct NrOutcome {
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> energies;  // E_0 (before the first solve), E_1, ...
};

struct StepRecord {
  std::size_t step = 0;
  double displacement = 0.0;  // mean monitored displacement
  double reaction = 0.0;      // summed internal force at the monitored dofs
  std::size_t broken = 0;     // cumulative
  double energy = 0.0;
  std::size_t nr_iterations = 0;
  std::size_t break_rounds = 0;
  std::vector<double> damage;
};

struct History {
  std::vector<StepRecord> steps;
  std::vector<std::string> warnings;
  bool completed = false;
  std::optional<ErrorCategory> error_category;
  std::string error;

  double peak_reaction() const;  // max |reaction|
};

class QuasiStaticSolver {
 public:
  using StepCallback = std::function<void(const StepRecord&, const QuasiStaticSolver&)>;

  /// Bonds must carry their critical stretches; the model's broken flags are
  /// updated in place.
  QuasiStaticSolver(Model& model, LoadProgram program, kernels::Isa isa = kernels::default_isa());

  /// All load steps. Errors end the run early; the partial history is kept.
  History run(const StepCallback& on_step = {});

  /// Writes the prescribed values and external forces of load step i.
  void begin_step(std::size_t step);
  /// Newton-Raphson iterations at the current broken set until the relative
  /// energy change drops below the tolerance.
  NrOutcome solve_equilibrium();
  /// Ranked breaking after a converged equilibrium; returns bonds broken.
  std::size_t break_bonds();

  double total_energy() const;
  std::vector<double> bond_energies() const;
  Eigen::VectorXd internal_forces() const;
  double monitor_reaction() const;
  double monitor_displacement() const;
  std::vector<double> stretches() const;

  const Eigen::VectorXd& displacement() const noexcept { return u_; }
  const Eigen::VectorXd& external_forces() const noexcept { return f_; }
  const Model& model() const noexcept { return model_; }
  const LoadProgram& program() const noexcept { return program_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  void refresh_free_set();
  void assemble_reduced();
  void factorize();
  std::string describe_floating_component(std::optional<int> failed_row) const;

  Model& model_;
  LoadProgram program_;
  kernels::Isa isa_;
  kernels::BondTable table_;
  std::vector<Mat6> elements_;
  std::vector<bool> prescribed_;
  std::vector<bool> frozen_;
  std::vector<std::ptrdiff_t> free_index_;
  std::size_t free_count_ = 0;
  SparseMatrix reduced_;
  std::vector<std::array<std::ptrdiff_t, 36>> slots_;
  std::vector<std::size_t> point_order_;  // elimination order of the points
  std::vector<std::size_t> dof_of_row_;   // free row -> global dof
  std::vector<int> changed_rows_;         // rows touched since the last factorization
  SparseLdlt ldlt_;
  bool pattern_ready_ = false;
  bool factor_ready_ = false;
  bool full_factor_ = true;
  Eigen::VectorXd u_;
  Eigen::VectorXd f_;
  std::vector<std::string> warnings_;
};

}  // namespace nhpd
