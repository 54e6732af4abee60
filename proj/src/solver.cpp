#include "nhpd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "nhpd/damage.hpp"
#include "nhpd/ordering.hpp"

namespace nhpd {

Dof parse_dof(std::string_view text) {
  if (text == "ux") return Dof::Ux;
  if (text == "uy") return Dof::Uy;
  if (text == "rotation" || text == "m") return Dof::Rotation;
  throw ConfigError("dof", "expected ux, uy or rotation, got \"" + std::string(text) + "\"");
}

const char* to_string(Dof dof) noexcept {
  switch (dof) {
    case Dof::Ux: return "ux";
    case Dof::Uy: return "uy";
    case Dof::Rotation: return "rotation";
  }
  return "?";
}

double Schedule::at(std::size_t step) const {
  if (!table.empty()) {
    if (step == 0 || step > table.size())
      throw ConfigError("schedule", "load step " + std::to_string(step) + " is outside the value table");
    return table[step - 1];
  }
  return base + increment * static_cast<double>(step);
}

void LoadProgram::validate(std::size_t point_count) const {
  if (steps == 0) throw ConfigError("program.steps", "must be at least 1");
  if (break_batch == 0) throw ConfigError("program.break_batch", "must be at least 1");
  if (!(energy_tolerance > 0.0)) throw ConfigError("program.tolerance", "must be positive");
  if (max_nr_iterations == 0) throw ConfigError("program.max_nr_iterations", "must be at least 1");
  if (max_break_rounds == 0) throw ConfigError("program.max_break_rounds", "must be at least 1");
  if (stop_below_peak_fraction < 0.0 || stop_below_peak_fraction >= 1.0)
    throw ConfigError("program.stop_below_peak_fraction", "must lie in [0, 1)");
  std::vector<int> seen(3 * point_count, -1);
  for (std::size_t c = 0; c < displacements.size(); ++c) {
    const auto& bc = displacements[c];
    if (!bc.value.table.empty() && bc.value.table.size() < steps)
      throw ConfigError("boundary[" + std::to_string(c) + "]", "value table shorter than the step count");
    for (auto p : bc.points) {
      if (p >= point_count) throw ConfigError("boundary[" + std::to_string(c) + "]", "point index out of range");
      auto& s = seen[3 * p + static_cast<std::size_t>(bc.dof)];
      if (s >= 0)
        throw ConfigError("boundary[" + std::to_string(c) + "]",
                          "over-constrained: point " + std::to_string(p) + " " + to_string(bc.dof) +
                              " is already prescribed by boundary[" + std::to_string(s) + "]");
      s = static_cast<int>(c);
    }
  }
  for (std::size_t c = 0; c < forces.size(); ++c) {
    if (forces[c].points.empty()) throw ConfigError("loads[" + std::to_string(c) + "]", "group has no points");
    for (auto p : forces[c].points)
      if (p >= point_count) throw ConfigError("loads[" + std::to_string(c) + "]", "point index out of range");
  }
  for (auto p : monitor.points)
    if (p >= point_count) throw ConfigError("program.monitor", "point index out of range");
}

double History::peak_reaction() const {
  double peak = 0.0;
  for (const auto& s : steps) peak = std::max(peak, std::abs(s.reaction));
  return peak;
}

SparseMatrix assemble(const Model& model) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(36 * model.bonds.size());
  for (std::size_t k = 0; k < model.bonds.size(); ++k) {
    const Bond& b = model.bonds[k];
    if (b.broken) continue;
    const Mat6 ke = element_stiffness(model.coefficients(k));
    const std::array<std::size_t, 6> dofs{3 * b.a, 3 * b.a + 1, 3 * b.a + 2, 3 * b.b, 3 * b.b + 1, 3 * b.b + 2};
    for (int c = 0; c < 6; ++c)
      for (int r = 0; r < 6; ++r)
        trips.emplace_back(static_cast<int>(dofs[r]), static_cast<int>(dofs[c]), ke(r, c));
  }
  const auto n = static_cast<Eigen::Index>(model.dof_count());
  SparseMatrix k(n, n);
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

ReducedProblem reduce(const SparseMatrix& k, const Eigen::VectorXd& u, const Eigen::VectorXd& f,
                      const std::vector<bool>& prescribed) {
  const auto n = static_cast<std::size_t>(k.rows());
  if (prescribed.size() != n || static_cast<std::size_t>(u.size()) != n || static_cast<std::size_t>(f.size()) != n)
    throw SolverError("reduce: size mismatch between system and constraint table");
  ReducedProblem out;
  std::vector<std::ptrdiff_t> idx(n, -1);
  for (std::size_t d = 0; d < n; ++d) {
    if (!prescribed[d]) {
      idx[d] = static_cast<std::ptrdiff_t>(out.free_dofs.size());
      out.free_dofs.push_back(d);
    }
  }
  const Eigen::VectorXd r = f - k * u;
  out.rhs.resize(static_cast<Eigen::Index>(out.free_dofs.size()));
  for (std::size_t i = 0; i < out.free_dofs.size(); ++i) out.rhs[static_cast<Eigen::Index>(i)] = r[static_cast<Eigen::Index>(out.free_dofs[i])];
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index c = 0; c < k.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(k, c); it; ++it)
      if (idx[it.row()] >= 0 && idx[it.col()] >= 0)
        trips.emplace_back(static_cast<int>(idx[it.row()]), static_cast<int>(idx[it.col()]), it.value());
  const auto m = static_cast<Eigen::Index>(out.free_dofs.size());
  out.stiffness.resize(m, m);
  out.stiffness.setFromTriplets(trips.begin(), trips.end());
  return out;
}

std::vector<std::size_t> rank_breakable(const Model& model, std::span<const double> margins) {
  std::vector<std::size_t> list;
  for (std::size_t k = 0; k < model.bonds.size(); ++k)
    if (!model.bonds[k].broken && margins[k] >= 0.0) list.push_back(k);
  std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
    if (margins[a] != margins[b]) return margins[a] > margins[b];
    return a < b;
  });
  return list;
}

std::size_t break_ranked(Model& model, std::span<const double> margins, std::size_t batch) {
  const auto list = rank_breakable(model, margins);
  const std::size_t n = std::min(batch, list.size());
  for (std::size_t i = 0; i < n; ++i) model.bonds[list[i]].broken = true;
  return n;
}

QuasiStaticSolver::QuasiStaticSolver(Model& model, LoadProgram program, kernels::Isa isa)
    : model_(model), program_(std::move(program)), isa_(isa) {
  program_.validate(model_.points.size());
  for (std::size_t k = 0; k < model_.bonds.size(); ++k)
    if (!(model_.bonds[k].critical_stretch > 0.0))
      throw ModelError("bond " + std::to_string(k) + " has no critical stretch; run the damage setup first");
  table_ = model_.bond_table();
  elements_.resize(model_.bonds.size());
  for (std::size_t k = 0; k < model_.bonds.size(); ++k) elements_[k] = element_stiffness(model_.coefficients(k));
  const std::size_t n = model_.dof_count();
  prescribed_.assign(n, false);
  for (const auto& bc : program_.displacements)
    for (auto p : bc.points) prescribed_[3 * p + static_cast<std::size_t>(bc.dof)] = true;
  frozen_.assign(n, false);
  point_order_ = nested_dissection(model_);
  u_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  f_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (!model_.isolated.empty())
    warnings_.push_back(std::to_string(model_.isolated.size()) + " material points have no bonds; their dofs are held fixed");
}

void QuasiStaticSolver::begin_step(std::size_t step) {
  for (const auto& bc : program_.displacements) {
    const double v = bc.value.at(step);
    for (auto p : bc.points) u_[static_cast<Eigen::Index>(3 * p + static_cast<std::size_t>(bc.dof))] = v;
  }
  f_.setZero();
  for (const auto& load : program_.forces) {
    const double share = load.total.at(step) / static_cast<double>(load.points.size());
    for (auto p : load.points) f_[static_cast<Eigen::Index>(3 * p + static_cast<std::size_t>(load.dof))] += share;
  }
}

void QuasiStaticSolver::refresh_free_set() {
  const std::size_t n = model_.dof_count();
  std::vector<double> diag(n, 0.0);
  for (std::size_t k = 0; k < model_.bonds.size(); ++k) {
    const Bond& b = model_.bonds[k];
    if (b.broken) continue;
    for (int i = 0; i < 3; ++i) {
      diag[3 * b.a + i] += elements_[k](i, i);
      diag[3 * b.b + i] += elements_[k](3 + i, 3 + i);
    }
  }
  std::size_t newly_frozen = 0;
  bool changed = free_index_.size() != n;
  for (std::size_t d = 0; d < n; ++d) {
    const bool freeze = !prescribed_[d] && diag[d] == 0.0;
    if (freeze && !frozen_[d]) ++newly_frozen;
    if (freeze != frozen_[d]) changed = true;
    frozen_[d] = freeze;
  }
  if (newly_frozen > 0)
    warnings_.push_back(std::to_string(newly_frozen) + " dofs without stiffness (detached points or zero shear/rotational springs) held fixed");
  if (!changed) return;
  free_index_.assign(n, -1);
  dof_of_row_.clear();
  free_count_ = 0;
  for (auto p : point_order_)
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t d = 3 * p + c;
      if (prescribed_[d] || frozen_[d]) continue;
      free_index_[d] = static_cast<std::ptrdiff_t>(free_count_++);
      dof_of_row_.push_back(d);
    }
  pattern_ready_ = false;
}

void QuasiStaticSolver::assemble_reduced() {
  const auto dofs_of = [](const Bond& b) {
    return std::array<std::size_t, 6>{3 * b.a, 3 * b.a + 1, 3 * b.a + 2, 3 * b.b, 3 * b.b + 1, 3 * b.b + 2};
  };
  if (!pattern_ready_) {
    // Every bond, broken or not, contributes to the pattern so the symbolic
    // factorization stays valid while bonds break.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(36 * model_.bonds.size());
    for (const auto& b : model_.bonds) {
      const auto dofs = dofs_of(b);
      for (int c = 0; c < 6; ++c)
        for (int r = 0; r < 6; ++r) {
          const auto fr = free_index_[dofs[r]], fc = free_index_[dofs[c]];
          if (fr >= 0 && fc >= 0) trips.emplace_back(static_cast<int>(fr), static_cast<int>(fc), 0.0);
        }
    }
    const auto m = static_cast<Eigen::Index>(free_count_);
    reduced_.resize(m, m);
    reduced_.setFromTriplets(trips.begin(), trips.end());
    reduced_.makeCompressed();
    slots_.assign(model_.bonds.size(), {});
    const int* outer = reduced_.outerIndexPtr();
    const int* inner = reduced_.innerIndexPtr();
    for (std::size_t k = 0; k < model_.bonds.size(); ++k) {
      const auto dofs = dofs_of(model_.bonds[k]);
      for (int c = 0; c < 6; ++c)
        for (int r = 0; r < 6; ++r) {
          const auto fr = free_index_[dofs[r]], fc = free_index_[dofs[c]];
          std::ptrdiff_t slot = -1;
          if (fr >= 0 && fc >= 0) {
            const int* first = inner + outer[fc];
            const int* last = inner + outer[fc + 1];
            const int* it = std::lower_bound(first, last, static_cast<int>(fr));
            slot = it - inner;
          }
          slots_[k][static_cast<std::size_t>(6 * c + r)] = slot;
        }
    }
    ldlt_.analyze(reduced_);
    pattern_ready_ = true;
    full_factor_ = true;
  }
  double* values = reduced_.valuePtr();
  std::fill(values, values + reduced_.nonZeros(), 0.0);
  for (std::size_t k = 0; k < model_.bonds.size(); ++k) {
    if (model_.bonds[k].broken) continue;
    const Mat6& ke = elements_[k];
    const auto& s = slots_[k];
    for (int c = 0; c < 6; ++c)
      for (int r = 0; r < 6; ++r) {
        const auto slot = s[static_cast<std::size_t>(6 * c + r)];
        if (slot >= 0) values[slot] += ke(r, c);
      }
  }
}

std::string QuasiStaticSolver::describe_floating_component(std::optional<int> failed_row) const {
  const std::size_t n = model_.points.size();
  std::vector<std::size_t> comp(n, SIZE_MAX);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != SIZE_MAX) continue;
    const std::size_t id = members.size();
    members.emplace_back();
    std::queue<std::size_t> q;
    q.push(s);
    comp[s] = id;
    while (!q.empty()) {
      const auto p = q.front();
      q.pop();
      members[id].push_back(p);
      for (auto k : model_.adjacency.incident(p)) {
        const Bond& b = model_.bonds[k];
        if (b.broken) continue;
        const auto o = b.a == p ? b.b : b.a;
        if (comp[o] == SIZE_MAX) {
          comp[o] = id;
          q.push(o);
        }
      }
    }
  }
  for (const auto& m : members) {
    if (m.size() < 2) continue;
    bool anchored = false;
    for (auto p : m)
      for (int d = 0; d < 2; ++d) anchored = anchored || prescribed_[3 * p + d];
    if (!anchored) {
      std::ostringstream os;
      os << "free-floating component of " << m.size() << " points (first point " << *std::min_element(m.begin(), m.end())
         << ") has no displacement constraint";
      return os.str();
    }
  }
  if (failed_row) {
    const std::size_t d = dof_of_row_[static_cast<std::size_t>(*failed_row)];
    return "non-positive pivot at point " + std::to_string(d / 3) + " " + to_string(static_cast<Dof>(d % 3));
  }
  return "stiffness matrix is singular on the free dofs";
}

void QuasiStaticSolver::factorize() {
  std::optional<int> bad;
  if (full_factor_) {
    bad = ldlt_.factorize(reduced_);
  } else {
    bad = ldlt_.refactorize(reduced_, changed_rows_);
  }
  changed_rows_.clear();
  if (bad) {
    full_factor_ = true;
    throw SolverError("singular system: " + describe_floating_component(bad));
  }
  full_factor_ = false;
  factor_ready_ = true;
}

NrOutcome QuasiStaticSolver::solve_equilibrium() {
  if (!factor_ready_) {
    refresh_free_set();
    assemble_reduced();
    factorize();
  }
  NrOutcome out;
  double e_prev = total_energy();
  out.energies.push_back(e_prev);
  for (std::size_t j = 1; j <= program_.max_nr_iterations; ++j) {
    out.iterations = j;
    if (free_count_ > 0) {
      const Eigen::VectorXd fint = internal_forces();
      Eigen::VectorXd r(static_cast<Eigen::Index>(free_count_));
      for (std::size_t d = 0; d < free_index_.size(); ++d)
        if (free_index_[d] >= 0) r[free_index_[d]] = f_[static_cast<Eigen::Index>(d)] - fint[static_cast<Eigen::Index>(d)];
      ldlt_.solve(r);
      const Eigen::VectorXd& du = r;
      for (std::size_t d = 0; d < free_index_.size(); ++d)
        if (free_index_[d] >= 0) u_[static_cast<Eigen::Index>(d)] += du[free_index_[d]];
    }
    const double e = total_energy();
    out.energies.push_back(e);
    if (e == e_prev || (e != 0.0 && std::abs((e - e_prev) / e) < program_.energy_tolerance)) {
      out.converged = true;
      return out;
    }
    e_prev = e;
  }
  return out;
}

std::vector<double> QuasiStaticSolver::stretches() const {
  const std::size_t nb = table_.size();
  std::vector<double> s(nb), g(nb), th(nb);
  kernels::deformations(isa_, table_, {u_.data(), static_cast<std::size_t>(u_.size())}, {s, g, th});
  return s;
}

std::size_t QuasiStaticSolver::break_bonds() {
  const auto s = stretches();
  std::vector<double> crit(s.size()), margin(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) crit[k] = model_.bonds[k].critical_stretch;
  kernels::margins(isa_, s, crit, margin);
  const auto ranked = rank_breakable(model_, margin);
  const std::size_t n = std::min(program_.break_batch, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    Bond& b = model_.bonds[ranked[i]];
    b.broken = true;
    for (std::size_t c = 0; c < 3; ++c) {
      for (const auto d : {3 * b.a + c, 3 * b.b + c})
        if (d < free_index_.size() && free_index_[d] >= 0) changed_rows_.push_back(static_cast<int>(free_index_[d]));
    }
  }
  if (n > 0) factor_ready_ = false;
  return n;
}

std::vector<double> QuasiStaticSolver::bond_energies() const {
  const std::size_t nb = table_.size();
  std::vector<double> s(nb), g(nb), th(nb), e(nb);
  kernels::deformations(isa_, table_, {u_.data(), static_cast<std::size_t>(u_.size())}, {s, g, th});
  kernels::energies(isa_, table_, {s, g, th}, e);
  for (std::size_t k = 0; k < nb; ++k)
    if (model_.bonds[k].broken) e[k] = 0.0;
  return e;
}

double QuasiStaticSolver::total_energy() const {
  const auto e = bond_energies();
  double sum = 0.0;
  for (double v : e) sum += v;
  return sum;
}

Eigen::VectorXd QuasiStaticSolver::internal_forces() const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(u_.size());
  for (std::size_t k = 0; k < model_.bonds.size(); ++k) {
    const Bond& b = model_.bonds[k];
    if (b.broken) continue;
    Vec6 ue;
    ue << u_[3 * b.a], u_[3 * b.a + 1], u_[3 * b.a + 2], u_[3 * b.b], u_[3 * b.b + 1], u_[3 * b.b + 2];
    const Vec6 fe = elements_[k] * ue;
    for (int i = 0; i < 3; ++i) {
      f[static_cast<Eigen::Index>(3 * b.a + i)] += fe[i];
      f[static_cast<Eigen::Index>(3 * b.b + i)] += fe[3 + i];
    }
  }
  return f;
}

double QuasiStaticSolver::monitor_reaction() const {
  const Eigen::VectorXd f = internal_forces();
  double sum = 0.0;
  for (auto p : program_.monitor.points) sum += f[static_cast<Eigen::Index>(3 * p + static_cast<std::size_t>(program_.monitor.dof))];
  return sum;
}

double QuasiStaticSolver::monitor_displacement() const {
  const auto& pts = program_.monitor.points;
  if (pts.empty()) return 0.0;
  double sum = 0.0;
  for (auto p : pts) sum += u_[static_cast<Eigen::Index>(3 * p + static_cast<std::size_t>(program_.monitor.dof))];
  return sum / static_cast<double>(pts.size());
}

History QuasiStaticSolver::run(const StepCallback& on_step) {
  History h;
  double peak = 0.0;
  try {
    for (std::size_t i = 1; i <= program_.steps; ++i) {
      begin_step(i);
      StepRecord rec;
      rec.step = i;
      while (true) {
        const NrOutcome nr = solve_equilibrium();
        rec.nr_iterations += nr.iterations;
        if (!nr.converged) {
          std::ostringstream os;
          os << "Newton-Raphson did not converge at load step " << i << " within " << program_.max_nr_iterations
             << " iterations; energy trace:";
          for (double e : nr.energies) os << ' ' << e;
          throw SolverError(os.str());
        }
        if (break_bonds() == 0) break;
        if (++rec.break_rounds > program_.max_break_rounds)
          throw SolverError("load step " + std::to_string(i) + " exceeded " +
                            std::to_string(program_.max_break_rounds) + " bond-breaking rounds");
      }
      rec.displacement = monitor_displacement();
      rec.reaction = monitor_reaction();
      rec.broken = model_.broken_count();
      rec.energy = total_energy();
      rec.damage = damage_field(model_);
      h.steps.push_back(std::move(rec));
      if (on_step) on_step(h.steps.back(), *this);
      peak = std::max(peak, std::abs(h.steps.back().reaction));
      if (program_.stop_below_peak_fraction > 0.0 && peak > 0.0 &&
          std::abs(h.steps.back().reaction) < program_.stop_below_peak_fraction * peak)
        break;
    }
    h.completed = true;
  } catch (const Error& e) {
    h.error_category = e.category();
    h.error = e.what();
  }
  h.warnings = warnings_;
  return h;
}

}  // namespace nhpd
