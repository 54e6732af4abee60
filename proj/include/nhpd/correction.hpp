#pragma once

#include <vector>

#include "nhpd/kernels.hpp"
#include "nhpd/model.hpp"

namespace nhpd {

enum class CorrectionMode {
  /// p = (e/e~_A + e/e~_B) / 2: target over trial energy density.
  EnergyRatio,
  /// p = (eps/e~_A + eps/e~_B) / 2, taken literally (probe strain over trial
  /// energy density). Not dimensionless; kept for comparison runs.
  LiteralStrainRatio,
};

CorrectionMode parse_correction_mode(std::string_view text);
const char* to_string(CorrectionMode mode) noexcept;

struct CorrectionSettings {
  double probe_strain = 1e-3;
  double tolerance = 1e-3;        // on sum |omega_j - omega_{j-1}|
  std::size_t max_iterations = 100;
  CorrectionMode mode = CorrectionMode::EnergyRatio;

  void validate() const;
};

enum class Probe { X, Y };

/// Classical strain energy density under uniform uniaxial strain.
double target_energy_density(const Material& material, double strain);

/// Trial density at one point from the element matrices: a quarter of
/// sum_B u^T (K_AB / V_A) u under the affine probe field. Reference path.
double trial_energy_density(const Model& model, std::size_t point, Probe probe, double strain);

struct ProbeDensities {
  std::vector<double> x, y;
};

/// Trial densities of every point for both probes (kernel path).
ProbeDensities trial_energy_densities(const Model& model, double strain, kernels::Isa isa = kernels::default_isa());

/// One update of every bond's omega from the densities at the current
/// omegas. Returns sum |delta omega|.
double correction_pass(Model& model, const CorrectionSettings& settings, kernels::Isa isa = kernels::default_isa());

struct CorrectionReport {
  std::size_t iterations = 0;
  std::vector<double> residuals;
  double min_omega = 0.0;
  double max_omega = 0.0;
  bool converged = false;
};

/// Iterates correction_pass until the residual drops below the tolerance.
/// Throws CorrectionError on divergence or when max_iterations is hit.
CorrectionReport run_correction(Model& model, const CorrectionSettings& settings,
                                kernels::Isa isa = kernels::default_isa());

}  // namespace nhpd
