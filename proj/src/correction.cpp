#include "nhpd/correction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhpd/errors.hpp"

namespace nhpd {

CorrectionMode parse_correction_mode(std::string_view text) {
  if (text == "energy_ratio") return CorrectionMode::EnergyRatio;
  if (text == "literal") return CorrectionMode::LiteralStrainRatio;
  throw ConfigError("model.correction.mode", "expected \"energy_ratio\" or \"literal\"");
}

const char* to_string(CorrectionMode mode) noexcept {
  return mode == CorrectionMode::EnergyRatio ? "energy_ratio" : "literal";
}

void CorrectionSettings::validate() const {
  if (!(probe_strain > 0.0)) throw ConfigError("model.correction.probe_strain", "must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("model.correction.tolerance", "must be positive");
  if (max_iterations == 0) throw ConfigError("model.correction.max_iterations", "must be at least 1");
}

double target_energy_density(const Material& m, double strain) {
  const double E = m.youngs_modulus, nu = m.poisson_ratio;
  const double e2 = strain * strain;
  if (m.plane == PlaneMode::Stress) {
    if (nu * nu == 1.0) throw ModelError("singular material: nu^2 = 1");
    return E * e2 / (2.0 * (1.0 - nu * nu));
  }
  if ((1.0 + nu) * (1.0 - 2.0 * nu) == 0.0) throw ModelError("singular material: plane strain with nu = 0.5");
  return E * (1.0 - nu) * e2 / (2.0 * (1.0 + nu) * (1.0 - 2.0 * nu));
}

double trial_energy_density(const Model& model, std::size_t point, Probe probe, double strain) {
  const auto& pa = model.points[point];
  double sum = 0.0;
  for (auto k : model.adjacency.incident(point)) {
    const Bond& b = model.bonds[k];
    const auto& p = model.points[b.a];
    const auto& q = model.points[b.b];
    Vec6 u = Vec6::Zero();
    if (probe == Probe::X) {
      u(0) = strain * p.x;
      u(3) = strain * q.x;
    } else {
      u(1) = strain * p.y;
      u(4) = strain * q.y;
    }
    const Mat6 k_trial = element_stiffness(model.coefficients(k)) / pa.volume;
    sum += u.dot(k_trial * u);
  }
  return 0.25 * sum;
}

ProbeDensities trial_energy_densities(const Model& model, double strain, kernels::Isa isa) {
  const std::size_t nb = model.bonds.size();
  std::vector<double> cs(nb), sn(nb), len(nb), kn(nb), kt(nb), tx(nb), ty(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    cs[k] = model.frames[k].cos;
    sn[k] = model.frames[k].sin;
    len[k] = model.frames[k].length;
    kn[k] = model.springs[k].normal;
    kt[k] = model.springs[k].shear;
  }
  kernels::probe_terms(isa, cs, sn, len, kn, kt, tx, ty);

  const double scale = 0.25 * strain * strain;
  ProbeDensities out;
  out.x.assign(model.points.size(), 0.0);
  out.y.assign(model.points.size(), 0.0);
  // Gather per point in incident-bond order so the sums are reproducible.
  for (std::size_t p = 0; p < model.points.size(); ++p) {
    double sx = 0.0, sy = 0.0;
    for (auto k : model.adjacency.incident(p)) {
      const Bond& b = model.bonds[k];
      const std::size_t other = b.a == p ? b.b : b.a;
      const double w = b.omega * b.alpha * model.points[other].volume;
      sx += w * tx[k];
      sy += w * ty[k];
    }
    out.x[p] = scale * sx;
    out.y[p] = scale * sy;
  }
  return out;
}

namespace {

double probe_ratio(const CorrectionSettings& s, double target, double trial_a, double trial_b) {
  const double num = s.mode == CorrectionMode::EnergyRatio ? target : s.probe_strain;
  return 0.5 * (num / trial_a + num / trial_b);
}

}  // namespace

double correction_pass(Model& model, const CorrectionSettings& settings, kernels::Isa isa) {
  const ProbeDensities dens = trial_energy_densities(model, settings.probe_strain, isa);
  const double target = target_energy_density(model.material, settings.probe_strain);

  std::vector<double> next(model.bonds.size());
  for (std::size_t k = 0; k < model.bonds.size(); ++k) {
    const Bond& b = model.bonds[k];
    const double a = model.frames[k].cos, c = model.frames[k].sin;
    double sum = 0.0;
    if (a != 0.0) {
      for (auto p : {b.a, b.b})
        if (!(dens.x[p] > 0.0))
          throw CorrectionError("correction singularity: zero trial energy density (x probe) at point " +
                                std::to_string(p));
      const double px = probe_ratio(settings, target, dens.x[b.a], dens.x[b.b]);
      sum += (a / px) * (a / px);
    }
    if (c != 0.0) {
      for (auto p : {b.a, b.b})
        if (!(dens.y[p] > 0.0))
          throw CorrectionError("correction singularity: zero trial energy density (y probe) at point " +
                                std::to_string(p));
      const double py = probe_ratio(settings, target, dens.y[b.a], dens.y[b.b]);
      sum += (c / py) * (c / py);
    }
    next[k] = b.omega / std::sqrt(sum);
  }
  double change = 0.0;
  for (std::size_t k = 0; k < model.bonds.size(); ++k) {
    change += std::abs(next[k] - model.bonds[k].omega);
    model.bonds[k].omega = next[k];
  }
  return change;
}

CorrectionReport run_correction(Model& model, const CorrectionSettings& settings, kernels::Isa isa) {
  settings.validate();
  CorrectionReport report;
  for (std::size_t j = 1; j <= settings.max_iterations; ++j) {
    const double r = correction_pass(model, settings, isa);
    report.residuals.push_back(r);
    report.iterations = j;
    if (!std::isfinite(r))
      throw CorrectionError("domain correction produced a non-finite residual at pass " + std::to_string(j),
                            report.residuals);
    if (j > 5 && r > 10.0 * report.residuals[j - 6])
      throw CorrectionError("domain correction diverges: residual grew more than 10x over 5 passes",
                            report.residuals);
    if (r < settings.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged)
    throw CorrectionError("domain correction did not converge in " + std::to_string(settings.max_iterations) +
                              " passes (last residual " + std::to_string(report.residuals.back()) + ")",
                          report.residuals);
  report.min_omega = report.max_omega = model.bonds.empty() ? 1.0 : model.bonds.front().omega;
  for (const auto& b : model.bonds) {
    report.min_omega = std::min(report.min_omega, b.omega);
    report.max_omega = std::max(report.max_omega, b.omega);
  }
  return report;
}

}  // namespace nhpd
