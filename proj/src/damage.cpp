#include "nhpd/damage.hpp"

#include <cmath>
#include <string>

#include "nhpd/errors.hpp"

namespace nhpd {

double critical_energy_density(const Material& m) {
  const double ft = m.tensile_strength, E = m.youngs_modulus, nu = m.poisson_ratio;
  if (m.plane == PlaneMode::Stress) {
    if (nu * nu == 1.0) throw ModelError("singular material: nu^2 = 1");
    return ft * ft / (2.0 * E * (1.0 - nu * nu));
  }
  if (1.0 - 2.0 * nu == 0.0) throw ModelError("singular material: plane strain with nu = 0.5");
  return ft * ft * (1.0 - nu * nu) * (1.0 - nu) * (1.0 - nu) / (2.0 * E * (1.0 - 2.0 * nu));
}

double critical_stretch(const BondCoefficients& b, double e0) {
  const double denom = b.prefactor() * b.springs.c * b.frame.length;
  if (!(denom > 0.0) || !(e0 > 0.0))
    throw ModelError("invalid bond for critical stretch: omega, alpha, volumes, c and l must all be positive");
  return std::sqrt(e0 * (b.volume_a + b.volume_b) / denom);
}

double bond_energy_dedication(const BondCoefficients& b, double stretch) {
  return b.prefactor() * b.springs.c * b.frame.length * stretch * stretch / (b.volume_a + b.volume_b);
}

void assign_critical_stretches(Model& model) {
  const double e0 = critical_energy_density(model.material);
  for (std::size_t k = 0; k < model.bonds.size(); ++k)
    model.bonds[k].critical_stretch = critical_stretch(model.coefficients(k), e0);
}

double point_damage(const Model& model, std::size_t point) {
  double intact = 0.0, total = 0.0;
  for (auto k : model.adjacency.incident(point)) {
    const Bond& b = model.bonds[k];
    const double w = b.omega * b.alpha;
    total += w;
    if (!b.broken) intact += w;
  }
  if (total == 0.0) return 1.0;
  return 1.0 - intact / total;
}

std::vector<double> damage_field(const Model& model) {
  std::vector<double> phi(model.points.size());
  for (std::size_t p = 0; p < phi.size(); ++p) phi[p] = point_damage(model, p);
  return phi;
}

}  // namespace nhpd
