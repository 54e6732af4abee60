#include "nhpd/bond_mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nhpd/errors.hpp"

namespace nhpd {

BondFrame bond_frame(double xa, double ya, double xb, double yb) {
  const double dx = xb - xa, dy = yb - ya;
  const double l = std::sqrt(dx * dx + dy * dy);
  if (!(l > 0.0)) throw ModelError("degenerate bond: coincident endpoints");
  return {dx / l, dy / l, l};
}

Mat6 rotation_matrix(const BondFrame& f) {
  Mat6 r = Mat6::Zero();
  for (int k = 0; k < 2; ++k) {
    const int o = 3 * k;
    r(o, o) = f.cos;
    r(o, o + 1) = f.sin;
    r(o + 1, o) = -f.sin;
    r(o + 1, o + 1) = f.cos;
    r(o + 2, o + 2) = 1.0;
  }
  return r;
}

Mat36 kinematic_matrix(double l) {
  if (!(l > 0.0)) throw ModelError("degenerate bond: non-positive length");
  Mat36 bt;
  bt << -1, 0, 0, 1, 0, 0,
         0, -1, l / 2, 0, 1, l / 2,
         0, 0, -l, 0, 0, l;
  return bt / l;
}

SpringFactors stiffness_factors(const Material& m, double H, double l) {
  if (!(H > 0.0) || !(l > 0.0)) throw ModelError("spring factors need positive bond horizon and length");
  const double E = m.youngs_modulus, nu = m.poisson_ratio, t = m.thickness;
  const double pi = std::numbers::pi;
  double cden, dnum, dden;
  if (m.plane == PlaneMode::Stress) {
    cden = 1.0 - nu;
    dnum = 1.0 - 3.0 * nu;
    dden = 1.0 - nu * nu;
  } else {
    cden = (1.0 - 2.0 * nu) * (1.0 + nu);
    dnum = 1.0 - 4.0 * nu;
    dden = cden;
  }
  if (cden == 0.0 || dden == 0.0) throw ModelError("singular material: Poisson ratio makes the spring factors infinite");
  SpringFactors f;
  f.c = 6.0 * E / (pi * t * H * H * H * cden);
  f.d = E * dnum / (6.0 * pi * t * H * dden);
  if (f.d < 0.0)
    throw ModelError(std::string("negative rotational stiffness: spring factor d < 0 for nu = ") +
                     std::to_string(nu) + (m.plane == PlaneMode::Stress ? " (plane stress needs nu <= 1/3)"
                                                                           : " (plane strain needs nu <= 1/4)"));
  f.normal = f.c;
  f.shear = 12.0 * f.d / (l * l);
  f.rotational = f.d / l;
  return f;
}

double length_correction(double l, double a_min, double a_max, double b_min, double b_max) {
  auto term = [l](double lo, double hi) {
    const double span = hi - lo;
    return span > 0.0 ? std::exp((lo - l) / span) : 1.0;
  };
  return 0.5 * (term(a_min, a_max) + term(b_min, b_max));
}

void assign_length_corrections(std::span<Bond> bonds, const Adjacency& adj) {
  const std::size_t n = adj.point_count();
  std::vector<double> lmin(n, std::numeric_limits<double>::infinity()), lmax(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (auto k : adj.incident(p)) {
      lmin[p] = std::min(lmin[p], bonds[k].length);
      lmax[p] = std::max(lmax[p], bonds[k].length);
    }
  }
  for (auto& b : bonds) b.alpha = length_correction(b.length, lmin[b.a], lmax[b.a], lmin[b.b], lmax[b.b]);
}

Mat6 element_stiffness(const BondCoefficients& bond) {
  const double l = bond.frame.length;
  const Mat6 r = rotation_matrix(bond.frame);
  const Mat36 bt = kinematic_matrix(l);
  const Eigen::Vector3d ld(l * bond.springs.normal, l * bond.springs.shear, bond.springs.rotational);
  const Eigen::Matrix<double, 3, 6> btr = bt * r;
  Mat6 k = btr.transpose() * ld.asDiagonal() * btr;
  k *= bond.prefactor();
  // Remove round-off asymmetry so assembled matrices are exactly symmetric.
  return 0.5 * (k + k.transpose());
}

BondDeformation bond_deformation(const BondFrame& f, const Vec3& ua, const Vec3& ub) {
  const double dx = ub.x() - ua.x();
  const double dy = ub.y() - ua.y();
  BondDeformation d;
  d.stretch = (f.cos * dx + f.sin * dy) / f.length;
  d.shear = (f.cos * dy - f.sin * dx) / f.length + 0.5 * (ua.z() + ub.z());
  d.rotation = ub.z() - ua.z();
  return d;
}

BondForces bond_forces(const BondDeformation& def, const SpringFactors& k, double omega, double alpha) {
  const double w = omega * alpha;
  return {w * k.normal * def.stretch, w * k.shear * def.shear, w * k.rotational * def.rotation};
}

double bond_energy(const BondCoefficients& bond, const Vec3& ua, const Vec3& ub) {
  const BondDeformation d = bond_deformation(bond.frame, ua, ub);
  const BondForces f = bond_forces(d, bond.springs, bond.omega, bond.alpha);
  const double l = bond.frame.length;
  return 0.5 * bond.volume_a * bond.volume_b *
         (f.normal * d.stretch * l + f.shear * d.shear * l + f.moment * d.rotation);
}

}  // namespace nhpd
