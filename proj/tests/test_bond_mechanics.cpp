#include <doctest.h>

#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "nhpd/bond_mechanics.hpp"
#include "nhpd/errors.hpp"
#include "nhpd/material.hpp"
#include "support.hpp"

using namespace nhpd;

namespace {

Material unit_material(double nu, PlaneMode plane = PlaneMode::Stress) {
  Material m;
  m.youngs_modulus = 1.0;
  m.poisson_ratio = nu;
  m.tensile_strength = 1.0;
  m.plane = plane;
  return m;
}

BondCoefficients random_bond(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BondCoefficients bc;
  const double l = 0.002 + 0.01 * u(rng);
  const double ang = 2.0 * std::numbers::pi * u(rng);
  bc.frame = bond_frame(0.0, 0.0, l * std::cos(ang), l * std::sin(ang));
  Material m = fixture::concrete(u(rng) < 0.5 ? PlaneMode::Stress : PlaneMode::Strain);
  m.poisson_ratio = 0.24 * u(rng);
  bc.springs = stiffness_factors(m, l * (1.0 + 2.0 * u(rng)), l);
  bc.omega = 0.5 + 3.0 * u(rng);
  bc.alpha = 0.3 + 0.7 * u(rng);
  bc.volume_a = 1e-5 * (0.5 + u(rng));
  bc.volume_b = 1e-5 * (0.5 + u(rng));
  return bc;
}

Vec6 random_state(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Vec6 u;
  for (int i = 0; i < 6; ++i) u[i] = g(rng);
  u[2] *= 100.0;
  u[5] *= 100.0;
  return u;
}

double energy(const BondCoefficients& bc, const Vec6& u) {
  return bond_energy(bc, u.head<3>(), u.tail<3>());
}

}  // namespace

TEST_SUITE("bond_mechanics") {
  TEST_CASE("frame of axis-aligned bonds") {
    const auto f = bond_frame(0, 0, 1, 0);
    CHECK(f.cos == 1.0);
    CHECK(f.sin == 0.0);
    CHECK(rotation_matrix(f) == Mat6::Identity());
    const auto v = bond_frame(0, 0, 0, 2);
    CHECK(v.cos == 0.0);
    CHECK(v.sin == 1.0);
    CHECK(v.length == 2.0);
    CHECK_THROWS_AS(bond_frame(1, 1, 1, 1), ModelError);
  }

  TEST_CASE("rotation matrix is orthogonal") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const Mat6 r = rotation_matrix(bond_frame(u(rng), u(rng), u(rng) + 3.0, u(rng)));
      CHECK((r.transpose() * r - Mat6::Identity()).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }

  TEST_CASE("kinematics of rigid motions and pure stretch") {
    const auto f = bond_frame(0, 0, 2, 0);
    auto d = bond_deformation(f, {0.3, -0.2, 0.0}, {0.3, -0.2, 0.0});
    CHECK(d.stretch == 0.0);
    CHECK(d.shear == 0.0);
    CHECK(d.rotation == 0.0);
    d = bond_deformation(f, {0.0, 0.0, 0.0}, {0.01, 0.0, 0.0});
    CHECK(d.stretch == doctest::Approx(0.005));
    const double w = 1e-3, l = 2.0;
    d = bond_deformation(f, {0.0, 0.0, w}, {0.0, -w * l, w});
    CHECK(std::abs(d.shear) <= 1e-18);
    CHECK(d.rotation == 0.0);
    const Mat36 bt = kinematic_matrix(l);
    Vec6 u;
    u << 0.0, 0.0, w, 0.0, -w * l, w;
    CHECK((bt * u).cwiseAbs().maxCoeff() <= 1e-18);
  }

  TEST_CASE("kinematics are frame invariant") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double xa = u(rng), ya = u(rng), xb = u(rng) + 2.5, yb = u(rng);
      const Vec3 ua(u(rng), u(rng), u(rng)), ub(u(rng), u(rng), u(rng));
      const auto d0 = bond_deformation(bond_frame(xa, ya, xb, yb), ua, ub);
      const double th = 3.0 * u(rng), c = std::cos(th), s = std::sin(th);
      auto rot = [&](double x, double y) { return std::pair{c * x - s * y, s * x + c * y}; };
      const auto [xa2, ya2] = rot(xa, ya);
      const auto [xb2, yb2] = rot(xb, yb);
      const auto [uax, uay] = rot(ua.x(), ua.y());
      const auto [ubx, uby] = rot(ub.x(), ub.y());
      const auto d1 = bond_deformation(bond_frame(xa2, ya2, xb2, yb2), {uax, uay, ua.z()}, {ubx, uby, ub.z()});
      CHECK(std::abs(d1.stretch - d0.stretch) <= 1e-12);
      CHECK(std::abs(d1.shear - d0.shear) <= 1e-12);
      CHECK(std::abs(d1.rotation - d0.rotation) <= 1e-12);
    }
  }

  TEST_CASE("spring factors by direct substitution") {
    auto f = stiffness_factors(unit_material(1.0 / 3.0), 1.0, 1.0);
    CHECK(f.c == doctest::Approx(9.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(std::abs(f.d) <= 1e-16);
    CHECK(std::abs(f.shear) <= 1e-15);
    CHECK(std::abs(f.rotational) <= 1e-15);

    f = stiffness_factors(unit_material(0.0), 1.0, 0.5);
    CHECK(f.c == doctest::Approx(6.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(f.d == doctest::Approx(1.0 / (6.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(f.normal == f.c);
    CHECK(f.shear == doctest::Approx(12.0 * f.d / 0.25));
    CHECK(f.rotational == doctest::Approx(f.d / 0.5));

    const auto half = stiffness_factors(unit_material(0.0), 0.5, 0.5);
    CHECK(half.c == doctest::Approx(8.0 * f.c));
    CHECK(half.d == doctest::Approx(2.0 * f.d));

    const auto strain = stiffness_factors(unit_material(0.2, PlaneMode::Strain), 1.0, 1.0);
    CHECK(strain.c == doctest::Approx(6.0 / (std::numbers::pi * 0.6 * 1.2)));
    CHECK(strain.d == doctest::Approx(0.2 / (6.0 * std::numbers::pi * 0.6 * 1.2)));
  }

  TEST_CASE("poisson ratios that make rotation stiffness negative are rejected") {
    CHECK_THROWS_AS(stiffness_factors(unit_material(0.34), 1.0, 1.0), ModelError);
    CHECK_THROWS_AS(stiffness_factors(unit_material(0.26, PlaneMode::Strain), 1.0, 1.0), ModelError);
    CHECK_THROWS_AS(unit_material(0.34).validate(), ConfigError);
    CHECK_THROWS_AS(unit_material(0.26, PlaneMode::Strain).validate(), ConfigError);
    CHECK_NOTHROW(unit_material(0.25, PlaneMode::Strain).validate());
  }

  TEST_CASE("length correction") {
    CHECK(length_correction(1.0, 1.0, 2.0, 1.0, 3.0) == 1.0);
    CHECK(length_correction(2.0, 1.0, 2.0, 1.0, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(length_correction(1.0, 1.0, 1.0, 1.0, 1.0) == 1.0);
    CHECK(length_correction(1.5, 1.5, 1.5, 1.0, 2.0) == doctest::Approx(0.5 * (1.0 + std::exp(-0.5))));
  }

  TEST_CASE("equal-length neighbourhoods get unit alpha") {
    auto pts = fixture::make_points({{0, 0, 1}, {1, 0, 1}, {2, 0, 1}});
    std::vector<Bond> bonds{{0, 1, 1.0, 1.5}, {1, 2, 1.0, 1.5}};
    assign_length_corrections(bonds, Adjacency(3, bonds));
    for (const auto& b : bonds) CHECK(b.alpha == 1.0);
  }

  TEST_CASE("element matrix is symmetric, positive semidefinite with three rigid modes") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      const auto bc = random_bond(rng);
      const Mat6 k = element_stiffness(bc);
      const double kmax = k.cwiseAbs().maxCoeff();
      CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * kmax);
      Eigen::SelfAdjointEigenSolver<Mat6> es(k);
      const auto ev = es.eigenvalues();
      int zeros = 0;
      for (int j = 0; j < 6; ++j) {
        CHECK(ev[j] >= -1e-12 * kmax);
        if (std::abs(ev[j]) <= 1e-10 * ev[5]) ++zeros;
      }
      CHECK(zeros == 3);
    }
  }

  TEST_CASE("element matrix reproduces the independent spring energy and its gradient") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
      const auto bc = random_bond(rng);
      const Mat6 k = element_stiffness(bc);
      const Vec6 u = random_state(rng, 1e-5);
      const double e = fixture::spring_energy(bc, u);
      CHECK(energy(bc, u) == doctest::Approx(e).epsilon(1e-12));
      CHECK(0.5 * u.dot(k * u) == doctest::Approx(e).epsilon(1e-10));
      const Vec6 ku = k * u;
      Vec6 fd;
      for (int j = 0; j < 6; ++j) {
        const double h = 1e-4 * std::max(std::abs(u[j]), 1e-6);
        Vec6 up = u, um = u;
        up[j] += h;
        um[j] -= h;
        fd[j] = (fixture::spring_energy(bc, up) - fixture::spring_energy(bc, um)) / (2.0 * h);
      }
      CHECK((fd - ku).norm() <= 1e-6 * ku.norm());
    }
  }

  TEST_CASE("rigid modes carry no force and prefactor scales linearly") {
    std::mt19937_64 rng(5);
    const auto bc = random_bond(rng);
    const Mat6 k = element_stiffness(bc);
    Vec6 t;
    t << 1.0, -2.0, 0.0, 1.0, -2.0, 0.0;
    CHECK((k * t).norm() <= 1e-12 * k.norm());
    auto doubled = bc;
    doubled.omega *= 2.0;
    CHECK((element_stiffness(doubled) - 2.0 * k).cwiseAbs().maxCoeff() <= 1e-15 * k.cwiseAbs().maxCoeff());
  }

  TEST_CASE("bond forces") {
    SpringFactors k;
    k.normal = 3.0;
    k.shear = 5.0;
    k.rotational = 7.0;
    const auto zero = bond_forces({}, k, 1.3, 0.7);
    CHECK(zero.normal == 0.0);
    CHECK(zero.shear == 0.0);
    CHECK(zero.moment == 0.0);
    const double s0 = 2e-4;
    CHECK(bond_forces({s0, 0, 0}, k, 1.3, 0.7).normal == doctest::Approx(1.3 * 0.7 * 3.0 * s0));
    const auto f1 = bond_forces({1e-3, 2e-3, 3e-3}, k, 1.0, 0.8);
    const auto f2 = bond_forces({1e-3, 2e-3, 3e-3}, k, 2.0, 0.8);
    CHECK(f2.normal == 2.0 * f1.normal);
    CHECK(f2.shear == 2.0 * f1.shear);
    CHECK(f2.moment == 2.0 * f1.moment);
  }

  TEST_CASE("bond energy of pure stretch, translation and scaling") {
    std::mt19937_64 rng(6);
    const auto bc0 = random_bond(rng);
    BondCoefficients bc = bc0;
    bc.frame = bond_frame(0, 0, bc0.frame.length, 0);
    const double delta = 3e-6, l = bc.frame.length;
    const double expect = 0.5 * bc.prefactor() * bc.springs.normal * delta * delta / l;
    CHECK(bond_energy(bc, {0, 0, 0}, {delta, 0, 0}) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(bond_energy(bc, {1e-3, 2e-3, 0}, {1e-3, 2e-3, 0}) == 0.0);
    const Vec6 u = random_state(rng, 1e-5);
    CHECK(energy(bc0, 2.0 * u) == doctest::Approx(4.0 * energy(bc0, u)).epsilon(1e-13));
  }
}
