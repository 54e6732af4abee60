#include <doctest.h>

#include <random>

#include "nhpd/damage.hpp"
#include "nhpd/errors.hpp"
#include "nhpd/model.hpp"
#include "support.hpp"

using namespace nhpd;

namespace {

BondCoefficients sample_bond(double va, double vb) {
  BondCoefficients bc;
  bc.frame = bond_frame(0.0, 0.0, 0.004, 0.003);
  bc.springs = stiffness_factors(fixture::concrete(), 0.01, bc.frame.length);
  bc.omega = 1.7;
  bc.alpha = 0.8;
  bc.volume_a = va;
  bc.volume_b = vb;
  return bc;
}

}  // namespace

TEST_SUITE("damage") {
  TEST_CASE("critical energy density") {
    Material m = fixture::concrete();
    m.youngs_modulus = 1.0;
    m.poisson_ratio = 0.0;
    m.tensile_strength = 1.0;
    CHECK(critical_energy_density(m) == 0.5);
    const double e0 = critical_energy_density(fixture::concrete());
    CHECK(e0 == doctest::Approx(3.81e6 * 3.81e6 / (2.0 * 30e9 * 0.96)).epsilon(1e-14));
    CHECK(e0 == doctest::Approx(252.0).epsilon(1e-3));
    Material twice = fixture::concrete();
    twice.tensile_strength *= 2.0;
    CHECK(critical_energy_density(twice) == doctest::Approx(4.0 * e0).epsilon(1e-14));
  }

  TEST_CASE("critical stretch") {
    const double e0 = 252.0;
    const auto sym = sample_bond(2e-5, 2e-5);
    const double v = 2e-5;
    CHECK(critical_stretch(sym, e0) ==
          doctest::Approx(std::sqrt(2.0 * e0 / (sym.omega * sym.alpha * v * sym.springs.c * sym.frame.length)))
              .epsilon(1e-14));
    CHECK(critical_stretch(sym, 4.0 * e0) == doctest::Approx(2.0 * critical_stretch(sym, e0)).epsilon(1e-14));

    const auto ab = sample_bond(1e-5, 3e-5);
    const auto ba = sample_bond(3e-5, 1e-5);
    CHECK(critical_stretch(ab, e0) == critical_stretch(ba, e0));

    const double s0 = critical_stretch(ab, e0);
    CHECK(bond_energy_dedication(ab, s0) == doctest::Approx(e0).epsilon(1e-10));
    CHECK(bond_energy_dedication(ba, s0) == doctest::Approx(e0).epsilon(1e-10));

    auto bad = ab;
    bad.omega = 0.0;
    CHECK_THROWS_AS(critical_stretch(bad, e0), ModelError);
  }

  TEST_CASE("breakage margin") {
    const double s0 = 1.5e-4;
    CHECK(breakage_margin(0.0, s0) == -s0);
    CHECK(breakage_margin(s0, s0) == 0.0);
    for (double s : {-1.0, -1e-3, -1e-9}) CHECK(breakage_margin(s, s0) < 0.0);
  }

  TEST_CASE("point damage weights by omega times alpha") {
    Model m = build_model(fixture::make_points({{0.0, 0.0, 1e-5}, {0.01, 0.0, 1e-5}, {0.0, 0.012, 1e-5}}),
                          fixture::concrete(), {});
    REQUIRE(m.bonds.size() == 3);
    CHECK(point_damage(m, 0) == 0.0);
    // Bonds 0-1 and 0-2 are the two incident bonds of point 0.
    std::size_t b01 = 0, b02 = 0;
    for (std::size_t k = 0; k < m.bonds.size(); ++k) {
      if (m.bonds[k].a == 0 && m.bonds[k].b == 1) b01 = k;
      if (m.bonds[k].a == 0 && m.bonds[k].b == 2) b02 = k;
    }
    m.bonds[b01].omega = 2.0;
    m.bonds[b01].alpha = 1.0;
    m.bonds[b02].omega = 1.0;
    m.bonds[b02].alpha = 1.0;
    m.bonds[b01].broken = true;
    CHECK(point_damage(m, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    for (auto& b : m.bonds) b.broken = true;
    for (double phi : damage_field(m)) CHECK(phi == 1.0);
  }

  TEST_CASE("assigned critical stretches match the per-bond formula") {
    Model m = build_model(fixture::jittered_mesh(6, 6, 0.03, 0.03, 0.3, 2), fixture::concrete(), {});
    for (auto& b : m.bonds) b.omega = 1.3;
    assign_critical_stretches(m);
    const double e0 = critical_energy_density(m.material);
    for (std::size_t k = 0; k < m.bonds.size(); ++k) {
      CHECK(m.bonds[k].critical_stretch > 0.0);
      CHECK(m.bonds[k].critical_stretch == critical_stretch(m.coefficients(k), e0));
    }
  }
}
