#include <doctest.h>

#include "nhpd/correction.hpp"
#include "nhpd/errors.hpp"
#include "nhpd/model.hpp"
#include "support.hpp"

using namespace nhpd;

namespace {

/// Small models have a large boundary share and need more passes than the
/// default cap to reach the summed tolerance.
CorrectionSettings patient() {
  CorrectionSettings s;
  s.max_iterations = 1000;
  return s;
}

Model pair_model(double va, double vb) {
  return build_model(fixture::make_points({{0.0, 0.0, va}, {0.01, 0.0, vb}}), fixture::concrete(), {});
}

Model lattice(int n, double spacing, double lambda) {
  std::vector<std::array<double, 3>> xyv;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) xyv.push_back({i * spacing, j * spacing, spacing * spacing});
  ModelOptions opt;
  opt.lambda = lambda;
  return build_model(fixture::make_points(xyv), fixture::concrete(), opt);
}

}  // namespace

TEST_SUITE("correction") {
  TEST_CASE("target density by direct substitution") {
    Material m = fixture::concrete();
    m.youngs_modulus = 1.0;
    m.poisson_ratio = 0.0;
    CHECK(target_energy_density(m, 1.0) == 0.5);
    CHECK(target_energy_density(fixture::concrete(), 1e-3) == doctest::Approx(15625.0).epsilon(1e-14));
    CHECK(target_energy_density(m, 2.0) == 4.0 * target_energy_density(m, 1.0));
    const Material strain = fixture::concrete(PlaneMode::Strain);
    CHECK(target_energy_density(strain, 1e-3) ==
          doctest::Approx(30e9 * 0.8 * 1e-6 / (2.0 * 1.2 * 0.6)).epsilon(1e-14));
  }

  TEST_CASE("trial density of a single axial bond") {
    Model m = pair_model(2e-5, 3e-5);
    REQUIRE(m.bonds.size() == 1);
    const auto& b = m.bonds[0];
    const double eps = 1e-3;
    const double expect = 0.25 * b.omega * b.alpha * 3e-5 * m.springs[0].normal * b.length * eps * eps;
    CHECK(trial_energy_density(m, 0, Probe::X, eps) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(trial_energy_density(m, 0, Probe::Y, eps) == doctest::Approx(0.0));
    const auto d = trial_energy_densities(m, eps, kernels::Isa::Scalar);
    CHECK(d.x[0] == doctest::Approx(expect).epsilon(1e-13));
    CHECK(d.x[1] == doctest::Approx(expect * 2e-5 / 3e-5).epsilon(1e-13));
    m.bonds[0].omega = 2.0;
    CHECK(trial_energy_density(m, 0, Probe::X, eps) == doctest::Approx(2.0 * expect).epsilon(1e-13));
  }

  TEST_CASE("point without bonds has zero trial density") {
    ModelOptions opt;
    opt.slots = {{{0.005, -1.0}, {0.005, 1.0}}};
    Model m = build_model(fixture::make_points({{0.0, 0.0, 1e-5}, {0.01, 0.0, 1e-5}}), fixture::concrete(), opt);
    REQUIRE(m.isolated == std::vector<std::size_t>{0, 1});
    CHECK(trial_energy_density(m, 0, Probe::X, 1e-3) == 0.0);
    CHECK(trial_energy_densities(m, 1e-3).y[1] == 0.0);
  }

  TEST_CASE("kernel densities equal the element-matrix reference") {
    const Model m = build_model(fixture::jittered_mesh(12, 10, 0.06, 0.05, 0.3, 9), fixture::concrete(), {});
    for (auto isa : {kernels::Isa::Scalar, kernels::default_isa()}) {
      const auto d = trial_energy_densities(m, 1e-3, isa);
      for (std::size_t p = 0; p < m.points.size(); ++p) {
        CHECK(d.x[p] == doctest::Approx(trial_energy_density(m, p, Probe::X, 1e-3)).epsilon(1e-11));
        CHECK(d.y[p] == doctest::Approx(trial_energy_density(m, p, Probe::Y, 1e-3)).epsilon(1e-11));
      }
    }
  }

  TEST_CASE("a pass leaves an exact bond alone and halves a doubled one") {
    CorrectionSettings s;
    Model m = pair_model(2e-5, 2e-5);
    const double target = target_energy_density(m.material, s.probe_strain);
    m.bonds[0].omega = target / trial_energy_density(m, 0, Probe::X, s.probe_strain);
    const double exact = m.bonds[0].omega;
    CHECK(correction_pass(m, s) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.bonds[0].omega == doctest::Approx(exact).epsilon(1e-14));
    m.bonds[0].omega = 2.0 * exact;
    correction_pass(m, s);
    CHECK(m.bonds[0].omega == doctest::Approx(exact).epsilon(1e-14));
  }

  TEST_CASE("single bond reaches its fixed point within two passes") {
    Model m = pair_model(1e-5, 4e-5);
    CorrectionSettings s;
    const auto report = run_correction(m, s);
    CHECK(report.converged);
    CHECK(report.iterations <= 2);
    CHECK(report.residuals.back() < s.tolerance);
  }

  TEST_CASE("patch test on a regular lattice") {
    Model m = lattice(31, 1e-3, 3.0);
    const CorrectionSettings s = patient();
    const auto report = run_correction(m, s);
    CHECK(report.converged);
    CHECK(report.min_omega > 0.0);
    const double target = target_energy_density(m.material, s.probe_strain);
    const auto d = trial_energy_densities(m, s.probe_strain);
    for (std::size_t p = 0; p < m.points.size(); ++p) {
      CHECK(std::abs(d.x[p] / target - 1.0) < 0.02);
      CHECK(std::abs(d.y[p] / target - 1.0) < 0.02);
    }
  }

  TEST_CASE("omega stays positive and the stop freezes the last pass") {
    Model m = build_model(fixture::jittered_mesh(14, 14, 0.05, 0.05, 0.35, 3), fixture::concrete(), {});
    Model manual = m;
    const CorrectionSettings s = patient();
    const auto report = run_correction(m, s);
    REQUIRE(report.converged);
    for (std::size_t j = 0; j < report.iterations; ++j) {
      const double r = correction_pass(manual, s);
      CHECK(r == report.residuals[j]);
      for (const auto& b : manual.bonds) CHECK(b.omega > 0.0);
    }
    for (std::size_t k = 0; k < m.bonds.size(); ++k) CHECK(manual.bonds[k].omega == m.bonds[k].omega);
    CHECK(report.residuals.back() < s.tolerance);
    CHECK(report.residuals[report.residuals.size() - 2] >= s.tolerance);
  }

  TEST_CASE("converged factors do not depend on the probe strain") {
    Model a = build_model(fixture::jittered_mesh(10, 10, 0.05, 0.05, 0.3, 5), fixture::concrete(), {});
    Model b = a;
    CorrectionSettings s = patient();
    s.tolerance = 1e-9;
    run_correction(a, s);
    s.probe_strain = 1e-6;
    run_correction(b, s);
    for (std::size_t k = 0; k < a.bonds.size(); ++k) CHECK(a.bonds[k].omega == doctest::Approx(b.bonds[k].omega).epsilon(1e-8));
  }

  TEST_CASE("iteration cap raises a correction error carrying the residuals") {
    Model m = build_model(fixture::jittered_mesh(10, 10, 0.05, 0.05, 0.3, 5), fixture::concrete(), {});
    CorrectionSettings s;
    s.max_iterations = 3;
    try {
      run_correction(m, s);
      FAIL("expected CorrectionError");
    } catch (const CorrectionError& e) {
      CHECK(e.residuals().size() == 3);
      CHECK(e.exit_code() == static_cast<int>(ErrorCategory::Correction));
    }
  }

  TEST_CASE("literal mode uses the probe strain as numerator") {
    Model m = pair_model(2e-5, 2e-5);
    CorrectionSettings s;
    s.mode = CorrectionMode::LiteralStrainRatio;
    const double e = trial_energy_density(m, 0, Probe::X, s.probe_strain);
    correction_pass(m, s);
    CHECK(m.bonds[0].omega == doctest::Approx(s.probe_strain / e).epsilon(1e-13));
    CHECK(parse_correction_mode("literal") == CorrectionMode::LiteralStrainRatio);
    CHECK(parse_correction_mode("energy_ratio") == CorrectionMode::EnergyRatio);
    CHECK_THROWS_AS(parse_correction_mode("bogus"), ConfigError);
  }

  TEST_CASE("invalid settings") {
    CorrectionSettings s;
    s.probe_strain = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.tolerance = -1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.max_iterations = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
  }
}
