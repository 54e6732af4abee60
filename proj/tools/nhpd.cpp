#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <numeric>

#include "nhpd/damage.hpp"
#include "nhpd/scenario.hpp"

namespace {

using namespace nhpd;

struct Options {
  std::string config;
  std::string out;
  bool quiet = false;
};

ProgressFn reporter(const Options& o) {
  if (o.quiet) return {};
  return [](const StepRecord& r) {
    std::fprintf(stderr, "step %5zu  u %-12.5g F %-12.6g broken %-7zu rounds %-5zu nr %zu\n", r.step, r.displacement, r.reaction,
                 r.broken, r.break_rounds, r.nr_iterations);
  };
}

RunConfig load(const Options& o) {
  RunConfig c = load_config(o.config);
  if (!o.out.empty()) c.output.directory = o.out;
  return c;
}

int cmd_info(const Options& o) {
  const RunConfig c = load(o);
  const PreparedModel prep = prepare_model(c);
  const Model& m = prep.model;
  if (prep.mesh) {
    std::printf("mesh            %s\n", c.mesh->string().c_str());
    std::printf("nodes           %zu\n", prep.mesh->nodes.size());
    std::printf("triangles       %zu\n", prep.mesh->triangles.size());
    std::printf("area            %.6g m^2\n", prep.mesh->total_area());
    for (const auto& g : prep.mesh->groups)
      std::printf("group           %s (dim %d, %zu nodes)\n", g.name.c_str(), g.dimension, g.nodes.size());
  }
  double hmin = 0, hmax = 0, hsum = 0, vsum = 0;
  if (!m.points.empty()) hmin = hmax = m.points[0].horizon;
  for (const auto& p : m.points) {
    hmin = std::min(hmin, p.horizon);
    hmax = std::max(hmax, p.horizon);
    hsum += p.horizon;
    vsum += p.volume;
  }
  std::printf("points          %zu\n", m.points.size());
  std::printf("volume          %.6g m^3\n", vsum);
  std::printf("lambda          %g\n", c.lambda);
  std::printf("horizon         min %.6g  mean %.6g  max %.6g m\n", hmin, m.points.empty() ? 0.0 : hsum / m.points.size(), hmax);
  std::printf("bonds           %zu\n", m.bonds.size());
  std::printf("bonds/point     %.3f\n", m.points.empty() ? 0.0 : 2.0 * m.bonds.size() / m.points.size());
  std::printf("slot bonds cut  %zu\n", m.slot_bonds_removed);
  std::printf("isolated points %zu\n", m.isolated.size());
  std::printf("simd            %s\n", kernels::isa_name(select_isa(c)));
  std::printf("bond count vs lambda:\n");
  for (double l : {1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
    RunConfig v = c;
    v.lambda = l;
    std::printf("  %-4g %zu\n", l, prepare_model(v).model.bonds.size());
  }
  return 0;
}

int cmd_correct(const Options& o) {
  const RunConfig c = load(o);
  PreparedModel prep = prepare_model(c);
  const Provenance prov = provenance(c);
  const auto dir = c.output.directory;
  ensure_directory(dir);
  write_text(dir / "effective_config.json", to_json(c).dump(2) + "\n");
  CorrectionReport r;
  try {
    r = correct_model(prep.model, c, select_isa(c));
  } catch (const CorrectionError& e) {
    CorrectionReport failed;
    failed.residuals = e.residuals();
    failed.iterations = failed.residuals.size();
    write_text(dir / "correction.json", correction_json(failed, prep.model, prov).dump(2) + "\n");
    throw;
  }
  write_text(dir / "correction.json", correction_json(r, prep.model, prov).dump(2) + "\n");
  const std::vector<double> u(3 * prep.model.points.size(), 0.0);
  write_vtk(dir / "correction.vtk", prep.model, u, damage_field(prep.model), prov, "correction",
            {{"omega_mean", point_mean_omega(prep.model)}});
  std::printf("%s\n", prov.describe().c_str());
  for (std::size_t i = 0; i < r.residuals.size(); ++i) std::printf("pass %3zu  residual %.6e\n", i + 1, r.residuals[i]);
  std::printf("converged %s after %zu passes; omega in [%.6g, %.6g]\n", r.converged ? "yes" : "no", r.iterations,
              r.min_omega, r.max_omega);
  std::printf("wrote %s\n", (dir / "correction.json").string().c_str());
  return 0;
}

int finish(const History& h) {
  for (const auto& w : h.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!h.completed) {
    std::fprintf(stderr, "error (%s): %s\n", category_name(*h.error_category), h.error.c_str());
    return static_cast<int>(*h.error_category);
  }
  return 0;
}

int cmd_run(const Options& o) {
  const RunConfig c = load(o);
  const RunResult r = run_case(c, c.output.directory, reporter(o));
  std::printf("%s\n", provenance(c).describe().c_str());
  std::printf("points %zu  bonds %zu  correction passes %zu\n", r.points, r.bonds, r.correction.iterations);
  std::printf("steps %zu  broken %zu  peak reaction %.6g  (%.2f s)\n", r.history.steps.size(),
              r.history.steps.empty() ? 0 : r.history.steps.back().broken, r.history.peak_reaction(), r.seconds);
  std::printf("wrote %s\n", (c.output.directory / "history.csv").string().c_str());
  return finish(r.history);
}

int cmd_sweep(const Options& o) {
  const RunConfig c = load(o);
  const auto rows = run_sweep(c, c.output.directory, reporter(o));
  std::printf("%-8s %-12s %-10s %-14s %-10s %s\n", "lambda", "Ft", "bonds", "peak", "peak/ref", "seconds");
  int code = 0;
  for (const auto& r : rows) {
    std::printf("%-8g %-12.6g %-10zu %-14.6g %-10.4f %.2f%s\n", r.lambda, r.strength, r.bonds, r.peak,
                r.normalized_peak, r.seconds, r.completed ? "" : "  (incomplete)");
    if (!r.completed) code = static_cast<int>(ErrorCategory::Solver);
  }
  std::printf("wrote %s\n", (c.output.directory / "summary.csv").string().c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-uniform horizon micropolar peridynamics"};
  app.require_subcommand(1);
  Options opt;
  const auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON run configuration")->required();
    sub->add_option("--out", opt.out, "output directory (overrides output.directory)");
    sub->add_flag("--quiet", opt.quiet, "no per-step progress on stderr");
    return sub;
  };
  auto* info = add("info", "mesh and bond statistics");
  auto* correct = add("correct", "run the domain correction only");
  auto* run = add("run", "full quasi-static simulation");
  auto* sweep = add("sweep", "repeat run over sweep.lambdas");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::Config);
  }
  try {
    if (info->parsed()) return cmd_info(opt);
    if (correct->parsed()) return cmd_correct(opt);
    if (run->parsed()) return cmd_run(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", category_name(e.category()), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
