#include "nhpd/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "nhpd/damage.hpp"

namespace nhpd {
namespace {

std::string step_label(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "field_%05zu.vtk", step);
  return buf;
}

std::string lambda_dir(double lambda) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "lambda_%g", lambda);
  return buf;
}

RunResult execute(const RunConfig& config, const std::filesystem::path* dir, const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  const kernels::Isa isa = select_isa(config);
  PreparedModel prepared = prepare_model(config);
  Model& model = prepared.model;
  const Provenance prov = provenance(config);
  if (dir) {
    ensure_directory(*dir);
    write_text(*dir / "effective_config.json", to_json(config).dump(2) + "\n");
  }
  RunResult result;
  result.points = model.points.size();
  result.bonds = model.bonds.size();
  try {
    result.correction = correct_model(model, config, isa);
  } catch (const CorrectionError& e) {
    if (dir) {
      CorrectionReport failed;
      failed.residuals = e.residuals();
      failed.iterations = failed.residuals.size();
      write_text(*dir / "correction.json", correction_json(failed, model, prov).dump(2) + "\n");
    }
    throw;
  }
  if (dir) write_text(*dir / "correction.json", correction_json(result.correction, model, prov).dump(2) + "\n");
  assign_critical_stretches(model);

  QuasiStaticSolver solver(model, make_program(config, prepared), isa);
  std::size_t last_written = 0;
  const auto on_step = [&](const StepRecord& rec, const QuasiStaticSolver& s) {
    if (progress) progress(rec);
    if (dir && config.output.fields && config.output.every > 0 && rec.step % config.output.every == 0) {
      const auto& u = s.displacement();
      write_vtk(*dir / step_label(rec.step), s.model(), {u.data(), static_cast<std::size_t>(u.size())}, rec.damage,
                prov, "step=" + std::to_string(rec.step));
      last_written = rec.step;
    }
  };
  result.history = solver.run(on_step);
  if (dir) {
    write_history_csv(*dir / "history.csv", result.history, prov);
    if (config.output.fields && !result.history.steps.empty() && result.history.steps.back().step != last_written) {
      const auto& rec = result.history.steps.back();
      const auto& u = solver.displacement();
      write_vtk(*dir / step_label(rec.step), model, {u.data(), static_cast<std::size_t>(u.size())}, rec.damage, prov,
                "step=" + std::to_string(rec.step));
    }
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

PreparedModel prepare_model(const RunConfig& config) {
  validate(config);
  ModelOptions opts;
  opts.lambda = config.lambda;
  opts.slots = config.slots;
  PreparedModel out;
  if (config.mesh) {
    out.mesh = read_msh(*config.mesh);
    check_groups(config, *out.mesh);
    out.model = build_model(*out.mesh, config.material, opts);
  } else {
    std::vector<MaterialPoint> pts;
    pts.reserve(config.points.size());
    for (std::size_t i = 0; i < config.points.size(); ++i) {
      MaterialPoint p;
      p.node = i;
      p.x = config.points[i][0];
      p.y = config.points[i][1];
      p.volume = config.points[i][2];
      pts.push_back(p);
    }
    out.model = build_model(std::move(pts), config.material, opts);
  }
  return out;
}

std::vector<std::size_t> resolve_group(const PreparedModel& prepared, const RunConfig& config, std::string_view name) {
  if (prepared.mesh) return group_points(*prepared.mesh, prepared.model, name);
  const auto it = config.point_groups.find(std::string(name));
  if (it == config.point_groups.end()) throw ConfigError("group", "unknown point group \"" + std::string(name) + "\"");
  return it->second;
}

LoadProgram make_program(const RunConfig& config, const PreparedModel& prepared) {
  LoadProgram p;
  const auto& ps = config.program;
  p.steps = ps.steps;
  p.break_batch = ps.break_batch;
  p.energy_tolerance = ps.tolerance;
  p.max_nr_iterations = ps.max_nr_iterations;
  p.max_break_rounds = ps.max_break_rounds;
  p.stop_below_peak_fraction = ps.stop_below_peak_fraction;
  for (const auto& b : config.boundary)
    p.displacements.push_back({b.group, resolve_group(prepared, config, b.group), b.dof, b.value});
  for (const auto& l : config.loads) p.forces.push_back({l.group, resolve_group(prepared, config, l.group), l.dof, l.total});
  if (!ps.monitor_group.empty())
    p.monitor = {ps.monitor_group, resolve_group(prepared, config, ps.monitor_group), ps.monitor_dof};
  return p;
}

kernels::Isa select_isa(const RunConfig& config) {
  if (config.simd == "scalar") return kernels::Isa::Scalar;
  if (config.simd == "avx2") {
    if (!kernels::isa_available(kernels::Isa::Avx2)) throw ConfigError("simd", "AVX2 kernels are not available on this machine");
    return kernels::Isa::Avx2;
  }
  return kernels::default_isa();
}

CorrectionReport correct_model(Model& model, const RunConfig& config, kernels::Isa isa) {
  if (config.correct) return run_correction(model, config.correction, isa);
  CorrectionReport r;
  r.converged = true;
  r.min_omega = r.max_omega = 1.0;
  return r;
}

Provenance provenance(const RunConfig& config) {
  return {config.lambda, config.material.tensile_strength, config.correction.mode, config.correct};
}

RunResult run_case(const RunConfig& config, const std::filesystem::path& dir, const ProgressFn& progress) {
  return execute(config, &dir, progress);
}

RunResult simulate(const RunConfig& config, const ProgressFn& progress) { return execute(config, nullptr, progress); }

RunConfig sweep_member(const RunConfig& config, double lambda) {
  RunConfig c = config;
  c.lambda = lambda;
  if (config.sweep.adjust_strength)
    c.material.tensile_strength = adjusted_strength(config.material.tensile_strength, lambda, config.sweep.reference_lambda);
  return c;
}

std::vector<SweepRow> run_sweep(const RunConfig& config, const std::filesystem::path& dir, const ProgressFn& progress) {
  if (config.sweep.lambdas.empty()) throw ConfigError("sweep.lambdas", "no horizon factors to sweep");
  ensure_directory(dir);
  std::vector<SweepRow> rows;
  std::ostringstream csv;
  csv << "# sweep adjust_strength=" << (config.sweep.adjust_strength ? "true" : "false")
      << " reference_lambda=" << config.sweep.reference_lambda << " reference_Ft=" << config.material.tensile_strength
      << " correction=" << (config.correct ? to_string(config.correction.mode) : "off") << '\n';
  csv << "lambda,Ft,bonds,peak,normalized_peak,seconds,completed\n";
  for (double lambda : config.sweep.lambdas) {
    const RunConfig member = sweep_member(config, lambda);
    const RunResult r = run_case(member, dir / lambda_dir(lambda), progress);
    SweepRow row;
    row.lambda = lambda;
    row.strength = member.material.tensile_strength;
    row.bonds = r.bonds;
    row.peak = r.history.peak_reaction();
    row.normalized_peak = row.peak / config.sweep.reference_peak;
    row.seconds = r.seconds;
    row.completed = r.history.completed;
    rows.push_back(row);
    char line[256];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%zu,%.17g,%.17g,%.3f,%s\n", row.lambda, row.strength, row.bonds,
                  row.peak, row.normalized_peak, row.seconds, row.completed ? "true" : "false");
    csv << line;
  }
  write_text(dir / "summary.csv", csv.str());
  return rows;
}

}  // namespace nhpd
