#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "nhpd/config.hpp"
#include "nhpd/correction.hpp"
#include "nhpd/model.hpp"
#include "nhpd/output.hpp"
#include "nhpd/solver.hpp"

namespace nhpd {

struct PreparedModel {
  std::optional<Mesh> mesh;
  Model model;
};

/// Mesh (or inline points) to bonded model at the config's lambda and F_t.
/// Omega is still 1 and no critical stretches are assigned.
PreparedModel prepare_model(const RunConfig& config);

/// Material points of a named mesh group or inline point group.
std::vector<std::size_t> resolve_group(const PreparedModel& prepared, const RunConfig& config, std::string_view name);

LoadProgram make_program(const RunConfig& config, const PreparedModel& prepared);

kernels::Isa select_isa(const RunConfig& config);

/// Runs the correction when enabled; otherwise returns an empty converged
/// report.
CorrectionReport correct_model(Model& model, const RunConfig& config, kernels::Isa isa);

Provenance provenance(const RunConfig& config);

using ProgressFn = std::function<void(const StepRecord&)>;

struct RunResult {
  CorrectionReport correction;
  History history;
  std::size_t points = 0;
  std::size_t bonds = 0;
  double seconds = 0.0;  // whole pipeline, wall clock
};

/// Full pipeline with outputs in `dir`: effective_config.json,
/// correction.json, history.csv and field files. Solver errors end the run
/// with a partial history; setup errors propagate.
RunResult run_case(const RunConfig& config, const std::filesystem::path& dir, const ProgressFn& progress = {});

/// Same pipeline without writing anything.
RunResult simulate(const RunConfig& config, const ProgressFn& progress = {});

struct SweepRow {
  double lambda = 0.0;
  double strength = 0.0;
  std::size_t bonds = 0;
  double peak = 0.0;
  double normalized_peak = 0.0;
  double seconds = 0.0;
  bool completed = false;
};

/// One run per lambda in lambda_<value>/ plus summary.csv.
std::vector<SweepRow> run_sweep(const RunConfig& config, const std::filesystem::path& dir,
                                const ProgressFn& progress = {});

/// Config for one sweep member: lambda set, F_t adjusted when requested.
RunConfig sweep_member(const RunConfig& config, double lambda);

}  // namespace nhpd
