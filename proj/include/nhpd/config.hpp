#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhpd/correction.hpp"
#include "nhpd/horizon.hpp"
#include "nhpd/material.hpp"
#include "nhpd/mesh.hpp"
#include "nhpd/solver.hpp"

namespace nhpd {

struct BoundarySpec {
  std::string group;
  Dof dof = Dof::Ux;
  Schedule value;
};

struct LoadSpec {
  std::string group;
  Dof dof = Dof::Uy;
  Schedule total;
};

struct ProgramSpec {
  std::size_t steps = 1;
  std::size_t break_batch = 10;
  double tolerance = 1e-4;
  std::size_t max_nr_iterations = 50;
  std::size_t max_break_rounds = 10000;
  std::string monitor_group;
  Dof monitor_dof = Dof::Uy;
  double stop_below_peak_fraction = 0.0;
};

struct OutputSpec {
  std::filesystem::path directory = "out";
  bool fields = true;
  std::size_t every = 0;  // field file every n steps; 0 writes the last step only
};

struct SweepSpec {
  std::vector<double> lambdas;
  bool adjust_strength = true;
  /// Horizon factor at which material.Ft applies when adjusting.
  double reference_lambda = 3.0;
  /// Per unit thickness [N/m]; normalizes peak loads in the summary.
  double reference_peak = 598.47e3;
};

struct RunConfig {
  std::filesystem::path source;  // config file, empty for in-memory configs
  std::optional<std::filesystem::path> mesh;
  /// Inline material points (x, y, volume) used instead of a mesh.
  std::vector<std::array<double, 3>> points;
  /// Named point sets for inline points.
  std::map<std::string, std::vector<std::size_t>> point_groups;
  Material material;
  double lambda = 3.0;
  bool correct = true;
  CorrectionSettings correction;
  std::vector<Segment> slots;
  std::vector<BoundarySpec> boundary;
  std::vector<LoadSpec> loads;
  ProgramSpec program;
  OutputSpec output;
  SweepSpec sweep;
  std::string simd = "auto";
};

/// Reads and validates a JSON config. Relative paths resolve against the
/// config file's directory. Groups named in boundary, loads and monitor must
/// exist in the mesh.
RunConfig load_config(const std::filesystem::path& path);

/// Same, from already-parsed JSON; `base` resolves relative paths.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base);

/// Field checks that do not need the mesh.
void validate(const RunConfig& config);

/// Groups referenced by the config must exist in the mesh.
void check_groups(const RunConfig& config, const Mesh& mesh);

/// Every field with defaults filled in. parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

/// F_t for horizon factor lambda such that the fitted strength law
/// F_t^eq / F_t = (3 lambda - 1) / 8 gives the same equivalent strength as
/// `strength` at `reference_lambda`.
double adjusted_strength(double strength, double lambda, double reference_lambda);

}  // namespace nhpd
