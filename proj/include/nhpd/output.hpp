#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nhpd/correction.hpp"
#include "nhpd/model.hpp"
#include "nhpd/solver.hpp"

namespace nhpd {

/// Run parameters stamped into every output file.
struct Provenance {
  double lambda = 0.0;
  double strength = 0.0;  // F_t actually used [Pa]
  CorrectionMode mode = CorrectionMode::EnergyRatio;
  bool corrected = true;

  /// "lambda=3 Ft=3810000 correction=energy_ratio"
  std::string describe() const;
};

struct ExtraField {
  std::string name;
  std::vector<double> values;
};

/// Legacy VTK ASCII unstructured grid with one vertex cell per material
/// point and point data displacement, rotation, damage, volume, horizon,
/// followed by any extra scalars. `u` holds [ux, uy, m] per point.
void write_vtk(const std::filesystem::path& path, const Model& model, std::span<const double> u,
               std::span<const double> damage, const Provenance& prov, const std::string& label,
               const std::vector<ExtraField>& extra = {});

/// step,displacement,reaction,broken,energy,nr_iterations,break_rounds,max_damage
/// preceded by '#' comment lines.
void write_history_csv(const std::filesystem::path& path, const History& history, const Provenance& prov);

nlohmann::json correction_json(const CorrectionReport& report, const Model& model, const Provenance& prov);

void write_text(const std::filesystem::path& path, const std::string& content);
void ensure_directory(const std::filesystem::path& dir);

/// Mean omega over each point's bonds (1 for points without bonds).
std::vector<double> point_mean_omega(const Model& model);

}  // namespace nhpd
