#include "nhpd/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nhpd {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void scalar_block(std::ostream& os, const std::string& name, std::span<const double> values) {
  os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : values) os << num(v) << '\n';
}

}  // namespace

std::string Provenance::describe() const {
  std::ostringstream os;
  os << "lambda=" << num(lambda) << " Ft=" << num(strength) << " correction=" << (corrected ? to_string(mode) : "off");
  return os.str();
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void write_vtk(const std::filesystem::path& path, const Model& model, std::span<const double> u,
               std::span<const double> damage, const Provenance& prov, const std::string& label,
               const std::vector<ExtraField>& extra) {
  const std::size_t n = model.points.size();
  if (u.size() != 3 * n || damage.size() != n) throw IoError("field arrays do not match the model size");
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n";
  std::string title = "nhpd " + prov.describe() + " " + label;
  if (title.size() > 255) title.resize(255);
  os << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (const auto& p : model.points) os << num(p.x) << ' ' << num(p.y) << " 0\n";
  os << "CELLS " << n << ' ' << 2 * n << '\n';
  for (std::size_t i = 0; i < n; ++i) os << "1 " << i << '\n';
  os << "CELL_TYPES " << n << '\n';
  for (std::size_t i = 0; i < n; ++i) os << "1\n";
  os << "POINT_DATA " << n << '\n';
  os << "VECTORS displacement double\n";
  for (std::size_t i = 0; i < n; ++i) os << num(u[3 * i]) << ' ' << num(u[3 * i + 1]) << " 0\n";
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = u[3 * i + 2];
  scalar_block(os, "rotation", buf);
  scalar_block(os, "damage", damage);
  for (std::size_t i = 0; i < n; ++i) buf[i] = model.points[i].volume;
  scalar_block(os, "volume", buf);
  for (std::size_t i = 0; i < n; ++i) buf[i] = model.points[i].horizon;
  scalar_block(os, "horizon", buf);
  for (const auto& f : extra) {
    if (f.values.size() != n) throw IoError("extra field " + f.name + " does not match the model size");
    scalar_block(os, f.name, f.values);
  }
  write_text(path, os.str());
}

void write_history_csv(const std::filesystem::path& path, const History& history, const Provenance& prov) {
  std::ostringstream os;
  os << "# " << prov.describe() << '\n';
  if (!history.completed) os << "# incomplete: " << history.error << '\n';
  for (const auto& w : history.warnings) os << "# warning: " << w << '\n';
  os << "step,displacement,reaction,broken,energy,nr_iterations,break_rounds,max_damage\n";
  for (const auto& s : history.steps) {
    const double dmax = s.damage.empty() ? 0.0 : *std::max_element(s.damage.begin(), s.damage.end());
    os << s.step << ',' << num(s.displacement) << ',' << num(s.reaction) << ',' << s.broken << ',' << num(s.energy)
       << ',' << s.nr_iterations << ',' << s.break_rounds << ',' << num(dmax) << '\n';
  }
  write_text(path, os.str());
}

std::vector<double> point_mean_omega(const Model& model) {
  std::vector<double> out(model.points.size(), 1.0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto inc = model.adjacency.incident(p);
    if (inc.empty()) continue;
    double sum = 0.0;
    for (auto k : inc) sum += model.bonds[k].omega;
    out[p] = sum / static_cast<double>(inc.size());
  }
  return out;
}

nlohmann::json correction_json(const CorrectionReport& report, const Model& model, const Provenance& prov) {
  nlohmann::json j;
  j["provenance"] = prov.describe();
  j["lambda"] = prov.lambda;
  j["Ft"] = prov.strength;
  j["mode"] = prov.corrected ? to_string(prov.mode) : "off";
  j["points"] = model.points.size();
  j["bonds"] = model.bonds.size();
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["residuals"] = report.residuals;
  j["final_residual"] = report.residuals.empty() ? 0.0 : report.residuals.back();
  j["omega_min"] = report.min_omega;
  j["omega_max"] = report.max_omega;
  return j;
}

}  // namespace nhpd
