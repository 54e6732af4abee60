#pragma once

// Brute-force oracles and small fixtures shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nhpd/bond_mechanics.hpp"
#include "nhpd/config.hpp"
#include "nhpd/damage.hpp"
#include "nhpd/horizon.hpp"
#include "nhpd/mesh.hpp"
#include "nhpd/model.hpp"

namespace fixture {

inline std::filesystem::path data_dir() { return NHPD_DATA_DIR; }
inline std::filesystem::path mesh_path(const std::string& name) { return data_dir() / "meshes" / name; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nhpd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline nhpd::Material concrete(nhpd::PlaneMode plane = nhpd::PlaneMode::Stress) {
  nhpd::Material m;
  m.youngs_modulus = 30e9;
  m.poisson_ratio = 0.2;
  m.tensile_strength = 3.81e6;
  m.thickness = 1.0;
  m.plane = plane;
  return m;
}

inline std::vector<nhpd::MaterialPoint> make_points(const std::vector<std::array<double, 3>>& xyv) {
  std::vector<nhpd::MaterialPoint> pts;
  for (std::size_t i = 0; i < xyv.size(); ++i) {
    nhpd::MaterialPoint p;
    p.node = i;
    p.x = xyv[i][0];
    p.y = xyv[i][1];
    p.volume = xyv[i][2];
    pts.push_back(p);
  }
  return pts;
}

/// Structured (nx+1) x (ny+1) grid over [0, w] x [0, h], interior nodes
/// jittered by up to `jitter` of a cell, split into triangles along a random
/// diagonal. Groups: bottom, right, top, left (dim 1), domain (dim 2).
inline nhpd::Mesh jittered_mesh(int nx, int ny, double w, double h, double jitter, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nhpd::Mesh m;
  const double dx = w / nx, dy = h / ny;
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(j * (nx + 1) + i); };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      double x = i * dx, y = j * dy;
      if (i > 0 && i < nx) x += jitter * dx * u(rng);
      if (j > 0 && j < ny) y += jitter * dy * u(rng);
      m.nodes.push_back({static_cast<std::int64_t>(idx(i, j) + 1), x, y});
    }
  std::int64_t eid = 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
      if (rng() & 1u) {
        m.triangles.push_back({eid++, {a, b, c}});
        m.triangles.push_back({eid++, {a, c, d}});
      } else {
        m.triangles.push_back({eid++, {a, b, d}});
        m.triangles.push_back({eid++, {b, c, d}});
      }
    }
  m.referenced.assign(m.nodes.size(), true);
  auto edge = [&](const char* name, int tag, auto pred) {
    nhpd::PhysicalGroup g{1, tag, name, {}};
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        if (pred(i, j)) g.nodes.push_back(idx(i, j));
    std::sort(g.nodes.begin(), g.nodes.end());
    m.groups.push_back(g);
  };
  edge("bottom", 1, [](int, int j) { return j == 0; });
  edge("right", 2, [&](int i, int) { return i == nx; });
  edge("top", 3, [&](int, int j) { return j == ny; });
  edge("left", 4, [](int i, int) { return i == 0; });
  nhpd::PhysicalGroup dom{2, 5, "domain", {}};
  for (std::size_t k = 0; k < m.nodes.size(); ++k) dom.nodes.push_back(k);
  m.groups.push_back(dom);
  return m;
}

/// All-pairs nearest distance.
inline std::vector<double> brute_nearest(const std::vector<nhpd::MaterialPoint>& pts) {
  std::vector<double> out(pts.size(), INFINITY);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j) out[i] = std::min(out[i], std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
  return out;
}

/// All-pairs bond list under the max-horizon rule.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_pairs(const std::vector<nhpd::MaterialPoint>& pts) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) < std::max(pts[i].horizon, pts[j].horizon))
        out.emplace_back(i, j);
  return out;
}

/// Dense global stiffness from element matrices.
inline Eigen::MatrixXd dense_stiffness(const nhpd::Model& model) {
  const auto n = static_cast<Eigen::Index>(model.dof_count());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t b = 0; b < model.bonds.size(); ++b) {
    if (model.bonds[b].broken) continue;
    const nhpd::Mat6 ke = nhpd::element_stiffness(model.coefficients(b));
    const Eigen::Index dofs[6] = {Eigen::Index(3 * model.bonds[b].a), Eigen::Index(3 * model.bonds[b].a + 1),
                                  Eigen::Index(3 * model.bonds[b].a + 2), Eigen::Index(3 * model.bonds[b].b),
                                  Eigen::Index(3 * model.bonds[b].b + 1), Eigen::Index(3 * model.bonds[b].b + 2)};
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) k(dofs[r], dofs[c]) += ke(r, c);
  }
  return k;
}

/// Bond energy written out directly from the spring terms, independent of
/// the matrix route: axial stretch, transverse chord rotation plus mean end
/// rotation, relative end rotation.
inline double spring_energy(const nhpd::BondCoefficients& bc, const Eigen::Matrix<double, 6, 1>& u) {
  const double c = bc.frame.cos, s = bc.frame.sin, l = bc.frame.length;
  const double dux = u[3] - u[0], duy = u[4] - u[1];
  const double stretch = (c * dux + s * duy) / l;
  const double shear = (c * duy - s * dux) / l + (u[2] + u[5]) / 2.0;
  const double rot = u[5] - u[2];
  const double p = bc.prefactor();
  return 0.5 * p * (l * bc.springs.normal * stretch * stretch + l * bc.springs.shear * shear * shear +
                    bc.springs.rotational * rot * rot);
}

/// Minimal independent reader for the legacy VTK files we write.
struct VtkData {
  std::string title;
  std::vector<std::array<double, 3>> points;
  std::map<std::string, std::vector<double>> scalars;
  std::map<std::string, std::vector<std::array<double, 3>>> vectors;
};

inline VtkData read_vtk(const std::filesystem::path& path) {
  std::ifstream in(path);
  VtkData d;
  std::string line;
  std::getline(in, line);
  std::getline(in, d.title);
  std::string tok;
  std::size_t n = 0;
  while (in >> tok) {
    if (tok == "POINTS") {
      in >> n >> tok;
      d.points.resize(n);
      for (auto& p : d.points) in >> p[0] >> p[1] >> p[2];
    } else if (tok == "CELLS") {
      std::size_t cells, total;
      in >> cells >> total;
      for (std::size_t i = 0; i < total; ++i) in >> tok;
    } else if (tok == "CELL_TYPES") {
      std::size_t cells;
      in >> cells;
      for (std::size_t i = 0; i < cells; ++i) in >> tok;
    } else if (tok == "SCALARS") {
      std::string name, type, lut, table;
      int comps;
      in >> name >> type >> comps >> lut >> table;
      auto& v = d.scalars[name];
      v.resize(n);
      for (auto& x : v) in >> x;
    } else if (tok == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      auto& v = d.vectors[name];
      v.resize(n);
      for (auto& x : v) in >> x[0] >> x[1] >> x[2];
    }
  }
  return d;
}

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixture
