#include "nhpd/model.hpp"

#include <algorithm>

#include "nhpd/errors.hpp"

namespace nhpd {

BondCoefficients Model::coefficients(std::size_t k) const {
  const Bond& b = bonds[k];
  return {frames[k], springs[k], b.omega, b.alpha, points[b.a].volume, points[b.b].volume};
}

kernels::BondTable Model::bond_table() const {
  kernels::BondTable t;
  t.resize(bonds.size());
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    const Bond& b = bonds[k];
    const double p = b.omega * b.alpha * points[b.a].volume * points[b.b].volume;
    const double l = frames[k].length;
    t.a[k] = static_cast<std::int32_t>(b.a);
    t.b[k] = static_cast<std::int32_t>(b.b);
    t.cos[k] = frames[k].cos;
    t.sin[k] = frames[k].sin;
    t.length[k] = l;
    t.w_normal[k] = p * (l * springs[k].normal);
    t.w_shear[k] = p * (l * springs[k].shear);
    t.w_rotation[k] = p * springs[k].rotational;
  }
  return t;
}

std::size_t Model::broken_count() const {
  return static_cast<std::size_t>(std::count_if(bonds.begin(), bonds.end(), [](const Bond& b) { return b.broken; }));
}

Model build_model(std::vector<MaterialPoint> points, const Material& material, const ModelOptions& options) {
  material.validate();
  if (points.size() > static_cast<std::size_t>(INT32_MAX / 3))
    throw ModelError("too many material points for 32-bit bond indices");
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!(points[i].volume > 0.0)) throw ModelError("material point " + std::to_string(i) + " has no volume");
  Model m;
  m.material = material;
  m.lambda = options.lambda;
  m.points = std::move(points);
  nearest_distances(m.points);
  assign_horizons(m.points, options.lambda);
  m.bonds = build_bonds(m.points);
  m.slot_bonds_removed = remove_slot_bonds(m.bonds, m.points, options.slots);
  m.adjacency = Adjacency(m.points.size(), m.bonds);
  m.isolated = m.adjacency.isolated_points();
  assign_length_corrections(m.bonds, m.adjacency);
  m.frames.reserve(m.bonds.size());
  m.springs.reserve(m.bonds.size());
  for (const auto& b : m.bonds) {
    const auto& p = m.points[b.a];
    const auto& q = m.points[b.b];
    BondFrame f = bond_frame(p.x, p.y, q.x, q.y);
    f.length = b.length;
    m.frames.push_back(f);
    m.springs.push_back(stiffness_factors(material, b.horizon, b.length));
  }
  return m;
}

Model build_model(const Mesh& mesh, const Material& material, const ModelOptions& options) {
  material.validate();
  auto points = lump_volumes(mesh, material.thickness);
  std::vector<std::ptrdiff_t> map(mesh.nodes.size(), -1);
  for (std::size_t i = 0; i < points.size(); ++i) map[points[i].node] = static_cast<std::ptrdiff_t>(i);
  Model m = build_model(std::move(points), material, options);
  m.point_of_node = std::move(map);
  return m;
}

std::vector<std::size_t> group_points(const Mesh& mesh, const Model& model, std::string_view group) {
  const PhysicalGroup* g = mesh.find_group(group);
  if (g == nullptr) throw ConfigError("group", "unknown physical group \"" + std::string(group) + "\"");
  std::vector<std::size_t> out;
  for (auto node : g->nodes) {
    if (node < model.point_of_node.size() && model.point_of_node[node] >= 0)
      out.push_back(static_cast<std::size_t>(model.point_of_node[node]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nhpd
