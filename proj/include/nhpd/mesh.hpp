#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nhpd {

struct Node {
  std::int64_t id = 0;
  double x = 0.0;
  double y = 0.0;
};

/// Linear triangle; vertices index into Mesh::nodes and are stored counterclockwise.
struct Triangle {
  std::int64_t id = 0;
  std::array<std::size_t, 3> vertices{};
};

/// Named node set taken from a Gmsh physical group.
struct PhysicalGroup {
  int dimension = 0;
  int tag = 0;
  std::string name;
  std::vector<std::size_t> nodes;  // sorted, unique indices into Mesh::nodes
};

struct Mesh {
  std::vector<Node> nodes;
  std::vector<Triangle> triangles;
  std::vector<PhysicalGroup> groups;
  /// Per node: referenced by at least one element of any type.
  std::vector<bool> referenced;

  double area(const Triangle& t) const;
  double total_area() const;
  const PhysicalGroup* find_group(std::string_view name) const;
  std::optional<std::size_t> node_index(std::int64_t id) const;
};

/// Parses an ASCII Gmsh file (format 2.2 or 4.1). Only 1-, 2- and 3-node
/// elements are accepted; triangles are re-oriented counterclockwise.
Mesh parse_msh(std::string_view text);
Mesh read_msh(const std::filesystem::path& path);

/// Emits the mesh as normalized MSH 2.2 (nodes, triangles, and one line/point
/// element chain per group so group membership survives a re-parse).
std::string write_msh(const Mesh& mesh);

struct MaterialPoint {
  std::size_t node = 0;   // index into Mesh::nodes
  double x = 0.0;
  double y = 0.0;
  double volume = 0.0;    // [m^3]
  double nearest = 0.0;   // distance to the closest other point [m]
  double horizon = 0.0;   // [m]
};

/// One material point per triangle node; every triangle gives a third of
/// area * thickness to each of its vertices. Nodes used only by line/point
/// elements are skipped; nodes used by no element at all raise
/// IsolatedNodeError.
std::vector<MaterialPoint> lump_volumes(const Mesh& mesh, double thickness);

}  // namespace nhpd
