#pragma once

#include <string_view>
#include <vector>

#include "nhpd/bond_mechanics.hpp"
#include "nhpd/horizon.hpp"
#include "nhpd/kernels.hpp"
#include "nhpd/material.hpp"
#include "nhpd/mesh.hpp"

namespace nhpd {

struct ModelOptions {
  double lambda = 3.0;
  std::vector<Segment> slots;
};

/// Material points, bond graph and material. Bond::omega and
/// Bond::critical_stretch are filled later by the correction and damage
/// stages; after that only Bond::broken changes.
struct Model {
  Material material;
  double lambda = 3.0;
  std::vector<MaterialPoint> points;
  std::vector<Bond> bonds;
  Adjacency adjacency;
  std::vector<BondFrame> frames;
  std::vector<SpringFactors> springs;
  std::vector<std::size_t> isolated;           // points without any bond
  std::vector<std::ptrdiff_t> point_of_node;   // mesh node -> point, -1 if none
  std::size_t slot_bonds_removed = 0;

  std::size_t dof_count() const noexcept { return 3 * points.size(); }
  BondCoefficients coefficients(std::size_t bond) const;
  /// SoA copy of the bond geometry and current weights (omega included).
  kernels::BondTable bond_table() const;
  std::size_t broken_count() const;
};

/// Nearest distances, horizons, bonds, slot removal, length corrections and
/// spring factors. Omega starts at 1.
Model build_model(std::vector<MaterialPoint> points, const Material& material, const ModelOptions& options);
Model build_model(const Mesh& mesh, const Material& material, const ModelOptions& options);

/// Material points carrying the nodes of a physical group. Throws
/// ConfigError naming the group when it does not exist.
std::vector<std::size_t> group_points(const Mesh& mesh, const Model& model, std::string_view group);

}  // namespace nhpd
