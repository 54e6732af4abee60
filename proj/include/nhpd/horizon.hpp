#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nhpd/mesh.hpp"

namespace nhpd {

inline double point_distance(const MaterialPoint& p, const MaterialPoint& q) {
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Fills MaterialPoint::nearest using a uniform grid. Needs at least two
/// points; coincident points raise DuplicatePointError.
void nearest_distances(std::span<MaterialPoint> points);

/// h = lambda * nearest for every point. lambda < 1 is a ConfigError.
void assign_horizons(std::span<MaterialPoint> points, double lambda);

/// Horizon of a bond whose endpoints have horizons ha and hb: the mean when
/// both cover the bond, otherwise the covering one. Throws ModelError when
/// neither covers it.
double bond_horizon(double ha, double hb, double length);

struct Bond {
  std::size_t a = 0;
  std::size_t b = 0;              // a < b
  double length = 0.0;            // l_AB [m]
  double horizon = 0.0;           // H_AB [m]
  double alpha = 1.0;             // length correction
  double omega = 1.0;             // domain correction
  double critical_stretch = 0.0;  // s0
  bool broken = false;
};

/// One bond per unordered pair closer than the larger of the two horizons
/// (strict). Sorted by (a, b).
std::vector<Bond> build_bonds(std::span<const MaterialPoint> points);

/// Per-point incident bond lists (CSR), in increasing bond index order.
class Adjacency {
 public:
  Adjacency() = default;
  Adjacency(std::size_t point_count, std::span<const Bond> bonds);

  std::span<const std::size_t> incident(std::size_t point) const {
    return {bonds_.data() + start_[point], start_[point + 1] - start_[point]};
  }
  std::size_t point_count() const noexcept { return start_.empty() ? 0 : start_.size() - 1; }
  std::vector<std::size_t> isolated_points() const;

 private:
  std::vector<std::size_t> start_;
  std::vector<std::size_t> bonds_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  Vec2 p;
  Vec2 q;
};

/// Closed-segment intersection; touching and collinear overlap count.
/// Points within `tolerance` metres of a segment's supporting line are
/// treated as lying on it.
bool segments_intersect(const Segment& s, const Segment& t, double tolerance = 1e-12);

/// Deletes every bond crossing any slot. Returns the number removed.
std::size_t remove_slot_bonds(std::vector<Bond>& bonds, std::span<const MaterialPoint> points,
                              std::span<const Segment> slots);

}  // namespace nhpd
