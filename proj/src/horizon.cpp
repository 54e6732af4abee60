#include "nhpd/horizon.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "nhpd/errors.hpp"
#include "nhpd/spatial_grid.hpp"

namespace nhpd {

namespace {

struct Coordinates {
  std::vector<double> x, y;
  explicit Coordinates(std::span<const MaterialPoint> points) : x(points.size()), y(points.size()) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      x[i] = points[i].x;
      y[i] = points[i].y;
    }
  }
};

}  // namespace

void nearest_distances(std::span<MaterialPoint> points) {
  const std::size_t n = points.size();
  if (n < 2) throw ModelError("nearest-distance search needs at least two material points");
  Coordinates c(points);
  double xmin = *std::min_element(c.x.begin(), c.x.end()), xmax = *std::max_element(c.x.begin(), c.x.end());
  double ymin = *std::min_element(c.y.begin(), c.y.end()), ymax = *std::max_element(c.y.begin(), c.y.end());
  double extent = std::max(xmax - xmin, ymax - ymin);
  double cell = std::sqrt(std::max((xmax - xmin), extent * 1e-3) * std::max((ymax - ymin), extent * 1e-3) /
                          static_cast<double>(n));
  if (!(cell > 0.0)) cell = 1.0;
  SpatialGrid grid(c.x, c.y, cell);
  cell = grid.cell_size();

  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = i;
    for (long ring = 0;; ++ring) {
      const bool inside = grid.for_each_in_ring(points[i].x, points[i].y, ring, [&](std::size_t j) {
        if (j == i) return;
        const double d = point_distance(points[i], points[j]);
        if (d < best || (d == best && j < best_j)) {
          best = d;
          best_j = j;
        }
      });
      // Anything in ring r+1 is at least r cells away.
      if (best <= static_cast<double>(ring) * cell || !inside) break;
    }
    if (best == 0.0) throw DuplicatePointError(std::min(i, best_j), std::max(i, best_j));
    points[i].nearest = best;
  }
}

void assign_horizons(std::span<MaterialPoint> points, double lambda) {
  if (!(lambda >= 1.0) || !std::isfinite(lambda))
    throw ConfigError("model.lambda", "non-local factor must satisfy lambda >= 1, got " + std::to_string(lambda));
  for (auto& p : points) p.horizon = lambda * p.nearest;
}

double bond_horizon(double ha, double hb, double length) {
  const bool a_covers = ha > length;
  const bool b_covers = hb > length;
  if (a_covers && b_covers) return 0.5 * (ha + hb);
  if (a_covers) return ha;
  if (b_covers) return hb;
  throw ModelError("no bond: neither horizon (" + std::to_string(ha) + ", " + std::to_string(hb) +
                   ") exceeds the bond length " + std::to_string(length));
}

std::vector<Bond> build_bonds(std::span<const MaterialPoint> points) {
  std::vector<Bond> bonds;
  if (points.size() < 2) return bonds;
  double hmax = 0.0;
  for (const auto& p : points) hmax = std::max(hmax, p.horizon);
  if (!(hmax > 0.0)) throw ModelError("horizons must be assigned before building bonds");
  Coordinates c(points);
  SpatialGrid grid(c.x, c.y, hmax);

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const std::size_t first = bonds.size();
    grid.for_each_candidate(p.x, p.y, hmax, [&](std::size_t j) {
      if (j <= i) return;
      const auto& q = points[j];
      const double d = point_distance(p, q);
      if (d < std::max(p.horizon, q.horizon)) {
        Bond b;
        b.a = i;
        b.b = j;
        b.length = d;
        b.horizon = bond_horizon(p.horizon, q.horizon, d);
        bonds.push_back(b);
      }
    });
    std::sort(bonds.begin() + static_cast<std::ptrdiff_t>(first), bonds.end(),
              [](const Bond& l, const Bond& r) { return l.b < r.b; });
  }
  return bonds;
}

Adjacency::Adjacency(std::size_t point_count, std::span<const Bond> bonds) {
  start_.assign(point_count + 1, 0);
  for (const auto& b : bonds) {
    ++start_[b.a + 1];
    ++start_[b.b + 1];
  }
  for (std::size_t i = 0; i < point_count; ++i) start_[i + 1] += start_[i];
  bonds_.resize(start_.back());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    bonds_[fill[bonds[k].a]++] = k;
    bonds_[fill[bonds[k].b]++] = k;
  }
}

std::vector<std::size_t> Adjacency::isolated_points() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < start_.size(); ++i)
    if (start_[i + 1] == start_[i]) out.push_back(i);
  return out;
}

namespace {

/// Signed distance of r from the line through p, q (positive on the left).
/// Zero-length segments fall back to the distance to p, signed positive.
double side(const Vec2& p, const Vec2& q, const Vec2& r) {
  const double dx = q.x - p.x, dy = q.y - p.y;
  const double len = std::sqrt(dx * dx + dy * dy);
  if (len == 0.0) return std::hypot(r.x - p.x, r.y - p.y);
  return (dx * (r.y - p.y) - dy * (r.x - p.x)) / len;
}

int sign(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

bool within_box(const Vec2& p, const Vec2& q, const Vec2& r, double tol) {
  return r.x >= std::min(p.x, q.x) - tol && r.x <= std::max(p.x, q.x) + tol && r.y >= std::min(p.y, q.y) - tol &&
         r.y <= std::max(p.y, q.y) + tol;
}

}  // namespace

bool segments_intersect(const Segment& s, const Segment& t, double tolerance) {
  const int o1 = sign(side(s.p, s.q, t.p), tolerance);
  const int o2 = sign(side(s.p, s.q, t.q), tolerance);
  const int o3 = sign(side(t.p, t.q, s.p), tolerance);
  const int o4 = sign(side(t.p, t.q, s.q), tolerance);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && within_box(s.p, s.q, t.p, tolerance)) return true;
  if (o2 == 0 && within_box(s.p, s.q, t.q, tolerance)) return true;
  if (o3 == 0 && within_box(t.p, t.q, s.p, tolerance)) return true;
  if (o4 == 0 && within_box(t.p, t.q, s.q, tolerance)) return true;
  return false;
}

std::size_t remove_slot_bonds(std::vector<Bond>& bonds, std::span<const MaterialPoint> points,
                              std::span<const Segment> slots) {
  if (slots.empty()) return 0;
  const auto before = bonds.size();
  std::erase_if(bonds, [&](const Bond& b) {
    const Segment bs{{points[b.a].x, points[b.a].y}, {points[b.b].x, points[b.b].y}};
    for (const auto& slot : slots)
      if (segments_intersect(bs, slot)) return true;
    return false;
  });
  return before - bonds.size();
}

}  // namespace nhpd
