#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace nhpd {

/// Uniform bucket grid over a fixed 2D point set (counting-sort layout).
class SpatialGrid {
 public:
  SpatialGrid(std::span<const double> xs, std::span<const double> ys, double cell_size);

  double cell_size() const noexcept { return cell_; }

  /// Calls fn(j) for every point in the cells overlapping the square
  /// [x - radius, x + radius]^2. Candidates only; callers test distances.
  template <typename Fn>
  void for_each_candidate(double x, double y, double radius, Fn&& fn) const {
    const long i0 = clamp_x(cell_of(x - radius, x0_)), i1 = clamp_x(cell_of(x + radius, x0_));
    const long j0 = clamp_y(cell_of(y - radius, y0_)), j1 = clamp_y(cell_of(y + radius, y0_));
    for (long j = j0; j <= j1; ++j)
      for (long i = i0; i <= i1; ++i) visit_cell(i, j, fn);
  }

  /// Calls fn(j) for the points in the cells at Chebyshev distance `ring`
  /// from the cell containing (x, y). Returns false once the ring lies
  /// entirely outside the grid.
  template <typename Fn>
  bool for_each_in_ring(double x, double y, long ring, Fn&& fn) const {
    const long ci = clamp_x(cell_of(x, x0_)), cj = clamp_y(cell_of(y, y0_));
    if (ci - ring < 0 && ci + ring >= nx_ && cj - ring < 0 && cj + ring >= ny_) return false;
    for (long j = cj - ring; j <= cj + ring; ++j) {
      if (j < 0 || j >= ny_) continue;
      const bool edge_row = (j == cj - ring || j == cj + ring);
      const long step = edge_row || ring == 0 ? 1 : 2 * ring;
      for (long i = ci - ring; i <= ci + ring; i += step) {
        if (i < 0 || i >= nx_) continue;
        visit_cell(i, j, fn);
      }
    }
    return true;
  }

 private:
  long cell_of(double v, double origin) const { return static_cast<long>(std::floor((v - origin) / cell_)); }
  long clamp_x(long i) const { return i < 0 ? 0 : (i >= nx_ ? nx_ - 1 : i); }
  long clamp_y(long j) const { return j < 0 ? 0 : (j >= ny_ ? ny_ - 1 : j); }

  template <typename Fn>
  void visit_cell(long i, long j, Fn& fn) const {
    const std::size_t c = static_cast<std::size_t>(j * nx_ + i);
    for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) fn(items_[k]);
  }

  double cell_ = 1.0;
  double x0_ = 0.0, y0_ = 0.0;
  long nx_ = 1, ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

}  // namespace nhpd
