#include "nhpd/spatial_grid.hpp"

#include <algorithm>
#include <limits>

#include "nhpd/errors.hpp"

namespace nhpd {

SpatialGrid::SpatialGrid(std::span<const double> xs, std::span<const double> ys, double cell_size)
    : cell_(cell_size) {
  if (xs.size() != ys.size()) throw ModelError("spatial grid: coordinate arrays differ in length");
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) throw ModelError("spatial grid: cell size must be positive");
  double xmin = std::numeric_limits<double>::max(), ymin = xmin;
  double xmax = std::numeric_limits<double>::lowest(), ymax = xmax;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xmin = std::min(xmin, xs[k]);
    xmax = std::max(xmax, xs[k]);
    ymin = std::min(ymin, ys[k]);
    ymax = std::max(ymax, ys[k]);
  }
  if (xs.empty()) xmin = xmax = ymin = ymax = 0.0;
  x0_ = xmin;
  y0_ = ymin;
  // Cap the cell count so a tiny cell size cannot exhaust memory.
  constexpr double max_cells_per_axis = 1 << 14;
  if ((xmax - xmin) / cell_ > max_cells_per_axis || (ymax - ymin) / cell_ > max_cells_per_axis)
    cell_ = std::max(xmax - xmin, ymax - ymin) / max_cells_per_axis;
  nx_ = static_cast<long>(std::floor((xmax - xmin) / cell_)) + 1;
  ny_ = static_cast<long>(std::floor((ymax - ymin) / cell_)) + 1;

  const std::size_t ncells = static_cast<std::size_t>(nx_ * ny_);
  std::vector<std::size_t> cell(xs.size());
  start_.assign(ncells + 1, 0);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const long i = clamp_x(cell_of(xs[k], x0_)), j = clamp_y(cell_of(ys[k], y0_));
    cell[k] = static_cast<std::size_t>(j * nx_ + i);
    ++start_[cell[k] + 1];
  }
  for (std::size_t c = 0; c < ncells; ++c) start_[c + 1] += start_[c];
  items_.resize(xs.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < xs.size(); ++k) items_[fill[cell[k]]++] = k;
}

}  // namespace nhpd
