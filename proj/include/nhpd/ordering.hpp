#pragma once

#include <cstddef>
#include <vector>

#include "nhpd/model.hpp"

namespace nhpd {

/// Geometric nested dissection of the bond graph (broken bonds included):
/// recursive median bisection along the longer bounding-box side, with the
/// points of one half that bond across the cut ordered last. Returns a
/// permutation of the point indices. Subsets of at most `leaf_size` points
/// keep their index order.
std::vector<std::size_t> nested_dissection(const Model& model, std::size_t leaf_size = 16);

}  // namespace nhpd
