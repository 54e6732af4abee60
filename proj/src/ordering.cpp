#include "nhpd/ordering.hpp"

#include <algorithm>
#include <numeric>

namespace nhpd {

std::vector<std::size_t> nested_dissection(const Model& model, std::size_t leaf_size) {
  const auto& pts = model.points;
  std::vector<std::size_t> order;
  order.reserve(pts.size());
  std::vector<unsigned char> side(pts.size(), 0);
  leaf_size = std::max<std::size_t>(leaf_size, 1);

  // Explicit stack of (set, emit-after) items keeps deep recursions off the call stack.
  struct Item {
    std::vector<std::size_t> set;
    bool emit;
  };
  std::vector<Item> work;
  std::vector<std::size_t> all(pts.size());
  std::iota(all.begin(), all.end(), 0);
  work.push_back({std::move(all), false});
  while (!work.empty()) {
    Item item = std::move(work.back());
    work.pop_back();
    auto& set = item.set;
    if (item.emit || set.size() <= leaf_size) {
      if (!item.emit) std::sort(set.begin(), set.end());
      order.insert(order.end(), set.begin(), set.end());
      continue;
    }
    double x0 = pts[set[0]].x, x1 = x0, y0 = pts[set[0]].y, y1 = y0;
    for (auto p : set) {
      x0 = std::min(x0, pts[p].x);
      x1 = std::max(x1, pts[p].x);
      y0 = std::min(y0, pts[p].y);
      y1 = std::max(y1, pts[p].y);
    }
    const bool along_x = (x1 - x0) >= (y1 - y0);
    const auto key = [&](std::size_t p) { return along_x ? pts[p].x : pts[p].y; };
    const auto mid = set.begin() + static_cast<std::ptrdiff_t>(set.size() / 2);
    std::nth_element(set.begin(), mid, set.end(), [&](std::size_t a, std::size_t b) {
      const double ka = key(a), kb = key(b);
      return ka != kb ? ka < kb : a < b;
    });
    for (auto it = set.begin(); it != set.end(); ++it) side[*it] = it < mid ? 1 : 2;
    std::vector<std::size_t> low, high, sep;
    for (auto p : set) {
      if (side[p] == 1) {
        low.push_back(p);
        continue;
      }
      bool crosses = false;
      for (auto k : model.adjacency.incident(p)) {
        const Bond& b = model.bonds[k];
        if (side[b.a == p ? b.b : b.a] == 1) {
          crosses = true;
          break;
        }
      }
      (crosses ? sep : high).push_back(p);
    }
    for (auto p : set) side[p] = 0;
    std::sort(sep.begin(), sep.end());
    // Popped in reverse: low, then high, then the separator.
    work.push_back({std::move(sep), true});
    work.push_back({std::move(high), false});
    work.push_back({std::move(low), false});
  }
  return order;
}

}  // namespace nhpd
