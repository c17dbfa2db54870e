#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "pdefense/geometry.hpp"
#include "pdefense/static_design.hpp"

namespace testsupport {

using namespace pdefense;

inline pdefense::ConvexPolygon case_territory() {
  return pdefense::ConvexPolygon({{20, 0}, {10, 30}, {-20, 20}, {-30, -10}, {0, -20}});
}

inline std::vector<pdefense::Point2> case_stations() {
  return {{3.17, 16.16}, {3.33, -6.37}, {-16.92, 2.74}};
}

inline pdefense::ConvexPolygon unit_square(double side = 10.0) {
  return pdefense::ConvexPolygon({{0, 0}, {side, 0}, {side, side}, {0, side}});
}

// Area of the region grown from the territory through cells with a
// non-negative field, excluding the territory itself.
inline double flood_fill_area(const FactorField& field, double ratio, const RegionApprox& region, std::size_t n) {
  const ConvexPolygon& poly = field.territory();
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const Point2& b : region.boundary) {
    x0 = std::min(x0, b.x), x1 = std::max(x1, b.x);
    y0 = std::min(y0, b.y), y1 = std::max(y1, b.y);
  }
  const double pad = 0.05 * std::max(x1 - x0, y1 - y0);
  x0 -= pad, x1 += pad, y0 -= pad, y1 += pad;
  const double hx = (x1 - x0) / static_cast<double>(n), hy = (y1 - y0) / static_cast<double>(n);
  auto center = [&](std::size_t i, std::size_t j) {
    return Point2{x0 + (static_cast<double>(i) + 0.5) * hx, y0 + (static_cast<double>(j) + 0.5) * hy};
  };
  std::vector<char> seen(n * n, 0);
  std::queue<std::pair<std::size_t, std::size_t>> q;
  const Point2 c = poly.centroid();
  const auto ci = static_cast<std::size_t>((c.x - x0) / hx), cj = static_cast<std::size_t>((c.y - y0) / hy);
  q.push({ci, cj});
  seen[ci * n + cj] = 1;
  std::size_t outside = 0;
  while (!q.empty()) {
    const auto [i, j] = q.front();
    q.pop();
    const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const long ni = static_cast<long>(i) + di[k], nj = static_cast<long>(j) + dj[k];
      if (ni < 0 || nj < 0 || ni >= static_cast<long>(n) || nj >= static_cast<long>(n)) continue;
      const auto ui = static_cast<std::size_t>(ni), uj = static_cast<std::size_t>(nj);
      if (seen[ui * n + uj]) continue;
      const Point2 p = center(ui, uj);
      const bool in = contains(poly, p);
      if (!in && field(p, ratio) < 0.0) continue;
      seen[ui * n + uj] = 1;
      if (!in) ++outside;
      q.push({ui, uj});
    }
  }
  return static_cast<double>(outside) * hx * hy;
}

}  // namespace testsupport
