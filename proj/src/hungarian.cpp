#include "pdefense/hungarian.hpp"

#include <limits>
#include <stdexcept>

namespace pdefense {

std::optional<std::vector<std::size_t>> min_cost_assignment(
    const std::vector<std::vector<double>>& cost, const std::vector<std::vector<bool>>& available) {
  const std::size_t n = cost.size();
  if (n == 0) return std::vector<std::size_t>{};
  const std::size_t m = cost.front().size();
  if (n > m) throw std::invalid_argument("min_cost_assignment: more rows than columns");

  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  // 1-based; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = none;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        if (available[i0 - 1][j - 1]) {
          const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == none) return std::nullopt;  // row i cannot be reached
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(n, none);
  for (std::size_t j = 1; j <= m; ++j)
    if (owner[j] != 0) col_of_row[owner[j] - 1] = j - 1;
  return col_of_row;
}

}  // namespace pdefense
