#pragma once

#include <optional>
#include <vector>

namespace pdefense {

// Rectangular min-cost assignment. Every row is matched to a distinct column
// (rows <= cols). Entries marked unavailable are never selected. Returns the
// column chosen for each row, or empty if no complete matching exists.
//
// Shortest augmenting path formulation with row/column potentials, O(n^2 m).
std::optional<std::vector<std::size_t>> min_cost_assignment(
    const std::vector<std::vector<double>>& cost, const std::vector<std::vector<bool>>& available);

}  // namespace pdefense
