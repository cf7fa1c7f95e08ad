#pragma once

#include <vector>

#include "sica/types.hpp"

namespace sica {

/// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres
/// with potentials, O(n^3)). Returns assignment[row] = column.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

}  // namespace sica
