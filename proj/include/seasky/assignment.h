#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace seasky {

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending row
  double total_cost = 0.0;
};

// Minimum-cost one-to-one assignment of size min(rows, cols) for a dense cost
// matrix. Among assignments of equal minimum cost the lexicographically
// smallest (row, col) pair list is returned.
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace seasky
