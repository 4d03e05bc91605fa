#include "seasky/assignment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seasky {

namespace {

struct SquareSolution {
  std::vector<int> col_of_row;
  std::vector<double> u, v;
};

// Shortest augmenting path Hungarian method on a square matrix (1-based
// potentials internally). Leaves u_i + v_j <= c_ij with equality on the
// returned matching.
SquareSolution hungarian(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  SquareSolution sol;
  sol.col_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) sol.col_of_row[p[j] - 1] = j - 1;
  sol.u.assign(u.begin() + 1, u.end());
  sol.v.assign(v.begin() + 1, v.end());
  return sol;
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  Assignment out;
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) return out;
  if (!cost.allFinite()) throw std::invalid_argument("non-finite cost");

  // Pad to square with zero-cost dummy rows/columns.
  const int n = std::max(rows, cols);
  Eigen::MatrixXd square = Eigen::MatrixXd::Zero(n, n);
  square.topLeftCorner(rows, cols) = cost;
  SquareSolution sol = hungarian(square);

  // With optimal potentials, the optimal assignments are exactly the perfect
  // matchings on tight edges. Walk the real rows in order and move each to its
  // smallest feasible column through an alternating path; real columns rank
  // before dummy ones.
  const double tol = 1e-9 * std::max(1.0, square.cwiseAbs().maxCoeff());
  auto tight = [&](int i, int j) {
    return square(i, j) - sol.u[i] - sol.v[j] <= tol;
  };
  std::vector<int>& col_of_row = sol.col_of_row;
  std::vector<int> row_of_col(n);
  for (int i = 0; i < n; ++i) row_of_col[col_of_row[i]] = i;
  std::vector<char> fixed(n, 0);
  std::vector<int> parent_row(n), seen(n, -1);
  std::vector<int> queue;

  // Reroute so that `row` takes column `target`, keeping every fixed row's
  // column. Returns false when no such perfect matching exists.
  auto reroute = [&](int row, int target, int stamp) {
    const int freed = col_of_row[row];
    const int start = row_of_col[target];
    if (fixed[start]) return false;
    // BFS over rows: from a row, any tight unlocked column leads to its owner.
    queue.assign(1, start);
    seen[start] = stamp;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int r = queue[q];
      for (int j = 0; j < n; ++j) {
        if (j == target || !tight(r, j)) continue;
        if (j == freed) {
          // Shift columns back along the path.
          int cur_row = r;
          int cur_col = j;
          while (true) {
            const int prev_col = col_of_row[cur_row];
            col_of_row[cur_row] = cur_col;
            row_of_col[cur_col] = cur_row;
            if (cur_row == start) break;
            cur_col = prev_col;
            cur_row = parent_row[cur_row];
          }
          col_of_row[row] = target;
          row_of_col[target] = row;
          return true;
        }
        const int owner = row_of_col[j];
        if (owner == row || fixed[owner] || seen[owner] == stamp) continue;
        seen[owner] = stamp;
        parent_row[owner] = r;
        queue.push_back(owner);
      }
    }
    return false;
  };

  int stamp = 0;
  for (int i = 0; i < rows; ++i) {
    const int current = col_of_row[i];
    const int limit = current < cols ? current : cols;
    for (int j = 0; j < limit; ++j) {
      if (!tight(i, j)) continue;
      if (reroute(i, j, stamp++)) break;
    }
    fixed[i] = 1;
  }

  for (int i = 0; i < rows; ++i) {
    const int j = col_of_row[i];
    if (j < cols) {
      out.pairs.emplace_back(i, j);
      out.total_cost += cost(i, j);
    }
  }
  return out;
}

}  // namespace seasky
