#include "confboost/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "confboost/errors.hpp"

namespace confboost {

namespace {

// Shortest augmenting path Hungarian with potentials for n <= m. Returns the
// column for every row.
std::vector<int> solve_wide(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
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
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  if (!cost.allFinite()) throw InvalidCost("hungarian: cost matrix has non-finite entries");
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (n == 0 || m == 0) return std::vector<int>(n, -1);
  if (n <= m) return solve_wide(cost);
  const std::vector<int> col_to_row = solve_wide(cost.transpose());
  std::vector<int> row_to_col(n, -1);
  for (int j = 0; j < m; ++j) row_to_col[col_to_row[j]] = j;
  return row_to_col;
}

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    if (row_to_col[i] >= 0) total += cost(static_cast<Eigen::Index>(i), row_to_col[i]);
  }
  return total;
}

Assignment associate(const Eigen::MatrixXd& similarity, double min_similarity) {
  const int n = static_cast<int>(similarity.rows());
  const int m = static_cast<int>(similarity.cols());
  const std::vector<int> row_to_col = hungarian(-similarity);
  Assignment out;
  std::vector<char> track_used(m, 0);
  for (int i = 0; i < n; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && similarity(i, j) > min_similarity) {
      out.matches.emplace_back(i, j);
      track_used[j] = 1;
    } else {
      out.unmatched_detections.push_back(i);
    }
  }
  for (int j = 0; j < m; ++j) {
    if (!track_used[j]) out.unmatched_tracklets.push_back(j);
  }
  return out;
}

}  // namespace confboost
