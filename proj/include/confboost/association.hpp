#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace confboost {

struct Assignment {
  // (detection index, tracklet index), sorted by detection index.
  std::vector<std::pair<int, int>> matches;
  std::vector<int> unmatched_detections;
  std::vector<int> unmatched_tracklets;
};

// Minimum-cost assignment of min(rows, cols) pairs on a rectangular cost
// matrix. Returns the column for each row, -1 where a row is left out.
// Deterministic: rows are inserted in index order and ties between equally
// good columns go to the lower index. Throws InvalidCost on non-finite input.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& row_to_col);

// One-stage association: Hungarian on -S, then every pair with
// S <= min_similarity is dropped and both ends reported unmatched.
Assignment associate(const Eigen::MatrixXd& similarity, double min_similarity);

}  // namespace confboost
