#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "absrank/performance_matrix.hpp"
#include "absrank/rank_function.hpp"

namespace absrank {

// Within-column ranks of a performance matrix: 1 = best (smallest value),
// n = worst; ties receive the mean of the tied rank positions, so every
// column sums to n(n+1)/2.
struct RankMatrix {
  std::vector<std::string> algorithms;
  std::vector<std::string> problems;
  Eigen::MatrixXd values;  // n x p ranks in [1, n]

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }
  // Mean rank per algorithm across all problems.
  Eigen::VectorXd average_ranks() const { return values.rowwise().mean(); }
};

RankMatrix rank_normalize(const PerformanceMatrix& m);

// Affine rescaling of a column to [0, 1]: min -> 0, max -> 1.
// Constant columns raise DomainError (degenerate scale).
Eigen::VectorXd max_min_scale(const Eigen::Ref<const Eigen::VectorXd>& column);

// Standardization to mean 0 and population standard deviation 1.
// Zero-variance columns raise DomainError (degenerate scale).
Eigen::VectorXd z_score(const Eigen::Ref<const Eigen::VectorXd>& column);

// Applies each problem's CDF to its column: V_ij = v_{f_j}(M_ij).  Every
// problem label must have a CDF in the map.  The result keeps the labels
// and carries values in [0, 1]; because each entry depends only on its own
// cell, this commutes with row projection.
PerformanceMatrix absolute_normalize(
    const PerformanceMatrix& m, const std::map<std::string, AbsRankFn>& cdfs);

}  // namespace absrank
