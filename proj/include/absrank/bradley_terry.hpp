#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "absrank/performance_matrix.hpp"
#include "absrank/stats.hpp"  // Direction

namespace absrank {

// Head-to-head tallies over the problem set.  wins(i, j) counts the problems
// where algorithm i strictly beats algorithm j; ties(i, j) counts exact
// value ties (symmetric, diagonal zero).  Every problem contributes exactly
// one of wins(i,j), wins(j,i), or ties(i,j) per unordered pair.
struct WinMatrix {
  std::vector<std::string> algorithms;
  Eigen::MatrixXd wins;  // n x n, nonnegative integers stored as doubles
  Eigen::MatrixXd ties;  // n x n, symmetric

  Eigen::Index n() const { return wins.rows(); }
};

WinMatrix pairwise_wins(const PerformanceMatrix& m);

struct BtOptions {
  double tol = 1e-10;         // max relative strength change per sweep
  int max_iter = 10000;       // sweep cap
  double prior_weight = 0.0;  // pseudo-wins added in both directions per pair
};

struct BtResult {
  std::vector<std::string> algorithms;
  Eigen::VectorXd theta;  // strengths, normalized to sum 1
  int iterations = 0;     // sweeps actually run
  bool converged = false;
};

// Maximum-likelihood Bradley-Terry strengths via the minorize-maximize
// update
//   theta_i <- [sum_j w_ij theta_j / (theta_i + theta_j)]
//              / [sum_j w_ji / (theta_i + theta_j)]
// applied in place (each update sees its predecessors within the sweep,
// which keeps alternating tallies from oscillating).  Strengths are
// renormalized to sum 1 after every sweep.  A player with no wins lands on
// exactly zero strength.  A player with no losses has no finite maximizer:
// its strength is grown tenfold per sweep so the divergence stays visible,
// and renormalization drives the rest of the field toward zero.  Once the
// others reach exactly zero the boundary point is a fixed point and the fit
// converges there; a run still collapsing when the sweep cap is hit reports
// converged=false.  prior_weight > 0 adds that many fictitious wins in both
// directions of every pair, which keeps all strengths positive and the
// maximizer finite.
BtResult fit_bradley_terry(const WinMatrix& w, const BtOptions& opts = {});

// P(first beats second) = theta_first / (theta_first + theta_second);
// 0.5 when both strengths are zero (no evidence either way).
double bt_prob(const BtResult& fit, const std::string& first,
               const std::string& second);

struct BtConclusion {
  std::pair<std::string, std::string> pair;
  double prob = 0.5;  // P(first beats second)
  Direction direction = Direction::indistinguishable;
};

struct BayesReport {
  std::vector<std::string> algorithms;
  Eigen::VectorXd theta;
  int iterations = 0;
  bool converged = false;
  BtOptions options;
  std::vector<BtConclusion> pairwise;
};

// Full pipeline: tally wins, fit strengths, read off pairwise win
// probabilities.  Direction is first-better when P > 0.5, second-better
// when P < 0.5, indistinguishable at exactly 0.5.
BayesReport bayes_compare(
    const PerformanceMatrix& m,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const BtOptions& opts = {});

}  // namespace absrank
