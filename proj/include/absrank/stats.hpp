#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "absrank/normalize.hpp"
#include "absrank/performance_matrix.hpp"

namespace absrank {

struct FriedmanResult {
  double statistic = 0.0;  // chi-square value
  int df = 0;              // n - 1
  double log10_p = 0.0;    // upper-tail probability, log10 (never underflows)
  double p = 1.0;          // exp of the above; may underflow to 0
};

// Friedman's chi-square over a rank matrix:
//   chi2 = 12 p / (n (n+1)) * sum_i (Rbar_i - (n+1)/2)^2,  df = n - 1,
// evaluated through the rank totals so integer-rank inputs yield exact
// statistics.  The p-value comes from the chi-square upper tail in log
// space so astronomically small values keep their magnitude.
FriedmanResult friedman_test(const RankMatrix& r);

// Multiplicity rule for the Bonferroni-Dunn critical difference.
enum class CdConvention {
  all_pairs_one_sided,  // q = z(1 - alpha / (n (n-1)))       [default]
  control_two_sided,    // q = z(1 - alpha / (2 (n-1)))
  control_one_sided,    // q = z(1 - alpha / (n-1))
};

CdConvention cd_convention_from_name(const std::string& name);
const char* cd_convention_name(CdConvention convention);
std::vector<CdConvention> all_cd_conventions();

// Bonferroni-Dunn critical difference CD = q * sqrt(n (n+1) / (6 p)).
double bonferroni_dunn_cd(int n, int p, double alpha,
                          CdConvention convention =
                              CdConvention::all_pairs_one_sided);

enum class Direction { first_better, second_better, indistinguishable };

const char* direction_name(Direction d);

struct PairwiseConclusion {
  std::pair<std::string, std::string> pair;
  Direction direction = Direction::indistinguishable;
  double delta = 0.0;  // |avg rank difference|
};

struct NphtReport {
  std::vector<std::string> algorithms;
  Eigen::VectorXd avg_ranks;
  FriedmanResult friedman;
  bool significant = false;  // Friedman p < alpha
  double cd = 0.0;
  double alpha = 0.0;
  CdConvention convention = CdConvention::all_pairs_one_sided;
  std::vector<PairwiseConclusion> pairwise;
};

// Full pipeline: rank -> Friedman -> (if significant) critical-difference
// gated pairwise directions.  A pair is strict only when the Friedman test
// rejects at alpha and the average-rank gap exceeds the CD; a lower average
// rank is the better side.
NphtReport npht_compare(
    const PerformanceMatrix& m,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    double alpha,
    CdConvention convention = CdConvention::all_pairs_one_sided);

}  // namespace absrank
