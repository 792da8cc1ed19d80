#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "absrank/benchmark.hpp"
#include "absrank/rank_function.hpp"
#include "absrank/sobol.hpp"

namespace absrank {

// A sorted batch of objective values sampled quasi-randomly from a box
// inside the problem domain, together with everything needed to regenerate
// it exactly (problem, region, generator config, table identifier).
struct SampleSet {
  BenchmarkProblem problem;
  Eigen::VectorXd region_lo, region_hi;  // sampled box, inside the domain
  SobolConfig cfg;                       // dim mirrors problem.d
  Eigen::VectorXd values;                // ascending
};

// Maps 2^cfg.log2n low-discrepancy points affinely onto the region and
// evaluates the objective at each.  The region must lie inside the problem
// domain (DomainError otherwise); cfg.dim is taken from the problem.
// Values are returned sorted, so evaluation order can never matter.
SampleSet sample_function(const BenchmarkProblem& problem,
                          const Eigen::Ref<const Eigen::VectorXd>& region_lo,
                          const Eigen::Ref<const Eigen::VectorXd>& region_hi,
                          SobolConfig cfg);

// JSON persistence ({problem, region, cfg, values} plus an optional caller
// manifest object serialized under "manifest").
void save_samples(const SampleSet& s, std::ostream& out,
                  const std::string& manifest_json = "");
void save_samples_file(const SampleSet& s, const std::string& path,
                       const std::string& manifest_json = "");
SampleSet load_samples(std::istream& in);
SampleSet load_samples_file(const std::string& path);

// Geometric mean of the gaps between sorted distinct values:
//   e = (prod (v_i - v_{i-1}))^(1/(k-1))  over the k distinct values,
// 0 when all values coincide (k = 1).  Translation-invariant and
// positively homogeneous.  Empty input raises DomainError.
double geometric_mean_difference(const Eigen::Ref<const Eigen::VectorXd>& vals);

struct DeltaSelection {
  std::vector<double> deltas;     // candidates, as given
  Eigen::VectorXd scores;         // gap score per candidate
  std::vector<bool> clipped;      // true when the cube escaped the domain
  double chosen = 0.0;            // argmax score, ties broken toward small
  Eigen::Index chosen_index = 0;  // position of chosen within deltas
};

// Two-step region sizing: for each candidate half-width delta, sample the
// cube [center - delta, center + delta] (clipped to the domain, flagged) at
// a coarse budget, build the empirical value distribution, push the
// per-algorithm metric values through it, and score the resulting levels by
// geometric_mean_difference.  The winning delta spreads the algorithms the
// furthest apart; exact score ties go to the smallest delta, which keeps
// the samples concentrated near the center.
DeltaSelection select_delta(const BenchmarkProblem& problem,
                            const Eigen::Ref<const Eigen::VectorXd>& center,
                            const Eigen::Ref<const Eigen::VectorXd>& metric_col,
                            const std::vector<double>& deltas,
                            SobolConfig coarse_cfg = SobolConfig{
                                .dim = 0, .log2n = 15, .skip = 1});

}  // namespace absrank
