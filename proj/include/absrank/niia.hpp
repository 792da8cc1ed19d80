#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absrank/bradley_terry.hpp"
#include "absrank/performance_matrix.hpp"
#include "absrank/rank_function.hpp"
#include "absrank/stats.hpp"

namespace absrank {

// Two synthetic benchmark tables on which rank-based analyses reverse their
// verdict for a pair of algorithms once irrelevant competitors are dropped.
// The first is the 3-algorithm core (A, B, C1 over 500 problems); the
// second pads it with 97 graded filler algorithms C2..C98 to 100 rows.
// Projecting the second onto {A, B, C1} reproduces the first exactly.
std::pair<PerformanceMatrix, PerformanceMatrix> gen_niia_datasets();

enum class NiiaMethod { avg_rank, bradley_terry, absolute };

NiiaMethod niia_method_from_name(const std::string& name);
const char* niia_method_name(NiiaMethod m);

// How the candidate subsets are produced.  Every evaluated subset E keeps
// the pair under test; the full comparison runs once on the whole matrix
// and once on each projection M(E).
struct SubsetStrategy {
  enum class Kind { explicit_list, all_subsets, leave_k_out };

  Kind kind = Kind::leave_k_out;
  std::vector<std::vector<std::string>> subsets;  // explicit_list input
  int k = 1;              // leave_k_out: how many algorithms to drop
  int size_limit = 20;    // all_subsets refuses matrices larger than this
};

// Verdict comparison for one subset.  flipped is true exactly when both
// directions are strict and opposite; indeterminate verdicts (rank ties,
// even win probabilities) never count as flips.
struct FlipReport {
  std::string method;
  std::pair<std::string, std::string> pair;
  std::vector<std::string> subset;  // algorithms kept, original row order
  Direction direction_full = Direction::indistinguishable;
  Direction direction_subset = Direction::indistinguishable;
  bool flipped = false;
  // Pair evidence behind each verdict: average ranks or mean absolute
  // ranks (first, second), or P(first beats second) and its complement.
  std::string evidence_kind;  // "avg-rank" | "win-prob" | "mean-absolute-rank"
  double evidence_full_first = 0.0;
  double evidence_full_second = 0.0;
  double evidence_subset_first = 0.0;
  double evidence_subset_second = 0.0;
};

struct NiiaResult {
  std::vector<FlipReport> reports;
  int skipped = 0;  // subsets dropped for not containing the pair
};

struct NiiaOptions {
  // avg-rank verdicts compare average ranks directly by default; with
  // gate_avg_rank the verdict additionally requires omnibus significance
  // and a gap beyond the critical difference (both regimes exhibit the
  // same reversals on the synthetic datasets).
  bool gate_avg_rank = false;
  double alpha = 0.05;
  CdConvention convention = CdConvention::all_pairs_one_sided;
  BtOptions bt;  // strength-fit settings for the bradley-terry method
};

// Runs the chosen comparison on the full matrix and on every subset the
// strategy produces, reporting a FlipReport per subset.  The absolute
// method needs one value distribution per problem (cdfs); other methods
// ignore the map.  Explicit subsets missing the pair are skipped and
// counted; leave-k-out removals that would touch the pair are likewise
// skipped.  all_subsets on more than size_limit algorithms and leave-k-out
// enumerations beyond 10^6 subsets raise CapabilityError.
NiiaResult niia_check(const PerformanceMatrix& m, NiiaMethod method,
                      const std::pair<std::string, std::string>& pair,
                      const SubsetStrategy& strategy,
                      const std::map<std::string, AbsRankFn>& cdfs = {},
                      const NiiaOptions& opts = {});

// JSON rendering of a result (array of report objects plus the skip count).
std::string niia_result_to_json(const NiiaResult& result);

}  // namespace absrank
