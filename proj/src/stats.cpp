#include "absrank/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "absrank/errors.hpp"
#include "absrank/special_functions.hpp"

namespace absrank {

FriedmanResult friedman_test(const RankMatrix& r) {
  const int n = r.n();
  const int p = r.p();
  if (n < 2) throw SizeError("friedman_test: need at least 2 algorithms");
  if (p < 1) throw SizeError("friedman_test: need at least 1 problem");

  // Sum form: chi2 = 12 sum_i Rtot_i^2 / (p n (n+1)) - 3 p (n+1).
  // For integer rank totals both terms are exact until well past any
  // realistic benchmark size, so known worked examples land exactly.
  const Eigen::VectorXd totals = r.values.rowwise().sum();
  const double n1 = static_cast<double>(n) + 1.0;
  const double chi2 = 12.0 * totals.squaredNorm() /
                          (static_cast<double>(p) * static_cast<double>(n) * n1) -
                      3.0 * static_cast<double>(p) * n1;

  FriedmanResult out;
  out.statistic = chi2;
  out.df = n - 1;
  out.log10_p = chisq_log10_sf(std::max(chi2, 0.0), static_cast<double>(out.df));
  out.p = std::pow(10.0, out.log10_p);
  return out;
}

CdConvention cd_convention_from_name(const std::string& name) {
  if (name == "all-pairs-one-sided") return CdConvention::all_pairs_one_sided;
  if (name == "control-two-sided") return CdConvention::control_two_sided;
  if (name == "control-one-sided") return CdConvention::control_one_sided;
  throw ParseError("unknown critical-difference convention '" + name +
                   "' (expected all-pairs-one-sided, control-two-sided, or "
                   "control-one-sided)");
}

const char* cd_convention_name(CdConvention convention) {
  switch (convention) {
    case CdConvention::all_pairs_one_sided: return "all-pairs-one-sided";
    case CdConvention::control_two_sided: return "control-two-sided";
    case CdConvention::control_one_sided: return "control-one-sided";
  }
  throw std::logic_error("unreachable: bad CdConvention");
}

std::vector<CdConvention> all_cd_conventions() {
  return {CdConvention::all_pairs_one_sided, CdConvention::control_two_sided,
          CdConvention::control_one_sided};
}

double bonferroni_dunn_cd(int n, int p, double alpha, CdConvention convention) {
  if (n < 2) throw SizeError("bonferroni_dunn_cd: need at least 2 algorithms");
  if (p < 1) throw SizeError("bonferroni_dunn_cd: need at least 1 problem");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("bonferroni_dunn_cd: alpha must lie in (0, 1)");

  const double nd = static_cast<double>(n);
  double tail = 0.0;
  switch (convention) {
    case CdConvention::all_pairs_one_sided:
      tail = alpha / (nd * (nd - 1.0));
      break;
    case CdConvention::control_two_sided:
      tail = alpha / (2.0 * (nd - 1.0));
      break;
    case CdConvention::control_one_sided:
      tail = alpha / (nd - 1.0);
      break;
  }
  const double q = std_normal_quantile(1.0 - tail);
  return q * std::sqrt(nd * (nd + 1.0) / (6.0 * static_cast<double>(p)));
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::first_better: return "first-better";
    case Direction::second_better: return "second-better";
    case Direction::indistinguishable: return "indistinguishable";
  }
  throw std::logic_error("unreachable: bad Direction");
}

NphtReport npht_compare(
    const PerformanceMatrix& m,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    double alpha, CdConvention convention) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("npht_compare: alpha must lie in (0, 1)");

  const RankMatrix ranks = rank_normalize(m);

  NphtReport report;
  report.algorithms = ranks.algorithms;
  report.avg_ranks = ranks.average_ranks();
  report.friedman = friedman_test(ranks);
  report.alpha = alpha;
  report.convention = convention;
  // Compare in log space: the p-value itself may underflow to zero.
  report.significant = report.friedman.log10_p < std::log10(alpha);
  report.cd = bonferroni_dunn_cd(ranks.n(), ranks.p(), alpha, convention);

  for (const auto& [first, second] : pairs) {
    if (first == second) {
      throw LabelError("npht_compare: pair compares '" + first +
                       "' with itself");
    }
    PairwiseConclusion c;
    c.pair = {first, second};
    const double a = report.avg_ranks(m.algorithm_index(first));
    const double b = report.avg_ranks(m.algorithm_index(second));
    c.delta = std::abs(a - b);
    // Strict conclusions need both the omnibus rejection and a rank gap
    // beyond the critical difference; lower average rank wins.
    if (report.significant && c.delta > report.cd) {
      c.direction = (a < b) ? Direction::first_better : Direction::second_better;
    } else {
      c.direction = Direction::indistinguishable;
    }
    report.pairwise.push_back(std::move(c));
  }
  return report;
}

}  // namespace absrank
