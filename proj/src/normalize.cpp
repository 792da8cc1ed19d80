#include "absrank/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absrank/errors.hpp"

namespace absrank {

RankMatrix rank_normalize(const PerformanceMatrix& m) {
  const Eigen::Index n = m.n();
  const Eigen::Index p = m.p();
  RankMatrix r;
  r.algorithms = m.algorithms;
  r.problems = m.problems;
  r.values.resize(n, p);
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < p; ++j) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return m.values(a, j) < m.values(b, j);
    });
    // Walk runs of tied values; each member of a run gets the mean of the
    // rank positions the run occupies.
    Eigen::Index i = 0;
    while (i < n) {
      Eigen::Index k = i;
      while (k + 1 < n &&
             m.values(order[static_cast<size_t>(k + 1)], j) ==
                 m.values(order[static_cast<size_t>(i)], j)) {
        ++k;
      }
      const double mean_rank = 0.5 * static_cast<double>(i + k) + 1.0;
      for (Eigen::Index t = i; t <= k; ++t) {
        r.values(order[static_cast<size_t>(t)], j) = mean_rank;
      }
      i = k + 1;
    }
  }
  return r;
}

Eigen::VectorXd max_min_scale(const Eigen::Ref<const Eigen::VectorXd>& column) {
  if (column.size() < 1) throw ShapeError("max_min_scale: empty column");
  const double lo = column.minCoeff();
  const double hi = column.maxCoeff();
  if (!(hi > lo)) {
    throw DomainError("max_min_scale: degenerate scale (constant column)");
  }
  return (column.array() - lo) / (hi - lo);
}

Eigen::VectorXd z_score(const Eigen::Ref<const Eigen::VectorXd>& column) {
  if (column.size() < 1) throw ShapeError("z_score: empty column");
  const double mean = column.mean();
  const double var = (column.array() - mean).square().mean();
  if (!(var > 0.0)) {
    throw DomainError("z_score: degenerate scale (zero standard deviation)");
  }
  return (column.array() - mean) / std::sqrt(var);
}

PerformanceMatrix absolute_normalize(
    const PerformanceMatrix& m, const std::map<std::string, AbsRankFn>& cdfs) {
  PerformanceMatrix v;
  v.algorithms = m.algorithms;
  v.problems = m.problems;
  v.lower_is_better = true;
  v.values.resize(m.n(), m.p());
  for (Eigen::Index j = 0; j < m.p(); ++j) {
    const auto& label = m.problems[static_cast<size_t>(j)];
    auto it = cdfs.find(label);
    if (it == cdfs.end()) {
      throw LabelError("no CDF provided for problem '" + label + "'");
    }
    const AbsRankFn& fn = it->second;
    for (Eigen::Index i = 0; i < m.n(); ++i) {
      v.values(i, j) = fn(m.values(i, j));
    }
  }
  return v;
}

}  // namespace absrank
