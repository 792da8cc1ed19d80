#include "absrank/niia.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "absrank/errors.hpp"
#include "absrank/normalize.hpp"

namespace absrank {

namespace {

// Number of k-subsets, in double so huge counts just compare large.
double choose_count(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return c;
}

bool is_strict(Direction d) { return d != Direction::indistinguishable; }

Direction direction_of_gap(double first, double second) {
  if (first < second) return Direction::first_better;
  if (second < first) return Direction::second_better;
  return Direction::indistinguishable;
}

struct Verdict {
  Direction dir = Direction::indistinguishable;
  double first = 0.0;
  double second = 0.0;
};

Verdict run_method(const PerformanceMatrix& m, NiiaMethod method,
                   const std::pair<std::string, std::string>& pair,
                   const std::map<std::string, AbsRankFn>& cdfs,
                   const NiiaOptions& opts) {
  Verdict v;
  switch (method) {
    case NiiaMethod::avg_rank: {
      if (opts.gate_avg_rank) {
        const NphtReport rep =
            npht_compare(m, {pair}, opts.alpha, opts.convention);
        v.dir = rep.pairwise.front().direction;
        v.first = rep.avg_ranks(m.algorithm_index(pair.first));
        v.second = rep.avg_ranks(m.algorithm_index(pair.second));
      } else {
        const Eigen::VectorXd avg = rank_normalize(m).average_ranks();
        v.first = avg(m.algorithm_index(pair.first));
        v.second = avg(m.algorithm_index(pair.second));
        v.dir = direction_of_gap(v.first, v.second);
      }
      return v;
    }
    case NiiaMethod::bradley_terry: {
      const BayesReport rep = bayes_compare(m, {pair}, opts.bt);
      v.first = rep.pairwise.front().prob;
      v.second = 1.0 - v.first;
      v.dir = rep.pairwise.front().direction;
      return v;
    }
    case NiiaMethod::absolute: {
      const Eigen::VectorXd aar =
          absolute_normalize(m, cdfs).values.rowwise().mean();
      v.first = aar(m.algorithm_index(pair.first));
      v.second = aar(m.algorithm_index(pair.second));
      v.dir = direction_of_gap(v.first, v.second);
      return v;
    }
  }
  throw std::logic_error("unreachable: bad NiiaMethod");
}

const char* evidence_kind_of(NiiaMethod method) {
  switch (method) {
    case NiiaMethod::avg_rank: return "avg-rank";
    case NiiaMethod::bradley_terry: return "win-prob";
    case NiiaMethod::absolute: return "mean-absolute-rank";
  }
  throw std::logic_error("unreachable: bad NiiaMethod");
}

// Appends every size-k index combination of [0, n) to out, lexicographic.
void each_combination(int n, int k,
                      const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::pair<PerformanceMatrix, PerformanceMatrix> gen_niia_datasets() {
  const int p = 500;
  std::vector<std::string> problems(p);
  for (int j = 0; j < p; ++j) problems[j] = "p" + std::to_string(j + 1);

  // Core table: A wins rarely but visibly, B wins often by a hair, C1 is
  // uniformly worst.  Values are exact small integers.
  std::vector<std::string> labels1 = {"A", "B", "C1"};
  Eigen::MatrixXd m1(3, p);
  for (int j = 0; j < p; ++j) {
    const bool early = j < 100;
    m1(0, j) = early ? 1.0 : 99.0;
    m1(1, j) = early ? 99.0 : 98.0;
    m1(2, j) = 100.0;
  }

  // Padded table: same three plus filler C_i sitting at value i early and
  // i-1 late, which grades them strictly between A's two regimes.
  const int n2 = 100;
  std::vector<std::string> labels2 = {"A", "B", "C1"};
  for (int i = 2; i <= 98; ++i) labels2.push_back("C" + std::to_string(i));
  Eigen::MatrixXd m2(n2, p);
  m2.topRows(3) = m1;
  for (int i = 2; i <= 98; ++i) {
    for (int j = 0; j < p; ++j) {
      m2(1 + i, j) = (j < 100) ? static_cast<double>(i)
                               : static_cast<double>(i - 1);
    }
  }

  return {make_matrix(std::move(labels1), problems, std::move(m1)),
          make_matrix(std::move(labels2), std::move(problems), std::move(m2))};
}

NiiaMethod niia_method_from_name(const std::string& name) {
  if (name == "avg-rank") return NiiaMethod::avg_rank;
  if (name == "bradley-terry") return NiiaMethod::bradley_terry;
  if (name == "absolute") return NiiaMethod::absolute;
  throw ParseError("unknown comparison method '" + name +
                   "' (expected avg-rank, bradley-terry, or absolute)");
}

const char* niia_method_name(NiiaMethod m) {
  switch (m) {
    case NiiaMethod::avg_rank: return "avg-rank";
    case NiiaMethod::bradley_terry: return "bradley-terry";
    case NiiaMethod::absolute: return "absolute";
  }
  throw std::logic_error("unreachable: bad NiiaMethod");
}

NiiaResult niia_check(const PerformanceMatrix& m, NiiaMethod method,
                      const std::pair<std::string, std::string>& pair,
                      const SubsetStrategy& strategy,
                      const std::map<std::string, AbsRankFn>& cdfs,
                      const NiiaOptions& opts) {
  if (pair.first == pair.second)
    throw LabelError("niia_check: pair must name two distinct algorithms");
  const Eigen::Index ia = m.algorithm_index(pair.first);
  const Eigen::Index ib = m.algorithm_index(pair.second);

  const Verdict full = run_method(m, method, pair, cdfs, opts);

  NiiaResult result;
  const auto evaluate_subset = [&](const std::vector<std::string>& subset) {
    const Verdict sub =
        run_method(project(m, subset), method, pair, cdfs, opts);
    FlipReport r;
    r.method = niia_method_name(method);
    r.pair = pair;
    r.subset = subset;
    r.direction_full = full.dir;
    r.direction_subset = sub.dir;
    r.flipped = is_strict(full.dir) && is_strict(sub.dir) &&
                full.dir != sub.dir;
    r.evidence_kind = evidence_kind_of(method);
    r.evidence_full_first = full.first;
    r.evidence_full_second = full.second;
    r.evidence_subset_first = sub.first;
    r.evidence_subset_second = sub.second;
    result.reports.push_back(std::move(r));
  };

  // Non-pair algorithms in row order; subsets are assembled from these so
  // every projection keeps the original row ordering.
  std::vector<Eigen::Index> others;
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    if (i != ia && i != ib) others.push_back(i);
  }
  const int n = static_cast<int>(m.n());
  const int n_others = static_cast<int>(others.size());

  switch (strategy.kind) {
    case SubsetStrategy::Kind::explicit_list: {
      for (const auto& subset : strategy.subsets) {
        const bool has_pair =
            std::find(subset.begin(), subset.end(), pair.first) != subset.end() &&
            std::find(subset.begin(), subset.end(), pair.second) != subset.end();
        if (!has_pair) {
          ++result.skipped;
          continue;
        }
        evaluate_subset(subset);
      }
      break;
    }

    case SubsetStrategy::Kind::all_subsets: {
      if (n > strategy.size_limit) {
        throw CapabilityError(
            "niia_check: exhaustive subset enumeration over " +
            std::to_string(n) + " algorithms exceeds the limit of " +
            std::to_string(strategy.size_limit) + " (2^" +
            std::to_string(n - 2) + " candidate subsets)");
      }
      // E = pair ∪ S for every S over the others, excluding S = all others
      // (that would be the full matrix, not a proper subset).
      const std::uint64_t total = std::uint64_t{1} << n_others;
      for (std::uint64_t bits = 0; bits + 1 < total; ++bits) {
        std::vector<bool> keep(static_cast<std::size_t>(m.n()), false);
        keep[static_cast<std::size_t>(ia)] = true;
        keep[static_cast<std::size_t>(ib)] = true;
        for (int j = 0; j < n_others; ++j) {
          if ((bits >> j) & 1u)
            keep[static_cast<std::size_t>(others[j])] = true;
        }
        std::vector<std::string> subset;
        for (Eigen::Index i = 0; i < m.n(); ++i) {
          if (keep[static_cast<std::size_t>(i)])
            subset.push_back(m.algorithms[static_cast<std::size_t>(i)]);
        }
        evaluate_subset(subset);
      }
      break;
    }

    case SubsetStrategy::Kind::leave_k_out: {
      const int k = strategy.k;
      if (k < 1 || k > n - 2) {
        throw DomainError(
            "niia_check: leave-k-out needs 1 <= k <= n-2 so the pair and at "
            "least itself survive (n = " + std::to_string(n) + ")");
      }
      if (choose_count(n, k) > 1e6) {
        throw CapabilityError(
            "niia_check: leave-" + std::to_string(k) + "-out over " +
            std::to_string(n) + " algorithms exceeds 10^6 subsets");
      }
      // Removals that would touch the pair are skipped, counted in bulk:
      // C(n,k) total removal sets minus the C(n-2,k) that avoid the pair.
      result.skipped = static_cast<int>(
          std::llround(choose_count(n, k) - choose_count(n_others, k)));
      each_combination(n_others, k, [&](const std::vector<int>& removed) {
        std::vector<bool> drop(static_cast<std::size_t>(n_others), false);
        for (int r : removed) drop[static_cast<std::size_t>(r)] = true;
        std::vector<std::string> subset;
        subset.reserve(static_cast<std::size_t>(n - k));
        Eigen::Index next_other = 0;
        for (Eigen::Index i = 0; i < m.n(); ++i) {
          if (i == ia || i == ib) {
            subset.push_back(m.algorithms[static_cast<std::size_t>(i)]);
          } else {
            const bool dropped = drop[static_cast<std::size_t>(next_other)];
            ++next_other;
            if (!dropped)
              subset.push_back(m.algorithms[static_cast<std::size_t>(i)]);
          }
        }
        evaluate_subset(subset);
      });
      break;
    }
  }

  return result;
}

std::string niia_result_to_json(const NiiaResult& result) {
  nlohmann::json doc;
  doc["skipped"] = result.skipped;
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : result.reports) {
    nlohmann::json item;
    item["method"] = r.method;
    item["pair"] = {r.pair.first, r.pair.second};
    item["subset"] = r.subset;
    item["direction_full"] = direction_name(r.direction_full);
    item["direction_subset"] = direction_name(r.direction_subset);
    item["flipped"] = r.flipped;
    item["evidence"] = {
        {"kind", r.evidence_kind},
        {"full", {r.evidence_full_first, r.evidence_full_second}},
        {"subset", {r.evidence_subset_first, r.evidence_subset_second}}};
    reports.push_back(std::move(item));
  }
  doc["reports"] = std::move(reports);
  return doc.dump(2);
}

}  // namespace absrank
