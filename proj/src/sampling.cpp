#include "absrank/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "absrank/errors.hpp"

namespace absrank {

namespace {

using nlohmann::json;

void check_region(const BenchmarkProblem& problem,
                  const Eigen::Ref<const Eigen::VectorXd>& lo,
                  const Eigen::Ref<const Eigen::VectorXd>& hi) {
  if (lo.size() != problem.d || hi.size() != problem.d) {
    throw ShapeError("sample region must have one bound pair per dimension (" +
                     std::to_string(problem.d) + ")");
  }
  for (int i = 0; i < problem.d; ++i) {
    if (!std::isfinite(lo(i)) || !std::isfinite(hi(i)) || lo(i) > hi(i)) {
      throw DomainError("sample region is empty or non-finite in dimension " +
                        std::to_string(i));
    }
    if (lo(i) < problem.lo(i) || hi(i) > problem.hi(i)) {
      throw DomainError("sample region leaves the problem domain in dimension " +
                        std::to_string(i));
    }
  }
}

json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& x : arr) v(i++) = x.get<double>();
  return v;
}

}  // namespace

SampleSet sample_function(const BenchmarkProblem& problem,
                          const Eigen::Ref<const Eigen::VectorXd>& region_lo,
                          const Eigen::Ref<const Eigen::VectorXd>& region_hi,
                          SobolConfig cfg) {
  check_region(problem, region_lo, region_hi);
  if (!cfg.table.empty() && cfg.table != kSobolTableId) {
    throw CapabilityError("sample_function: unknown direction-number table '" +
                          cfg.table + "'; this build embeds " + kSobolTableId);
  }
  if (cfg.log2n < 0 || cfg.log2n > 31) {
    throw DomainError("sample_function: log2n must lie in [0, 31], got " +
                      std::to_string(cfg.log2n));
  }
  cfg.dim = problem.d;
  cfg.table = kSobolTableId;

  SampleSet out;
  out.problem = problem;
  out.region_lo = region_lo;
  out.region_hi = region_hi;
  out.cfg = cfg;

  const Eigen::VectorXd width = region_hi - region_lo;
  SobolSequence seq(problem.d, cfg.skip);
  const std::int64_t n = cfg.count();
  out.values.resize(n);
  Eigen::VectorXd u(problem.d);
  Eigen::VectorXd x(problem.d);
  for (std::int64_t i = 0; i < n; ++i) {
    seq.next(u);
    x = region_lo + width.cwiseProduct(u);
    out.values(i) = evaluate(problem, x);
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

void save_samples(const SampleSet& s, std::ostream& out,
                  const std::string& manifest_json) {
  json doc;
  doc["format"] = "absrank-samples";
  doc["version"] = 1;
  doc["problem"] = json::parse(problem_to_json(s.problem));
  doc["region"] = {{"lo", vector_to_json(s.region_lo)},
                   {"hi", vector_to_json(s.region_hi)}};
  doc["cfg"] = {{"dim", s.cfg.dim},
                {"log2n", s.cfg.log2n},
                {"skip", s.cfg.skip},
                {"table", s.cfg.table}};
  doc["values"] = vector_to_json(s.values);
  if (!manifest_json.empty()) doc["manifest"] = json::parse(manifest_json);
  out << doc.dump(2) << '\n';
}

void save_samples_file(const SampleSet& s, const std::string& path,
                       const std::string& manifest_json) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  save_samples(s, out, manifest_json);
}

SampleSet load_samples(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("sample file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "absrank-samples")
      throw FormatError("not a sample file (unexpected format tag)");
    if (doc.at("version") != 1)
      throw FormatError("unsupported sample file version");
    SampleSet s;
    std::istringstream prob(doc.at("problem").dump());
    s.problem = load_problem(prob);
    s.region_lo = vector_from_json(doc.at("region").at("lo"));
    s.region_hi = vector_from_json(doc.at("region").at("hi"));
    const auto& cfg = doc.at("cfg");
    s.cfg.dim = cfg.at("dim").get<int>();
    s.cfg.log2n = cfg.at("log2n").get<int>();
    s.cfg.skip = cfg.at("skip").get<std::uint32_t>();
    s.cfg.table = cfg.at("table").get<std::string>();
    s.values = vector_from_json(doc.at("values"));
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed sample file: ") + e.what());
  }
}

SampleSet load_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return load_samples(in);
}

double geometric_mean_difference(
    const Eigen::Ref<const Eigen::VectorXd>& vals) {
  if (vals.size() == 0)
    throw DomainError("geometric_mean_difference: empty input");
  std::vector<double> sorted(vals.begin(), vals.end());
  for (double v : sorted) {
    if (!std::isfinite(v))
      throw ParseError("geometric_mean_difference: non-finite value");
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::size_t k = sorted.size();
  if (k == 1) return 0.0;
  // Geometric mean through log space so many small gaps cannot underflow.
  double log_sum = 0.0;
  for (std::size_t i = 1; i < k; ++i) {
    log_sum += std::log(sorted[i] - sorted[i - 1]);
  }
  return std::exp(log_sum / static_cast<double>(k - 1));
}

DeltaSelection select_delta(const BenchmarkProblem& problem,
                            const Eigen::Ref<const Eigen::VectorXd>& center,
                            const Eigen::Ref<const Eigen::VectorXd>& metric_col,
                            const std::vector<double>& deltas,
                            SobolConfig coarse_cfg) {
  if (center.size() != problem.d)
    throw ShapeError("select_delta: center must have one coordinate per dimension");
  for (int i = 0; i < problem.d; ++i) {
    if (!std::isfinite(center(i)) || center(i) < problem.lo(i) ||
        center(i) > problem.hi(i)) {
      throw DomainError("select_delta: center leaves the problem domain in "
                        "dimension " + std::to_string(i));
    }
  }
  if (deltas.empty())
    throw DomainError("select_delta: need at least one candidate delta");
  for (double d : deltas) {
    if (!std::isfinite(d) || d <= 0.0)
      throw DomainError("select_delta: deltas must be finite and positive");
  }
  if (metric_col.size() == 0)
    throw DomainError("select_delta: need at least one metric value");

  DeltaSelection out;
  out.deltas = deltas;
  out.scores.resize(static_cast<Eigen::Index>(deltas.size()));
  out.clipped.assign(deltas.size(), false);

  for (std::size_t k = 0; k < deltas.size(); ++k) {
    // Cube around the center, clipped to the domain (flagged, not fatal:
    // the cube merely loses the part that was never evaluable anyway).
    Eigen::VectorXd lo(problem.d), hi(problem.d);
    bool clipped = false;
    for (int i = 0; i < problem.d; ++i) {
      lo(i) = center(i) - deltas[k];
      hi(i) = center(i) + deltas[k];
      if (lo(i) < problem.lo(i)) {
        lo(i) = problem.lo(i);
        clipped = true;
      }
      if (hi(i) > problem.hi(i)) {
        hi(i) = problem.hi(i);
        clipped = true;
      }
    }
    out.clipped[k] = clipped;

    const SampleSet s = sample_function(problem, lo, hi, coarse_cfg);
    const AbsRankFn v = empirical_cdf(s.values);
    Eigen::VectorXd levels(metric_col.size());
    for (Eigen::Index i = 0; i < metric_col.size(); ++i) {
      levels(i) = v(metric_col(i));
    }
    out.scores(static_cast<Eigen::Index>(k)) =
        geometric_mean_difference(levels);
  }

  out.chosen_index = 0;
  out.chosen = deltas[0];
  for (std::size_t k = 1; k < deltas.size(); ++k) {
    const double score = out.scores(static_cast<Eigen::Index>(k));
    const double best = out.scores(out.chosen_index);
    if (score > best || (score == best && deltas[k] < out.chosen)) {
      out.chosen_index = static_cast<Eigen::Index>(k);
      out.chosen = deltas[k];
    }
  }
  return out;
}

}  // namespace absrank
