#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "absrank/benchmark.hpp"
#include "absrank/bradley_terry.hpp"
#include "absrank/errors.hpp"
#include "absrank/niia.hpp"
#include "absrank/normalize.hpp"
#include "absrank/performance_matrix.hpp"
#include "absrank/rank_function.hpp"
#include "absrank/sampling.hpp"
#include "absrank/sobol.hpp"
#include "absrank/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace absrank;

namespace {

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// small parsing / formatting helpers

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return std::isspace(c) == 0; };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& tok) {
  const std::string t = trim(tok);
  double v{};
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ParseError("not a number: '" + tok + "'");
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_double(tok));
  return out;
}

std::vector<std::string> parse_labels(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& tok : split(s, ',')) {
    std::string t = trim(tok);
    if (t.empty()) throw ParseError("empty label in list '" + s + "'");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_pairs(
    const std::string& s) {
  std::vector<std::pair<std::string, std::string>> out;
  if (trim(s).empty()) return out;
  for (const auto& group : split(s, ';')) {
    const auto labels = parse_labels(group);
    if (labels.size() != 2) {
      throw ParseError("pair '" + group +
                       "' must name exactly two algorithms");
    }
    out.emplace_back(labels[0], labels[1]);
  }
  return out;
}

// Coordinate list: a single number broadcasts to all d dimensions.
Eigen::VectorXd parse_point(const std::string& s, int d) {
  const std::vector<double> vals = parse_doubles(s);
  if (vals.size() == 1) return Eigen::VectorXd::Constant(d, vals[0]);
  if (static_cast<int>(vals.size()) != d) {
    throw ShapeError("expected 1 or " + std::to_string(d) +
                     " coordinates, got " + std::to_string(vals.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), d);
}

// "lo:hi" with scalar or per-dimension comma lists; empty = whole domain.
std::pair<Eigen::VectorXd, Eigen::VectorXd> parse_region(
    const std::string& s, const BenchmarkProblem& prob) {
  if (trim(s).empty()) return {prob.lo, prob.hi};
  const auto sides = split(s, ':');
  if (sides.size() != 2) {
    throw ParseError("region must look like 'lo:hi', got '" + s + "'");
  }
  return {parse_point(sides[0], prob.d), parse_point(sides[1], prob.d)};
}

std::string num(double v, int prec = 6) {
  std::ostringstream o;
  o << std::setprecision(prec) << v;
  return o.str();
}

std::string fixed_num(double v, int prec) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(prec) << v;
  return o.str();
}

// Shortest representation that parses back to the same double.
std::string shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string percent(double frac, int prec = 6) {
  return num(100.0 * frac, prec) + "%";
}

json jvec(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::string join(const std::vector<std::string>& v, const char* sep = ",") {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += sep;
    s += x;
  }
  return s;
}

std::string verdict_text(Direction d,
                         const std::pair<std::string, std::string>& pr) {
  switch (d) {
    case Direction::first_better: return pr.first + " better than " + pr.second;
    case Direction::second_better: return pr.second + " better than " + pr.first;
    case Direction::indistinguishable: return "indistinguishable";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// manifests and artifact plumbing

std::string default_out() {
  const char* env = std::getenv("ABSRANK_OUT");
  return (env != nullptr && *env != '\0') ? env : ".";
}

json make_manifest(const std::string& command, json config) {
  return json{{"tool", "absrank"},
              {"version", kVersion},
              {"command", command},
              {"table", kSobolTableId},
              {"config", std::move(config)}};
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  f << doc.dump(2) << '\n';
}

// Every run records its full effective configuration next to its outputs.
void write_manifest(const std::string& dir, const std::string& command,
                    const json& manifest) {
  fs::create_directories(dir);
  write_json_file(dir + "/" + command + ".manifest.json", manifest);
}

void save_cdf_with_manifest(const AbsRankFn& v, const std::string& path,
                            const json& manifest) {
  std::ostringstream oss;
  save_cdf(v, oss);
  json doc = json::parse(oss.str());
  doc["manifest"] = manifest;
  write_json_file(path, doc);
}

std::map<std::string, AbsRankFn> load_cdf_map(
    const std::string& dir, const std::vector<std::string>& problems) {
  std::map<std::string, AbsRankFn> cdfs;
  for (const auto& label : problems) {
    cdfs.emplace(label, load_cdf_file(dir + "/" + label + ".absrank.json"));
  }
  return cdfs;
}

std::size_t label_width(const std::vector<std::string>& labels,
                        std::size_t header) {
  std::size_t w = header;
  for (const auto& s : labels) w = std::max(w, s.size());
  return w + 2;
}

// ---------------------------------------------------------------------------
// gen-niia

void add_gen_niia(CLI::App& app) {
  struct Opts {
    std::string out = default_out();
  };
  auto o = std::make_shared<Opts>();
  auto* sc = app.add_subcommand(
      "gen-niia", "write the two synthetic rank-reversal datasets as CSV");
  sc->add_option("--out", o->out, "output directory")->capture_default_str();
  sc->callback([o] {
    const auto [d1, d2] = gen_niia_datasets();
    const json manifest = make_manifest("gen-niia", {{"out", o->out}});
    fs::create_directories(o->out);
    const std::string comment = "manifest: " + manifest.dump();
    const std::string p1 = o->out + "/dataset1.csv";
    const std::string p2 = o->out + "/dataset2.csv";
    save_matrix_file(d1, p1, comment);
    save_matrix_file(d2, p2, comment);
    write_manifest(o->out, "gen-niia", manifest);
    std::cout << "wrote " << p1 << " (" << d1.n() << " algorithms x " << d1.p()
              << " problems)\n";
    std::cout << "wrote " << p2 << " (" << d2.n() << " algorithms x " << d2.p()
              << " problems)\n";
  });
}

// ---------------------------------------------------------------------------
// npht

struct NphtOpts {
  std::string csv, pairs, keep, json_path;
  std::string convention = "all-pairs-one-sided";
  double alpha = 0.05;
  bool higher_better = false;
  std::string out = default_out();
};

void run_npht(const NphtOpts& o) {
  PerformanceMatrix m = load_matrix_file(o.csv, !o.higher_better);
  if (!trim(o.keep).empty()) m = project(m, parse_labels(o.keep));
  const auto pairs = parse_pairs(o.pairs);
  const CdConvention conv = cd_convention_from_name(o.convention);
  const NphtReport rep = npht_compare(m, pairs, o.alpha, conv);

  const json manifest = make_manifest(
      "npht", {{"csv", o.csv},
               {"pairs", o.pairs},
               {"alpha", o.alpha},
               {"convention", o.convention},
               {"keep", o.keep},
               {"higher_better", o.higher_better},
               {"json", o.json_path},
               {"out", o.out}});

  const std::size_t w = label_width(rep.algorithms, 9);
  std::cout << std::left << std::setw(static_cast<int>(w)) << "algorithm"
            << "avg-rank\n";
  for (std::size_t i = 0; i < rep.algorithms.size(); ++i) {
    std::cout << std::setw(static_cast<int>(w)) << rep.algorithms[i]
              << fixed_num(rep.avg_ranks(static_cast<Eigen::Index>(i)), 4)
              << "\n";
  }
  std::cout << "\nFriedman chi-square = " << num(rep.friedman.statistic, 10)
            << "  (df = " << rep.friedman.df
            << ", log10 p = " << num(rep.friedman.log10_p, 8);
  if (rep.friedman.p > 0.0) {
    std::cout << ", p = " << num(rep.friedman.p, 4);
  } else {
    std::cout << ", p underflows double precision";
  }
  std::cout << ")\n";
  std::cout << "reject equal-ranking hypothesis at alpha = " << num(o.alpha)
            << ": " << (rep.significant ? "yes" : "no") << "\n";
  std::cout << "critical difference (" << cd_convention_name(conv)
            << ") = " << num(rep.cd, 6) << "\n";
  if (!rep.pairwise.empty()) {
    std::cout << "\npair verdicts (strict only when the omnibus test rejects "
                 "and the gap exceeds the critical difference):\n";
    for (const auto& c : rep.pairwise) {
      std::cout << "  " << c.pair.first << " vs " << c.pair.second
                << ": avg-rank gap = " << num(c.delta, 6) << " -> "
                << verdict_text(c.direction, c.pair) << "\n";
    }
  }

  if (!o.json_path.empty()) {
    json doc;
    doc["manifest"] = manifest;
    doc["algorithms"] = rep.algorithms;
    doc["avg_ranks"] = jvec(rep.avg_ranks);
    doc["friedman"] = {{"chi2", rep.friedman.statistic},
                       {"df", rep.friedman.df},
                       {"log10_p", rep.friedman.log10_p},
                       {"p", rep.friedman.p}};
    doc["alpha"] = rep.alpha;
    doc["convention"] = cd_convention_name(rep.convention);
    doc["significant"] = rep.significant;
    doc["cd"] = rep.cd;
    json pw = json::array();
    for (const auto& c : rep.pairwise) {
      pw.push_back({{"first", c.pair.first},
                    {"second", c.pair.second},
                    {"gap", c.delta},
                    {"direction", direction_name(c.direction)}});
    }
    doc["pairs"] = std::move(pw);
    write_json_file(o.json_path, doc);
  }
  write_manifest(o.out, "npht", manifest);
}

void add_npht(CLI::App& app) {
  auto o = std::make_shared<NphtOpts>();
  auto* sc = app.add_subcommand(
      "npht",
      "rank-based omnibus test with critical-difference pair verdicts");
  sc->add_option("csv", o->csv, "performance matrix CSV")->required();
  sc->add_option("--pairs", o->pairs, "pair list, e.g. \"A,B;C,D\"");
  sc->add_option("--alpha", o->alpha, "significance level")
      ->capture_default_str();
  sc->add_option("--convention", o->convention,
                 "critical-difference multiplicity rule: all-pairs-one-sided, "
                 "control-two-sided, or control-one-sided")
      ->capture_default_str();
  sc->add_option("--keep", o->keep,
                 "project onto this comma-separated algorithm subset first");
  sc->add_flag("--higher-better", o->higher_better,
               "input values are higher-is-better");
  sc->add_option("--json", o->json_path,
                 "also write a machine-readable report to this file");
  sc->add_option("--out", o->out, "manifest directory")->capture_default_str();
  sc->callback([o] { run_npht(*o); });
}

// ---------------------------------------------------------------------------
// bayes

struct BayesOpts {
  std::string csv, pairs, keep, json_path;
  double prior_weight = 0.0, tol = 1e-10;
  int max_iter = 10000;
  bool higher_better = false;
  std::string out = default_out();
};

void run_bayes(const BayesOpts& o) {
  PerformanceMatrix m = load_matrix_file(o.csv, !o.higher_better);
  if (!trim(o.keep).empty()) m = project(m, parse_labels(o.keep));
  const auto pairs = parse_pairs(o.pairs);
  BtOptions bt;
  bt.tol = o.tol;
  bt.max_iter = o.max_iter;
  bt.prior_weight = o.prior_weight;
  const BayesReport rep = bayes_compare(m, pairs, bt);

  const json manifest = make_manifest(
      "bayes", {{"csv", o.csv},
                {"pairs", o.pairs},
                {"prior_weight", o.prior_weight},
                {"tol", o.tol},
                {"max_iter", o.max_iter},
                {"keep", o.keep},
                {"higher_better", o.higher_better},
                {"json", o.json_path},
                {"out", o.out}});

  const std::size_t w = label_width(rep.algorithms, 9);
  std::cout << std::left << std::setw(static_cast<int>(w)) << "algorithm"
            << "strength\n";
  for (std::size_t i = 0; i < rep.algorithms.size(); ++i) {
    std::cout << std::setw(static_cast<int>(w)) << rep.algorithms[i]
              << num(rep.theta(static_cast<Eigen::Index>(i)), 6) << "\n";
  }
  std::cout << "\nfit: " << rep.iterations << " sweeps, "
            << (rep.converged ? "converged" : "NOT converged") << "\n";
  if (!rep.converged) {
    std::cout << "  (an algorithm that never loses has no finite maximum; "
                 "--prior-weight regularizes)\n";
  }
  if (!rep.pairwise.empty()) {
    std::cout << "\npair verdicts (P = probability the first one wins a "
                 "random problem):\n";
    for (const auto& c : rep.pairwise) {
      std::cout << "  " << c.pair.first << " vs " << c.pair.second
                << ": P = " << fixed_num(c.prob, 6) << " -> "
                << verdict_text(c.direction, c.pair) << "\n";
    }
  }

  if (!o.json_path.empty()) {
    json doc;
    doc["manifest"] = manifest;
    doc["algorithms"] = rep.algorithms;
    doc["theta"] = jvec(rep.theta);
    doc["iterations"] = rep.iterations;
    doc["converged"] = rep.converged;
    json pw = json::array();
    for (const auto& c : rep.pairwise) {
      pw.push_back({{"first", c.pair.first},
                    {"second", c.pair.second},
                    {"prob", c.prob},
                    {"direction", direction_name(c.direction)}});
    }
    doc["pairs"] = std::move(pw);
    write_json_file(o.json_path, doc);
  }
  write_manifest(o.out, "bayes", manifest);
}

void add_bayes(CLI::App& app) {
  auto o = std::make_shared<BayesOpts>();
  auto* sc = app.add_subcommand(
      "bayes", "pairwise win-probability comparison via strength fitting");
  sc->add_option("csv", o->csv, "performance matrix CSV")->required();
  sc->add_option("--pairs", o->pairs, "pair list, e.g. \"A,B;C,D\"");
  sc->add_option("--prior-weight", o->prior_weight,
                 "pseudo-wins added in both directions of every pair")
      ->capture_default_str();
  sc->add_option("--tol", o->tol, "convergence tolerance")
      ->capture_default_str();
  sc->add_option("--max-iter", o->max_iter, "sweep limit")
      ->capture_default_str();
  sc->add_option("--keep", o->keep,
                 "project onto this comma-separated algorithm subset first");
  sc->add_flag("--higher-better", o->higher_better,
               "input values are higher-is-better");
  sc->add_option("--json", o->json_path,
                 "also write a machine-readable report to this file");
  sc->add_option("--out", o->out, "manifest directory")->capture_default_str();
  sc->callback([o] { run_bayes(*o); });
}

// ---------------------------------------------------------------------------
// sample

struct SampleOpts {
  std::string problem, region, name;
  int log2n = 20;
  std::uint32_t skip = 1;
  double known_min = 0.0;
  CLI::Option* known_min_opt = nullptr;
  std::string out = default_out();
};

void run_sample(const SampleOpts& o) {
  const BenchmarkProblem prob = load_problem_file(o.problem);
  const auto [lo, hi] = parse_region(o.region, prob);
  SobolConfig cfg;
  cfg.dim = prob.d;
  cfg.log2n = o.log2n;
  cfg.skip = o.skip;
  cfg.table = kSobolTableId;
  const SampleSet s = sample_function(prob, lo, hi, cfg);

  std::string stem = trim(o.name);
  if (stem.empty()) stem = prob.name;
  if (stem.empty()) stem = fs::path(o.problem).stem().string();

  std::optional<double> known_min;
  if (o.known_min_opt->count() > 0) known_min = o.known_min;

  json config = {{"problem", o.problem}, {"region", o.region},
                 {"log2n", o.log2n},     {"skip", o.skip},
                 {"name", stem},         {"out", o.out}};
  config["known_min"] = known_min ? json(*known_min) : json(nullptr);
  const json manifest = make_manifest("sample", std::move(config));

  fs::create_directories(o.out);
  const std::string samples_path = o.out + "/" + stem + ".samples.json";
  save_samples_file(s, samples_path, manifest.dump());

  CdfMetadata meta;
  meta.problem = stem;
  meta.sobol_skip = o.skip;
  meta.table = kSobolTableId;
  const AbsRankFn v = empirical_cdf(s.values, known_min, std::nullopt, meta);
  const std::string cdf_path = o.out + "/" + stem + ".absrank.json";
  save_cdf_with_manifest(v, cdf_path, manifest);
  write_manifest(o.out, "sample", manifest);

  std::cout << "sampled " << s.values.size() << " values in ["
            << num(s.values(0), 6) << ", "
            << num(s.values(s.values.size() - 1), 6) << "]\n";
  std::cout << "wrote " << samples_path << "\n";
  std::cout << "wrote " << cdf_path << "\n";
}

void add_sample(CLI::App& app) {
  auto o = std::make_shared<SampleOpts>();
  auto* sc = app.add_subcommand(
      "sample",
      "sample a problem's values quasi-randomly and fit its empirical value "
      "distribution");
  sc->add_option("problem", o->problem, "problem descriptor JSON")->required();
  sc->add_option("--region", o->region,
                 "box to sample, 'lo:hi' with scalars or comma lists "
                 "(default: whole domain)");
  sc->add_option("--log2n", o->log2n, "sample 2^log2n points")
      ->capture_default_str();
  sc->add_option("--skip", o->skip, "leading sequence points to drop")
      ->capture_default_str();
  o->known_min_opt = sc->add_option(
      "--known-min", o->known_min,
      "exact lower bound of achievable values (replaces the lower tail)");
  sc->add_option("--name", o->name, "artifact stem (default: problem name)");
  sc->add_option("--out", o->out, "output directory")->capture_default_str();
  sc->callback([o] { run_sample(*o); });
}

// ---------------------------------------------------------------------------
// absrank

struct AbsrankOpts {
  std::string csv, cdf_dir, json_path;
  bool median = false, fraction = false, higher_better = false;
  std::string out = default_out();
};

double row_median(const Eigen::Ref<const Eigen::VectorXd>& row) {
  std::vector<double> v(row.begin(), row.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void run_absrank(const AbsrankOpts& o) {
  const PerformanceMatrix m = load_matrix_file(o.csv, !o.higher_better);
  const auto cdfs = load_cdf_map(o.cdf_dir, m.problems);
  const PerformanceMatrix v = absolute_normalize(m, cdfs);

  Eigen::VectorXd aar(v.n());
  if (o.median) {
    for (Eigen::Index i = 0; i < v.n(); ++i) aar(i) = row_median(v.values.row(i));
  } else {
    aar = v.values.rowwise().mean();
  }

  const json manifest = make_manifest(
      "absrank", {{"csv", o.csv},
                  {"cdf_dir", o.cdf_dir},
                  {"aggregation", o.median ? "median" : "mean"},
                  {"fraction", o.fraction},
                  {"higher_better", o.higher_better},
                  {"json", o.json_path},
                  {"out", o.out}});

  fs::create_directories(o.out);
  const std::string stem = fs::path(o.csv).stem().string();
  const std::string v_path = o.out + "/" + stem + ".v.csv";
  save_matrix_file(v, v_path, "manifest: " + manifest.dump());

  // Ranking table, best (lowest aggregate absolute rank) first.
  std::vector<std::size_t> order(v.algorithms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return aar(static_cast<Eigen::Index>(a)) < aar(static_cast<Eigen::Index>(b));
  });

  const char* agg = o.median ? "median" : "mean";
  const std::size_t w = label_width(v.algorithms, 9);
  std::cout << "absolute ranks written to " << v_path << "\n\n";
  std::cout << std::left << std::setw(static_cast<int>(w)) << "algorithm"
            << "AAR\n";
  for (const std::size_t i : order) {
    const double a = aar(static_cast<Eigen::Index>(i));
    std::cout << std::setw(static_cast<int>(w)) << v.algorithms[i]
              << (o.fraction ? num(a, 6) : percent(a)) << "\n";
  }
  std::cout << "\n(AAR = " << agg << " absolute rank across " << v.p()
            << " problems; lower is better)\n";

  if (!o.json_path.empty()) {
    json doc;
    doc["manifest"] = manifest;
    doc["algorithms"] = v.algorithms;
    doc["aar"] = jvec(aar);  // fractions, row order of the input
    doc["aggregation"] = agg;
    doc["v_csv"] = v_path;
    write_json_file(o.json_path, doc);
  }
  write_manifest(o.out, "absrank", manifest);
}

void add_absrank(CLI::App& app) {
  auto o = std::make_shared<AbsrankOpts>();
  auto* sc = app.add_subcommand(
      "absrank",
      "map a performance matrix through per-problem value distributions and "
      "report aggregate absolute ranks");
  sc->add_option("csv", o->csv, "performance matrix CSV")->required();
  sc->add_option("--cdf-dir", o->cdf_dir,
                 "directory holding <problem>.absrank.json per column")
      ->required();
  sc->add_flag("--median", o->median,
               "aggregate by median instead of mean");
  sc->add_flag("--fraction", o->fraction,
               "print fractions instead of percent");
  sc->add_flag("--higher-better", o->higher_better,
               "input values are higher-is-better");
  sc->add_option("--json", o->json_path,
                 "also write a machine-readable report to this file");
  sc->add_option("--out", o->out, "output directory")->capture_default_str();
  sc->callback([o] { run_absrank(*o); });
}

// ---------------------------------------------------------------------------
// select-delta

struct SelectDeltaOpts {
  std::string problem, metrics, deltas, center, json_path;
  int log2n = 15;
  std::uint32_t skip = 1;
  std::string out = default_out();
};

void run_select_delta(const SelectDeltaOpts& o) {
  const BenchmarkProblem prob = load_problem_file(o.problem);
  const PerformanceMatrix metrics = load_matrix_file(o.metrics);
  if (metrics.p() != 1) {
    throw ShapeError("metrics CSV must have exactly one value column, got " +
                     std::to_string(metrics.p()));
  }
  const Eigen::VectorXd center =
      trim(o.center).empty() ? prob.x_star : parse_point(o.center, prob.d);
  const std::vector<double> deltas = parse_doubles(o.deltas);
  SobolConfig cfg;
  cfg.dim = prob.d;
  cfg.log2n = o.log2n;
  cfg.skip = o.skip;
  cfg.table = kSobolTableId;
  const DeltaSelection sel =
      select_delta(prob, center, metrics.values.col(0), deltas, cfg);

  const json manifest = make_manifest(
      "select-delta", {{"problem", o.problem},
                       {"metrics", o.metrics},
                       {"deltas", o.deltas},
                       {"center", o.center},
                       {"log2n", o.log2n},
                       {"skip", o.skip},
                       {"json", o.json_path},
                       {"out", o.out}});

  std::cout << "delta       gap-score\n";
  for (std::size_t k = 0; k < sel.deltas.size(); ++k) {
    std::cout << std::left << std::setw(12) << num(sel.deltas[k], 6)
              << num(sel.scores(static_cast<Eigen::Index>(k)), 6);
    if (static_cast<Eigen::Index>(k) == sel.chosen_index) std::cout << "  *";
    if (sel.clipped[k]) std::cout << "  (cube clipped to the domain)";
    std::cout << "\n";
  }
  std::cout << "\nchosen delta: " << num(sel.chosen, 6)
            << "  (largest spread of the metric values; ties go to the "
               "smallest delta)\n";

  if (!o.json_path.empty()) {
    json doc;
    doc["manifest"] = manifest;
    doc["deltas"] = sel.deltas;
    doc["scores"] = jvec(sel.scores);
    doc["clipped"] = sel.clipped;
    doc["chosen"] = sel.chosen;
    doc["chosen_index"] = sel.chosen_index;
    write_json_file(o.json_path, doc);
  }
  write_manifest(o.out, "select-delta", manifest);
}

void add_select_delta(CLI::App& app) {
  auto o = std::make_shared<SelectDeltaOpts>();
  auto* sc = app.add_subcommand(
      "select-delta",
      "pick the sampling half-width that best separates a column of metric "
      "values");
  sc->add_option("problem", o->problem, "problem descriptor JSON")->required();
  sc->add_option("--metrics", o->metrics,
                 "single-column CSV of per-algorithm metric values")
      ->required();
  sc->add_option("--deltas", o->deltas, "candidate half-widths, e.g. 0.1,0.2")
      ->required();
  sc->add_option("--center", o->center,
                 "cube center (default: the problem's optimum location)");
  sc->add_option("--log2n", o->log2n, "coarse budget: 2^log2n points per cube")
      ->capture_default_str();
  sc->add_option("--skip", o->skip, "leading sequence points to drop")
      ->capture_default_str();
  sc->add_option("--json", o->json_path,
                 "also write a machine-readable report to this file");
  sc->add_option("--out", o->out, "manifest directory")->capture_default_str();
  sc->callback([o] { run_select_delta(*o); });
}

// ---------------------------------------------------------------------------
// niia-check

struct NiiaCheckOpts {
  std::string csv, pair, subsets, cdf_dir, json_path;
  std::string method = "avg-rank";
  std::string convention = "all-pairs-one-sided";
  int leave_k = 1;
  int size_limit = 20;
  bool all_subsets = false, gate = false, higher_better = false;
  double alpha = 0.05, prior_weight = 0.0, tol = 1e-10;
  int max_iter = 10000;
  CLI::Option* leave_opt = nullptr;
  CLI::Option* subsets_opt = nullptr;
  CLI::Option* all_opt = nullptr;
  std::string out = default_out();
};

std::string subset_label(const std::vector<std::string>& all,
                         const std::vector<std::string>& kept) {
  if (kept.size() == all.size()) return "full set";
  std::unordered_set<std::string> k(kept.begin(), kept.end());
  std::vector<std::string> dropped;
  for (const auto& a : all) {
    if (k.find(a) == k.end()) dropped.push_back(a);
  }
  if (dropped.size() <= 4) return "drop " + join(dropped);
  if (kept.size() <= 8) return "keep " + join(kept);
  return "keep " + std::to_string(kept.size()) + " of " +
         std::to_string(all.size());
}

void run_niia_check(const NiiaCheckOpts& o) {
  const PerformanceMatrix m = load_matrix_file(o.csv, !o.higher_better);
  const auto pairs = parse_pairs(o.pair);
  if (pairs.size() != 1) {
    throw ParseError("--pair must name exactly one pair, e.g. --pair A,B");
  }
  const NiiaMethod method = niia_method_from_name(o.method);

  SubsetStrategy strat;
  if (o.all_opt->count() > 0) {
    strat.kind = SubsetStrategy::Kind::all_subsets;
    strat.size_limit = o.size_limit;
  } else if (o.subsets_opt->count() > 0) {
    strat.kind = SubsetStrategy::Kind::explicit_list;
    for (const auto& group : split(o.subsets, ';')) {
      strat.subsets.push_back(parse_labels(group));
    }
  } else {
    strat.kind = SubsetStrategy::Kind::leave_k_out;
    strat.k = o.leave_k;
  }

  NiiaOptions nopts;
  nopts.gate_avg_rank = o.gate;
  nopts.alpha = o.alpha;
  nopts.convention = cd_convention_from_name(o.convention);
  nopts.bt.tol = o.tol;
  nopts.bt.max_iter = o.max_iter;
  nopts.bt.prior_weight = o.prior_weight;

  std::map<std::string, AbsRankFn> cdfs;
  if (method == NiiaMethod::absolute) {
    if (trim(o.cdf_dir).empty()) {
      throw ParseError("the absolute method needs --cdf-dir");
    }
    cdfs = load_cdf_map(o.cdf_dir, m.problems);
  }

  const NiiaResult res = niia_check(m, method, pairs[0], strat, cdfs, nopts);

  const json manifest = make_manifest(
      "niia-check", {{"csv", o.csv},
                     {"pair", o.pair},
                     {"method", o.method},
                     {"strategy", strat.kind == SubsetStrategy::Kind::all_subsets
                                      ? "all-subsets"
                                      : strat.kind == SubsetStrategy::Kind::explicit_list
                                            ? "explicit"
                                            : "leave-" + std::to_string(o.leave_k) + "-out"},
                     {"subsets", o.subsets},
                     {"size_limit", o.size_limit},
                     {"cdf_dir", o.cdf_dir},
                     {"gate", o.gate},
                     {"alpha", o.alpha},
                     {"convention", o.convention},
                     {"prior_weight", o.prior_weight},
                     {"tol", o.tol},
                     {"max_iter", o.max_iter},
                     {"higher_better", o.higher_better},
                     {"json", o.json_path},
                     {"out", o.out}});

  std::cout << "method " << o.method << ", pair " << pairs[0].first << " vs "
            << pairs[0].second << "\n";
  int flips = 0;
  if (!res.reports.empty()) {
    const auto& first = res.reports.front();
    std::cout << "full-matrix verdict: "
              << verdict_text(first.direction_full, first.pair) << "  ("
              << first.evidence_kind << " " << num(first.evidence_full_first, 6)
              << " / " << num(first.evidence_full_second, 6) << ")\n\n";
    for (const auto& r : res.reports) {
      if (r.flipped) ++flips;
      std::cout << "  " << std::left << std::setw(28)
                << subset_label(m.algorithms, r.subset)
                << std::setw(26) << verdict_text(r.direction_subset, r.pair)
                << (r.flipped ? "FLIP  " : "      ") << "("
                << num(r.evidence_subset_first, 6) << " / "
                << num(r.evidence_subset_second, 6) << ")\n";
    }
  }
  std::cout << "\nevaluated " << res.reports.size() << " subsets: " << flips
            << " flips, " << res.skipped << " skipped\n";

  if (!o.json_path.empty()) {
    json doc = json::parse(niia_result_to_json(res));
    doc["manifest"] = manifest;
    write_json_file(o.json_path, doc);
  }
  write_manifest(o.out, "niia-check", manifest);
}

void add_niia_check(CLI::App& app) {
  auto o = std::make_shared<NiiaCheckOpts>();
  auto* sc = app.add_subcommand(
      "niia-check",
      "test whether a pair's verdict survives dropping other algorithms");
  sc->add_option("csv", o->csv, "performance matrix CSV")->required();
  sc->add_option("--pair", o->pair, "pair under test, e.g. A,B")->required();
  sc->add_option("--method", o->method,
                 "comparison method: avg-rank, bradley-terry, or absolute")
      ->capture_default_str();
  o->leave_opt = sc->add_option(
      "--leave-k-out", o->leave_k,
      "evaluate every subset dropping exactly k non-pair algorithms");
  o->subsets_opt =
      sc->add_option("--subsets", o->subsets,
                     "explicit subsets, e.g. \"A,B,C1;A,B,C2\"");
  o->all_opt = sc->add_flag("--all-subsets", o->all_subsets,
                            "enumerate every proper subset keeping the pair");
  o->leave_opt->excludes(o->subsets_opt);
  o->leave_opt->excludes(o->all_opt);
  o->subsets_opt->excludes(o->all_opt);
  sc->add_option("--size-limit", o->size_limit,
                 "algorithm-count cap for --all-subsets")
      ->capture_default_str();
  sc->add_option("--cdf-dir", o->cdf_dir,
                 "per-problem value distributions (absolute method)");
  sc->add_flag("--gate", o->gate,
               "gate avg-rank verdicts on omnibus significance and the "
               "critical difference");
  sc->add_option("--alpha", o->alpha, "significance level for --gate")
      ->capture_default_str();
  sc->add_option("--convention", o->convention,
                 "critical-difference multiplicity rule for --gate")
      ->capture_default_str();
  sc->add_option("--prior-weight", o->prior_weight,
                 "bradley-terry pseudo-win prior")
      ->capture_default_str();
  sc->add_option("--tol", o->tol, "bradley-terry convergence tolerance")
      ->capture_default_str();
  sc->add_option("--max-iter", o->max_iter, "bradley-terry sweep limit")
      ->capture_default_str();
  sc->add_flag("--higher-better", o->higher_better,
               "input values are higher-is-better");
  sc->add_option("--json", o->json_path,
                 "also write the reports as JSON to this file");
  sc->add_option("--out", o->out, "manifest directory")->capture_default_str();
  sc->callback([o] { run_niia_check(*o); });
}

// ---------------------------------------------------------------------------
// cdf-curve

struct CdfCurveOpts {
  std::string cdf;
  int points = 512;
  double lo = 0.0, hi = 0.0;
  CLI::Option* lo_opt = nullptr;
  CLI::Option* hi_opt = nullptr;
  std::string out = default_out();
};

std::pair<double, double> display_range(const AbsRankFn& fn) {
  if (fn.bounded_support()) return fn.support();
  switch (fn.kind()) {
    case CdfKind::gaussian: {
      const auto& g = std::get<detail::GaussianCdf>(fn.data());
      return {g.mu - 5.0 * g.sigma, g.mu + 5.0 * g.sigma};
    }
    case CdfKind::rounds: {  // normal-approx mode (convolution is bounded)
      const auto& r = std::get<detail::RoundsCdf>(fn.data());
      return {r.mu - 5.0 * r.sigma, r.mu + 5.0 * r.sigma};
    }
    case CdfKind::empirical: {
      const auto& e = std::get<detail::EmpiricalCdf>(fn.data());
      const double lo = e.knots(0);
      const double hi = e.knots(e.knots.size() - 1);
      const double pad = 0.1 * (hi - lo);
      return {e.known_min.value_or(lo - pad), e.known_max.value_or(hi + pad)};
    }
    case CdfKind::budget: {
      const auto& b = std::get<detail::BudgetCdf>(fn.data());
      return display_range(*b.base);
    }
    default:
      return fn.support();  // remaining kinds are bounded
  }
}

void run_cdf_curve(const CdfCurveOpts& o) {
  const AbsRankFn fn = load_cdf_file(o.cdf);
  if (o.points < 2) throw DomainError("cdf-curve: need at least 2 points");
  const bool have_lo = o.lo_opt->count() > 0;
  const bool have_hi = o.hi_opt->count() > 0;
  if (have_lo != have_hi) {
    throw ParseError("--lo and --hi must be given together");
  }
  double lo, hi;
  if (have_lo) {
    lo = o.lo;
    hi = o.hi;
    if (!(lo < hi)) throw DomainError("cdf-curve: need lo < hi");
  } else {
    std::tie(lo, hi) = display_range(fn);
  }

  const json manifest = make_manifest(
      "cdf-curve", {{"cdf", o.cdf},
                    {"points", o.points},
                    {"lo", lo},
                    {"hi", hi},
                    {"out", o.out}});

  std::cout << "# manifest: " << manifest.dump() << "\n";
  std::cout << "t,v\n";
  for (int i = 0; i < o.points; ++i) {
    const double t =
        lo + (hi - lo) * static_cast<double>(i) / (o.points - 1.0);
    std::cout << shortest(t) << "," << shortest(fn(t)) << "\n";
  }
  write_manifest(o.out, "cdf-curve", manifest);
}

void add_cdf_curve(CLI::App& app) {
  auto o = std::make_shared<CdfCurveOpts>();
  auto* sc = app.add_subcommand(
      "cdf-curve",
      "emit (t, v(t)) pairs of a stored value distribution as CSV");
  sc->add_option("cdf", o->cdf, "stored distribution (.absrank.json)")
      ->required();
  sc->add_option("--points", o->points, "number of curve points")
      ->capture_default_str();
  o->lo_opt = sc->add_option("--lo", o->lo, "curve range start");
  o->hi_opt = sc->add_option("--hi", o->hi, "curve range end");
  sc->add_option("--out", o->out, "manifest directory")->capture_default_str();
  sc->callback([o] { run_cdf_curve(*o); });
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  CLI::App app{
      "absolute-ranking toolkit: value-distribution normalization for "
      "benchmark comparisons, rank-reversal diagnostics, and the classical "
      "rank pipeline for contrast"};
  app.set_version_flag("--version", std::string("absrank ") + kVersion);
  app.require_subcommand(1);

  add_gen_niia(app);
  add_npht(app);
  add_bayes(app);
  add_sample(app);
  add_absrank(app);
  add_select_delta(app);
  add_niia_check(app);
  add_cdf_curve(app);

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const CapabilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
