#include <doctest.h>

#include <absrank/errors.hpp>
#include <absrank/niia.hpp>
#include <absrank/normalize.hpp>
#include <absrank/rank_function.hpp>

#include <json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

TEST_SUITE("niia") {

using namespace absrank;

namespace {

// One shared value distribution per problem: scores in the synthetic tables
// are integers in [1, 100], uniformly comparable on (0, 101).
std::map<std::string, AbsRankFn> uniform_cdfs(const PerformanceMatrix& m) {
  std::map<std::string, AbsRankFn> cdfs;
  for (const auto& prob : m.problems) cdfs.emplace(prob, cdf_uniform(0.0, 101.0));
  return cdfs;
}

SubsetStrategy explicit_subsets(std::vector<std::vector<std::string>> subsets) {
  SubsetStrategy s;
  s.kind = SubsetStrategy::Kind::explicit_list;
  s.subsets = std::move(subsets);
  return s;
}

}  // namespace

TEST_CASE("the synthetic tables have the advertised structure") {
  const auto [d1, d2] = gen_niia_datasets();

  REQUIRE(d1.n() == 3);
  REQUIRE(d1.p() == 500);
  CHECK(d1.algorithms == std::vector<std::string>{"A", "B", "C1"});
  // Early regime: A far ahead; late regime: B ahead by one; C1 always last.
  CHECK(d1.values(0, 0) == 1.0);
  CHECK(d1.values(1, 0) == 99.0);
  CHECK(d1.values(2, 0) == 100.0);
  CHECK(d1.values(0, 499) == 99.0);
  CHECK(d1.values(1, 499) == 98.0);
  CHECK(d1.values(2, 499) == 100.0);
  CHECK(d1.values.row(0).head(100).minCoeff() == 1.0);
  CHECK(d1.values.row(0).head(100).maxCoeff() == 1.0);

  REQUIRE(d2.n() == 100);
  REQUIRE(d2.p() == 500);
  CHECK(d2.algorithms[3] == "C2");
  CHECK(d2.algorithms[99] == "C98");
  // Fillers sit at i early and i-1 late.
  CHECK(d2.values(3, 0) == 2.0);
  CHECK(d2.values(3, 499) == 1.0);
  CHECK(d2.values(99, 0) == 98.0);
  CHECK(d2.values(99, 499) == 97.0);

  // Projecting the padded table onto the core reproduces it exactly.
  const auto proj = project(d2, {"A", "B", "C1"});
  CHECK(proj.algorithms == d1.algorithms);
  CHECK(proj.problems == d1.problems);
  CHECK(proj.values == d1.values);
}

TEST_CASE("average ranks reverse when the filler algorithms are dropped") {
  const auto [d1, d2] = gen_niia_datasets();
  (void)d1;

  const auto res =
      niia_check(d2, NiiaMethod::avg_rank, {"A", "B"},
                 explicit_subsets({{"A", "B", "C1"}}));
  REQUIRE(res.reports.size() == 1);
  CHECK(res.skipped == 0);

  const auto& r = res.reports[0];
  CHECK(r.method == std::string{"avg-rank"});
  CHECK(r.evidence_kind == std::string{"avg-rank"});
  // Full field: A's occasional outright wins buy it a far better mean rank.
  CHECK(r.evidence_full_first == doctest::Approx(79.4).epsilon(1e-13));
  CHECK(r.evidence_full_second == doctest::Approx(98.2).epsilon(1e-13));
  CHECK(r.direction_full == Direction::first_better);
  // Core field: B beats A on four problems in five and the verdict turns.
  CHECK(r.evidence_subset_first == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(r.evidence_subset_second == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(r.direction_subset == Direction::second_better);
  CHECK(r.flipped);

  // The same reversal survives significance gating: both gaps clear the
  // omnibus test and the critical difference at the 0.05 level.
  NiiaOptions gated;
  gated.gate_avg_rank = true;
  const auto res_gated =
      niia_check(d2, NiiaMethod::avg_rank, {"A", "B"},
                 explicit_subsets({{"A", "B", "C1"}}), {}, gated);
  const auto& g = res_gated.reports.at(0);
  CHECK(g.direction_full == Direction::first_better);
  CHECK(g.direction_subset == Direction::second_better);
  CHECK(g.flipped);
  CHECK(g.evidence_full_first == r.evidence_full_first);
  CHECK(g.evidence_subset_second == r.evidence_subset_second);
}

TEST_CASE("win-probability strengths reverse on the same projection") {
  const auto [d1, d2] = gen_niia_datasets();
  (void)d1;

  const auto res =
      niia_check(d2, NiiaMethod::bradley_terry, {"A", "B"},
                 explicit_subsets({{"A", "B", "C1"}}));
  REQUIRE(res.reports.size() == 1);
  const auto& r = res.reports[0];
  CHECK(r.evidence_kind == std::string{"win-prob"});
  CHECK(r.evidence_full_first == doctest::Approx(0.99923).epsilon(1e-5));
  CHECK(r.evidence_full_second ==
        doctest::Approx(1.0 - r.evidence_full_first).epsilon(1e-14));
  CHECK(r.direction_full == Direction::first_better);
  CHECK(r.evidence_subset_first == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(r.direction_subset == Direction::second_better);
  CHECK(r.flipped);
}

TEST_CASE("absolute levels are identical on every projection: no flips") {
  const auto [d1, d2] = gen_niia_datasets();

  // Restrict to a 12-algorithm field and leave each filler out in turn.
  std::vector<std::string> field = {"A", "B", "C1"};
  for (int i = 2; i <= 10; ++i) field.push_back("C" + std::to_string(i));
  const auto m = project(d2, field);
  const auto cdfs = uniform_cdfs(m);

  SubsetStrategy strat;
  strat.kind = SubsetStrategy::Kind::leave_k_out;
  strat.k = 1;
  const auto res =
      niia_check(m, NiiaMethod::absolute, {"A", "B"}, strat, cdfs);

  // 12 removal candidates, 2 of which would touch the pair.
  CHECK(res.skipped == 2);
  REQUIRE(res.reports.size() == 10);
  for (const auto& r : res.reports) {
    CAPTURE(r.subset.size());
    CHECK(r.evidence_kind == std::string{"mean-absolute-rank"});
    CHECK_FALSE(r.flipped);
    CHECK(r.direction_full == r.direction_subset);
    // Row means pass through projection untouched, bit for bit.
    CHECK(r.evidence_subset_first == r.evidence_full_first);
    CHECK(r.evidence_subset_second == r.evidence_full_second);
  }

  // The level gap matches the hand computation on the core rows: A's mean
  // level is (100*(1/101) + 400*(99/101))/500, B's (100*(99/101) +
  // 400*(98/101))/500, and the fillers change neither.
  const auto& r0 = res.reports.front();
  CHECK(r0.evidence_full_first ==
        doctest::Approx(39700.0 / 50500.0).epsilon(1e-13));
  CHECK(r0.evidence_full_second ==
        doctest::Approx(49100.0 / 50500.0).epsilon(1e-13));
  CHECK(r0.direction_full == Direction::first_better);

  // On the raw three-algorithm table the absolute verdict is the same one.
  const auto core =
      niia_check(d1, NiiaMethod::absolute, {"A", "B"},
                 explicit_subsets({{"A", "B"}}), uniform_cdfs(d1));
  CHECK(core.reports.at(0).direction_full == Direction::first_better);
  CHECK(core.reports.at(0).direction_subset == Direction::first_better);
  CHECK_FALSE(core.reports.at(0).flipped);
  CHECK(core.reports.at(0).evidence_full_first ==
        r0.evidence_full_first);  // same rows, same levels
}

TEST_CASE("swapping the pair mirrors directions and evidence") {
  const auto [d1, d2] = gen_niia_datasets();
  (void)d1;
  const auto strat = explicit_subsets({{"A", "B", "C1"}});

  const auto ab = niia_check(d2, NiiaMethod::avg_rank, {"A", "B"}, strat);
  const auto ba = niia_check(d2, NiiaMethod::avg_rank, {"B", "A"}, strat);
  const auto& rab = ab.reports.at(0);
  const auto& rba = ba.reports.at(0);
  CHECK(rba.direction_full == Direction::second_better);
  CHECK(rba.direction_subset == Direction::first_better);
  CHECK(rba.flipped == rab.flipped);
  CHECK(rba.evidence_full_first == rab.evidence_full_second);
  CHECK(rba.evidence_full_second == rab.evidence_full_first);
  CHECK(rba.evidence_subset_first == rab.evidence_subset_second);
}

TEST_CASE("explicit subsets missing the pair are skipped and counted") {
  const auto [d1, d2] = gen_niia_datasets();
  (void)d2;
  const auto res = niia_check(
      d1, NiiaMethod::avg_rank, {"A", "B"},
      explicit_subsets({{"A", "C1"}, {"B", "C1"}, {"A", "B"}}));
  CHECK(res.skipped == 2);
  REQUIRE(res.reports.size() == 1);
  CHECK(res.reports[0].subset == std::vector<std::string>{"A", "B"});
  // Two-algorithm ranking: A still loses four problems in five.
  CHECK(res.reports[0].evidence_subset_first ==
        doctest::Approx(1.8).epsilon(1e-14));
  CHECK(res.reports[0].direction_subset == Direction::second_better);
}

TEST_CASE("exhaustive enumeration visits every proper pair-keeping subset") {
  Eigen::MatrixXd v(4, 3);
  v << 1, 2, 3,
       2, 1, 1,
       5, 5, 5,
       0, 9, 9;
  const auto m = make_matrix({"a", "b", "x", "y"},
                             {"p1", "p2", "p3"}, v);

  SubsetStrategy strat;
  strat.kind = SubsetStrategy::Kind::all_subsets;
  const auto res = niia_check(m, NiiaMethod::avg_rank, {"a", "b"}, strat);
  CHECK(res.skipped == 0);
  REQUIRE(res.reports.size() == 3);  // {a,b}, {a,b,x}, {a,b,y}; never all 4
  CHECK(res.reports[0].subset == std::vector<std::string>{"a", "b"});
  CHECK(res.reports[1].subset == std::vector<std::string>{"a", "b", "x"});
  CHECK(res.reports[2].subset == std::vector<std::string>{"a", "b", "y"});
  for (const auto& r : res.reports) {
    CHECK(r.direction_full == Direction::second_better);  // b leads 2:1
  }

  strat.size_limit = 3;  // 4 algorithms now exceed the cap
  CHECK_THROWS_AS(
      (void)niia_check(m, NiiaMethod::avg_rank, {"a", "b"}, strat),
      CapabilityError);
}

TEST_CASE("leave-k-out counts skipped removals in bulk") {
  const auto [d1, d2] = gen_niia_datasets();

  SubsetStrategy strat;
  strat.kind = SubsetStrategy::Kind::leave_k_out;
  strat.k = 1;
  const auto res =
      niia_check(d1, NiiaMethod::bradley_terry, {"A", "B"}, strat);
  // Three single removals; the two touching the pair are skipped.
  CHECK(res.skipped == 2);
  REQUIRE(res.reports.size() == 1);
  CHECK(res.reports[0].subset == std::vector<std::string>{"A", "B"});
  // Head-to-head only: P(A beats B) is the raw win share 100/500.
  CHECK(res.reports[0].evidence_subset_first ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK_FALSE(res.reports[0].flipped);  // the core verdict already agrees

  // k must leave the pair plus at least nothing else: 1 <= k <= n-2.
  strat.k = 0;
  CHECK_THROWS_AS(
      (void)niia_check(d1, NiiaMethod::avg_rank, {"A", "B"}, strat),
      DomainError);
  strat.k = 2;  // n = 3 allows at most k = 1
  CHECK_THROWS_AS(
      (void)niia_check(d1, NiiaMethod::avg_rank, {"A", "B"}, strat),
      DomainError);

  // Enumeration size guard fires before any work happens.
  strat.k = 4;  // C(100, 4) is about 3.9 million subsets
  CHECK_THROWS_AS(
      (void)niia_check(d2, NiiaMethod::avg_rank, {"A", "B"}, strat),
      CapabilityError);
}

TEST_CASE("significance gating turns weak verdicts indeterminate") {
  // Four problems cannot reach significance at 0.05, so the gated verdict
  // is indeterminate even though the raw average ranks differ.
  Eigen::MatrixXd v(3, 4);
  v << 1, 1, 2, 4,
       2, 2, 3, 2,
       9, 9, 0, 9;
  const auto m = make_matrix({"a", "b", "c"}, {"p1", "p2", "p3", "p4"}, v);
  const auto strat = explicit_subsets({{"a", "b"}});

  const auto raw = niia_check(m, NiiaMethod::avg_rank, {"a", "b"}, strat);
  CHECK(raw.reports.at(0).direction_full == Direction::first_better);

  NiiaOptions gated;
  gated.gate_avg_rank = true;
  const auto g =
      niia_check(m, NiiaMethod::avg_rank, {"a", "b"}, strat, {}, gated);
  CHECK(g.reports.at(0).direction_full == Direction::indistinguishable);
  CHECK(g.reports.at(0).direction_subset == Direction::indistinguishable);
  CHECK_FALSE(g.reports.at(0).flipped);  // indeterminate verdicts never flip
}

TEST_CASE("niia_check validates its labels") {
  const auto [d1, d2] = gen_niia_datasets();
  (void)d2;
  const auto strat = explicit_subsets({{"A", "B"}});
  CHECK_THROWS_AS(
      (void)niia_check(d1, NiiaMethod::avg_rank, {"A", "A"}, strat),
      LabelError);
  CHECK_THROWS_AS(
      (void)niia_check(d1, NiiaMethod::avg_rank, {"A", "ghost"}, strat),
      LabelError);
  // A subset naming an unknown algorithm fails in the projection.
  CHECK_THROWS_AS(
      (void)niia_check(d1, NiiaMethod::avg_rank, {"A", "B"},
                       explicit_subsets({{"A", "B", "ghost"}})),
      LabelError);
  // The absolute method cannot run without a distribution per problem.
  CHECK_THROWS_AS(
      (void)niia_check(d1, NiiaMethod::absolute, {"A", "B"}, strat),
      LabelError);
}

TEST_CASE("method names round trip and reject unknowns") {
  CHECK(niia_method_from_name("avg-rank") == NiiaMethod::avg_rank);
  CHECK(niia_method_from_name("bradley-terry") == NiiaMethod::bradley_terry);
  CHECK(niia_method_from_name("absolute") == NiiaMethod::absolute);
  CHECK(niia_method_name(NiiaMethod::avg_rank) == std::string{"avg-rank"});
  CHECK(niia_method_name(NiiaMethod::bradley_terry) ==
        std::string{"bradley-terry"});
  CHECK(niia_method_name(NiiaMethod::absolute) == std::string{"absolute"});
  CHECK_THROWS_AS((void)niia_method_from_name("median-rank"), ParseError);
}

TEST_CASE("results render to JSON with the full evidence trail") {
  const auto [d1, d2] = gen_niia_datasets();
  (void)d1;
  const auto res =
      niia_check(d2, NiiaMethod::avg_rank, {"A", "B"},
                 explicit_subsets({{"A", "B", "C1"}, {"A"}}));

  const auto doc = nlohmann::json::parse(niia_result_to_json(res));
  CHECK(doc.at("skipped") == 1);
  REQUIRE(doc.at("reports").size() == 1);
  const auto& r = doc.at("reports").at(0);
  CHECK(r.at("method") == "avg-rank");
  CHECK(r.at("pair") == nlohmann::json({"A", "B"}));
  CHECK(r.at("subset") == nlohmann::json({"A", "B", "C1"}));
  CHECK(r.at("direction_full") == "first-better");
  CHECK(r.at("direction_subset") == "second-better");
  CHECK(r.at("flipped") == true);
  CHECK(r.at("evidence").at("kind") == "avg-rank");
  CHECK(r.at("evidence").at("full").at(0).get<double>() ==
        doctest::Approx(79.4).epsilon(1e-13));
  CHECK(r.at("evidence").at("subset").at(1).get<double>() ==
        doctest::Approx(1.2).epsilon(1e-14));
}

}  // TEST_SUITE("niia")
