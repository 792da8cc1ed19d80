#include <doctest.h>

#include <absrank/errors.hpp>
#include <absrank/niia.hpp>
#include <absrank/normalize.hpp>
#include <absrank/stats.hpp>

#include <cmath>
#include <random>

TEST_SUITE("stats") {

using namespace absrank;

namespace {

// Friedman's statistic straight from the definition, as an independent
// check of the rank-total evaluation used by the library:
//   chi2 = 12 p / (n (n+1)) * sum_i (Rbar_i - (n+1)/2)^2
double friedman_by_definition(const RankMatrix& r) {
  const double n = static_cast<double>(r.n());
  const double p = static_cast<double>(r.p());
  const Eigen::VectorXd mean = r.average_ranks();
  const double center = (n + 1.0) / 2.0;
  return 12.0 * p / (n * (n + 1.0)) * (mean.array() - center).square().sum();
}

}  // namespace

TEST_CASE("friedman on the two-tier construction is exact") {
  // Three algorithms over 500 problems where the rank pattern repeats:
  // integer rank totals keep the sum-form statistic exactly representable.
  const auto [d1, d2] = gen_niia_datasets();
  const auto r1 = rank_normalize(d1);
  const auto f1 = friedman_test(r1);
  CHECK(f1.statistic == 840.0);  // exact, not approximate
  CHECK(f1.df == 2);
  CHECK(f1.log10_p == doctest::Approx(-182.40368239936578).epsilon(1e-12));
  // Linear-scale p underflows gracefully rather than lying.
  CHECK(f1.p == doctest::Approx(3.947e-183).epsilon(1e-3));

  const auto r2 = rank_normalize(d2);
  const auto f2 = friedman_test(r2);
  CHECK(f2.df == 99);
  CHECK(f2.statistic == doctest::Approx(24531804.0 / 505.0).epsilon(1e-14));
  CHECK(f2.log10_p == doctest::Approx(-10397.786428891577).epsilon(1e-12));
  CHECK(f2.p == 0.0);  // honest underflow; the log10 form holds the value
}

TEST_CASE("friedman agrees with the definition on random rank matrices") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> val(0, 6);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng() % 10);
    Eigen::MatrixXd v(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) v(i, j) = val(rng);
    std::vector<std::string> algs, probs;
    for (Eigen::Index i = 0; i < n; ++i) algs.push_back("a" + std::to_string(i));
    for (Eigen::Index j = 0; j < p; ++j) probs.push_back("p" + std::to_string(j));
    const auto r = rank_normalize(make_matrix(algs, probs, v));
    const auto f = friedman_test(r);
    CAPTURE(trial);
    CHECK(f.statistic ==
          doctest::Approx(friedman_by_definition(r)).epsilon(1e-11));
    CHECK(f.df == static_cast<int>(n) - 1);
    CHECK(f.log10_p <= 0.0);
  }
}

TEST_CASE("friedman null distribution: identical columns give statistic 0") {
  Eigen::MatrixXd v(3, 4);
  v << 1, 1, 1, 1,
       2, 2, 2, 2,
       3, 3, 3, 3;
  // All-tied columns: every algorithm has the same mean rank.
  Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(3, 4);
  const auto r = rank_normalize(make_matrix({"a", "b", "c"},
                                            {"p1", "p2", "p3", "p4"}, flat));
  const auto f = friedman_test(r);
  CHECK(f.statistic == 0.0);
  CHECK(f.log10_p == 0.0);
  CHECK(f.p == 1.0);
}

TEST_CASE("friedman rejects degenerate shapes") {
  RankMatrix r;
  r.algorithms = {"a"};
  r.problems = {"p"};
  r.values = Eigen::MatrixXd::Ones(1, 1);
  CHECK_THROWS_AS(friedman_test(r), SizeError);
  RankMatrix none;
  none.algorithms = {"a", "b"};
  none.problems = {};
  none.values = Eigen::MatrixXd(2, 0);
  CHECK_THROWS_AS(friedman_test(none), SizeError);
}

TEST_CASE("critical difference under each multiplicity convention") {
  // n = 3, p = 500, alpha = 0.001; references from 60-digit arithmetic.
  CHECK(bonferroni_dunn_cd(3, 500, 0.001, CdConvention::all_pairs_one_sided) ==
        doctest::Approx(0.22691964829532965).epsilon(1e-10));
  CHECK(bonferroni_dunn_cd(3, 500, 0.001, CdConvention::control_two_sided) ==
        doctest::Approx(0.22014236435904086).epsilon(1e-10));
  CHECK(bonferroni_dunn_cd(3, 500, 0.001, CdConvention::control_one_sided) ==
        doctest::Approx(0.20811118346367388).epsilon(1e-10));
  // n = 100, p = 500, alpha = 0.001.
  CHECK(bonferroni_dunn_cd(100, 500, 0.001,
                           CdConvention::all_pairs_one_sided) ==
        doctest::Approx(9.536564892304773).epsilon(1e-10));
  CHECK(bonferroni_dunn_cd(100, 500, 0.001, CdConvention::control_two_sided) ==
        doctest::Approx(8.10085286360409).epsilon(1e-10));
  CHECK(bonferroni_dunn_cd(100, 500, 0.001, CdConvention::control_one_sided) ==
        doctest::Approx(7.821307332097929).epsilon(1e-10));
}

TEST_CASE("critical difference validates parameters") {
  CHECK_THROWS_AS(bonferroni_dunn_cd(1, 500, 0.001), SizeError);
  CHECK_THROWS_AS(bonferroni_dunn_cd(3, 0, 0.001), SizeError);
  CHECK_THROWS_AS(bonferroni_dunn_cd(3, 500, 0.0), DomainError);
  CHECK_THROWS_AS(bonferroni_dunn_cd(3, 500, 1.0), DomainError);
}

TEST_CASE("convention names round trip") {
  for (CdConvention c : all_cd_conventions()) {
    CHECK(cd_convention_from_name(cd_convention_name(c)) == c);
  }
  CHECK(cd_convention_from_name("all-pairs-one-sided") ==
        CdConvention::all_pairs_one_sided);
  CHECK(cd_convention_from_name("control-two-sided") ==
        CdConvention::control_two_sided);
  CHECK(cd_convention_from_name("control-one-sided") ==
        CdConvention::control_one_sided);
  CHECK_THROWS_AS(cd_convention_from_name("bonkers"), ParseError);
  CHECK(all_cd_conventions().size() == 3);
}

TEST_CASE("two-tier comparison: conclusions on the small set") {
  const auto [d1, d2] = gen_niia_datasets();
  const auto rep = npht_compare(d1, {{"A", "B"}, {"A", "C1"}, {"B", "C1"}},
                                0.001);
  CHECK(rep.avg_ranks(0) == doctest::Approx(1.8));   // A
  CHECK(rep.avg_ranks(1) == doctest::Approx(1.2));   // B
  CHECK(rep.avg_ranks(2) == doctest::Approx(3.0));   // C1
  CHECK(rep.significant);
  CHECK(rep.cd == doctest::Approx(0.22691964829532965).epsilon(1e-10));
  REQUIRE(rep.pairwise.size() == 3);
  // B's lower average rank beats A; the gap 0.6 clears the CD.
  CHECK(rep.pairwise[0].direction == Direction::second_better);
  CHECK(rep.pairwise[0].delta == doctest::Approx(0.6));
  CHECK(rep.pairwise[1].direction == Direction::first_better);   // A vs C1
  CHECK(rep.pairwise[2].direction == Direction::first_better);   // B vs C1
}

TEST_CASE("two-tier comparison: the same pair flips on the full set") {
  const auto [d1, d2] = gen_niia_datasets();
  const auto rep = npht_compare(d2, {{"A", "B"}}, 0.001);
  CHECK(rep.avg_ranks(0) == doctest::Approx(79.4));  // A, diluted by bystanders
  CHECK(rep.avg_ranks(1) == doctest::Approx(98.2));  // B
  CHECK(rep.significant);
  REQUIRE(rep.pairwise.size() == 1);
  // Now A "wins" the very comparison B won on the 3-algorithm subset.
  CHECK(rep.pairwise[0].direction == Direction::first_better);
  CHECK(rep.pairwise[0].delta == doctest::Approx(18.8));
}

TEST_CASE("insignificant friedman blocks all pairwise conclusions") {
  // Two algorithms whose columns are nearly exchangeable: tiny statistic.
  Eigen::MatrixXd v(2, 4);
  v << 1.0, 2.0, 1.0, 2.0,
       2.0, 1.0, 2.0, 1.0;
  const auto m = make_matrix({"x", "y"}, {"p1", "p2", "p3", "p4"}, v);
  const auto rep = npht_compare(m, {{"x", "y"}}, 0.05);
  CHECK_FALSE(rep.significant);
  CHECK(rep.pairwise[0].direction == Direction::indistinguishable);
}

TEST_CASE("gap below the critical difference stays indistinguishable") {
  // Strong column effects make Friedman significant, but the pair of
  // interest differs by less than the CD.
  const auto [d1, d2] = gen_niia_datasets();
  // C3 vs C4 in the full set: average ranks differ by exactly 1 while the
  // CD at alpha = 0.001 is ~9.5.
  const auto rep = npht_compare(d2, {{"C3", "C4"}}, 0.001);
  CHECK(rep.significant);
  CHECK(rep.pairwise[0].delta == doctest::Approx(1.0));
  CHECK(rep.pairwise[0].direction == Direction::indistinguishable);
}

TEST_CASE("npht validates pair labels") {
  const auto [d1, d2] = gen_niia_datasets();
  CHECK_THROWS_AS(npht_compare(d1, {{"A", "ghost"}}, 0.001), LabelError);
  CHECK_THROWS_AS(npht_compare(d1, {{"A", "A"}}, 0.001), LabelError);
}

TEST_CASE("direction names are stable") {
  CHECK(std::string(direction_name(Direction::first_better)) ==
        "first-better");
  CHECK(std::string(direction_name(Direction::second_better)) ==
        "second-better");
  CHECK(std::string(direction_name(Direction::indistinguishable)) ==
        "indistinguishable");
}

}  // TEST_SUITE
