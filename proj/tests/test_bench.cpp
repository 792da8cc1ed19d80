#include <doctest.h>

#include <absrank/benchmark.hpp>
#include <absrank/errors.hpp>

#include <cmath>
#include <sstream>

TEST_SUITE("bench") {

using namespace absrank;

namespace {

BenchmarkProblem cube(BenchmarkProblem::Kind kind, int d, double half_width) {
  BenchmarkProblem p;
  p.kind = kind;
  p.d = d;
  p.lo = Eigen::VectorXd::Constant(d, -half_width);
  p.hi = Eigen::VectorXd::Constant(d, half_width);
  return make_problem(std::move(p));
}

}  // namespace

TEST_CASE("sphere evaluates the squared norm") {
  const auto p = cube(BenchmarkProblem::Kind::sphere, 3, 10.0);
  Eigen::Vector3d x(1.0, -2.0, 3.0);
  CHECK(evaluate(p, x) == 14.0);
  CHECK(evaluate(p, Eigen::Vector3d::Zero()) == 0.0);
}

TEST_CASE("shifted sphere centers at x_star") {
  auto p = cube(BenchmarkProblem::Kind::shifted_sphere, 2, 10.0);
  p.x_star = Eigen::Vector2d(3.0, -4.0);
  p = make_problem(std::move(p));
  CHECK(evaluate(p, Eigen::Vector2d(3.0, -4.0)) == 0.0);
  CHECK(evaluate(p, Eigen::Vector2d(0.0, 0.0)) == 25.0);
}

TEST_CASE("cone is linear in the distance from the apex") {
  auto p = cube(BenchmarkProblem::Kind::cone, 2, 100.0);
  p.y_min = 5.0;
  p.slope = 2.0;
  p.x_star = Eigen::Vector2d(1.0, 1.0);
  p = make_problem(std::move(p));
  CHECK(evaluate(p, Eigen::Vector2d(1.0, 1.0)) == 5.0);
  CHECK(evaluate(p, Eigen::Vector2d(4.0, 5.0)) == doctest::Approx(15.0));

  p.cone_max_norm = true;
  CHECK(evaluate(p, Eigen::Vector2d(4.0, 5.0)) == doctest::Approx(13.0));
}

TEST_CASE("rastrigin has value zero at the origin and local structure") {
  const auto p = cube(BenchmarkProblem::Kind::rastrigin, 2, 5.12);
  CHECK(evaluate(p, Eigen::Vector2d(0.0, 0.0)) == doctest::Approx(0.0));
  // Local minimum near each integer grid point, approximately i^2 deep.
  CHECK(evaluate(p, Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(1.0));
  CHECK(evaluate(p, Eigen::Vector2d(1.0, 2.0)) == doctest::Approx(5.0));
  // Maximal ridge near half-integers.
  CHECK(evaluate(p, Eigen::Vector2d(0.5, 0.0)) > 20.0);
}

TEST_CASE("evaluation enforces the box domain and the dimension") {
  const auto p = cube(BenchmarkProblem::Kind::sphere, 2, 1.0);
  CHECK_THROWS_AS(evaluate(p, Eigen::Vector2d(1.5, 0.0)), DomainError);
  CHECK_THROWS_AS(evaluate(p, Eigen::Vector2d(0.0, -1.0000001)), DomainError);
  CHECK_NOTHROW(evaluate(p, Eigen::Vector2d(1.0, -1.0)));  // bounds included
  Eigen::Vector3d wrong(0.0, 0.0, 0.0);
  CHECK_THROWS_AS(evaluate(p, wrong), ShapeError);
}

TEST_CASE("construction validates fields") {
  BenchmarkProblem p;
  p.d = 0;
  CHECK_THROWS_AS(make_problem(p), DomainError);
  p = cube(BenchmarkProblem::Kind::sphere, 2, 1.0);
  p.c = 0;
  CHECK_THROWS_AS(make_problem(p), DomainError);
  p.c = 1;
  p.lo = Eigen::VectorXd::Constant(2, 2.0);  // lo >= hi
  CHECK_THROWS_AS(make_problem(p), DomainError);
  p.lo = Eigen::VectorXd::Zero(3);  // wrong length
  CHECK_THROWS_AS(make_problem(p), ShapeError);
  p = cube(BenchmarkProblem::Kind::cone, 2, 1.0);
  p.slope = 0.0;
  CHECK_THROWS_AS(make_problem(p), DomainError);
}

TEST_CASE("x_star defaults to the origin") {
  const auto p = cube(BenchmarkProblem::Kind::shifted_sphere, 4, 2.0);
  REQUIRE(p.x_star.size() == 4);
  CHECK(p.x_star.isZero(0.0));
}

TEST_CASE("run metric is the mean over rounds of the per-round minimum") {
  Eigen::MatrixXd runs(3, 2);  // c = 3 evaluations, r = 2 rounds
  runs << 5.0, 9.0,
          2.0, 7.0,
          4.0, 8.0;
  CHECK(metric_m0(runs) == doctest::Approx((2.0 + 7.0) / 2.0));
  // Single column: plain minimum.
  CHECK(metric_m0(runs.col(0)) == 2.0);
  // Single row: plain mean.
  CHECK(metric_m0(runs.row(1)) == doctest::Approx(4.5));
  Eigen::MatrixXd empty(0, 0);
  CHECK_THROWS_AS(metric_m0(empty), ShapeError);
  runs(1, 1) = std::nan("");
  CHECK_THROWS_AS(metric_m0(runs), ParseError);
}

TEST_CASE("json descriptor round trip preserves every field") {
  auto p = cube(BenchmarkProblem::Kind::cone, 3, 2.5);
  p.x_star = Eigen::Vector3d(0.1, -0.2, 0.3);
  p.y_min = 1.0;
  p.slope = 3.0;
  p.cone_max_norm = true;
  p.c = 64;
  p.r = 12;
  p.name = "steep cone";
  p = make_problem(std::move(p));

  std::istringstream in(problem_to_json(p));
  const auto q = load_problem(in);
  CHECK(q.kind == p.kind);
  CHECK(q.d == p.d);
  CHECK(q.lo == p.lo);
  CHECK(q.hi == p.hi);
  CHECK(q.x_star == p.x_star);
  CHECK(q.y_min == p.y_min);
  CHECK(q.slope == p.slope);
  CHECK(q.cone_max_norm == p.cone_max_norm);
  CHECK(q.c == p.c);
  CHECK(q.r == p.r);
  CHECK(q.name == p.name);
}

TEST_CASE("json descriptor accepts scalar bounds and broadcasts them") {
  std::istringstream in(
      R"({"kind":"sphere","d":4,"lo":-0.5,"hi":0.5,"c":1,"r":1})");
  const auto p = load_problem(in);
  CHECK(p.d == 4);
  CHECK(p.lo == Eigen::VectorXd::Constant(4, -0.5));
  CHECK(p.hi == Eigen::VectorXd::Constant(4, 0.5));
  CHECK(p.name == "sphere");  // display label defaults to the kind
}

TEST_CASE("json descriptor rejects malformed input") {
  {
    std::istringstream in("{not json");
    CHECK_THROWS_AS(load_problem(in), ParseError);
  }
  {
    std::istringstream in(R"({"kind":"pyramid","d":2,"lo":0,"hi":1})");
    CHECK_THROWS_AS(load_problem(in), ParseError);
  }
  {
    std::istringstream in(R"({"kind":"sphere","d":0,"lo":0,"hi":1})");
    CHECK_THROWS_AS(load_problem(in), DomainError);
  }
  {
    std::istringstream in(
        R"({"kind":"cone","d":1,"lo":0,"hi":1,"params":{"norm":"l3"}})");
    CHECK_THROWS_AS(load_problem(in), ParseError);
  }
  CHECK_THROWS_AS(load_problem_file("/nonexistent/problem.json"), ParseError);
}

TEST_CASE("kind names are stable identifiers") {
  CHECK(std::string(kind_name(BenchmarkProblem::Kind::sphere)) == "sphere");
  CHECK(std::string(kind_name(BenchmarkProblem::Kind::cone)) == "cone");
  CHECK(std::string(kind_name(BenchmarkProblem::Kind::rastrigin)) ==
        "rastrigin");
  CHECK(std::string(kind_name(BenchmarkProblem::Kind::shifted_sphere)) ==
        "shifted-sphere");
}

}  // TEST_SUITE
