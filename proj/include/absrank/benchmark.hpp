#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace absrank {

// A benchmark instance: objective + box domain + run shape (budget c and
// rounds r).  The cone kind is f(x) = y_min + slope * ||x - x*|| with an
// optional max-norm variant; shifted-sphere is ||x - x*||^2.
struct BenchmarkProblem {
  enum class Kind { sphere, cone, rastrigin, shifted_sphere };

  Kind kind = Kind::sphere;
  int d = 1;
  Eigen::VectorXd lo, hi;     // per-dimension closed domain bounds
  Eigen::VectorXd x_star;     // optimum location (cone, shifted-sphere)
  double y_min = 0.0;         // cone offset
  double slope = 1.0;         // cone slope
  bool cone_max_norm = false; // cone uses ||.||_inf instead of ||.||_2
  std::int64_t c = 1;         // evaluation budget per run
  std::int64_t r = 1;         // repeat rounds
  std::string name;           // optional display label
};

// Validates fields and normalizes defaults (x_star defaults to the domain
// midpoint-independent origin vector of length d).
BenchmarkProblem make_problem(BenchmarkProblem p);

// Evaluates the objective at x.  Points outside the domain raise DomainError.
double evaluate(const BenchmarkProblem& p,
                const Eigen::Ref<const Eigen::VectorXd>& x);

// The run metric: mean over the r columns of the per-column minimum over
// the c rows of a c x r matrix of objective values.
double metric_m0(const Eigen::Ref<const Eigen::MatrixXd>& values);

// JSON descriptor I/O: {kind, d, lo, hi, params, c, r, name?} where lo/hi
// are scalars (replicated) or length-d arrays and params carries the
// kind-specific fields (x_star, y_min, slope, norm).
BenchmarkProblem load_problem(std::istream& in);
BenchmarkProblem load_problem_file(const std::string& path);
std::string problem_to_json(const BenchmarkProblem& p);

const char* kind_name(BenchmarkProblem::Kind kind);

}  // namespace absrank
