#include "absrank/benchmark.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include <json.hpp>

#include "absrank/errors.hpp"

namespace absrank {

namespace {

constexpr double kTwoPi = 6.283185307179586477;

Eigen::VectorXd broadcast_bound(const nlohmann::json& j, int d,
                                const char* field) {
  Eigen::VectorXd v(d);
  if (j.is_number()) {
    v.setConstant(j.get<double>());
  } else if (j.is_array()) {
    if (static_cast<int>(j.size()) != d) {
      throw ShapeError(std::string(field) + " array length " +
                       std::to_string(j.size()) + " does not match d=" +
                       std::to_string(d));
    }
    for (int i = 0; i < d; ++i) v(i) = j[static_cast<size_t>(i)].get<double>();
  } else {
    throw ParseError(std::string(field) + " must be a number or array");
  }
  return v;
}

}  // namespace

const char* kind_name(BenchmarkProblem::Kind kind) {
  switch (kind) {
    case BenchmarkProblem::Kind::sphere: return "sphere";
    case BenchmarkProblem::Kind::cone: return "cone";
    case BenchmarkProblem::Kind::rastrigin: return "rastrigin";
    case BenchmarkProblem::Kind::shifted_sphere: return "shifted-sphere";
  }
  return "?";
}

BenchmarkProblem make_problem(BenchmarkProblem p) {
  if (p.d < 1) throw DomainError("problem dimension must be >= 1");
  if (p.c < 1 || p.r < 1) {
    throw DomainError("budget c and rounds r must be >= 1");
  }
  if (p.lo.size() != p.d || p.hi.size() != p.d) {
    throw ShapeError("domain bounds must have length d");
  }
  for (int i = 0; i < p.d; ++i) {
    if (!(p.lo(i) < p.hi(i))) {
      throw DomainError("domain requires lo < hi in every dimension");
    }
  }
  if (p.x_star.size() == 0) {
    p.x_star = Eigen::VectorXd::Zero(p.d);
  } else if (p.x_star.size() != p.d) {
    throw ShapeError("x_star must have length d");
  }
  if (p.kind == BenchmarkProblem::Kind::cone && !(p.slope > 0.0)) {
    throw DomainError("cone slope must be positive");
  }
  return p;
}

double evaluate(const BenchmarkProblem& p,
                const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != p.d) {
    throw ShapeError("point has dimension " + std::to_string(x.size()) +
                     ", problem expects " + std::to_string(p.d));
  }
  for (int i = 0; i < p.d; ++i) {
    if (!(x(i) >= p.lo(i) && x(i) <= p.hi(i))) {
      throw DomainError("point coordinate " + std::to_string(i) + " = " +
                        std::to_string(x(i)) + " lies outside [" +
                        std::to_string(p.lo(i)) + ", " +
                        std::to_string(p.hi(i)) + "]");
    }
  }
  switch (p.kind) {
    case BenchmarkProblem::Kind::sphere:
      return x.squaredNorm();
    case BenchmarkProblem::Kind::shifted_sphere:
      return (x - p.x_star).squaredNorm();
    case BenchmarkProblem::Kind::cone: {
      const Eigen::VectorXd diff = x - p.x_star;
      const double dist =
          p.cone_max_norm ? diff.cwiseAbs().maxCoeff() : diff.norm();
      return p.y_min + p.slope * dist;
    }
    case BenchmarkProblem::Kind::rastrigin: {
      double sum = 10.0 * p.d;
      for (int i = 0; i < p.d; ++i) {
        sum += x(i) * x(i) - 10.0 * std::cos(kTwoPi * x(i));
      }
      return sum;
    }
  }
  throw DomainError("unknown problem kind");
}

double metric_m0(const Eigen::Ref<const Eigen::MatrixXd>& values) {
  if (values.rows() == 0 || values.cols() == 0) {
    throw ShapeError("metric needs a non-empty c x r value matrix");
  }
  if (!values.allFinite()) {
    throw ParseError("metric input contains non-finite values");
  }
  return values.colwise().minCoeff().mean();
}

BenchmarkProblem load_problem(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem descriptor is not valid JSON: ") +
                     e.what());
  }
  BenchmarkProblem p;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sphere") {
      p.kind = BenchmarkProblem::Kind::sphere;
    } else if (kind == "cone") {
      p.kind = BenchmarkProblem::Kind::cone;
    } else if (kind == "rastrigin") {
      p.kind = BenchmarkProblem::Kind::rastrigin;
    } else if (kind == "shifted-sphere") {
      p.kind = BenchmarkProblem::Kind::shifted_sphere;
    } else {
      throw ParseError("unknown problem kind '" + kind + "'");
    }
    p.d = j.at("d").get<int>();
    if (p.d < 1) throw DomainError("problem dimension must be >= 1");
    p.lo = broadcast_bound(j.at("lo"), p.d, "lo");
    p.hi = broadcast_bound(j.at("hi"), p.d, "hi");
    p.c = j.value("c", std::int64_t{1});
    p.r = j.value("r", std::int64_t{1});
    p.name = j.value("name", std::string(kind_name(p.kind)));
    if (j.contains("params")) {
      const auto& prm = j["params"];
      if (prm.contains("x_star")) {
        p.x_star = broadcast_bound(prm["x_star"], p.d, "x_star");
      }
      p.y_min = prm.value("y_min", 0.0);
      p.slope = prm.value("slope", 1.0);
      if (prm.contains("norm")) {
        const std::string norm = prm["norm"].get<std::string>();
        if (norm == "linf") {
          p.cone_max_norm = true;
        } else if (norm != "l2") {
          throw ParseError("cone norm must be 'l2' or 'linf', got '" + norm +
                           "'");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem descriptor field error: ") +
                     e.what());
  }
  return make_problem(std::move(p));
}

BenchmarkProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file '" + path + "'");
  return load_problem(in);
}

std::string problem_to_json(const BenchmarkProblem& p) {
  nlohmann::json j;
  j["kind"] = kind_name(p.kind);
  j["d"] = p.d;
  j["lo"] = std::vector<double>(p.lo.data(), p.lo.data() + p.lo.size());
  j["hi"] = std::vector<double>(p.hi.data(), p.hi.data() + p.hi.size());
  j["c"] = p.c;
  j["r"] = p.r;
  j["name"] = p.name;
  nlohmann::json prm;
  prm["x_star"] =
      std::vector<double>(p.x_star.data(), p.x_star.data() + p.x_star.size());
  if (p.kind == BenchmarkProblem::Kind::cone) {
    prm["y_min"] = p.y_min;
    prm["slope"] = p.slope;
    prm["norm"] = p.cone_max_norm ? "linf" : "l2";
  }
  j["params"] = prm;
  return j.dump(2);
}

}  // namespace absrank
