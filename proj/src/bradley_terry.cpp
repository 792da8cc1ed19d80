#include "absrank/bradley_terry.hpp"

#include <algorithm>
#include <cmath>

#include "absrank/errors.hpp"

namespace absrank {

WinMatrix pairwise_wins(const PerformanceMatrix& m) {
  const Eigen::Index n = m.n();
  WinMatrix w;
  w.algorithms = m.algorithms;
  w.wins = Eigen::MatrixXd::Zero(n, n);
  w.ties = Eigen::MatrixXd::Zero(n, n);

  for (Eigen::Index k = 0; k < m.p(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double a = m.values(i, k);
        const double b = m.values(j, k);
        if (a < b) {
          w.wins(i, j) += 1.0;
        } else if (b < a) {
          w.wins(j, i) += 1.0;
        } else {
          w.ties(i, j) += 1.0;
          w.ties(j, i) += 1.0;
        }
      }
    }
  }
  return w;
}

BtResult fit_bradley_terry(const WinMatrix& w, const BtOptions& opts) {
  const Eigen::Index n = w.n();
  if (n < 2) throw SizeError("fit_bradley_terry: need at least 2 algorithms");
  if (w.wins.cols() != n || w.ties.rows() != n || w.ties.cols() != n)
    throw ShapeError("fit_bradley_terry: win/tie matrices must be n x n");
  if (static_cast<Eigen::Index>(w.algorithms.size()) != n)
    throw ShapeError("fit_bradley_terry: label count must match matrix size");
  if (!(opts.tol > 0.0))
    throw DomainError("fit_bradley_terry: tol must be positive");
  if (opts.max_iter < 1)
    throw DomainError("fit_bradley_terry: max_iter must be at least 1");
  if (!(opts.prior_weight >= 0.0) || !std::isfinite(opts.prior_weight))
    throw DomainError("fit_bradley_terry: prior_weight must be finite and >= 0");

  // Effective tallies with the symmetric pseudo-win prior folded in.
  Eigen::MatrixXd games = w.wins;
  if (opts.prior_weight > 0.0) {
    games.array() += opts.prior_weight;
    games.diagonal().setZero();
  }

  BtResult out;
  out.algorithms = w.algorithms;
  out.theta = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  Eigen::VectorXd prev(n);
  for (int sweep = 1; sweep <= opts.max_iter; ++sweep) {
    prev = out.theta;

    for (Eigen::Index i = 0; i < n; ++i) {
      double num = 0.0;
      double den = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double pair_mass = out.theta(i) + out.theta(j);
        if (pair_mass == 0.0) continue;  // both eliminated, no information
        num += games(i, j) * out.theta(j) / pair_mass;
        den += games(j, i) / pair_mass;
      }
      if (den == 0.0) {
        // Never beaten: the likelihood increases without bound in theta_i.
        // Grow it so the divergence is visible instead of silently stalling.
        out.theta(i) *= 10.0;
      } else {
        out.theta(i) = num / den;
      }
    }

    const double total = out.theta.sum();
    if (total > 0.0) out.theta /= total;
    out.iterations = sweep;

    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double rel;
      if (prev(i) == 0.0) {
        rel = (out.theta(i) == 0.0) ? 0.0 : 1.0;
      } else {
        rel = std::abs(out.theta(i) - prev(i)) / prev(i);
      }
      worst = std::max(worst, rel);
    }
    if (worst < opts.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double bt_prob(const BtResult& fit, const std::string& first,
               const std::string& second) {
  const auto index = [&fit](const std::string& label) {
    const auto it =
        std::find(fit.algorithms.begin(), fit.algorithms.end(), label);
    if (it == fit.algorithms.end())
      throw LabelError("unknown algorithm '" + label + "'");
    return static_cast<Eigen::Index>(it - fit.algorithms.begin());
  };
  const double a = fit.theta(index(first));
  const double b = fit.theta(index(second));
  const double mass = a + b;
  if (mass == 0.0) return 0.5;  // two zero-strength players: no evidence
  return a / mass;
}

BayesReport bayes_compare(
    const PerformanceMatrix& m,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const BtOptions& opts) {
  const WinMatrix w = pairwise_wins(m);
  const BtResult fit = fit_bradley_terry(w, opts);

  BayesReport report;
  report.algorithms = fit.algorithms;
  report.theta = fit.theta;
  report.iterations = fit.iterations;
  report.converged = fit.converged;
  report.options = opts;

  for (const auto& [first, second] : pairs) {
    if (first == second) {
      throw LabelError("bayes_compare: pair compares '" + first +
                       "' with itself");
    }
    BtConclusion c;
    c.pair = {first, second};
    c.prob = bt_prob(fit, first, second);
    if (c.prob > 0.5) {
      c.direction = Direction::first_better;
    } else if (c.prob < 0.5) {
      c.direction = Direction::second_better;
    } else {
      c.direction = Direction::indistinguishable;
    }
    report.pairwise.push_back(std::move(c));
  }
  return report;
}

}  // namespace absrank
