#include "absrank/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "absrank/errors.hpp"

namespace absrank {

namespace {

constexpr double kLn10 = 2.302585092994045684;

// Series for the regularized lower incomplete gamma P(a, x), valid and fast
// for x < a + 1.  Returns P itself (not its log); in this regime P is far
// from 0 and 1 only when we need it, and log1p(-P) recovers log Q safely.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double n = a;
  for (int it = 0; it < 500; ++it) {
    n += 1.0;
    term *= x / n;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  double log_p = -x + a * std::log(x) - std::lgamma(a) + std::log(sum);
  return std::exp(log_p);
}

// Lentz continued fraction for Q(a, x) = prefactor * cf, valid for
// x >= a + 1.  Returns log(cf); the caller adds the log prefactor.
double log_gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::log(h);
}

}  // namespace

double log_gamma_q(double a, double x) {
  if (!(a > 0.0) || std::isnan(x)) {
    throw DomainError("log_gamma_q: requires a > 0 and finite x, got a=" +
                      std::to_string(a) + " x=" + std::to_string(x));
  }
  if (x < 0.0) {
    throw DomainError("log_gamma_q: x must be non-negative, got " +
                      std::to_string(x));
  }
  if (x == 0.0) return 0.0;  // Q = 1
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  if (x < a + 1.0) {
    double p = gamma_p_series(a, x);
    if (p >= 1.0) return -std::numeric_limits<double>::infinity();
    return std::log1p(-p);
  }
  return -x + a * std::log(x) - std::lgamma(a) + log_gamma_q_cf(a, x);
}

double chisq_log10_sf(double x, double df) {
  if (!(df > 0.0)) {
    throw DomainError("chisq_log10_sf: df must be positive, got " +
                      std::to_string(df));
  }
  if (x < 0.0) {
    throw DomainError("chisq_log10_sf: statistic must be non-negative, got " +
                      std::to_string(x));
  }
  // df = 2: Q(1, x/2) = exp(-x/2), so the log10 tail is exact.
  if (df == 2.0) return -x / (2.0 * kLn10);
  return log_gamma_q(df / 2.0, x / 2.0) / kLn10;
}

double std_normal_cdf(double t) {
  if (std::isnan(t)) throw DomainError("std_normal_cdf: NaN input");
  // erfc keeps the lower tail accurate where 1 - erf would cancel.
  return 0.5 * std::erfc(-t / std::sqrt(2.0));
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0, 1), got " +
                      std::to_string(p));
  }
  // Reflect the upper half onto the lower: 1 - p is exact for p >= 0.5,
  // and the lower tail keeps full relative precision through erfc, whereas
  // CDF(x) - p near 1 would drown the refinement step in rounding noise.
  if (p > 0.5) return -std_normal_quantile(1.0 - p);
  // Rational approximation (relative error < 1.15e-9 everywhere), then one
  // Halley refinement against the erfc-based CDF.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // Halley step: e = CDF(x) - p, u = e / pdf(x), x <- x - u / (1 + x u / 2).
  double e = std_normal_cdf(x) - p;
  double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
  if (pdf > 0.0) {
    double u = e / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace absrank
