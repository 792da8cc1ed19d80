#include "absrank/rank_function.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <json.hpp>
#include <unsupported/Eigen/FFT>

#include "absrank/errors.hpp"
#include "absrank/sobol.hpp"
#include "absrank/special_functions.hpp"

namespace absrank {

namespace {

using detail::BudgetCdf;
using detail::ConeCdf;
using detail::EmpiricalCdf;
using detail::GaussianCdf;
using detail::RoundsCdf;
using detail::SphereCdf;
using detail::UniformCdf;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void check_finite_input(double t, const char* who) {
  if (std::isnan(t)) {
    throw DomainError(std::string(who) + ": NaN evaluation point");
  }
}

// Piecewise-linear interpolation through strictly increasing knots.
// Assumes knots.size() >= 2 and knots(0) <= t <= knots(last).
double interp_knots(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                    double t) {
  const double* begin = xs.data();
  const double* end = begin + xs.size();
  const double* it = std::upper_bound(begin, end, t);
  if (it == begin) return ys(0);
  if (it == end) return ys(xs.size() - 1);
  const Eigen::Index hi = it - begin;
  const Eigen::Index lo = hi - 1;
  if (t == xs(lo)) return ys(lo);
  const double frac = (t - xs(lo)) / (xs(hi) - xs(lo));
  return ys(lo) + frac * (ys(hi) - ys(lo));
}

// ---- sphere ---------------------------------------------------------------

double sphere_log_closed_form(int d, double w, double t) {
  // log of (pi t)^(d/2) / ((2w)^d Gamma(d/2 + 1)), evaluated in log space so
  // high dimensions cannot overflow.
  const double half_d = 0.5 * d;
  return half_d * std::log(M_PI * t) - d * std::log(2.0 * w) -
         std::lgamma(half_d + 1.0);
}

double sphere_eval(const SphereCdf& s, double t) {
  check_finite_input(t, "sphere cdf");
  if (t < 0.0) {
    throw DomainError("sphere cdf: squared distance t must be >= 0, got " +
                      std::to_string(t));
  }
  if (t == 0.0) return 0.0;
  if (t <= s.crossover) {
    return clamp01(std::exp(sphere_log_closed_form(s.d, s.w, t)));
  }
  const double upper = static_cast<double>(s.d) * s.w * s.w;
  if (t >= upper) return 1.0;
  if (!s.ext_available) {
    throw CapabilityError(
        "sphere cdf: evaluation beyond the closed form's validity (t > w^2) "
        "needs the sampled extension, which requires dimension <= " +
        std::to_string(SobolSequence::kMaxDimension));
  }
  const double tail = interp_knots(s.ext_knots, s.ext_levels, t);
  return clamp01(s.v_crossover + (1.0 - s.v_crossover) * tail);
}

// ---- cone / uniform / gaussian ---------------------------------------------

double cone_eval(const ConeCdf& c, double t) {
  check_finite_input(t, "cone cdf");
  if (t <= c.y_min) return 0.0;
  if (t >= c.y_max) return 1.0;
  const double ratio = (t - c.y_min) / (c.y_max - c.y_min);
  return clamp01(std::pow(ratio, static_cast<double>(c.d)));
}

double uniform_eval(const UniformCdf& u, double t) {
  check_finite_input(t, "uniform cdf");
  return clamp01((t - u.y_min) / (u.y_max - u.y_min));
}

double gaussian_eval(const GaussianCdf& g, double t) {
  check_finite_input(t, "gaussian cdf");
  return std_normal_cdf((t - g.mu) / g.sigma);
}

// ---- empirical (interpolated sample CDF with exponential tails) ------------

double empirical_eval(const EmpiricalCdf& e, double t) {
  check_finite_input(t, "empirical cdf");
  const Eigen::Index k = e.knots.size();
  const double y_first = e.knots(0);
  const double y_last = e.knots(k - 1);
  const double np1 = static_cast<double>(e.n_raw + 1);
  if (t < y_first) {
    if (e.known_min) {
      const double km = *e.known_min;
      if (t <= km) return 0.0;
      // linear bridge (known_min, 0) -> (y_1, 1/(N+1))
      return (t - km) / (y_first - km) / np1;
    }
    // exponential lower tail e^(t - y_1) / (N+1); shift-invariant.
    return std::exp(t - y_first) / np1;
  }
  if (t > y_last) {
    if (e.known_max) {
      const double km = *e.known_max;
      if (t >= km) return 1.0;
      // linear bridge (y_N, N/(N+1)) -> (known_max, 1)
      const double base = static_cast<double>(e.n_raw) / np1;
      return base + (t - y_last) / (km - y_last) * (1.0 - base);
    }
    // exponential upper tail 1 - e^(-ln(N+1)/y_N * t), in coordinates
    // shifted by the first knot when the raw y_N was not positive.
    const double rate = std::log(np1) / (y_last - e.shift);
    return clamp01(1.0 - std::exp(-rate * (t - e.shift)));
  }
  return interp_knots(e.knots, e.levels, t);
}

// ---- composed kinds ---------------------------------------------------------

double budget_eval(const BudgetCdf& b, double t) {
  const double v = (*b.base)(t);
  // 1 - (1 - v)^c without cancellation near v = 0.
  return clamp01(-std::expm1(b.c * std::log1p(-v)));
}

double rounds_eval(const RoundsCdf& r, double t) {
  check_finite_input(t, "rounds cdf");
  if (r.normal_mode) {
    return std_normal_cdf((t - r.mu) / r.sigma);
  }
  if (t <= r.knots_t(0)) return 0.0;
  if (t >= r.knots_t(r.knots_t.size() - 1)) return 1.0;
  return clamp01(interp_knots(r.knots_t, r.knots_v, t));
}

}  // namespace

const char* kind_name(CdfKind kind) {
  switch (kind) {
    case CdfKind::sphere: return "analytic-sphere";
    case CdfKind::cone: return "analytic-cone";
    case CdfKind::uniform: return "analytic-uniform";
    case CdfKind::gaussian: return "analytic-gaussian";
    case CdfKind::empirical: return "empirical";
    case CdfKind::budget: return "budget-composed";
    case CdfKind::rounds: return "rounds-composed";
  }
  return "?";
}

AbsRankFn::AbsRankFn(detail::CdfData data, CdfMetadata meta)
    : data_(std::move(data)), meta_(std::move(meta)) {}

double AbsRankFn::operator()(double t) const {
  return std::visit(
      [t](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SphereCdf>) return sphere_eval(d, t);
        else if constexpr (std::is_same_v<T, ConeCdf>) return cone_eval(d, t);
        else if constexpr (std::is_same_v<T, UniformCdf>) return uniform_eval(d, t);
        else if constexpr (std::is_same_v<T, GaussianCdf>) return gaussian_eval(d, t);
        else if constexpr (std::is_same_v<T, EmpiricalCdf>) return empirical_eval(d, t);
        else if constexpr (std::is_same_v<T, BudgetCdf>) return budget_eval(d, t);
        else return rounds_eval(d, t);
      },
      data_);
}

CdfKind AbsRankFn::kind() const {
  return std::visit(
      [](const auto& d) -> CdfKind {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SphereCdf>) return CdfKind::sphere;
        else if constexpr (std::is_same_v<T, ConeCdf>) return CdfKind::cone;
        else if constexpr (std::is_same_v<T, UniformCdf>) return CdfKind::uniform;
        else if constexpr (std::is_same_v<T, GaussianCdf>) return CdfKind::gaussian;
        else if constexpr (std::is_same_v<T, EmpiricalCdf>) return CdfKind::empirical;
        else if constexpr (std::is_same_v<T, BudgetCdf>) return CdfKind::budget;
        else return CdfKind::rounds;
      },
      data_);
}

bool AbsRankFn::bounded_support() const {
  return std::visit(
      [](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SphereCdf> ||
                      std::is_same_v<T, ConeCdf> ||
                      std::is_same_v<T, UniformCdf>) {
          return true;
        } else if constexpr (std::is_same_v<T, GaussianCdf>) {
          return false;
        } else if constexpr (std::is_same_v<T, EmpiricalCdf>) {
          return d.known_min.has_value() && d.known_max.has_value();
        } else if constexpr (std::is_same_v<T, BudgetCdf>) {
          return d.base->bounded_support();
        } else {
          return !d.normal_mode;
        }
      },
      data_);
}

std::pair<double, double> AbsRankFn::support() const {
  if (!bounded_support()) {
    throw CapabilityError(std::string(kind_name(kind())) +
                          " has unbounded support");
  }
  return std::visit(
      [](const auto& d) -> std::pair<double, double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SphereCdf>) {
          return {0.0, static_cast<double>(d.d) * d.w * d.w};
        } else if constexpr (std::is_same_v<T, ConeCdf> ||
                             std::is_same_v<T, UniformCdf>) {
          return {d.y_min, d.y_max};
        } else if constexpr (std::is_same_v<T, EmpiricalCdf>) {
          return {*d.known_min, *d.known_max};
        } else if constexpr (std::is_same_v<T, BudgetCdf>) {
          return d.base->support();
        } else if constexpr (std::is_same_v<T, RoundsCdf>) {
          return {d.knots_t(0), d.knots_t(d.knots_t.size() - 1)};
        } else {
          return {0.0, 0.0};  // unreachable
        }
      },
      data_);
}

std::pair<double, double> AbsRankFn::integration_range() const {
  if (bounded_support()) return support();
  return std::visit(
      [this](const auto& d) -> std::pair<double, double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianCdf>) {
          return {d.mu - 12.0 * d.sigma, d.mu + 12.0 * d.sigma};
        } else if constexpr (std::is_same_v<T, EmpiricalCdf>) {
          // The exponential tails decay with known rates; cut where the
          // remaining mass is ~1e-16 of a knot level.
          const double y_first = d.knots(0);
          const double y_last = d.knots(d.knots.size() - 1);
          const double np1 = static_cast<double>(d.n_raw + 1);
          double lo = d.known_min ? *d.known_min : y_first - 40.0;
          double hi;
          if (d.known_max) {
            hi = *d.known_max;
          } else {
            const double rate = std::log(np1) / (y_last - d.shift);
            hi = d.shift + 40.0 / rate;
            hi = std::max(hi, y_last);
          }
          return {lo, hi};
        } else if constexpr (std::is_same_v<T, BudgetCdf>) {
          return d.base->integration_range();
        } else if constexpr (std::is_same_v<T, RoundsCdf>) {
          return {d.mu - 12.0 * d.sigma, d.mu + 12.0 * d.sigma};
        } else {
          return support();  // bounded kinds never reach here
        }
      },
      data_);
}

// ---- constructors -----------------------------------------------------------

double sphere_closed_form(int d, double w, double t) {
  if (d < 1 || !(w > 0.0)) {
    throw DomainError("sphere cdf: requires d >= 1 and w > 0");
  }
  check_finite_input(t, "sphere closed form");
  if (t < 0.0) {
    throw DomainError("sphere cdf: squared distance t must be >= 0");
  }
  if (t == 0.0) return 0.0;
  return clamp01(std::exp(sphere_log_closed_form(d, w, t)));
}

AbsRankFn cdf_sphere(int d, double w, std::uint32_t ext_log2n) {
  if (d < 1 || !(w > 0.0)) {
    throw DomainError("sphere cdf: requires d >= 1 and w > 0");
  }
  if (ext_log2n < 4 || ext_log2n > 24) {
    throw DomainError("sphere cdf: extension sample exponent must lie in [4, 24]");
  }
  SphereCdf s;
  s.d = d;
  s.w = w;
  s.crossover = w * w;
  s.v_crossover = sphere_closed_form(d, w, s.crossover);
  s.ext_log2n = ext_log2n;
  s.ext_available = false;
  const double upper = static_cast<double>(d) * w * w;
  if (d >= 2 && d <= SobolSequence::kMaxDimension) {
    // Deterministic quasi-random extension for w^2 < t < d w^2: conditional
    // CDF of the squared norm given that it exceeds the crossover, anchored
    // at (w^2, 0) and (d w^2, 1).
    const std::int64_t n = std::int64_t{1} << ext_log2n;
    SobolSequence seq(d, /*skip=*/1);
    Eigen::VectorXd u(d);
    std::vector<double> tail;
    tail.reserve(static_cast<size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      seq.next(u);
      const double t_val = ((2.0 * w) * u.array() - w).square().sum();
      if (t_val > s.crossover && t_val < upper) tail.push_back(t_val);
    }
    std::sort(tail.begin(), tail.end());
    // Conditional ECDF of the tail; duplicates collapse to the highest tied
    // level so the knot sequence stays strictly increasing.
    const size_t k = tail.size();
    std::vector<double> knots{s.crossover};
    std::vector<double> levels{0.0};
    for (size_t i = 0; i < k; ++i) {
      const double level = static_cast<double>(i + 1) / static_cast<double>(k + 1);
      if (knots.back() == tail[i]) {
        levels.back() = level;
      } else {
        knots.push_back(tail[i]);
        levels.push_back(level);
      }
    }
    knots.push_back(upper);
    levels.push_back(1.0);
    s.ext_knots = Eigen::Map<Eigen::VectorXd>(
        knots.data(), static_cast<Eigen::Index>(knots.size()));
    s.ext_levels = Eigen::Map<Eigen::VectorXd>(
        levels.data(), static_cast<Eigen::Index>(levels.size()));
    s.ext_available = true;
  }
  CdfMetadata meta;
  meta.crossover = s.crossover;
  if (s.ext_available) {
    meta.sample_count = std::int64_t{1} << ext_log2n;
    meta.sobol_skip = 1;
    meta.table = kSobolTableId;
  }
  return AbsRankFn(std::move(s), std::move(meta));
}

AbsRankFn cdf_cone(int d, double y_min, double y_max) {
  if (d < 1) throw DomainError("cone cdf: d must be >= 1");
  if (!(y_min < y_max)) {
    throw DomainError("cone cdf: requires y_min < y_max");
  }
  ConeCdf c;
  c.d = d;
  c.y_min = y_min;
  c.y_max = y_max;
  return AbsRankFn(std::move(c), {});
}

AbsRankFn cdf_uniform(double y_min, double y_max) {
  if (!(y_min < y_max)) {
    throw DomainError("uniform cdf: requires y_min < y_max");
  }
  UniformCdf u;
  u.y_min = y_min;
  u.y_max = y_max;
  return AbsRankFn(std::move(u), {});
}

AbsRankFn cdf_gaussian(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma)) {
    throw DomainError("gaussian cdf: requires finite mu and sigma > 0");
  }
  GaussianCdf g;
  g.mu = mu;
  g.sigma = sigma;
  return AbsRankFn(std::move(g), {});
}

AbsRankFn compose_budget(const AbsRankFn& v1, double c) {
  if (!(c >= 1.0) || !std::isfinite(c)) {
    throw DomainError("budget composition: c must be >= 1, got " +
                      std::to_string(c));
  }
  if (c == 1.0) return v1;
  BudgetCdf b;
  b.c = c;
  b.base = std::make_shared<AbsRankFn>(v1);
  CdfMetadata meta = v1.metadata();
  return AbsRankFn(std::move(b), std::move(meta));
}

namespace {

// Simpson integration of f over [a, b] with an even number of intervals.
template <typename F>
double simpson(F&& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) {
    sum += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

// Interior points where the CDF changes character (empirical kinds: the
// knot range against the far wider exponential tails).  Integrating each
// segment separately keeps nodes where the mass actually sits.
void collect_breakpoints(const AbsRankFn& fn, std::vector<double>* out) {
  if (const auto* e = std::get_if<EmpiricalCdf>(&fn.data())) {
    out->push_back(e->knots(0));
    out->push_back(e->knots(e->knots.size() - 1));
  } else if (const auto* b = std::get_if<BudgetCdf>(&fn.data())) {
    collect_breakpoints(*b->base, out);
  }
}

// Mean and variance of the distribution with CDF fn via
//   E[X]   = b - int_a^b F dt
//   E[X^2] = b^2 - int_a^b 2 t F(t) dt
// over the (possibly quantile-truncated) integration range, integrating
// piecewise between breakpoints.
std::pair<double, double> cdf_moments(const AbsRankFn& fn, int intervals) {
  auto [a, b] = fn.integration_range();
  std::vector<double> cuts{a, b};
  collect_breakpoints(fn, &cuts);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (intervals % 2) ++intervals;
  double int_f = 0.0;
  double int_tf = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(cuts[i], a);
    const double hi = std::min(cuts[i + 1], b);
    if (!(hi > lo)) continue;
    int_f += simpson([&](double t) { return fn(t); }, lo, hi, intervals);
    int_tf += simpson([&](double t) { return 2.0 * t * fn(t); }, lo, hi,
                      intervals);
  }
  const double mean = b - int_f;
  const double second = b * b - int_tf;
  const double var = std::max(0.0, second - mean * mean);
  return {mean, var};
}

// Self-convolution of a probability mass vector, direct evaluation.
std::vector<double> convolve_direct(const std::vector<double>& mass, int r) {
  std::vector<double> acc = mass;
  for (int round = 1; round < r; ++round) {
    std::vector<double> next(acc.size() + mass.size() - 1, 0.0);
    for (size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] == 0.0) continue;
      for (size_t j = 0; j < mass.size(); ++j) {
        next[i + j] += acc[i] * mass[j];
      }
    }
    acc = std::move(next);
  }
  return acc;
}

// Self-convolution via FFT: pad, transform, raise the spectrum to the r-th
// power, invert, clean up negatives from rounding.
std::vector<double> convolve_fft(const std::vector<double>& mass, int r) {
  const size_t out_len = (mass.size() - 1) * static_cast<size_t>(r) + 1;
  size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<double> padded(n, 0.0);
  std::copy(mass.begin(), mass.end(), padded.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  for (auto& z : spectrum) z = std::pow(z, static_cast<double>(r));
  std::vector<double> time_domain;
  fft.inv(time_domain, spectrum);
  time_domain.resize(out_len);
  double sum = 0.0;
  for (auto& v : time_domain) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (sum > 0.0) {
    for (auto& v : time_domain) v /= sum;
  }
  return time_domain;
}

}  // namespace

AbsRankFn compose_rounds(const AbsRankFn& vc, std::int64_t r, RoundsMode mode,
                         int grid) {
  if (r < 1) throw DomainError("rounds composition: r must be >= 1");
  if (r == 1) return vc;
  if (mode == RoundsMode::normal_approx) {
    auto [mean, var] = cdf_moments(vc, std::max(grid, 1024) * 4);
    RoundsCdf rc;
    rc.normal_mode = true;
    rc.r = r;
    rc.mu = mean;
    rc.sigma = std::sqrt(var / static_cast<double>(r));
    if (!(rc.sigma > 0.0)) {
      throw DomainError("rounds composition: base CDF has zero variance");
    }
    CdfMetadata meta = vc.metadata();
    return AbsRankFn(std::move(rc), std::move(meta));
  }
  if (grid < 256) {
    throw DomainError("rounds composition: convolution grid must be >= 256");
  }
  if (!vc.bounded_support()) {
    throw CapabilityError(
        "rounds composition: convolution requires bounded support (" +
        std::string(kind_name(vc.kind())) +
        " is unbounded); use the normal-approx mode");
  }
  if (r > 4096) {
    throw CapabilityError(
        "rounds composition: convolution capped at r <= 4096; use the "
        "normal-approx mode for larger round counts");
  }
  auto [a, b] = vc.support();
  if (!(b > a)) {
    throw DomainError("rounds composition: degenerate support");
  }
  const int g = grid;
  const double h = (b - a) / g;
  // Histogram differentiation: exact bin masses from CDF differences, one
  // point mass at each bin center.
  std::vector<double> mass(static_cast<size_t>(g));
  double prev = vc(a);
  double sum = 0.0;
  for (int i = 0; i < g; ++i) {
    const double next = vc(a + (i + 1) * h);
    mass[static_cast<size_t>(i)] = std::max(0.0, next - prev);
    sum += mass[static_cast<size_t>(i)];
    prev = next;
  }
  if (sum <= 0.0) {
    throw DomainError("rounds composition: base CDF carries no mass on its support");
  }
  for (auto& m : mass) m /= sum;

  const size_t out_len = (mass.size() - 1) * static_cast<size_t>(r) + 1;
  const bool small = out_len * mass.size() * static_cast<size_t>(r) < (1u << 22);
  std::vector<double> conv = small ? convolve_direct(mass, static_cast<int>(r))
                                   : convolve_fft(mass, static_cast<int>(r));

  // Sum abscissa s_k = r a + (k + r/2) h; mean abscissa divides by r.
  RoundsCdf rc;
  rc.normal_mode = false;
  rc.r = r;
  rc.grid = g;
  rc.knots_t.resize(static_cast<Eigen::Index>(conv.size()) + 2);
  rc.knots_v.resize(static_cast<Eigen::Index>(conv.size()) + 2);
  rc.knots_t(0) = a;
  rc.knots_v(0) = 0.0;
  double cum = 0.0;
  for (size_t k = 0; k < conv.size(); ++k) {
    const double y =
        a + (static_cast<double>(k) / r + 0.5) * h;
    // midpoint convention: the CDF at an atom carries half its mass
    rc.knots_t(static_cast<Eigen::Index>(k) + 1) = y;
    rc.knots_v(static_cast<Eigen::Index>(k) + 1) = cum + 0.5 * conv[k];
    cum += conv[k];
  }
  rc.knots_t(rc.knots_t.size() - 1) = b;
  rc.knots_v(rc.knots_v.size() - 1) = 1.0;
  CdfMetadata meta = vc.metadata();
  return AbsRankFn(std::move(rc), std::move(meta));
}

AbsRankFn empirical_cdf(const Eigen::Ref<const Eigen::VectorXd>& samples,
                        std::optional<double> known_min,
                        std::optional<double> known_max, CdfMetadata meta) {
  const Eigen::Index n = samples.size();
  if (n < 2) {
    throw SizeError("empirical cdf: needs at least 2 samples, got " +
                    std::to_string(n));
  }
  std::vector<double> sorted(samples.data(), samples.data() + n);
  for (double v : sorted) {
    if (!std::isfinite(v)) {
      throw ParseError("empirical cdf: sample values must be finite");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  // Collapse duplicates to one knot at the highest tied level so the knot
  // sequence stays strictly increasing.
  std::vector<double> knots;
  std::vector<double> levels;
  const double np1 = static_cast<double>(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = sorted[static_cast<size_t>(i)];
    const double level = static_cast<double>(i + 1) / np1;
    if (!knots.empty() && knots.back() == v) {
      levels.back() = level;
    } else {
      knots.push_back(v);
      levels.push_back(level);
    }
  }
  if (knots.size() < 2) {
    throw SizeError("empirical cdf: needs at least 2 distinct values");
  }
  EmpiricalCdf e;
  e.n_raw = n;
  e.knots = Eigen::Map<Eigen::VectorXd>(knots.data(),
                                        static_cast<Eigen::Index>(knots.size()));
  e.levels = Eigen::Map<Eigen::VectorXd>(
      levels.data(), static_cast<Eigen::Index>(levels.size()));
  if (known_min) {
    if (*known_min > e.knots(0)) {
      throw DomainError("empirical cdf: known_min exceeds the smallest sample");
    }
    e.known_min = known_min;
  }
  if (known_max) {
    if (*known_max < e.knots(e.knots.size() - 1)) {
      throw DomainError("empirical cdf: known_max is below the largest sample");
    }
    e.known_max = known_max;
  }
  if ((known_min && !std::isfinite(*known_min)) ||
      (known_max && !std::isfinite(*known_max))) {
    throw DomainError("empirical cdf: known bounds must be finite");
  }
  // The printed upper tail needs y_N > 0; otherwise evaluate both tails in
  // coordinates shifted by y_1 (the lower tail is shift-invariant).
  const double y_last = e.knots(e.knots.size() - 1);
  e.shift = (y_last > 0.0) ? 0.0 : e.knots(0);
  meta.sample_count = n;
  meta.tail_gap = e.levels(0) - 1.0 / np1;
  meta.shifted_tails = (e.shift != 0.0);
  return AbsRankFn(std::move(e), std::move(meta));
}

// ---- serialization ----------------------------------------------------------

namespace {

constexpr int kFormatVersion = 1;

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  auto vec = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(vec.data(),
                                     static_cast<Eigen::Index>(vec.size()));
}

nlohmann::json metadata_to_json(const CdfMetadata& m) {
  // Stay an object even when every field is defaulted.
  nlohmann::json j = nlohmann::json::object();
  if (!m.problem.empty()) j["problem"] = m.problem;
  if (m.sample_count > 0) j["sample_count"] = m.sample_count;
  if (!m.table.empty()) {
    j["table"] = m.table;
    j["sobol_skip"] = m.sobol_skip;
  }
  if (m.tail_gap != 0.0) j["tail_gap"] = m.tail_gap;
  if (m.shifted_tails) j["shifted_tails"] = true;
  if (!std::isnan(m.crossover)) j["crossover"] = m.crossover;
  return j;
}

CdfMetadata metadata_from_json(const nlohmann::json& j) {
  CdfMetadata m;
  if (!j.is_object()) return m;  // tolerate hand-edited null metadata
  m.problem = j.value("problem", std::string());
  m.sample_count = j.value("sample_count", std::int64_t{0});
  m.table = j.value("table", std::string());
  m.sobol_skip = j.value("sobol_skip", std::uint32_t{0});
  m.tail_gap = j.value("tail_gap", 0.0);
  m.shifted_tails = j.value("shifted_tails", false);
  m.crossover = j.value("crossover",
                        std::numeric_limits<double>::quiet_NaN());
  return m;
}

nlohmann::json cdf_to_json(const AbsRankFn& fn) {
  nlohmann::json j;
  j["format"] = "absrank-cdf";
  j["version"] = kFormatVersion;
  j["kind"] = kind_name(fn.kind());
  nlohmann::json params;
  std::visit(
      [&params](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SphereCdf>) {
          params["d"] = d.d;
          params["w"] = d.w;
          params["ext_log2n"] = d.ext_log2n;
        } else if constexpr (std::is_same_v<T, ConeCdf>) {
          params["d"] = d.d;
          params["y_min"] = d.y_min;
          params["y_max"] = d.y_max;
        } else if constexpr (std::is_same_v<T, UniformCdf>) {
          params["y_min"] = d.y_min;
          params["y_max"] = d.y_max;
        } else if constexpr (std::is_same_v<T, GaussianCdf>) {
          params["mu"] = d.mu;
          params["sigma"] = d.sigma;
        } else if constexpr (std::is_same_v<T, EmpiricalCdf>) {
          params["n_raw"] = d.n_raw;
          params["knots"] = vector_to_json(d.knots);
          params["levels"] = vector_to_json(d.levels);
          if (d.known_min) params["known_min"] = *d.known_min;
          if (d.known_max) params["known_max"] = *d.known_max;
        } else if constexpr (std::is_same_v<T, BudgetCdf>) {
          params["c"] = d.c;
          params["base"] = cdf_to_json(*d.base);
        } else {
          params["r"] = d.r;
          if (d.normal_mode) {
            params["mode"] = "normal-approx";
            params["mu"] = d.mu;
            params["sigma"] = d.sigma;
          } else {
            params["mode"] = "convolution";
            params["grid"] = d.grid;
            params["knots_t"] = vector_to_json(d.knots_t);
            params["knots_v"] = vector_to_json(d.knots_v);
          }
        }
      },
      fn.data());
  j["params"] = params;
  j["metadata"] = metadata_to_json(fn.metadata());
  return j;
}

AbsRankFn cdf_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", std::string()) != "absrank-cdf") {
    throw FormatError("not an absolute-ranking CDF payload");
  }
  const int version = j.value("version", -1);
  if (version != kFormatVersion) {
    throw FormatError("unsupported CDF format version " +
                      std::to_string(version) + " (this build reads " +
                      std::to_string(kFormatVersion) + ")");
  }
  const std::string kind = j.value("kind", std::string());
  const auto& params = j.at("params");
  CdfMetadata meta = metadata_from_json(j.value("metadata", nlohmann::json::object()));
  if (kind == "analytic-sphere") {
    AbsRankFn fn = cdf_sphere(params.at("d").get<int>(),
                              params.at("w").get<double>(),
                              params.at("ext_log2n").get<std::uint32_t>());
    CdfMetadata rebuilt = fn.metadata();
    rebuilt.problem = meta.problem;
    return AbsRankFn(fn.data(), std::move(rebuilt));
  }
  if (kind == "analytic-cone") {
    AbsRankFn fn = cdf_cone(params.at("d").get<int>(),
                            params.at("y_min").get<double>(),
                            params.at("y_max").get<double>());
    return AbsRankFn(fn.data(), std::move(meta));
  }
  if (kind == "analytic-uniform") {
    AbsRankFn fn = cdf_uniform(params.at("y_min").get<double>(),
                               params.at("y_max").get<double>());
    return AbsRankFn(fn.data(), std::move(meta));
  }
  if (kind == "analytic-gaussian") {
    AbsRankFn fn = cdf_gaussian(params.at("mu").get<double>(),
                                params.at("sigma").get<double>());
    return AbsRankFn(fn.data(), std::move(meta));
  }
  if (kind == "empirical") {
    EmpiricalCdf e;
    e.n_raw = params.at("n_raw").get<std::int64_t>();
    e.knots = vector_from_json(params.at("knots"));
    e.levels = vector_from_json(params.at("levels"));
    if (e.knots.size() != e.levels.size() || e.knots.size() < 2) {
      throw FormatError("empirical CDF payload has inconsistent knots");
    }
    if (params.contains("known_min")) {
      e.known_min = params["known_min"].get<double>();
    }
    if (params.contains("known_max")) {
      e.known_max = params["known_max"].get<double>();
    }
    // Recompute the tail shift exactly as construction does so round trips
    // evaluate identically.
    const double y_last = e.knots(e.knots.size() - 1);
    e.shift = (y_last > 0.0) ? 0.0 : e.knots(0);
    return AbsRankFn(std::move(e), std::move(meta));
  }
  if (kind == "budget-composed") {
    BudgetCdf b;
    b.c = params.at("c").get<double>();
    b.base = std::make_shared<AbsRankFn>(cdf_from_json(params.at("base")));
    return AbsRankFn(std::move(b), std::move(meta));
  }
  if (kind == "rounds-composed") {
    RoundsCdf rc;
    rc.r = params.at("r").get<std::int64_t>();
    const std::string mode = params.at("mode").get<std::string>();
    if (mode == "normal-approx") {
      rc.normal_mode = true;
      rc.mu = params.at("mu").get<double>();
      rc.sigma = params.at("sigma").get<double>();
    } else if (mode == "convolution") {
      rc.normal_mode = false;
      rc.grid = params.at("grid").get<int>();
      rc.knots_t = vector_from_json(params.at("knots_t"));
      rc.knots_v = vector_from_json(params.at("knots_v"));
      if (rc.knots_t.size() != rc.knots_v.size() || rc.knots_t.size() < 2) {
        throw FormatError("rounds CDF payload has inconsistent knots");
      }
    } else {
      throw FormatError("unknown rounds mode '" + mode + "'");
    }
    return AbsRankFn(std::move(rc), std::move(meta));
  }
  throw FormatError("unknown CDF kind '" + kind + "'");
}

}  // namespace

void save_cdf(const AbsRankFn& v, std::ostream& out) {
  out << cdf_to_json(v).dump(2) << "\n";
}

void save_cdf_file(const AbsRankFn& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  save_cdf(v, out);
}

AbsRankFn load_cdf(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt CDF payload: ") + e.what());
  }
  try {
    return cdf_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("CDF payload missing fields: ") + e.what());
  }
}

AbsRankFn load_cdf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open CDF file '" + path + "'");
  return load_cdf(in);
}

}  // namespace absrank
