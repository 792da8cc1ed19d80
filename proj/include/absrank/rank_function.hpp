#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace absrank {

// Kinds of absolute-ranking functions.  Each is a CDF: it maps a metric
// value t to the probability that a uniformly random search achieves a
// value <= t.
enum class CdfKind {
  sphere,     // squared-distance objective on a centered box
  cone,       // linear-distance objective, similarity-ratio power law
  uniform,    // uniformly distributed values on [y_min, y_max]
  gaussian,   // normally distributed values
  empirical,  // interpolated sample CDF with exponential tails
  budget,     // minimum of c independent draws from a base CDF
  rounds      // mean of r independent draws from a base CDF
};

const char* kind_name(CdfKind kind);

// Construction provenance carried alongside a CDF and preserved through
// serialization.
struct CdfMetadata {
  std::string problem;             // label of the problem this CDF describes
  std::int64_t sample_count = 0;   // sample size behind sampled parts
  std::uint32_t sobol_skip = 0;
  std::string table;               // direction-number table identifier
  // Empirical kind: size of the jump at the first knot when the sample
  // minimum is tied (the exponential lower tail reaches 1/(N+1) while the
  // knot sits at count/(N+1)).
  double tail_gap = 0.0;
  // Empirical kind: tails evaluated in coordinates shifted by the first
  // knot because the largest sample was <= 0.
  bool shifted_tails = false;
  // Sphere kind: threshold t = w^2 beyond which the closed form stops being
  // exact and the sampled extension takes over.
  double crossover = std::numeric_limits<double>::quiet_NaN();
};

class AbsRankFn;

namespace detail {

struct SphereCdf {
  int d = 1;
  double w = 1.0;
  double crossover = 1.0;      // w^2
  double v_crossover = 1.0;    // closed form at the crossover
  std::uint32_t ext_log2n = 16;
  bool ext_available = false;
  Eigen::VectorXd ext_knots;   // anchored tail grid on [w^2, d w^2]
  Eigen::VectorXd ext_levels;  // conditional CDF levels at ext_knots
};

struct ConeCdf {
  int d = 1;
  double y_min = 0.0;
  double y_max = 1.0;
};

struct UniformCdf {
  double y_min = 0.0;
  double y_max = 1.0;
};

struct GaussianCdf {
  double mu = 0.0;
  double sigma = 1.0;
};

struct EmpiricalCdf {
  Eigen::VectorXd knots;   // strictly increasing distinct sample values
  Eigen::VectorXd levels;  // CDF level at each knot: count(<= knot)/(N+1)
  std::int64_t n_raw = 0;  // multiset sample size N
  double shift = 0.0;      // subtracted inside tail exponents
  std::optional<double> known_min;
  std::optional<double> known_max;
};

struct BudgetCdf {
  double c = 1.0;
  std::shared_ptr<const AbsRankFn> base;
};

struct RoundsCdf {
  bool normal_mode = false;
  std::int64_t r = 1;
  // normal-approx mode
  double mu = 0.0;
  double sigma = 1.0;  // standard deviation of the mean (already / sqrt(r))
  // convolution mode
  int grid = 0;
  Eigen::VectorXd knots_t;
  Eigen::VectorXd knots_v;
};

using CdfData = std::variant<SphereCdf, ConeCdf, UniformCdf, GaussianCdf,
                             EmpiricalCdf, BudgetCdf, RoundsCdf>;

}  // namespace detail

// A monotone CDF object mapping a metric value to an absolute rank in
// [0, 1].  Immutable after construction; evaluation is reentrant.
class AbsRankFn {
 public:
  AbsRankFn(detail::CdfData data, CdfMetadata meta);

  // CDF evaluation.  NaN raises DomainError; the sphere kind additionally
  // rejects negative t (squared distances cannot be negative).
  double operator()(double t) const;

  CdfKind kind() const;
  const CdfMetadata& metadata() const { return meta_; }
  const detail::CdfData& data() const { return data_; }

  // True when the underlying distribution has bounded support (required by
  // round composition in convolution mode).
  bool bounded_support() const;
  // The bounded support [a, b]; throws CapabilityError when unbounded.
  std::pair<double, double> support() const;
  // Range used for moment integration: the support when bounded, otherwise
  // a quantile-negligible truncation.
  std::pair<double, double> integration_range() const;

 private:
  detail::CdfData data_;
  CdfMetadata meta_;
};

// Free-function spelling of CDF evaluation.
inline double evaluate(const AbsRankFn& v, double t) { return v(t); }

// --- analytic constructors -------------------------------------------------

// CDF of the squared Euclidean norm of a uniform point on [-w, w]^d:
//   v(t) = (pi t)^(d/2) / ((2w)^d Gamma(d/2 + 1))     while sqrt(t) < w.
// Beyond t = w^2 the ball pokes out of the box and the closed form is only
// an upper bound; there the object switches to a deterministic sampled
// extension (2^ext_log2n quasi-random points) anchored at the crossover and
// at the exact upper end d w^2.  The crossover is recorded in metadata.
AbsRankFn cdf_sphere(int d, double w, std::uint32_t ext_log2n = 16);

// The raw closed form above evaluated at t regardless of the crossover
// (clamped to [0, 1]).  Exact for t <= w^2, an overestimate beyond.
double sphere_closed_form(int d, double w, double t);

// CDF of a linear-distance (cone) objective on a d-dimensional domain:
//   v(t) = ((t - y_min)/(y_max - y_min))^d, clamped outside [y_min, y_max].
// d = 1 coincides with the uniform CDF (max-min scaling).
AbsRankFn cdf_cone(int d, double y_min, double y_max);

AbsRankFn cdf_uniform(double y_min, double y_max);
AbsRankFn cdf_gaussian(double mu, double sigma);

// --- composition -----------------------------------------------------------

// CDF of the minimum of c independent draws: 1 - (1 - v1(t))^c.
// c >= 1 (not necessarily an integer).
AbsRankFn compose_budget(const AbsRankFn& v1, double c);

enum class RoundsMode { convolution, normal_approx };

// CDF of the mean of r independent draws from vc.
//   convolution: bin vc's density on a uniform grid over its bounded
//     support, self-convolve r-1 times (direct or FFT), rescale by 1/r.
//   normal_approx: Gaussian with mean mu(vc) and variance var(vc)/r,
//     moments obtained by Simpson integration of the CDF.
// r = 1 returns vc unchanged.  Convolution over unbounded support raises
// CapabilityError.
AbsRankFn compose_rounds(const AbsRankFn& vc, std::int64_t r,
                         RoundsMode mode = RoundsMode::convolution,
                         int grid = 4096);

// --- empirical estimator ----------------------------------------------------

// Interpolated sample CDF: knot levels count(<= y_i)/(N+1), linear between
// knots, exponential tails outside the sample range (evaluated in shifted
// coordinates when the largest sample is <= 0), optional exact bounds that
// replace the tails with linear bridges.  Duplicate values collapse to one
// knot at the highest tied level.  Requires >= 2 distinct values.
AbsRankFn empirical_cdf(const Eigen::Ref<const Eigen::VectorXd>& samples,
                        std::optional<double> known_min = std::nullopt,
                        std::optional<double> known_max = std::nullopt,
                        CdfMetadata meta = {});

// --- serialization -----------------------------------------------------------

// Versioned JSON (.absrank.json).  Analytic kinds store parameters only
// (the sphere extension is rebuilt deterministically on load); empirical
// stores knots at full precision.  Round trips reproduce evaluation
// bit-exactly.
void save_cdf(const AbsRankFn& v, std::ostream& out);
void save_cdf_file(const AbsRankFn& v, const std::string& path);
AbsRankFn load_cdf(std::istream& in);
AbsRankFn load_cdf_file(const std::string& path);

}  // namespace absrank
