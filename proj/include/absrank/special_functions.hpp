#pragma once

namespace absrank {

// Natural log of the regularized upper incomplete gamma Q(a, x).
// Evaluated fully in log space so chi-square tails far below the smallest
// normal double (p ~ 1e-10000) keep their magnitude.  a > 0, x >= 0.
double log_gamma_q(double a, double x);

// log10 of the chi-square survival function at statistic x with df degrees
// of freedom.  df = 2 reduces to exactly -x / (2 ln 10).
double chisq_log10_sf(double x, double df);

// Standard normal CDF, accurate in both tails (erfc based).
double std_normal_cdf(double t);

// Inverse standard normal CDF for p in (0, 1).  Rational initial guess
// polished with one Halley step against the erfc-based CDF; relative error
// near machine precision across the full open interval.
double std_normal_quantile(double p);

}  // namespace absrank
