#pragma once

#include <cmath>
#include <numbers>

namespace ptd {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal distribution function; exact at +-infinity.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

/// Upper tail 1 - Phi(x) without cancellation.
inline double norm_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

/// Phi(upper) - Phi(lower), evaluated on whichever tail keeps precision.
inline double norm_interval(double lower, double upper) {
  if (!(lower < upper)) return 0.0;
  if (lower > 0.0) return norm_sf(lower) - norm_sf(upper);
  return norm_cdf(upper) - norm_cdf(lower);
}

/// Inverse of the standard normal distribution function, p in (0, 1).
double norm_quantile(double p);

}  // namespace ptd
