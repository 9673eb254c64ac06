#pragma once

// Shared pieces of the kernel variants. Not part of the public interface.

#include "ptd/kernels.hpp"

namespace ptd::kernels::detail {

// 10-point Gauss-Legendre rule on [-1, 1].
inline constexpr int kPanelNodes = 10;
inline constexpr double kGlNodes[kPanelNodes] = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
    -0.14887433898163122, 0.14887433898163122, 0.4333953941292472, 0.6794095682990244,
    0.8650633666889845,   0.9739065285171717};
inline constexpr double kGlWeights[kPanelNodes] = {
    0.06667134430868807, 0.14945134915058036, 0.219086362515982, 0.2692667193099965,
    0.295524224714753,   0.295524224714753,   0.2692667193099965, 0.219086362515982,
    0.14945134915058036, 0.06667134430868807};

/// Widest panel allowed, relative to the narrowest feature of the integrand.
inline constexpr double kPanelWidth = 2.5;

inline double clamp_limit(double x) {
  if (x < -kClamp) return -kClamp;
  if (x > kClamp) return kClamp;
  return x;
}

void norm_cdf_scalar(const double* x, double* out, std::size_t n);
void markov_rect_scalar(const MarkovPlan& plan, const MarkovBatch& batch);
/// Scalar evaluation of a single point; used for tails of vector loops.
double markov_point_scalar(const MarkovPlan& plan, const MarkovBatch& batch, std::size_t p);

#if defined(PTD_HAVE_AVX2)
void norm_cdf_avx2(const double* x, double* out, std::size_t n);
void markov_rect_avx2(const MarkovPlan& plan, const MarkovBatch& batch);
#endif

}  // namespace ptd::kernels::detail
