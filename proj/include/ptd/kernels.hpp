#pragma once

// Batched numerical kernels behind the analytic engines. Every kernel has a
// scalar reference implementation and, where the CPU supports it, an AVX2/FMA
// variant picked once at runtime. Set PTD_SIMD=scalar to force the reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace ptd::kernels {

inline constexpr int kMaxMarkovDims = 8;

/// Integrals over infinite coordinates are truncated here (in standard units).
inline constexpr double kClamp = 8.5;

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Rectangle probabilities for a batch of points that share one Markov
/// (Brownian information-time) correlation structure: corr(Z_i, Z_j) equals
/// sqrt(tau_i / tau_j) for i <= j. Limits are stored coordinate-major:
/// lower[c][p] is the lower limit of coordinate c for point p.
struct MarkovBatch {
  std::span<const double> times;  // tau_1 < ... < tau_d
  const double* const* lower = nullptr;
  const double* const* upper = nullptr;
  std::size_t count = 0;
  double* out = nullptr;
};

/// Prepared per-batch constants shared by all ISA variants.
struct MarkovPlan {
  int dims = 0;
  double rho[kMaxMarkovDims] = {};  // corr(Z_i, Z_{i+1})
  double sd[kMaxMarkovDims] = {};   // sqrt(1 - rho_i^2)
  int panels[kMaxMarkovDims] = {};  // Gauss-Legendre panels per integrated coordinate
};

struct KernelTable {
  Isa isa;
  void (*norm_cdf)(const double* x, double* out, std::size_t n);
  void (*markov_rect)(const MarkovPlan& plan, const MarkovBatch& batch);
};

/// Table selected for this process (AVX2 when available unless overridden).
const KernelTable& active();
const KernelTable& scalar();
/// nullptr when the AVX2 variant was not built or the CPU lacks AVX2/FMA.
const KernelTable* avx2();

MarkovPlan plan_markov(const MarkovBatch& batch);

/// Convenience wrappers over active().
void norm_cdf(std::span<const double> x, std::span<double> out);
void markov_rect(const MarkovBatch& batch);
void markov_rect(const KernelTable& table, const MarkovBatch& batch);

}  // namespace ptd::kernels
