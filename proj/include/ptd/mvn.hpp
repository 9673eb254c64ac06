#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ptd {

/// Validated correlation matrix: symmetric, unit diagonal, entries in [-1, 1]
/// and positive semi-definite. Row-major storage.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  /// Throws ShapeError on a non-square input, MatrixDomainError otherwise.
  CorrelationMatrix(int dim, std::vector<double> entries);

  static CorrelationMatrix identity(int dim);
  /// corr(i, j) = sqrt(tau_i / tau_j) for i <= j; tau strictly increasing.
  static CorrelationMatrix markov(std::span<const double> tau);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return entries_[i * dim_ + j]; }
  const std::vector<double>& entries() const { return entries_; }

 private:
  int dim_ = 0;
  std::vector<double> entries_;
};

/// Box [lower, upper]; entries may be -inf / +inf.
struct Rectangle {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct MvnOptions {
  double tol = 1e-6;
  std::uint64_t seed = 0x5eed;
  /// Stop adding lattice points after this many integrand evaluations.
  std::size_t max_evals = 20'000'000;
};

/// P(lower <= X <= upper) for X ~ N(0, corr). d = 1 uses Phi, d = 2 Genz's
/// bivariate algorithm, d >= 3 separation of variables with a randomized
/// Richtmyer lattice (error estimate 3 standard errors <= tol).
double mvn_rect_prob(const CorrelationMatrix& corr, const Rectangle& rect, const MvnOptions& opt = {});

/// P(X > h, Y > k) for a standard bivariate normal with correlation r.
double bvn_upper(double h, double k, double r);

/// Same probability as mvn_rect_prob for a Markov correlation with times tau,
/// evaluated by the deterministic panel kernel.
double markov_rect_prob(std::span<const double> tau, const Rectangle& rect);

}  // namespace ptd
