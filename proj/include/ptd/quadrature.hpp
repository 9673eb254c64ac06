#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ptd {

/// One-dimensional rule, nodes ascending.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal weight: sum(w) = 1 and
/// sum(w * f(x)) = E f(X) exactly for polynomials of degree <= 2n - 1.
Rule1D gauss_hermite_rule(int n);

/// Gauss-Legendre rule on [-1, 1].
Rule1D gauss_legendre_rule(int n);

/// Default cap on the number of tensor points any grid may hold.
inline constexpr std::size_t kDefaultGridBudget = std::size_t{1} << 26;

/// Full tensor-product Gauss-Hermite grid. Points are row-major: point p has
/// coordinates points[p * dims .. p * dims + dims).
struct QuadratureGrid {
  int nodes_per_dim = 0;
  int dims = 0;
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t p) const {
    return {points.data() + p * static_cast<std::size_t>(dims), static_cast<std::size_t>(dims)};
  }
};

QuadratureGrid gauss_hermite_grid(int nodes_per_dim, int dims, std::size_t budget = kDefaultGridBudget);

/// Sum of weight * f(point) in grid order. A non-finite integrand value raises
/// NumericError naming the point.
double integrate_over_grid(const QuadratureGrid& grid, const std::function<double(std::span<const double>)>& f);

}  // namespace ptd
