#include "ptd/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ptd/error.hpp"

namespace ptd {

Rule1D gauss_hermite_rule(int n) {
  if (n < 1) throw ShapeError("gauss_hermite_rule: need at least one node");
  // Newton iteration on orthonormal physicists' Hermite polynomials, started
  // from the usual asymptotic guesses (largest root first).
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    int it = 0;
    for (; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (it == 200) throw ConvergenceError("gauss_hermite_rule: Newton iteration did not converge");
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) x[m - 1] = 0.0;

  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = -x[i] * std::numbers::sqrt2;
    rule.weights[i] = w[i] * inv_sqrt_pi;
  }
  return rule;
}

Rule1D gauss_legendre_rule(int n) {
  if (n < 1) throw ShapeError("gauss_legendre_rule: need at least one node");
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  if (n % 2 == 1) rule.nodes[m - 1] = 0.0;
  return rule;
}

QuadratureGrid gauss_hermite_grid(int nodes_per_dim, int dims, std::size_t budget) {
  if (nodes_per_dim < 2) throw ShapeError("gauss_hermite_grid: nodes_per_dim must be >= 2");
  if (dims < 1) throw ShapeError("gauss_hermite_grid: dims must be >= 1");
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) {
    if (total > budget / static_cast<std::size_t>(nodes_per_dim)) {
      std::ostringstream msg;
      msg << "gauss_hermite_grid: " << nodes_per_dim << "^" << dims << " points exceed the budget of " << budget;
      throw CapacityError(msg.str());
    }
    total *= static_cast<std::size_t>(nodes_per_dim);
  }

  const Rule1D rule = gauss_hermite_rule(nodes_per_dim);
  QuadratureGrid grid;
  grid.nodes_per_dim = nodes_per_dim;
  grid.dims = dims;
  grid.points.resize(total * dims);
  grid.weights.resize(total);
  std::vector<int> idx(dims, 0);
  for (std::size_t p = 0; p < total; ++p) {
    double w = 1.0;
    for (int d = 0; d < dims; ++d) {
      grid.points[p * dims + d] = rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    grid.weights[p] = w;
    for (int d = dims - 1; d >= 0; --d) {
      if (++idx[d] < nodes_per_dim) break;
      idx[d] = 0;
    }
  }
  return grid;
}

double integrate_over_grid(const QuadratureGrid& grid, const std::function<double(std::span<const double>)>& f) {
  double sum = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto x = grid.point(p);
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrate_over_grid: non-finite integrand " << v << " at point " << p << " (";
      for (std::size_t d = 0; d < x.size(); ++d) msg << (d ? ", " : "") << x[d];
      msg << ")";
      throw NumericError(msg.str());
    }
    sum += grid.weights[p] * v;
  }
  return sum;
}

}  // namespace ptd
