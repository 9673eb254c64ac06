#include <cmath>

#include "doctest.h"
#include "ptd/error.hpp"
#include "ptd/normal.hpp"
#include "ptd/outer_grid.hpp"
#include "ptd/quadrature.hpp"

using namespace ptd;

TEST_CASE("two-point rule") {
  const auto g = gauss_hermite_grid(2, 1);
  REQUIRE(g.size() == 2);
  CHECK(g.points[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(g.points[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("weights integrate the density to one") {
  for (int n : {2, 5, 16, 32, 64, 100})
    for (int d : {1, 2, 3}) {
      if (std::pow(n, d) > 2e6) continue;
      const auto g = gauss_hermite_grid(n, d);
      CHECK(integrate_over_grid(g, [](auto) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("moments are exact up to degree 2n - 1") {
  // E X^(2m) = (2m - 1)!!
  for (int n : {4, 16, 32, 64}) {
    const auto g = gauss_hermite_grid(n, 1);
    double dfact = 1.0;
    for (int m = 1; 2 * m <= 2 * n - 1 && m <= 12; ++m) {
      dfact *= 2 * m - 1;
      const double e = integrate_over_grid(g, [m](auto x) { return std::pow(x[0], 2 * m); });
      CHECK(e == doctest::Approx(dfact).epsilon(1e-10));
      const double odd = integrate_over_grid(g, [m](auto x) { return std::pow(x[0], 2 * m - 1); });
      CHECK(odd == doctest::Approx(0.0).scale(dfact).epsilon(1e-12));
    }
  }
}

TEST_CASE("second moment with 16 nodes") {
  const auto g = gauss_hermite_grid(16, 1);
  CHECK(integrate_over_grid(g, [](auto x) { return x[0] * x[0]; }) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Phi integrates to one half and exp to the lognormal mean") {
  CHECK(integrate_over_grid(gauss_hermite_grid(32, 1), [](auto x) { return norm_cdf(x[0]); }) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate_over_grid(gauss_hermite_grid(20, 1), [](auto x) { return std::exp(x[0]); }) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-8));
}

TEST_CASE("non-finite integrand is reported with its point") {
  const auto g = gauss_hermite_grid(4, 2);
  CHECK_THROWS_AS(integrate_over_grid(g, [](auto x) { return x[0] > 1.0 ? std::nan("") : 1.0; }), NumericError);
}

TEST_CASE("grid budget") {
  CHECK_THROWS_AS(gauss_hermite_grid(32, 6), CapacityError);
  CHECK_THROWS_AS(gauss_hermite_grid(32, 3, 1000), CapacityError);
  CHECK_THROWS_AS(gauss_hermite_grid(1, 1), ShapeError);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials") {
  const auto r = gauss_legendre_rule(10);
  double s = 0.0, s8 = 0.0;
  for (int i = 0; i < 10; ++i) {
    s += r.weights[i];
    s8 += r.weights[i] * std::pow(r.nodes[i], 18);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s8 == doctest::Approx(2.0 / 19.0).epsilon(1e-13));
}

TEST_CASE("pruned grid keeps almost all mass and projects consistently") {
  const OuterGrid g(32, 3);
  CHECK(g.size() < 32u * 32u * 32u);
  CHECK(g.dropped_mass() < 1e-11);
  double w = 0.0;
  for (double x : g.weights()) w += x;
  CHECK(w == doctest::Approx(1.0).epsilon(1e-11));

  const SubGrid s = g.project(1, 2);
  for (std::size_t p = 0; p < g.size(); p += 97) {
    CHECK(s.coord[0][s.map[p]] == g.coord(1)[p]);
    CHECK(s.coord[1][s.map[p]] == g.coord(2)[p]);
  }
  const SubGrid none = g.project(0, 0);
  CHECK(none.size() == 1);
}

TEST_CASE("pruned grid integrates smooth functions like the full grid") {
  const OuterGrid pruned(32, 3);
  const auto full = gauss_hermite_grid(32, 3);
  auto f = [](double a, double b, double c) { return norm_cdf(a + 0.5 * b - c); };
  double sp = 0.0;
  for (std::size_t p = 0; p < pruned.size(); ++p)
    sp += pruned.weights()[p] * f(pruned.coord(0)[p], pruned.coord(1)[p], pruned.coord(2)[p]);
  const double sf = integrate_over_grid(full, [&](auto x) { return f(x[0], x[1], x[2]); });
  CHECK(sp == doctest::Approx(sf).epsilon(0).scale(1.0).epsilon(1e-12));
}
