#include <cmath>
#include <random>

#include "doctest.h"
#include "ptd/error.hpp"
#include "ptd/mvn.hpp"
#include "ptd/normal.hpp"

using namespace ptd;

namespace {
constexpr double kInf = HUGE_VAL;
}

TEST_CASE("univariate rectangle is a Phi difference") {
  const auto c = CorrelationMatrix::identity(1);
  CHECK(mvn_rect_prob(c, {{-kInf}, {1.959964}}) == doctest::Approx(0.975).epsilon(1e-7));
  CHECK(mvn_rect_prob(c, {{1.0}, {1.0}}) == 0.0);
}

TEST_CASE("independent bivariate quadrant") {
  const auto c = CorrelationMatrix::identity(2);
  CHECK(mvn_rect_prob(c, {{-kInf, -kInf}, {0.0, 0.0}}) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("bivariate orthant has the arcsine closed form") {
  for (double r : {-0.95, -0.5, 0.0, 0.2, 0.6, 0.93, 0.99}) {
    const double expect = 0.25 + std::asin(r) / (2.0 * M_PI);
    CHECK(bvn_upper(0.0, 0.0, r) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("trivariate orthant matches a Cholesky Monte Carlo oracle") {
  const double tau[3] = {1.0, 2.0, 3.0};
  const auto c = CorrelationMatrix::markov(tau);
  const double p = mvn_rect_prob(c, {{0.0, 0.0, 0.0}, {kInf, kInf, kInf}});

  // L for corr(i, j) = sqrt(i / j).
  const double l21 = std::sqrt(0.5), l22 = std::sqrt(0.5);
  const double l31 = std::sqrt(1.0 / 3.0), l32 = (std::sqrt(2.0 / 3.0) - l31 * l21) / l22;
  const double l33 = std::sqrt(1.0 - l31 * l31 - l32 * l32);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  const int n = 10'000'000;
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    const double a = z(rng), b = z(rng), e = z(rng);
    if (a > 0 && l21 * a + l22 * b > 0 && l31 * a + l32 * b + l33 * e > 0) ++hits;
  }
  const double mc = static_cast<double>(hits) / n;
  const double se = std::sqrt(mc * (1 - mc) / n);
  CHECK(std::abs(p - mc) < 3 * se);
  // Orthant probability for this structure is 1/4 + (asin r12 + asin r13 + asin r23) / (4 pi).
  const double exact = 0.125 + (std::asin(std::sqrt(0.5)) + std::asin(std::sqrt(1.0 / 3.0)) + std::asin(std::sqrt(2.0 / 3.0))) / (4 * M_PI);
  CHECK(p == doctest::Approx(exact).epsilon(0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("whole space has probability one and boxes are monotone") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double tau[4] = {1.0, 1.7, 2.2, 4.0};
  const auto c = CorrelationMatrix::markov(tau);
  CHECK(mvn_rect_prob(c, {std::vector<double>(4, -kInf), std::vector<double>(4, kInf)}) ==
        doctest::Approx(1.0).epsilon(1e-6));
  for (int rep = 0; rep < 5; ++rep) {
    Rectangle small, big;
    for (int i = 0; i < 4; ++i) {
      const double a = u(rng);
      small.lower.push_back(a);
      small.upper.push_back(a + 1.0);
      big.lower.push_back(a - 0.3);
      big.upper.push_back(a + 1.2);
    }
    CHECK(mvn_rect_prob(c, big) >= mvn_rect_prob(c, small) - 1e-6);
  }
}

TEST_CASE("diagonal correlation gives a product of Phi differences") {
  const auto c = CorrelationMatrix::identity(3);
  Rectangle r{{-0.5, -kInf, 0.2}, {1.0, 0.3, 2.0}};
  const double expect = norm_interval(-0.5, 1.0) * norm_interval(-kInf, 0.3) * norm_interval(0.2, 2.0);
  CHECK(mvn_rect_prob(c, r) == doctest::Approx(expect).epsilon(0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("semi-definite matrices are accepted, indefinite ones rejected") {
  // Perfectly correlated pair: P(X < 0, X < 1) = 1/2.
  const CorrelationMatrix pair(3, {1, 1, 0, 1, 1, 0, 0, 0, 1});
  CHECK(mvn_rect_prob(pair, {{-kInf, -kInf, -kInf}, {0.0, 1.0, kInf}}) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(CorrelationMatrix(3, {1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1}), MatrixDomainError);
  CHECK_THROWS_AS(CorrelationMatrix(2, {1, 0.5, 0.4, 1}), MatrixDomainError);
  CHECK_THROWS_AS(CorrelationMatrix(2, {1, 0.5, 0.5}), ShapeError);
}

TEST_CASE("dimension mismatch is a shape error") {
  CHECK_THROWS_AS(mvn_rect_prob(CorrelationMatrix::identity(2), {{0.0}, {1.0}}), ShapeError);
}

TEST_CASE("results are reproducible for a fixed configuration") {
  const double tau[3] = {1.0, 2.0, 5.0};
  const auto c = CorrelationMatrix::markov(tau);
  Rectangle r{{-1.0, -0.5, -kInf}, {2.0, 1.5, 0.3}};
  CHECK(mvn_rect_prob(c, r) == mvn_rect_prob(c, r));
}
