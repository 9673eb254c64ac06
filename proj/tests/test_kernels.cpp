#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ptd/kernels.hpp"
#include "ptd/mvn.hpp"
#include "ptd/normal.hpp"

using namespace ptd;

namespace {

struct Batch {
  std::vector<double> tau;
  std::vector<std::vector<double>> lo, hi;
  std::vector<const double*> lp, hp;
  std::vector<double> out;

  kernels::MarkovBatch view() {
    lp.clear();
    hp.clear();
    for (auto& v : lo) lp.push_back(v.data());
    for (auto& v : hi) hp.push_back(v.data());
    out.assign(lo[0].size(), -1.0);
    return {tau, lp.data(), hp.data(), out.size(), out.data()};
  }
};

Batch random_batch(int d, std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0), w(0.1, 3.0), gap(0.05, 2.0);
  Batch b;
  double t = 1.0;
  for (int c = 0; c < d; ++c) {
    b.tau.push_back(t);
    t += gap(rng);
  }
  b.lo.assign(d, std::vector<double>(count));
  b.hi.assign(d, std::vector<double>(count));
  for (std::size_t p = 0; p < count; ++p)
    for (int c = 0; c < d; ++c) {
      const double a = u(rng);
      b.lo[c][p] = a;
      b.hi[c][p] = a + w(rng);
      // Sprinkle infinite and empty intervals.
      if (p % 7 == 3 && c == d - 1) b.lo[c][p] = -HUGE_VAL;
      if (p % 11 == 5 && c == 0) b.hi[c][p] = HUGE_VAL;
      if (p % 13 == 6) b.hi[c][p] = b.lo[c][p];
    }
  return b;
}

}  // namespace

TEST_CASE("scalar norm_cdf matches std::erfc") {
  std::vector<double> x, y(2001);
  for (int i = -1000; i <= 1000; ++i) x.push_back(i * 0.04);
  kernels::scalar().norm_cdf(x.data(), y.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == norm_cdf(x[i]));
}

TEST_CASE("avx2 norm_cdf agrees with the scalar reference") {
  const auto* avx = kernels::avx2();
  if (avx == nullptr) {
    MESSAGE("AVX2 variant unavailable on this machine; skipped");
    return;
  }
  std::vector<double> x;
  for (int i = -40000; i <= 40000; ++i) x.push_back(i * 1e-3);
  x.push_back(HUGE_VAL);
  x.push_back(-HUGE_VAL);
  x.push_back(0.0);
  x.push_back(-0.0);
  std::vector<double> a(x.size()), s(x.size());
  avx->norm_cdf(x.data(), a.data(), x.size());
  kernels::scalar().norm_cdf(x.data(), s.data(), x.size());
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = std::abs(a[i] - s[i]);
    CHECK(diff <= 2e-16 + 1e-13 * s[i]);
    if (s[i] > 1e-300) worst_rel = std::max(worst_rel, diff / s[i]);
  }
  MESSAGE("worst relative difference " << worst_rel);
}

TEST_CASE("avx2 norm_cdf handles lengths that are not a multiple of four") {
  const auto* avx = kernels::avx2();
  if (avx == nullptr) return;
  for (std::size_t n = 0; n < 9; ++n) {
    std::vector<double> x(n), y(n, -1.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = 0.3 * i - 1.0;
    avx->norm_cdf(x.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(norm_cdf(x[i])).epsilon(1e-14));
  }
}

TEST_CASE("markov kernel: scalar and avx2 agree for d = 1..5") {
  const auto* avx = kernels::avx2();
  if (avx == nullptr) return;
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 5; ++d) {
    for (std::size_t count : {1u, 3u, 4u, 37u}) {
      Batch b = random_batch(d, count, rng);
      auto v1 = b.view();
      kernels::markov_rect(kernels::scalar(), v1);
      const auto ref = b.out;
      auto v2 = b.view();
      kernels::markov_rect(*avx, v2);
      for (std::size_t p = 0; p < count; ++p) CHECK(b.out[p] == doctest::Approx(ref[p]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("markov kernel agrees with the general MVN route") {
  std::mt19937_64 rng(11);
  MvnOptions opt;
  opt.tol = 2e-7;
  for (int d = 1; d <= 4; ++d) {
    Batch b = random_batch(d, 12, rng);
    auto v = b.view();
    kernels::markov_rect(v);
    const auto corr = CorrelationMatrix::markov(b.tau);
    for (std::size_t p = 0; p < 12; ++p) {
      Rectangle r;
      for (int c = 0; c < d; ++c) {
        r.lower.push_back(b.lo[c][p]);
        r.upper.push_back(b.hi[c][p]);
      }
      const double ref = mvn_rect_prob(corr, r, opt);
      CHECK(b.out[p] == doctest::Approx(ref).epsilon(0).scale(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("markov kernel over the whole space is one") {
  for (int d = 1; d <= 6; ++d) {
    std::vector<double> tau;
    for (int c = 0; c < d; ++c) tau.push_back(1.0 + c);
    Rectangle r{std::vector<double>(d, -HUGE_VAL), std::vector<double>(d, HUGE_VAL)};
    CHECK(markov_rect_prob(tau, r) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("markov kernel with strong correlation") {
  // rho = 0.995 between the two coordinates; compare against Genz's bivariate.
  const double tau[2] = {1.0, 1.0 / (0.995 * 0.995)};
  for (double b : {-1.0, 0.0, 0.7, 2.0}) {
    Rectangle r{{-HUGE_VAL, -HUGE_VAL}, {b, b + 0.1}};
    const double ref = mvn_rect_prob(CorrelationMatrix::markov(tau), r);
    CHECK(markov_rect_prob(tau, r) == doctest::Approx(ref).epsilon(0).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("plan_markov rejects bad input") {
  double tau[2] = {2.0, 1.0};
  kernels::MarkovBatch b{tau, nullptr, nullptr, 0, nullptr};
  CHECK_THROWS(kernels::plan_markov(b));
  double many[9] = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  kernels::MarkovBatch c{many, nullptr, nullptr, 0, nullptr};
  CHECK_THROWS(kernels::plan_markov(c));
}

TEST_CASE("two-dimensional markov kernel matches Genz's bivariate to 1e-10") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    Batch b = random_batch(2, 64, rng);
    auto v = b.view();
    kernels::markov_rect(v);
    const auto corr = CorrelationMatrix::markov(b.tau);
    for (std::size_t p = 0; p < 64; ++p) {
      Rectangle r{{b.lo[0][p], b.lo[1][p]}, {b.hi[0][p], b.hi[1][p]}};
      CHECK(b.out[p] == doctest::Approx(mvn_rect_prob(corr, r)).epsilon(0).scale(1.0).epsilon(1e-10));
    }
  }
}
