#include <cmath>
#include <random>

#include "doctest.h"
#include "ptd/error.hpp"
#include "ptd/error_engine.hpp"
#include "ptd/normal.hpp"
#include "scenarios.hpp"

using namespace ptd;

namespace {

CalibratedDesign calibrated(const DesignSpec& spec, std::vector<double> n, GridCache& cache) {
  const Schedule sch = control_schedule(spec, n);
  auto res = calibrate_boundaries(spec, sch, cache);
  return {spec, sch, res.bounds, res.fwer};
}

void check_bounds(const ArmBounds& b, std::vector<double> up, std::vector<double> lo) {
  for (std::size_t j = 0; j < up.size(); ++j) {
    CHECK(b.upper[j] == doctest::Approx(up[j]).epsilon(0).scale(1.0).epsilon(0.01));
    CHECK(b.lower[j] == doctest::Approx(lo[j]).epsilon(0).scale(1.0).epsilon(0.01));
  }
}

}  // namespace

TEST_CASE("setting 2 calibration reproduces the published boundaries") {
  GridCache cache(32);
  const auto d = calibrated(scenarios::flair(2), {46, 77}, cache);
  CHECK(*d.fwer == doctest::Approx(0.025).epsilon(0).scale(1.0).epsilon(1e-5));
  check_bounds(d.bounds[0], {2.776, 2.453, 2.404}, {0.0, 1.472, 2.404});
  check_bounds(d.bounds[1], {2.496, 2.353}, {0.832, 2.353});
  // equal pairwise error across arms
  CHECK(pwer(d, 0) == doctest::Approx(pwer(d, 1)).epsilon(1e-4));
}

TEST_CASE("setting 1 calibration reproduces the published boundaries") {
  GridCache cache(32);
  const auto d = calibrated(scenarios::flair(1), {76, 78}, cache);
  CHECK(fwer(d, cache) == doctest::Approx(0.025).epsilon(0).scale(1.0).epsilon(1e-5));
  for (int k = 0; k < 2; ++k) check_bounds(d.bounds[k], {2.501, 2.358}, {0.834, 2.358});
}

TEST_CASE("one arm, one stage: the boundary is the z-test quantile") {
  GridCache cache(32);
  const auto d = calibrated(scenarios::single_arm(1), {100}, cache);
  CHECK(d.bounds[0].upper[0] == doctest::Approx(norm_quantile(0.975)).epsilon(1e-4));
  CHECK(fwer(d, cache) == doctest::Approx(0.025).epsilon(1e-4));
  CHECK(pwer(d, 0) == doctest::Approx(0.025).epsilon(1e-4));
}

TEST_CASE("fwer falls as the boundary scale grows") {
  GridCache cache(32);
  const DesignSpec spec = scenarios::flair(2);
  const double n[2] = {46, 77};
  const Schedule sch = control_schedule(spec, n);
  double prev = 1.0;
  for (double a : {1.4, 1.7, 2.0, 2.3, 2.6}) {
    CalibratedDesign d{spec, sch, {}, std::nullopt};
    for (int k = 0; k < 2; ++k) d.bounds.push_back(make_arm_bounds(Shape::Triangular, a, spec.ratio(k)));
    const double f = fwer(d, cache);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("fwer lies between the largest pwer and their sum") {
  GridCache cache(32);
  const auto d = calibrated(scenarios::flair(2), {46, 77}, cache);
  const double p0 = pwer(d, 0), p1 = pwer(d, 1), f = fwer(d, cache);
  CHECK(f >= std::max(p0, p1) - 1e-7);
  CHECK(f <= p0 + p1 + 1e-7);
}

TEST_CASE("pwer agrees with the general lattice integrator") {
  GridCache cache(32);
  const auto d = calibrated(scenarios::flair(2), {46, 77}, cache);
  MvnOptions opt;
  opt.tol = 1e-6;
  for (int k = 0; k < 2; ++k) CHECK(pwer_mvn(d, k, opt) == doctest::Approx(pwer(d, k)).epsilon(0).scale(1.0).epsilon(5e-6));
}

TEST_CASE("shifted limits invert the Z statistic") {
  GridCache cache(32);
  const auto d = calibrated(scenarios::flair(2), {46, 77}, cache);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<double> t{z(rng), z(rng), z(rng)};
    const double theta = 0.3 * z(rng);
    for (int k = 0; k < 2; ++k) {
      const int s = d.spec.adding_stage[k];
      for (int j = 1; j <= d.spec.stages[k]; ++j) {
        const ShiftedLimits lim = shifted_limits(d, k, j, theta, t);
        // Z from v = lim.upper: arm mean sigma v / sqrt(n) + theta, control
        // mean over the concurrent periods.
        const double n = d.schedule.active[k][j - 1];
        double csum = 0.0, D = 0.0;
        for (int i = s; i < s + j; ++i) {
          const double di = d.schedule.increments[i];
          csum += std::sqrt(di) * t[i];
          D += di;
        }
        const double zstat =
            (lim.upper / std::sqrt(n) + theta - csum / D) / std::sqrt(1.0 / n + 1.0 / D);
        CHECK(zstat == doctest::Approx(d.bounds[k].upper[j - 1]).epsilon(1e-10));
        CHECK(lim.lower <= lim.upper);
      }
    }
  }
}

TEST_CASE("shifted_limits rejects bad indices") {
  GridCache cache(16);
  const auto d = calibrated(scenarios::flair(2), {46, 77}, cache);
  const std::vector<double> t{0, 0, 0};
  CHECK_THROWS_AS(shifted_limits(d, 1, 3, 0.0, t), ShapeError);
  CHECK_THROWS_AS(shifted_limits(d, 0, 1, 0.0, std::span<const double>(t).first(0)), ShapeError);
}

TEST_CASE("non_rejection_prob is larger when effects are negative") {
  GridCache cache(32);
  const auto d = calibrated(scenarios::flair(2), {46, 77}, cache);
  const double g = non_rejection_prob(d, EffectConfig::global_null(2), cache);
  CHECK(1.0 - g == doctest::Approx(0.025).epsilon(1e-4));
  CHECK(non_rejection_prob(d, EffectConfig{{-0.2, 0.0}, ""}, cache) > g);
  CHECK(non_rejection_prob(d, EffectConfig{{-0.2, -0.3}, ""}, cache) > g);
  CHECK_THROWS_AS(non_rejection_prob(d, EffectConfig{{0.0}, ""}, cache), ShapeError);
}
