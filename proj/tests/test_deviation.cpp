#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ptd/deviation.hpp"
#include "ptd/error.hpp"
#include "ptd/error_engine.hpp"
#include "ptd/power_engine.hpp"
#include "scenarios.hpp"

using namespace ptd;

namespace {

CalibratedDesign setting2(GridCache& cache) {
  const double n[2] = {46, 77};
  return calibrated_design(scenarios::flair(2), n, cache);
}

double plan_total(const SimPlan& p) {
  double t = 0.0;
  for (const auto& s : p.segments) {
    t += s.control;
    for (double a : s.arm) t += a;
  }
  return t;
}

}  // namespace

TEST_CASE("largest remainder keeps the total and stays proportional") {
  const auto v = largest_remainder(10, {1, 1, 1});
  CHECK(std::accumulate(v.begin(), v.end(), 0LL) == 10);
  CHECK(v == std::vector<long long>{4, 3, 3});
  const auto w = largest_remainder(300, {46, 77, 77});
  CHECK(std::accumulate(w.begin(), w.end(), 0LL) == 300);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(w[i] - 300.0 * std::vector<double>{46, 77, 77}[i] / 200.0) < 1.0);
  CHECK(largest_remainder(0, {1, 2}) == std::vector<long long>{0, 0});
}

TEST_CASE("the planned add point reproduces the design") {
  GridCache cache(24);
  const auto d = setting2(cache);
  const double a = planned_add_point(d);
  CHECK(a == 46);
  const SimPlan base = plan_from_design(d);
  for (Approach ap : {Approach::MoveInterim, Approach::KeepTiming}) {
    const auto p = deviation_plan(d, ap, a, cache);
    REQUIRE(p.plan.segments.size() == base.segments.size());
    for (std::size_t i = 0; i < base.segments.size(); ++i) {
      CHECK(p.plan.segments[i].control == base.segments[i].control);
      CHECK(p.plan.segments[i].arm == base.segments[i].arm);
      CHECK(p.plan.segments[i].analysis == base.segments[i].analysis);
    }
  }
  const auto r = deviation_plan(d, Approach::Recalibrate, a, cache);
  REQUIRE(r.design);
  for (int k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < d.bounds[k].upper.size(); ++j)
      CHECK(r.design->bounds[k].upper[j] == doctest::Approx(d.bounds[k].upper[j]).epsilon(1e-4));
}

TEST_CASE("every approach keeps the maximum sample size") {
  GridCache cache(24);
  const auto d = setting2(cache);
  for (Approach ap : {Approach::MoveInterim, Approach::Recalibrate, Approach::KeepTiming})
    for (double a : {1.0, 20.0, 100.0, 189.0}) {
      CAPTURE(a);
      CHECK(plan_total(deviation_plan(d, ap, a, cache).plan) == doctest::Approx(d.schedule.max_n()).epsilon(1e-12));
    }
}

TEST_CASE("recalibrated plans hold the error rate analytically") {
  GridCache cache(24);
  const auto d = setting2(cache);
  for (double a : {10.0, 100.0}) {
    const auto p = deviation_plan(d, Approach::Recalibrate, a, cache);
    REQUIRE(p.design);
    CHECK(fwer(*p.design, cache) == doctest::Approx(0.025).epsilon(1e-4));
  }
}

TEST_CASE("add points outside the trial are rejected") {
  GridCache cache(16);
  const auto d = setting2(cache);
  CHECK_THROWS_AS(deviation_plan(d, Approach::KeepTiming, 0.0, cache), ConfigError);
  CHECK_THROWS_AS(deviation_plan(d, Approach::KeepTiming, 200.0, cache), ConfigError);
  CHECK_THROWS_AS(deviation_plan(d, Approach::KeepTiming, 10.5, cache), ConfigError);
  CHECK_THROWS_AS(parse_approach(4), ConfigError);
}

TEST_CASE("deviation study reports failures as rows") {
  GridCache cache(16);
  const auto d = setting2(cache);
  DeviationStudyOptions opt;
  opt.approaches = {Approach::KeepTiming};
  opt.add_points = {46.0, 500.0};
  opt.replicates = 2000;
  const auto rows = deviation_study(d, opt, cache);
  int errors = 0, fwer_rows = 0;
  for (const auto& r : rows) {
    errors += !r.error.empty();
    fwer_rows += r.metric == "fwer";
    CHECK(r.seed == 1);
  }
  CHECK(errors == 1);
  CHECK(fwer_rows == 3);
}
