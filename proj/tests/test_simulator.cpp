#include <cmath>
#include <cstdlib>
#include <limits>

#include "doctest.h"
#include "ptd/error.hpp"
#include "ptd/power_engine.hpp"
#include "ptd/simulator.hpp"
#include "scenarios.hpp"

using namespace ptd;

namespace {

CalibratedDesign setting2(GridCache& cache) {
  const double n[2] = {46, 77};
  return calibrated_design(scenarios::flair(2), n, cache);
}

SimConfig config_for(const CalibratedDesign& d, EffectConfig theta, std::size_t reps, std::uint64_t seed) {
  SimConfig c;
  c.plan = plan_from_design(d);
  c.theta = std::move(theta);
  c.replicates = reps;
  c.seed = seed;
  return c;
}

bool same(const Estimate& a, const Estimate& b) { return a.estimate == b.estimate && a.se == b.se; }

}  // namespace

TEST_CASE("plan from design follows the control schedule") {
  GridCache cache(16);
  const auto d = setting2(cache);
  const SimPlan p = plan_from_design(d);
  double control = 0.0;
  for (const auto& s : p.segments) control += s.control;
  CHECK(control == d.schedule.control.back());
  CHECK(p.arms[1].first_segment == 1);
  CHECK(p.arms[0].upper == d.bounds[0].upper);
}

TEST_CASE("results do not depend on the thread count") {
  GridCache cache(16);
  const auto d = setting2(cache);
  const auto cfg = config_for(d, EffectConfig::global_null(2), 50'000, 9);
  setenv("PTD_THREADS", "1", 1);
  const SimReport a = simulate(cfg);
  setenv("PTD_THREADS", "5", 1);
  const SimReport b = simulate(cfg);
  unsetenv("PTD_THREADS");
  CHECK(same(a.fwer, b.fwer));
  CHECK(same(a.expected_n, b.expected_n));
  for (int k = 0; k < 2; ++k) {
    CHECK(same(a.reject[k], b.reject[k]));
    CHECK(same(a.recommend[k], b.recommend[k]));
  }
  CHECK(a.pmf.prob == b.pmf.prob);
}

TEST_CASE("seeds change the stream") {
  GridCache cache(16);
  const auto d = setting2(cache);
  const auto a = simulate(config_for(d, EffectConfig::global_null(2), 20'000, 1));
  const auto b = simulate(config_for(d, EffectConfig::global_null(2), 20'000, 2));
  CHECK(a.expected_n.estimate != b.expected_n.estimate);
}

TEST_CASE("unreachable efficacy bounds never reject and run to the end") {
  GridCache cache(16);
  const auto d = setting2(cache);
  auto cfg = config_for(d, EffectConfig{{1.0, 1.0}, "large"}, 10'000, 4);
  const double inf = std::numeric_limits<double>::infinity();
  for (auto& a : cfg.plan.arms) {
    for (auto& u : a.upper) u = inf;
    for (auto& l : a.lower) l = -inf;
    a.lower.back() = inf;
  }
  const auto r = simulate(cfg);
  CHECK(r.fwer.estimate == 0.0);
  for (int k = 0; k < 2; ++k) {
    CHECK(r.reject[k].estimate == 0.0);
    CHECK(r.recommend[k].estimate == 0.0);
  }
  CHECK(r.expected_n.estimate == d.schedule.max_n());
  CHECK(r.expected_n.se == 0.0);
}

TEST_CASE("simulation agrees with the analytic engines") {
  GridCache cache(32);
  const auto d = setting2(cache);
  const auto h = simulate(config_for(d, EffectConfig::global_null(2), 400'000, 17));
  CHECK(std::abs(h.fwer.estimate - 0.025) < 4.0 * h.fwer.se);
  const double p2 = power(d, 1, cache).total;
  const auto l = simulate(config_for(d, EffectConfig::lfc(d.spec, 1), 400'000, 18));
  CHECK(std::abs(l.recommend[1].estimate - p2) < 4.0 * l.recommend[1].se);
  CHECK(l.fwer.estimate <= h.fwer.estimate + 4.0 * h.fwer.se);
}

TEST_CASE("invalid plans are rejected") {
  GridCache cache(16);
  const auto d = setting2(cache);
  auto cfg = config_for(d, EffectConfig::global_null(2), 100, 1);
  cfg.plan.arms[0].lower.back() = cfg.plan.arms[0].upper.back() - 1.0;
  CHECK_THROWS_AS(simulate(cfg), ConfigError);
  cfg = config_for(d, EffectConfig::global_null(2), 0, 1);
  CHECK_THROWS_AS(simulate(cfg), ConfigError);
  cfg = config_for(d, EffectConfig::global_null(2), 100, 1);
  cfg.plan.segments[0].arm.pop_back();
  CHECK_THROWS_AS(simulate(cfg), ShapeError);
}

TEST_CASE("proportion standard error") {
  const Estimate e = proportion(25, 1000);
  CHECK(e.estimate == 0.025);
  CHECK(e.se == doctest::Approx(std::sqrt(0.025 * 0.975 / 1000)));
}
