#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ptd/power_engine.hpp"
#include "ptd/size_analytics.hpp"
#include "scenarios.hpp"

using namespace ptd;

namespace {

// Small design with random structure and an uncalibrated boundary scale.
CalibratedDesign random_design(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> arms(1, 3), stages(1, 2), start(0, 1), nk(15, 80), shape(0, 2);
  std::uniform_real_distribution<double> scale(1.2, 2.6);
  DesignSpec s;
  s.arms = arms(rng);
  s.adding_stage.assign(s.arms, 0);
  for (int k = 1; k < s.arms; ++k) s.adding_stage[k] = start(rng);
  std::sort(s.adding_stage.begin(), s.adding_stage.end());
  s.initial_arms = 0;
  for (int v : s.adding_stage) s.initial_arms += v == 0;
  s.control_stages = 0;
  for (int k = 0; k < s.arms; ++k) {
    s.stages.push_back(stages(rng));
    s.shapes.push_back(static_cast<Shape>(shape(rng)));
    s.control_stages = std::max(s.control_stages, s.adding_stage[k] + s.stages[k]);
  }
  s.theta_interesting = -std::log(0.69);
  s.theta_null = -std::log(0.99);
  s.validate();
  std::vector<double> n;
  for (int k = 0; k < s.arms; ++k) n.push_back(nk(rng));
  CalibratedDesign d{s, control_schedule(s, n), {}, std::nullopt};
  const double a = scale(rng);
  for (int k = 0; k < s.arms; ++k) d.bounds.push_back(make_arm_bounds(s.shapes[k], a, s.ratio(k)));
  return d;
}

}  // namespace

TEST_CASE("enumeration and the decomposition agree on random small designs") {
  std::mt19937_64 rng(20240601);
  GridCache cache(24);
  std::uniform_real_distribution<double> th(-0.4, 0.6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = random_design(rng);
    EffectConfig theta{{}, "random"};
    for (int k = 0; k < d.spec.arms; ++k) theta.theta.push_back(th(rng));
    const double en = expected_n_enumeration(d, theta, cache);
    const double ee = expected_n_efficient(d, theta, cache);
    CAPTURE(rep);
    CHECK(ee == doctest::Approx(en).epsilon(0).scale(1.0).epsilon(0.5));
    CHECK(en >= d.schedule.increments[0] - 1e-9);
    CHECK(en <= d.schedule.max_n() + 1e-9);
  }
}

TEST_CASE("sample-size pmf is a distribution whose mean is E(N)") {
  GridCache cache(32);
  const auto spec = scenarios::flair(2);
  const double n[2] = {46, 77};
  const auto d = calibrated_design(spec, n, cache);
  const auto th = EffectConfig::global_null(2);
  const auto cells = outcome_cells(d, th, cache);
  const auto pmf = sample_size_pmf(cells, 2);
  CHECK(pmf.total.mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pmf.total.mean() == doctest::Approx(expected_n_enumeration(d, th, cache)).epsilon(1e-9));
  const auto cdf = pmf.total.cdf();
  for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i] >= cdf[i - 1]);
  CHECK(cdf.back() == doctest::Approx(1.0).epsilon(1e-6));
  double arms = 0.0;
  for (const auto& a : pmf.arms) arms += a.mean();
  CHECK(arms + pmf.control.mean() == doctest::Approx(pmf.total.mean()).epsilon(1e-9));
}

TEST_CASE("setting 2 total pmf atoms") {
  GridCache cache(32);
  const auto spec = scenarios::flair(2);
  const double n[2] = {46, 77};
  const auto d = calibrated_design(spec, n, cache);
  const auto pmf = sample_size_pmf(outcome_cells(d, EffectConfig::global_null(2), cache), 2).total;
  const std::vector<std::pair<double, double>> atoms{{92, 0.003},  {246, 0.402}, {292, 0.369}, {400, 0.098},
                                                     {415, 0.034}, {446, 0.071}, {492, 0.023}};
  REQUIRE(pmf.support.size() == atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    CHECK(pmf.support[i] == atoms[i].first);
    CHECK(pmf.prob[i] == doctest::Approx(atoms[i].second).epsilon(0).scale(1.0).epsilon(0.002));
  }
}

TEST_CASE("decomposition stopping probabilities sum to one") {
  GridCache cache(32);
  const auto spec = scenarios::flair(1);
  const double n[2] = {76, 78};
  const auto d = calibrated_design(spec, n, cache);
  for (const auto& th : {EffectConfig::global_null(2), EffectConfig::lfc(spec, 0), EffectConfig::lfc(spec, 1)}) {
    const auto b = expected_n_breakdown(d, th, cache);
    double c = 0.0;
    for (double x : b.control_stop) c += x;
    CHECK(c == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& arm : b.arm_end) {
      double s = 0.0;
      for (double x : arm) s += x;
      CHECK(s <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("operating characteristics bundle") {
  GridCache cache(32);
  const auto spec = scenarios::flair(2);
  const double n[2] = {46, 77};
  const auto d = calibrated_design(spec, n, cache);
  const auto oc = operating_chars(d, cache);
  CHECK(oc.max_n == 492);
  CHECK(oc.max_t == doctest::Approx(492.0 / 21.0));
  REQUIRE(oc.scenarios.size() == 3);
  CHECK(oc.scenarios[0].theta.label == "H_G");
  for (const auto& s : oc.scenarios) {
    CHECK(s.expected_n == doctest::Approx(s.expected_n_enumeration).epsilon(0).scale(1.0).epsilon(0.5));
    CHECK(s.expected_t == doctest::Approx(s.expected_n / 21.0));
  }
}
