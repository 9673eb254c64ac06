#include <cmath>

#include "doctest.h"
#include "ptd/design.hpp"
#include "ptd/error.hpp"
#include "scenarios.hpp"

using namespace ptd;

TEST_CASE("triangular shape reproduces the three-stage table row") {
  const double r[3] = {1, 2, 3};
  const double a = 2.404 * std::sqrt(3.0) / 2.0;
  const auto [lo, up] = shape_bounds(Shape::Triangular, a, r);
  CHECK(up[0] == doctest::Approx(2.776).epsilon(0).scale(1.0).epsilon(0.001));
  CHECK(up[1] == doctest::Approx(2.453).epsilon(0).scale(1.0).epsilon(0.001));
  CHECK(up[2] == doctest::Approx(2.404).epsilon(0).scale(1.0).epsilon(0.001));
  CHECK(lo[0] == doctest::Approx(0.0).scale(1.0).epsilon(0.001));
  CHECK(lo[1] == doctest::Approx(1.472).epsilon(0).scale(1.0).epsilon(0.001));
  CHECK(lo[2] == up[2]);
}

TEST_CASE("O'Brien-Fleming and Pocock shapes") {
  const double r3[3] = {1, 2, 3};
  const auto [lo, up] = shape_bounds(Shape::OBF, 2.239, r3);
  CHECK(up[0] == doctest::Approx(3.878).epsilon(0).scale(1.0).epsilon(0.001));
  CHECK(up[1] == doctest::Approx(2.742).epsilon(0).scale(1.0).epsilon(0.001));
  CHECK(up[0] / up[2] == doctest::Approx(std::sqrt(3.0)));
  CHECK(lo[0] == 0.0);
  CHECK(lo[2] == up[2]);

  const double r2[2] = {1, 2};
  const auto [plo, pup] = shape_bounds(Shape::Pocock, 2.440, r2);
  CHECK(pup[0] == 2.440);
  CHECK(pup[1] == 2.440);
  CHECK(plo[0] == 0.0);
  CHECK(plo[1] == 2.440);
}

TEST_CASE("shape_bounds rejects non-increasing ratios") {
  const double r[3] = {1, 1, 2};
  CHECK_THROWS_AS(shape_bounds(Shape::Triangular, 1.0, r), ShapeError);
}

TEST_CASE("boundary regeneration is exact") {
  const double r[2] = {1, 2};
  for (Shape s : {Shape::Triangular, Shape::Pocock, Shape::OBF}) {
    const ArmBounds b = make_arm_bounds(s, 2.1234567, r);
    const ArmBounds c = make_arm_bounds(b.shape, b.a, r);
    CHECK(b.lower == c.lower);
    CHECK(b.upper == c.upper);
  }
}

TEST_CASE("upper bounds grow with a; lower bounds too for up to three stages") {
  for (int J = 1; J <= 3; ++J) {
    std::vector<double> r;
    for (int j = 1; j <= J; ++j) r.push_back(j);
    for (Shape s : {Shape::Triangular, Shape::Pocock, Shape::OBF}) {
      const auto [l1, u1] = shape_bounds(s, 2.0, r);
      const auto [l2, u2] = shape_bounds(s, 2.1, r);
      for (int j = 0; j < J; ++j) {
        CHECK(u2[j] > u1[j]);
        CHECK(l2[j] >= l1[j]);
      }
    }
  }
}

TEST_CASE("control schedule for the two FLAIR settings") {
  const auto s2 = scenarios::flair(2);
  const double n2[2] = {46, 77};
  const Schedule a = control_schedule(s2, n2);
  CHECK(a.increments == std::vector<double>{46, 77, 77});
  CHECK(a.control == std::vector<double>{46, 123, 200});
  CHECK(a.max_n() == 492);

  const auto s1 = scenarios::flair(1);
  const double n1[2] = {76, 78};
  const Schedule b = control_schedule(s1, n1);
  CHECK(b.increments == std::vector<double>{76, 78, 78});
  CHECK(b.max_n() == 540);
  CHECK(b.concurrent(s1, 1, 2) == 156);
}

TEST_CASE("single arm schedule and simultaneous arms") {
  const auto one = scenarios::single_arm();
  const double n[1] = {100};
  CHECK(control_schedule(one, n).max_n() == 200);

  auto mams = scenarios::flair(2);
  mams.adding_stage = {0, 0};
  mams.initial_arms = 2;
  mams.stages = {3, 3};
  mams.ratios.clear();
  mams.validate();
  const double eq[2] = {53, 53};
  const Schedule s = control_schedule(mams, eq);
  CHECK(s.increments == std::vector<double>{53, 53, 53});
  CHECK(s.max_n() == 477);
}

TEST_CASE("a period with no recruiting arm is a schedule error") {
  auto s = scenarios::flair(2);
  s.adding_stage = {0, 2};
  s.stages = {1, 1};
  s.ratios.clear();
  s.validate();
  const double n[2] = {10, 10};
  CHECK_THROWS_AS(control_schedule(s, n), ScheduleError);
}

TEST_CASE("durations") {
  CHECK(duration(492, 21) == doctest::Approx(23.428571));
  CHECK(duration(0, 21) == 0.0);
  CHECK(duration(303.3, 21) == doctest::Approx(14.442857));
}

TEST_CASE("invalid specs are config errors") {
  auto s = scenarios::flair(2);
  s.stages = {3, 3};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = scenarios::flair(2);
  s.theta_null = 1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = scenarios::flair(2);
  s.alpha = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(parse_shape("square"), ConfigError);
  CHECK(parse_shape("Tri") == Shape::Triangular);
}

TEST_CASE("effect configurations") {
  const auto s = scenarios::flair(2);
  CHECK(EffectConfig::global_null(2).theta == std::vector<double>{0, 0});
  const auto lfc = EffectConfig::lfc(s, 1);
  CHECK(lfc.theta[0] == s.theta_null);
  CHECK(lfc.theta[1] == s.theta_interesting);
}
