#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "ptd/error.hpp"
#include "ptd/power_engine.hpp"
#include "ptd/report.hpp"
#include "scenarios.hpp"

using namespace ptd;

TEST_CASE("number formatting") {
  CHECK(fmt6(0.0250001234) == "0.0250001");
  CHECK(fmt6(492.0) == "492");
  CHECK(fmt6(-0.0) == "0");
  for (double x : {0.1, -2.776123456789, 1e-300, 12345678.9, std::nextafter(1.0, 2.0)})
    CHECK(parse_hexfloat(hexfloat(x)) == x);
  const Json j = num(M_PI);
  CHECK(j["value"].get<double>() == 3.14159);
  CHECK(num_value(j) == M_PI);
  CHECK(num_value(Json(2.5)) == 2.5);
  CHECK_THROWS_AS(parse_hexfloat("0x1.8p"), ConfigError);
  CHECK_THROWS_AS(num_value(Json("x")), ConfigError);
}

TEST_CASE("text tables align columns") {
  TextTable t({"name", "value"});
  t.add({"alpha", "0.025"});
  t.add({"n", "492"});
  std::istringstream in(t.str());
  std::string header, rule, a, b;
  std::getline(in, header);
  std::getline(in, rule);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(header == "name   value");
  CHECK(rule == "------------");
  CHECK(a == "alpha  0.025");
  CHECK(b == "n        492");
}

TEST_CASE("design json round trip is exact") {
  GridCache cache(24);
  const double n[2] = {46, 77};
  const auto d = calibrated_design(scenarios::flair(2), n, cache);
  const Json j = Json::parse(design_json(d).dump());
  const CalibratedDesign r = design_from_json(j);
  CHECK(r.spec.stages == d.spec.stages);
  CHECK(r.spec.adding_stage == d.spec.adding_stage);
  CHECK(r.spec.theta_null == d.spec.theta_null);
  CHECK(r.spec.shapes == d.spec.shapes);
  CHECK(r.schedule.control == d.schedule.control);
  CHECK(r.schedule.active == d.schedule.active);
  for (int k = 0; k < 2; ++k) {
    CHECK(r.bounds[k].a == d.bounds[k].a);
    CHECK(r.bounds[k].upper == d.bounds[k].upper);
    CHECK(r.bounds[k].lower == d.bounds[k].lower);
  }
  CHECK(*r.fwer == *d.fwer);
  CHECK(design_json(r).dump() == j.dump());
}

TEST_CASE("broken design files") {
  CHECK_THROWS_AS(design_from_json(Json::object()), ConfigError);
  GridCache cache(16);
  const double n[1] = {40};
  Json j = design_json(calibrated_design(scenarios::single_arm(2), n, cache));
  j["bounds"][0]["upper"].erase(0);
  CHECK_THROWS_AS(design_from_json(j), ConfigError);
  j = design_json(calibrated_design(scenarios::single_arm(2), n, cache));
  j["spec"]["K"] = "two";
  CHECK_THROWS_AS(design_from_json(j), ConfigError);
}

TEST_CASE("csv emitters") {
  std::vector<DeviationRow> rows(2);
  rows[0] = {100, 3, "H_G", "fwer", {0.0254, 0.0005}, 1000000, 1, ""};
  rows[1] = {500, 3, "H_G", "error", {}, 1000000, 1, "add point, out of range"};
  const std::string csv = deviation_csv(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "add_point,approach,theta_label,metric,estimate,se,replicates,seed,estimate_hex,se_hex,error");
  std::getline(in, line);
  CHECK(line.rfind("100,3,H_G,fwer,0.0254,0.0005,1000000,1,0x", 0) == 0);
  std::getline(in, line);
  CHECK(line == "500,3,H_G,error,,,1000000,1,,,\"add point, out of range\"");
}
