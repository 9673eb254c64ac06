#include "ptd/design.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "ptd/error.hpp"

namespace ptd {

std::string_view shape_name(Shape s) {
  switch (s) {
    case Shape::Triangular:
      return "triangular";
    case Shape::Pocock:
      return "pocock";
    case Shape::OBF:
      return "obf";
  }
  return "unknown";
}

Shape parse_shape(std::string_view name) {
  std::string s(name);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "triangular" || s == "tri") return Shape::Triangular;
  if (s == "pocock" || s == "po") return Shape::Pocock;
  if (s == "obf" || s == "obrien-fleming" || s == "o'brien-fleming") return Shape::OBF;
  throw ConfigError("unknown boundary shape '" + std::string(name) + "'");
}

void DesignSpec::validate() {
  auto fail = [](const std::string& what) { throw ConfigError("design: " + what); };
  if (arms < 1) fail("need at least one arm");
  if (initial_arms < 1 || initial_arms > arms) fail("initial_arms must be in 1..arms");
  if (static_cast<int>(adding_stage.size()) != arms) fail("adding_stage needs one entry per arm");
  if (static_cast<int>(stages.size()) != arms) fail("stages needs one entry per arm");
  if (shapes.size() == 1 && arms > 1) shapes.assign(arms, shapes[0]);
  if (static_cast<int>(shapes.size()) != arms) fail("shapes needs one entry per arm");
  for (int k = 0; k < arms; ++k) {
    if (stages[k] < 1) fail("every arm needs at least one stage");
    if (adding_stage[k] < 0) fail("adding stages must be non-negative");
    if (k < initial_arms && adding_stage[k] != 0) fail("initial arms must start at stage 0");
    if (k > 0 && adding_stage[k] < adding_stage[k - 1]) fail("arms must be sorted by adding stage");
    if (adding_stage[k] + stages[k] > control_stages) fail("an arm runs past the last control stage");
  }
  if (initial_arms < arms && adding_stage[initial_arms] == 0) fail("arms beyond initial_arms must be added later");
  if (!(sigma > 0.0)) fail("sigma must be positive");
  if (!(theta_null < theta_interesting)) fail("theta_null must be below theta_interesting");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must be in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must be in (0, 1)");
  if (!(rate_per_month > 0.0)) fail("recruitment rate must be positive");
  if (ratios.empty()) {
    ratios.resize(arms);
    for (int k = 0; k < arms; ++k)
      for (int j = 1; j <= stages[k]; ++j) ratios[k].push_back(j);
  }
  if (static_cast<int>(ratios.size()) != arms) fail("ratios needs one entry per arm");
  for (int k = 0; k < arms; ++k) {
    if (static_cast<int>(ratios[k].size()) != stages[k]) fail("ratios must have one entry per stage");
    if (!(ratios[k][0] > 0.0)) fail("ratios must be positive");
    for (int j = 1; j < stages[k]; ++j)
      if (!(ratios[k][j] > ratios[k][j - 1])) fail("ratios must be strictly increasing");
  }
}

std::vector<double> DesignSpec::ratio(int k) const {
  if (!ratios.empty()) return ratios[k];
  std::vector<double> r;
  for (int j = 1; j <= stages[k]; ++j) r.push_back(j);
  return r;
}

int DesignSpec::max_stages() const { return *std::max_element(stages.begin(), stages.end()); }

double Schedule::concurrent(const DesignSpec& spec, int k, int j) const {
  const int s = spec.adding_stage[k];
  return control[s + j - 1] - control_before(s);
}

double Schedule::max_n() const {
  double total = control.empty() ? 0.0 : control.back();
  for (const auto& a : active) total += a.back();
  return total;
}

Schedule control_schedule(const DesignSpec& spec, std::span<const double> n) {
  if (static_cast<int>(n.size()) != spec.arms) throw ShapeError("control_schedule: need one size per arm");
  Schedule sch;
  sch.n.assign(n.begin(), n.end());
  sch.active.resize(spec.arms);
  std::vector<std::vector<double>> per_stage(spec.arms);
  for (int k = 0; k < spec.arms; ++k) {
    if (!(n[k] > 0.0)) throw ScheduleError("control_schedule: arm sizes must be positive");
    const auto r = spec.ratio(k);
    double prev = 0.0;
    for (double rj : r) {
      const double cum = n[k] * rj / r[0];
      sch.active[k].push_back(cum);
      per_stage[k].push_back(cum - prev);
      prev = cum;
    }
  }
  double cum = 0.0;
  for (int m = 1; m <= spec.control_stages; ++m) {
    double inc = 0.0;
    bool any = false;
    for (int k = 0; k < spec.arms; ++k) {
      const int j = m - spec.adding_stage[k];
      if (j >= 1 && j <= spec.stages[k]) {
        inc = std::max(inc, per_stage[k][j - 1]);
        any = true;
      }
    }
    if (!any) {
      std::ostringstream msg;
      msg << "control_schedule: no arm recruits during control stage " << m;
      throw ScheduleError(msg.str());
    }
    cum += inc;
    sch.increments.push_back(inc);
    sch.control.push_back(cum);
  }
  return sch;
}

std::pair<std::vector<double>, std::vector<double>> shape_bounds(Shape shape, double a, std::span<const double> r) {
  const std::size_t J = r.size();
  if (J == 0) throw ShapeError("shape_bounds: empty ratio vector");
  if (!(r[0] > 0.0)) throw ShapeError("shape_bounds: ratios must be positive");
  for (std::size_t j = 1; j < J; ++j)
    if (!(r[j] > r[j - 1])) throw ShapeError("shape_bounds: ratios must be strictly increasing");
  const double rJ = r[J - 1];
  std::vector<double> lo(J), up(J);
  for (std::size_t j = 0; j < J; ++j) {
    switch (shape) {
      case Shape::Triangular:
        up[j] = a * (1.0 + r[j] / rJ) / std::sqrt(r[j]);
        lo[j] = -a * (1.0 - 3.0 * r[j] / rJ) / std::sqrt(r[j]);
        break;
      case Shape::Pocock:
        up[j] = a;
        lo[j] = 0.0;
        break;
      case Shape::OBF:
        up[j] = a * std::sqrt(rJ / r[j]);
        lo[j] = 0.0;
        break;
    }
  }
  lo[J - 1] = up[J - 1];
  return {lo, up};
}

ArmBounds make_arm_bounds(Shape shape, double a, std::span<const double> r) {
  auto [lo, up] = shape_bounds(shape, a, r);
  return ArmBounds{shape, a, std::move(lo), std::move(up)};
}

EffectConfig EffectConfig::global_null(int arms) { return {std::vector<double>(arms, 0.0), "H_G"}; }

EffectConfig EffectConfig::lfc(const DesignSpec& spec, int k) {
  EffectConfig e{std::vector<double>(spec.arms, spec.theta_null), "LFC_" + std::to_string(k + 1)};
  e.theta[k] = spec.theta_interesting;
  return e;
}

double duration(double patients, double rate_per_month) {
  if (!(rate_per_month > 0.0)) throw ConfigError("duration: rate must be positive");
  return patients / rate_per_month;
}

}  // namespace ptd
