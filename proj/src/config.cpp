#include "ptd/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "ptd/error.hpp"

namespace ptd {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

const json& object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  return j;
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
}

double number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    // log(x) or -log(x)
    std::string s = j.get<std::string>();
    double sign = 1.0;
    if (!s.empty() && s[0] == '-') {
      sign = -1.0;
      s.erase(0, 1);
    }
    if (s.rfind("log(", 0) == 0 && s.back() == ')') {
      std::istringstream in(s.substr(4, s.size() - 5));
      double x = 0.0;
      if (in >> x && in.eof() && x > 0.0) return sign * std::log(x);
    }
    fail(where, "expected a number or \"log(x)\", got \"" + j.get<std::string>() + "\"");
  }
  fail(where, "expected a number");
}

long long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(where, "expected an integer");
  return j.get<long long>();
}

template <class F>
auto list(const json& j, const std::string& where, F item) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<decltype(item(j, where))> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Ranking parse_ranking(const json& j) {
  if (!j.is_string()) fail("errors.ranking", "expected a string");
  const auto s = j.get<std::string>();
  if (s == "treatment_mean") return Ranking::TreatmentMean;
  if (s == "z_statistic") return Ranking::ZStatistic;
  fail("errors.ranking", "expected \"treatment_mean\" or \"z_statistic\"");
}

}  // namespace

CalibrationOptions Config::calibration() const {
  CalibrationOptions c;
  c.eps = numerics.eps_boundary;
  return c;
}

SizingOptions Config::sizing() const {
  SizingOptions s;
  s.eps_n = numerics.eps_n;
  s.calibration = calibration();
  s.power.ranking = ranking;
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Config load_config(const std::string& path) { return parse_config(read_file(path)); }

Config parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  object(root, "top level");
  only_keys(root, "top level", {"arms", "effects", "errors", "recruitment", "numerics", "simulate", "compare"});
  if (!root.contains("arms")) fail("top level", "missing 'arms'");

  Config c;
  DesignSpec& s = c.spec;

  const json& arms = object(root["arms"], "arms");
  only_keys(arms, "arms", {"K", "K_star", "S", "J_per_arm", "shapes"});
  for (const char* key : {"K", "S", "J_per_arm"})
    if (!arms.contains(key)) fail("arms", std::string("missing '") + key + "'");
  s.arms = static_cast<int>(integer(arms["K"], "arms.K"));
  auto as_int = [](const json& j, const std::string& w) { return static_cast<int>(integer(j, w)); };
  s.adding_stage = list(arms["S"], "arms.S", as_int);
  s.stages = list(arms["J_per_arm"], "arms.J_per_arm", as_int);
  if (arms.contains("K_star")) {
    s.initial_arms = static_cast<int>(integer(arms["K_star"], "arms.K_star"));
  } else {
    s.initial_arms = 0;
    for (int v : s.adding_stage) s.initial_arms += v == 0;
  }
  if (static_cast<int>(s.adding_stage.size()) != s.arms || static_cast<int>(s.stages.size()) != s.arms)
    fail("arms", "S and J_per_arm need K entries");
  s.control_stages = 0;
  for (int k = 0; k < s.arms; ++k) s.control_stages = std::max(s.control_stages, s.adding_stage[k] + s.stages[k]);
  if (arms.contains("shapes")) {
    s.shapes = list(arms["shapes"], "arms.shapes", [](const json& j, const std::string& w) {
      if (!j.is_string()) fail(w, "expected a shape name");
      return parse_shape(j.get<std::string>());
    });
  } else {
    s.shapes.assign(s.arms, Shape::Triangular);
  }

  if (root.contains("effects")) {
    const json& e = object(root["effects"], "effects");
    only_keys(e, "effects", {"theta_interesting", "theta_null", "sigma"});
    if (e.contains("theta_interesting")) s.theta_interesting = number(e["theta_interesting"], "effects.theta_interesting");
    if (e.contains("theta_null")) s.theta_null = number(e["theta_null"], "effects.theta_null");
    if (e.contains("sigma")) s.sigma = number(e["sigma"], "effects.sigma");
  }
  if (!(s.sigma > 0.0)) fail("effects.sigma", "must be positive");
  if (!(s.theta_interesting > s.theta_null)) fail("effects", "theta_interesting must exceed theta_null");

  if (root.contains("errors")) {
    const json& e = object(root["errors"], "errors");
    only_keys(e, "errors", {"alpha", "power", "ranking"});
    if (e.contains("alpha")) s.alpha = number(e["alpha"], "errors.alpha");
    if (e.contains("power")) s.beta = 1.0 - number(e["power"], "errors.power");
    if (e.contains("ranking")) c.ranking = parse_ranking(e["ranking"]);
  }
  if (!(s.alpha > 0.0 && s.alpha < 0.5)) fail("errors.alpha", "must lie in (0, 0.5)");
  if (!(s.beta > 0.0 && s.beta < 0.5)) fail("errors.power", "must lie in (0.5, 1)");

  if (root.contains("recruitment")) {
    const json& r = object(root["recruitment"], "recruitment");
    only_keys(r, "recruitment", {"rate_per_month"});
    if (r.contains("rate_per_month")) s.rate_per_month = number(r["rate_per_month"], "recruitment.rate_per_month");
  }

  if (root.contains("numerics")) {
    const json& n = object(root["numerics"], "numerics");
    only_keys(n, "numerics", {"nodes_per_dim", "mvn_tol", "eps_boundary", "eps_n"});
    if (n.contains("nodes_per_dim")) c.numerics.nodes_per_dim = static_cast<int>(integer(n["nodes_per_dim"], "numerics.nodes_per_dim"));
    if (n.contains("mvn_tol")) c.numerics.mvn_tol = number(n["mvn_tol"], "numerics.mvn_tol");
    if (n.contains("eps_boundary")) c.numerics.eps_boundary = number(n["eps_boundary"], "numerics.eps_boundary");
    if (n.contains("eps_n")) c.numerics.eps_n = number(n["eps_n"], "numerics.eps_n");
  }
  if (c.numerics.nodes_per_dim < 4 || c.numerics.nodes_per_dim > 128) fail("numerics.nodes_per_dim", "must lie in [4, 128]");
  for (double v : {c.numerics.mvn_tol, c.numerics.eps_boundary, c.numerics.eps_n})
    if (!(v > 0.0)) fail("numerics", "tolerances must be positive");

  if (root.contains("simulate")) {
    const json& m = object(root["simulate"], "simulate");
    only_keys(m, "simulate", {"replicates", "seed", "approaches", "add_points"});
    if (m.contains("replicates")) {
      const long long r = integer(m["replicates"], "simulate.replicates");
      if (r < 1) fail("simulate.replicates", "must be at least 1");
      c.simulate.replicates = static_cast<std::size_t>(r);
    }
    if (m.contains("seed")) {
      if (!m["seed"].is_number_unsigned() && !(m["seed"].is_number_integer() && m["seed"].get<long long>() >= 0))
        fail("simulate.seed", "expected a non-negative integer");
      c.simulate.seed = m["seed"].get<std::uint64_t>();
    }
    if (m.contains("approaches"))
      c.simulate.approaches = list(m["approaches"], "simulate.approaches", [](const json& j, const std::string& w) {
        return parse_approach(static_cast<int>(integer(j, w)));
      });
    if (m.contains("add_points")) c.simulate.add_points = list(m["add_points"], "simulate.add_points", number);
  }
  if (c.simulate.approaches.empty())
    c.simulate.approaches = {Approach::MoveInterim, Approach::Recalibrate, Approach::KeepTiming};

  if (root.contains("compare")) {
    const json& m = object(root["compare"], "compare");
    only_keys(m, "compare", {"comparators", "mams_stages"});
    std::vector<int> stages;
    if (m.contains("mams_stages")) stages = list(m["mams_stages"], "compare.mams_stages", as_int);
    if (m.contains("comparators")) {
      for (const auto& name : list(m["comparators"], "compare.comparators", [](const json& j, const std::string& w) {
             if (!j.is_string()) fail(w, "expected a comparator name");
             return j.get<std::string>();
           })) {
        const ComparatorKind kind = parse_comparator(name);
        if (kind == ComparatorKind::SimultaneousMAMS) {
          if (stages.empty()) fail("compare", "mams needs mams_stages");
          for (int j : stages) c.compare.push_back({kind, j});
        } else {
          c.compare.push_back({kind, 0});
        }
      }
    }
  }

  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace ptd
