#include "ptd/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "ptd/error.hpp"

namespace ptd {

namespace {

bool numeric_cell(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end && *end == '\0';
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<double>& xs, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + fmt6(xs[i]);
  return out;
}

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("design file: missing '") + key + "'");
  return j.at(key);
}

std::vector<double> num_list(const Json& j) {
  if (!j.is_array()) throw ConfigError("design file: expected an array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(num_value(x));
  return out;
}

std::vector<int> int_list(const Json& j) {
  if (!j.is_array()) throw ConfigError("design file: expected an array");
  std::vector<int> out;
  for (const auto& x : j) out.push_back(x.get<int>());
  return out;
}

}  // namespace

std::string fmt6(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string hexfloat(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double parse_hexfloat(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError("bad hex float '" + s + "'");
  return x;
}

Json num(double x) {
  Json j;
  j["value"] = std::strtod(fmt6(x).c_str(), nullptr);
  j["hex"] = hexfloat(x);
  return j;
}

Json nums(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

double num_value(const Json& j) {
  if (j.is_object() && j.contains("hex")) return parse_hexfloat(j.at("hex").get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw ConfigError("expected a number or {value, hex}");
}

TextTable::TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

void TextTable::add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

std::string TextTable::str() const {
  std::vector<std::size_t> width;
  for (const auto& r : rows_)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  std::ostringstream out;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - r[c].size(), ' ');
      if (c) line += "  ";
      line += (i > 0 && numeric_cell(r[c])) ? pad + r[c] : r[c] + pad;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
      out << std::string(total, '-') << '\n';
    }
  }
  return out.str();
}

Json spec_json(const DesignSpec& s) {
  Json j;
  j["K"] = s.arms;
  j["K_star"] = s.initial_arms;
  j["S"] = s.adding_stage;
  j["J_per_arm"] = s.stages;
  j["J0"] = s.control_stages;
  Json shapes = Json::array();
  for (Shape sh : s.shapes) shapes.push_back(std::string(shape_name(sh)));
  j["shapes"] = shapes;
  j["sigma"] = num(s.sigma);
  j["theta_interesting"] = num(s.theta_interesting);
  j["theta_null"] = num(s.theta_null);
  j["alpha"] = num(s.alpha);
  j["beta"] = num(s.beta);
  j["rate_per_month"] = num(s.rate_per_month);
  Json ratios = Json::array();
  for (int k = 0; k < s.arms; ++k) ratios.push_back(nums(s.ratio(k)));
  j["ratios"] = ratios;
  return j;
}

Json design_json(const CalibratedDesign& d) {
  Json j;
  j["spec"] = spec_json(d.spec);
  Json sch;
  sch["n"] = nums(d.schedule.n);
  Json active = Json::array();
  for (const auto& a : d.schedule.active) active.push_back(nums(a));
  sch["active"] = active;
  sch["control"] = nums(d.schedule.control);
  sch["increments"] = nums(d.schedule.increments);
  j["schedule"] = sch;
  Json bounds = Json::array();
  for (const auto& b : d.bounds) {
    Json a;
    a["shape"] = std::string(shape_name(b.shape));
    a["a"] = num(b.a);
    a["lower"] = nums(b.lower);
    a["upper"] = nums(b.upper);
    bounds.push_back(a);
  }
  j["bounds"] = bounds;
  if (d.fwer) j["fwer"] = num(*d.fwer);
  j["max_n"] = num(d.schedule.max_n());
  j["max_t"] = num(duration(d.schedule.max_n(), d.spec.rate_per_month));
  return j;
}

CalibratedDesign design_from_json(const Json& j) {
  CalibratedDesign d;
  try {
    const Json& s = need(j, "spec");
    DesignSpec& spec = d.spec;
    spec.arms = need(s, "K").get<int>();
    spec.initial_arms = need(s, "K_star").get<int>();
    spec.adding_stage = int_list(need(s, "S"));
    spec.stages = int_list(need(s, "J_per_arm"));
    spec.control_stages = need(s, "J0").get<int>();
    spec.shapes.clear();
    for (const auto& x : need(s, "shapes")) spec.shapes.push_back(parse_shape(x.get<std::string>()));
    spec.sigma = num_value(need(s, "sigma"));
    spec.theta_interesting = num_value(need(s, "theta_interesting"));
    spec.theta_null = num_value(need(s, "theta_null"));
    spec.alpha = num_value(need(s, "alpha"));
    spec.beta = num_value(need(s, "beta"));
    spec.rate_per_month = num_value(need(s, "rate_per_month"));
    spec.ratios.clear();
    for (const auto& r : need(s, "ratios")) spec.ratios.push_back(num_list(r));
    spec.validate();

    const Json& sch = need(j, "schedule");
    d.schedule.n = num_list(need(sch, "n"));
    for (const auto& a : need(sch, "active")) d.schedule.active.push_back(num_list(a));
    d.schedule.control = num_list(need(sch, "control"));
    d.schedule.increments = num_list(need(sch, "increments"));
    if (static_cast<int>(d.schedule.active.size()) != spec.arms ||
        static_cast<int>(d.schedule.control.size()) != spec.control_stages)
      throw ConfigError("design file: schedule does not match the design parameters");

    for (const auto& b : need(j, "bounds")) {
      ArmBounds ab;
      ab.shape = parse_shape(need(b, "shape").get<std::string>());
      ab.a = num_value(need(b, "a"));
      ab.lower = num_list(need(b, "lower"));
      ab.upper = num_list(need(b, "upper"));
      d.bounds.push_back(std::move(ab));
    }
    if (static_cast<int>(d.bounds.size()) != spec.arms) throw ConfigError("design file: one bounds entry per arm");
    for (int k = 0; k < spec.arms; ++k)
      if (static_cast<int>(d.bounds[k].upper.size()) != spec.stages[k] ||
          d.bounds[k].lower.size() != d.bounds[k].upper.size())
        throw ConfigError("design file: bounds do not match the stages");
    if (j.contains("fwer")) d.fwer = num_value(j.at("fwer"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("design file: ") + e.what());
  }
  return d;
}

std::string design_table(const CalibratedDesign& d) {
  TextTable t({"arm", "S", "J", "shape", "a", "n_k", "n_kj", "lower", "upper"});
  for (int k = 0; k < d.spec.arms; ++k) {
    t.add({std::to_string(k + 1), std::to_string(d.spec.adding_stage[k]), std::to_string(d.spec.stages[k]),
           std::string(shape_name(d.bounds[k].shape)), fmt6(d.bounds[k].a), fmt6(d.schedule.n[k]),
           join(d.schedule.active[k]), join(d.bounds[k].lower), join(d.bounds[k].upper)});
  }
  std::ostringstream out;
  out << t.str() << "control (cumulative): " << join(d.schedule.control) << '\n'
      << "max(N) " << fmt6(d.schedule.max_n()) << "  max(T) "
      << fmt6(duration(d.schedule.max_n(), d.spec.rate_per_month)) << " months";
  if (d.fwer) out << "  FWER " << fmt6(*d.fwer);
  out << '\n';
  return out.str();
}

Json operating_json(const OperatingChars& oc, const PwerCheck& check) {
  Json j;
  j["fwer"] = num(oc.fwer);
  Json power = Json::array();
  for (const auto& p : oc.power) {
    Json a;
    a["arm"] = p.arm + 1;
    a["total"] = num(p.total);
    a["terms"] = nums(p.terms);
    power.push_back(a);
  }
  j["power"] = power;
  j["max_n"] = num(oc.max_n);
  j["max_t"] = num(oc.max_t);
  Json sc = Json::array();
  for (const auto& s : oc.scenarios) {
    Json a;
    a["label"] = s.theta.label;
    a["theta"] = nums(s.theta.theta);
    a["expected_n"] = num(s.expected_n);
    a["expected_n_enumeration"] = num(s.expected_n_enumeration);
    a["expected_t"] = num(s.expected_t);
    Json pmf;
    pmf["support"] = nums(s.pmf.total.support);
    pmf["prob"] = nums(s.pmf.total.prob);
    a["pmf_total"] = pmf;
    sc.push_back(a);
  }
  j["scenarios"] = sc;
  Json pw;
  pw["markov"] = nums(check.markov);
  pw["mvn"] = nums(check.mvn);
  j["pwer"] = pw;
  return j;
}

std::string operating_table(const CalibratedDesign& d, const OperatingChars& oc) {
  std::vector<std::string> head{"", "FWER"};
  for (int k = 0; k < d.spec.arms; ++k) head.push_back("power LFC_" + std::to_string(k + 1));
  head.push_back("max(N)");
  for (const auto& s : oc.scenarios) head.push_back("E(N|" + s.theta.label + ")");
  TextTable t(head);
  std::vector<std::string> row{"N", fmt6(oc.fwer)};
  for (const auto& p : oc.power) row.push_back(fmt6(p.total));
  row.push_back(fmt6(oc.max_n));
  for (const auto& s : oc.scenarios) row.push_back(fmt6(s.expected_n));
  t.add(row);
  std::vector<std::string> trow{"T (months)", ""};
  for (std::size_t k = 0; k < oc.power.size(); ++k) trow.push_back("");
  trow.push_back(fmt6(oc.max_t));
  for (const auto& s : oc.scenarios) trow.push_back(fmt6(s.expected_t));
  t.add(trow);
  return t.str();
}

std::string pmf_csv(const OperatingChars& oc) {
  std::ostringstream out;
  out << "scenario,series,n,prob,cdf,prob_hex\n";
  for (const auto& s : oc.scenarios) {
    auto emit = [&](const std::string& series, const Pmf& p) {
      const auto cdf = p.cdf();
      for (std::size_t i = 0; i < p.support.size(); ++i)
        out << s.theta.label << ',' << series << ',' << fmt6(p.support[i]) << ',' << fmt6(p.prob[i]) << ','
            << fmt6(cdf[i]) << ',' << hexfloat(p.prob[i]) << '\n';
    };
    emit("total", s.pmf.total);
    for (std::size_t k = 0; k < s.pmf.arms.size(); ++k) emit("arm_" + std::to_string(k + 1), s.pmf.arms[k]);
    emit("control", s.pmf.control);
  }
  return out.str();
}

Json sim_json(const SimReport& r, const std::string& label) {
  auto est = [](const Estimate& e) {
    Json j;
    j["estimate"] = num(e.estimate);
    j["se"] = num(e.se);
    return j;
  };
  Json j;
  j["label"] = label;
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  j["fwer"] = est(r.fwer);
  Json rej = Json::array(), rec = Json::array();
  for (const auto& e : r.reject) rej.push_back(est(e));
  for (const auto& e : r.recommend) rec.push_back(est(e));
  j["reject"] = rej;
  j["power"] = rec;
  j["expected_n"] = est(r.expected_n);
  Json pmf;
  pmf["support"] = nums(r.pmf.support);
  pmf["prob"] = nums(r.pmf.prob);
  j["pmf_total"] = pmf;
  return j;
}

std::string sim_table(const std::vector<std::pair<std::string, SimReport>>& reports) {
  std::vector<std::string> head{"scenario", "FWER", "se"};
  const std::size_t K = reports.empty() ? 0 : reports.front().second.recommend.size();
  for (std::size_t k = 0; k < K; ++k) {
    head.push_back("power_" + std::to_string(k + 1));
    head.push_back("se");
  }
  head.push_back("E(N)");
  head.push_back("se");
  TextTable t(head);
  for (const auto& [label, r] : reports) {
    std::vector<std::string> row{label, fmt6(r.fwer.estimate), fmt6(r.fwer.se)};
    for (const auto& e : r.recommend) {
      row.push_back(fmt6(e.estimate));
      row.push_back(fmt6(e.se));
    }
    row.push_back(fmt6(r.expected_n.estimate));
    row.push_back(fmt6(r.expected_n.se));
    t.add(row);
  }
  return t.str();
}

std::string sim_csv(const std::vector<std::pair<std::string, SimReport>>& reports) {
  std::ostringstream out;
  out << "scenario,metric,estimate,se,replicates,seed,estimate_hex,se_hex\n";
  for (const auto& [label, r] : reports) {
    auto emit = [&](const std::string& metric, const Estimate& e) {
      out << csv_field(label) << ',' << metric << ',' << fmt6(e.estimate) << ',' << fmt6(e.se) << ',' << r.replicates
          << ',' << r.seed << ',' << hexfloat(e.estimate) << ',' << hexfloat(e.se) << '\n';
    };
    emit("fwer", r.fwer);
    for (std::size_t k = 0; k < r.recommend.size(); ++k) emit("power_" + std::to_string(k + 1), r.recommend[k]);
    for (std::size_t k = 0; k < r.reject.size(); ++k) emit("reject_" + std::to_string(k + 1), r.reject[k]);
    emit("expected_n", r.expected_n);
  }
  return out.str();
}

std::string deviation_csv(const std::vector<DeviationRow>& rows) {
  std::ostringstream out;
  out << "add_point,approach,theta_label,metric,estimate,se,replicates,seed,estimate_hex,se_hex,error\n";
  for (const auto& r : rows) {
    out << fmt6(r.add_point) << ',' << r.approach << ',' << csv_field(r.theta_label) << ',' << r.metric << ',';
    if (r.error.empty()) {
      out << fmt6(r.value.estimate) << ',' << fmt6(r.value.se) << ',';
    } else {
      out << ",,";
    }
    out << r.replicates << ',' << r.seed << ',';
    if (r.error.empty()) {
      out << hexfloat(r.value.estimate) << ',' << hexfloat(r.value.se) << ',';
    } else {
      out << ",,";
    }
    out << csv_field(r.error) << '\n';
  }
  return out.str();
}

Json comparator_json(const ComparatorResult& r) {
  Json j;
  j["name"] = r.name;
  j["fwer"] = num(r.fwer);
  j["power"] = nums(r.power);
  j["stages"] = r.stages;
  Json ps = Json::array();
  for (const auto& v : r.per_stage) ps.push_back(nums(v));
  j["per_stage"] = ps;
  j["max_n"] = num(r.max_n);
  j["max_t"] = num(r.max_t);
  j["expected_n"] = nums(r.expected_n);
  j["expected_t"] = nums(r.expected_t);
  j["wait_months"] = num(r.wait_months);
  Json ds = Json::array();
  for (const auto& d : r.designs) ds.push_back(design_json(d));
  j["designs"] = ds;
  return j;
}

namespace {

std::string stage_sizes(const std::vector<double>& v) {
  // "46" when constant, "46/30" when the first stage differs from the rest.
  bool constant = true;
  for (double x : v) constant = constant && x == v.front();
  if (constant || v.size() < 2) return fmt6(v.front());
  bool rest_constant = true;
  for (std::size_t i = 1; i < v.size(); ++i) rest_constant = rest_constant && v[i] == v[1];
  if (rest_constant) return fmt6(v.front()) + "/" + fmt6(v[1]);
  return join(v, "/");
}

}  // namespace

std::string comparator_table(const std::vector<ComparatorResult>& rows) {
  std::size_t K = 0, S = 0;
  for (const auto& r : rows) {
    K = std::max(K, r.power.size());
    S = std::max(S, r.expected_n.size());
  }
  std::vector<std::string> head{"design", "FWER"};
  for (std::size_t k = 0; k < K; ++k) head.push_back("LFC_" + std::to_string(k + 1));
  for (std::size_t k = 0; k < K; ++k) head.push_back("NS_" + std::to_string(k + 1));
  for (std::size_t k = 0; k < K; ++k) head.push_back("n_" + std::to_string(k + 1));
  head.push_back("max(N)");
  head.push_back("max(T)");
  for (std::size_t s = 0; s < S; ++s) head.push_back(s == 0 ? "E(N|H_G)" : "E(N|LFC_" + std::to_string(s) + ")");
  for (std::size_t s = 0; s < S; ++s) head.push_back(s == 0 ? "E(T|H_G)" : "E(T|LFC_" + std::to_string(s) + ")");
  TextTable t(head);
  for (const auto& r : rows) {
    std::vector<std::string> row{r.name, fmt6(r.fwer)};
    for (std::size_t k = 0; k < K; ++k) row.push_back(k < r.power.size() ? fmt6(r.power[k]) : "");
    for (std::size_t k = 0; k < K; ++k) row.push_back(k < r.stages.size() ? std::to_string(r.stages[k]) : "");
    for (std::size_t k = 0; k < K; ++k) row.push_back(k < r.per_stage.size() ? stage_sizes(r.per_stage[k]) : "");
    row.push_back(fmt6(r.max_n));
    row.push_back(fmt6(r.max_t));
    for (std::size_t s = 0; s < S; ++s) row.push_back(s < r.expected_n.size() ? fmt6(r.expected_n[s]) : "");
    for (std::size_t s = 0; s < S; ++s) row.push_back(s < r.expected_t.size() ? fmt6(r.expected_t[s]) : "");
    t.add(row);
  }
  return t.str();
}

std::string comparator_csv(const std::vector<ComparatorResult>& rows) {
  std::ostringstream out;
  out << "design,metric,value,value_hex\n";
  for (const auto& r : rows) {
    auto emit = [&](const std::string& metric, double v) {
      out << r.name << ',' << metric << ',' << fmt6(v) << ',' << hexfloat(v) << '\n';
    };
    emit("fwer", r.fwer);
    for (std::size_t k = 0; k < r.power.size(); ++k) emit("power_" + std::to_string(k + 1), r.power[k]);
    for (std::size_t k = 0; k < r.per_stage.size(); ++k)
      for (std::size_t j = 0; j < r.per_stage[k].size(); ++j)
        emit("n_" + std::to_string(k + 1) + "_" + std::to_string(j + 1), r.per_stage[k][j]);
    emit("max_n", r.max_n);
    emit("max_t", r.max_t);
    for (std::size_t s = 0; s < r.expected_n.size(); ++s) {
      const std::string lab = s == 0 ? "H_G" : "LFC_" + std::to_string(s);
      emit("expected_n_" + lab, r.expected_n[s]);
      emit("expected_t_" + lab, r.expected_t[s]);
    }
  }
  return out.str();
}

}  // namespace ptd
