// ptd: design, report, simulate and compare platform trials with pre-planned
// arm additions. Thread count comes from PTD_THREADS.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "ptd/comparators.hpp"
#include "ptd/config.hpp"
#include "ptd/deviation.hpp"
#include "ptd/error.hpp"
#include "ptd/error_engine.hpp"
#include "ptd/power_engine.hpp"
#include "ptd/report.hpp"
#include "ptd/simulator.hpp"
#include "ptd/size_analytics.hpp"

namespace fs = std::filesystem;
using namespace ptd;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumeric = 2 };

struct Options {
  std::string command;
  std::string config;
  std::string out = ".";
  std::string design;  // reuse a design.json instead of sizing again
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<int> nodes;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw ConfigError("cannot write " + path.string());
  std::cerr << "wrote " << path.string() << '\n';
}

class Session {
 public:
  explicit Session(const Options& o) : opt_(o), cfg_(load_config(o.config)) {
    if (o.nodes) {
      if (*o.nodes < 4 || *o.nodes > 128) throw ConfigError("--nodes must lie in [4, 128]");
      cfg_.numerics.nodes_per_dim = *o.nodes;
    }
    if (o.seed) cfg_.simulate.seed = *o.seed;
    if (o.replicates) {
      if (*o.replicates < 1) throw ConfigError("--replicates must be at least 1");
      cfg_.simulate.replicates = *o.replicates;
    }
    cache_.emplace(cfg_.numerics.nodes_per_dim);
    fs::create_directories(o.out);
  }

  int run() {
    if (opt_.command == "design") return design_cmd();
    if (opt_.command == "report") return report_cmd();
    if (opt_.command == "simulate") return simulate_cmd();
    return compare_cmd();
  }

 private:
  fs::path out(const char* name) const { return fs::path(opt_.out) / name; }

  const CalibratedDesign& design() {
    if (design_) return *design_;
    if (!opt_.design.empty()) {
      Json j;
      try {
        j = Json::parse(read_file(opt_.design));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(opt_.design + ": " + e.what());
      }
      design_ = design_from_json(j.contains("design") ? j.at("design") : j);
    } else {
      design_ = size_for_power(cfg_.spec, *cache_, cfg_.sizing()).design;
    }
    return *design_;
  }

  int design_cmd() {
    const CalibratedDesign& d = design();
    Json j;
    j["design"] = design_json(d);
    j["nodes_per_dim"] = cfg_.numerics.nodes_per_dim;
    write_file(out("design.json"), j.dump(2) + "\n");
    const std::string table = design_table(d);
    write_file(out("design.txt"), table);
    std::cout << table;
    return kOk;
  }

  int report_cmd() {
    const CalibratedDesign& d = design();
    PowerOptions popt = cfg_.sizing().power;
    const OperatingChars oc = operating_chars(d, *cache_, popt);
    PwerCheck check;
    MvnOptions mopt;
    mopt.tol = cfg_.numerics.mvn_tol;
    for (int k = 0; k < d.spec.arms; ++k) {
      check.markov.push_back(pwer(d, k));
      check.mvn.push_back(pwer_mvn(d, k, mopt));
    }
    Json j;
    j["design"] = design_json(d);
    j["operating"] = operating_json(oc, check);
    write_file(out("report.json"), j.dump(2) + "\n");
    write_file(out("pmf.csv"), pmf_csv(oc));
    const std::string table = design_table(d) + "\n" + operating_table(d, oc);
    write_file(out("report.txt"), table);
    std::cout << table;
    return kOk;
  }

  int simulate_cmd() {
    const CalibratedDesign& d = design();
    std::vector<std::pair<std::string, SimReport>> reports;
    std::vector<EffectConfig> thetas{EffectConfig::global_null(d.spec.arms)};
    for (int k = 0; k < d.spec.arms; ++k) thetas.push_back(EffectConfig::lfc(d.spec, k));
    const SimPlan plan = plan_from_design(d);
    for (const auto& th : thetas) {
      SimConfig sc;
      sc.plan = plan;
      sc.theta = th;
      sc.sigma = d.spec.sigma;
      sc.replicates = cfg_.simulate.replicates;
      sc.seed = cfg_.simulate.seed;
      sc.ranking = cfg_.ranking;
      reports.emplace_back(th.label, simulate(sc));
    }
    Json j;
    j["design"] = design_json(d);
    Json sims = Json::array();
    for (const auto& [label, r] : reports) sims.push_back(sim_json(r, label));
    j["simulations"] = sims;
    write_file(out("simulate.json"), j.dump(2) + "\n");
    write_file(out("simulate.csv"), sim_csv(reports));
    std::string table = sim_table(reports);

    int code = kOk;
    if (!cfg_.simulate.add_points.empty()) {
      DeviationStudyOptions dopt;
      dopt.approaches = cfg_.simulate.approaches;
      dopt.add_points = cfg_.simulate.add_points;
      dopt.replicates = cfg_.simulate.replicates;
      dopt.seed = cfg_.simulate.seed;
      dopt.ranking = cfg_.ranking;
      dopt.calibration = cfg_.calibration();
      const auto rows = deviation_study(d, dopt, *cache_);
      write_file(out("deviation.csv"), deviation_csv(rows));
      TextTable t({"approach", "add_point", "FWER", "se"});
      std::size_t failed = 0;
      for (const auto& r : rows) {
        if (!r.error.empty()) {
          ++failed;
          std::cerr << "approach " << r.approach << " at " << fmt6(r.add_point) << ": " << r.error << '\n';
        } else if (r.metric == "fwer" && r.theta_label == "H_G") {
          t.add({std::to_string(r.approach), fmt6(r.add_point), fmt6(r.value.estimate), fmt6(r.value.se)});
        }
      }
      table += "\n" + t.str();
      if (failed > 0 && failed == rows.size()) code = kNumeric;
    }
    write_file(out("simulate.txt"), table);
    std::cout << table;
    return code;
  }

  int compare_cmd() {
    const CalibratedDesign& d = design();
    std::vector<ComparatorSpec> specs = cfg_.compare;
    if (specs.empty()) {
      const std::set<int> js(d.spec.stages.begin(), d.spec.stages.end());
      specs = {{ComparatorKind::SeparateFWER, 0}, {ComparatorKind::SeparateNoFWER, 0}};
      for (int jj : js) specs.push_back({ComparatorKind::SimultaneousMAMS, jj});
      if (*std::max_element(d.spec.adding_stage.begin(), d.spec.adding_stage.end()) > 0) {
        specs.push_back({ComparatorKind::NaiveSameN, 0});
        specs.push_back({ComparatorKind::NaiveSameMaxN, 0});
      }
    }
    std::vector<ComparatorResult> rows{proposed_row(d)};
    for (const auto& cs : specs) rows.push_back(build_comparator(d, cs, *cache_, cfg_.sizing()));
    Json j = Json::array();
    for (const auto& r : rows) j.push_back(comparator_json(r));
    write_file(out("compare.json"), j.dump(2) + "\n");
    write_file(out("compare.csv"), comparator_csv(rows));
    const std::string table = comparator_table(rows);
    write_file(out("compare.txt"), table);
    std::cout << table;
    return kOk;
  }

  ComparatorResult proposed_row(const CalibratedDesign& d) {
    const OperatingChars oc = operating_chars(d, *cache_, cfg_.sizing().power);
    ComparatorResult r;
    r.name = "proposed";
    r.designs = {d};
    r.fwer = oc.fwer;
    for (const auto& p : oc.power) r.power.push_back(p.total);
    for (int k = 0; k < d.spec.arms; ++k) {
      std::vector<double> ps;
      const auto& a = d.schedule.active[k];
      for (std::size_t jj = 0; jj < a.size(); ++jj) ps.push_back(a[jj] - (jj ? a[jj - 1] : 0.0));
      r.per_stage.push_back(ps);
      r.stages.push_back(d.spec.stages[k]);
    }
    r.max_n = oc.max_n;
    r.max_t = oc.max_t;
    for (const auto& s : oc.scenarios) {
      r.expected_n.push_back(s.expected_n);
      r.expected_t.push_back(s.expected_t);
    }
    return r;
  }

  Options opt_;
  Config cfg_;
  std::optional<GridCache> cache_;
  std::optional<CalibratedDesign> design_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Platform trial designs with pre-planned addition of arms"};
  app.require_subcommand(1, 1);
  Options o;
  for (const char* name : {"design", "report", "simulate", "compare"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "JSON config file")->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--design", o.design, "design.json from an earlier run");
    sub->add_option("--seed", o.seed, "simulation seed");
    sub->add_option("--replicates", o.replicates, "simulation replicates");
    sub->add_option("--nodes", o.nodes, "quadrature nodes per dimension");
    sub->callback([&o, sub] { o.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    return Session(o).run();
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}
