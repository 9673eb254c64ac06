#include "ptd/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ptd/error.hpp"
#include "ptd/error_engine.hpp"

namespace ptd {

namespace {

void check_supported(const DesignSpec& spec) {
  if (spec.arms != 2 || spec.adding_stage[0] != 0 || spec.adding_stage[1] != 1)
    throw ConfigError("deviation study: needs two arms with the second joining at control stage 1");
}

long long whole(double x, const char* what) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9) throw ConfigError(std::string("deviation study: ") + what + " must be a whole number");
  return static_cast<long long>(r);
}

double arm_increment(const Schedule& s, int k, int j) {  // j 1-based
  return s.active[k][j - 1] - (j > 1 ? s.active[k][j - 2] : 0.0);
}

// Arm 1's interim moves to the add time; what remains of max(N) is spread over
// the later periods in the planned proportions.
CalibratedDesign move_interim(const CalibratedDesign& design, double a) {
  const DesignSpec& spec = design.spec;
  const Schedule& plan = design.schedule;
  const int J0 = spec.control_stages, J1 = spec.stages[0], J2 = spec.stages[1];
  const long long max_n = whole(plan.max_n(), "planned max(N)");
  const long long rest = max_n - 2 * whole(a, "add point");

  // Cells after the add: (period, group) with group 0 control, 1 arm 1, 2 arm 2.
  struct Cell {
    int m, group;
  };
  std::vector<Cell> cells;
  std::vector<double> planned;
  for (int m = 2; m <= J0; ++m) {
    cells.push_back({m, 0});
    planned.push_back(plan.increments[m - 1]);
    if (m <= J1) {
      cells.push_back({m, 1});
      planned.push_back(arm_increment(plan, 0, m));
    }
    if (m - 1 <= J2) {
      cells.push_back({m, 2});
      planned.push_back(arm_increment(plan, 1, m - 1));
    }
  }
  if (rest < static_cast<long long>(cells.size()))
    throw ConfigError("deviation study: add point leaves too few patients for the remaining stages");
  const auto counts = largest_remainder(rest, planned);
  for (long long c : counts)
    if (c < 1) throw ConfigError("deviation study: add point leaves an empty stage");

  Schedule s;
  s.active.assign(2, {});
  s.increments.assign(J0, 0.0);
  s.increments[0] = a;
  s.active[0].push_back(a);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto [m, g] = cells[i];
    const double c = static_cast<double>(counts[i]);
    if (g == 0) s.increments[m - 1] = c;
    if (g == 1) s.active[0].push_back(s.active[0].back() + c);
    if (g == 2) s.active[1].push_back((s.active[1].empty() ? 0.0 : s.active[1].back()) + c);
  }
  std::partial_sum(s.increments.begin(), s.increments.end(), std::back_inserter(s.control));
  s.n = {s.active[0][0], s.active[1][0]};

  CalibratedDesign out{spec, s, design.bounds, std::nullopt};
  for (int k = 0; k < 2; ++k) {
    out.spec.ratios[k].clear();
    for (double v : s.active[k]) out.spec.ratios[k].push_back(v / s.active[k][0]);
  }
  out.spec.validate();
  return out;
}

// Analyses stay at the planned cumulative totals and arm 1 and control keep
// their planned per-period allocation. Arm 2 joins once control reaches the
// add point and recruits at its planned ratio to control.
SimPlan keep_timing(const CalibratedDesign& design, double a) {
  const DesignSpec& spec = design.spec;
  const Schedule& plan = design.schedule;
  const int J0 = spec.control_stages, J1 = spec.stages[0], J2 = spec.stages[1], s2 = spec.adding_stage[1];
  std::vector<long long> T(J0 + 1, 0);
  for (int m = 1; m <= J0; ++m) {
    double p = plan.increments[m - 1];
    for (int k = 0; k < 2; ++k) {
      const int j = m - spec.adding_stage[k];
      if (j >= 1 && j <= spec.stages[k]) p += arm_increment(plan, k, j);
    }
    T[m] = T[m - 1] + whole(p, "planned stage size");
  }
  const double rho = arm_increment(plan, 1, 1) / plan.increments[s2];

  SimPlan out;
  std::vector<int> looks(2, 0);
  bool entered = false;
  double control = 0.0;
  auto push = [&](long long total, double w1, double wc, bool with2) {
    const double w2 = with2 ? rho * wc : 0.0;
    const auto c = largest_remainder(total, {wc, w1, w2});
    out.segments.push_back({static_cast<double>(c[0]), {static_cast<double>(c[1]), static_cast<double>(c[2])}, {0, 0}});
    control += static_cast<double>(c[0]);
  };
  for (int m = 1; m <= J0; ++m) {
    const double w1 = m <= J1 ? arm_increment(plan, 0, m) : 0.0;
    const double wc = plan.increments[m - 1];
    const long long len = T[m] - T[m - 1];
    if (!entered) {
      if (w1 <= 0.0) throw ConfigError("deviation study: add point falls after arm 1 has finished recruiting");
      const double share = wc / (wc + w1);
      if (control + static_cast<double>(len) * share <= a + 1e-9) {
        push(len, w1, wc, false);
        if (std::abs(control - a) < 1e-9) entered = true;
      } else {
        const long long pre = std::llround((a - control) / share);
        if (pre > 0) push(pre, w1, wc, false);
        entered = true;
        push(len - pre, w1, wc, true);
      }
    } else {
      push(len, w1, wc, true);
    }
    auto& seg = out.segments.back();
    if (m <= J1) seg.analysis[0] = ++looks[0];
    if (m > s2 && m <= s2 + J2 && entered) {
      double arm2 = 0.0;
      for (const auto& sg : out.segments) arm2 += sg.arm[1];
      if (arm2 > 0.0) seg.analysis[1] = ++looks[1];
    }
  }
  if (looks[1] == 0) throw ConfigError("deviation study: arm 2 joins too late to be analysed");

  int first = 0;
  while (out.segments[first].arm[1] <= 0.0) ++first;
  const auto& b1 = design.bounds[1];
  const std::size_t skip = b1.upper.size() - static_cast<std::size_t>(looks[1]);
  out.arms.push_back(SimArm{0, design.bounds[0].lower, design.bounds[0].upper});
  out.arms.push_back(SimArm{first, {b1.lower.begin() + skip, b1.lower.end()}, {b1.upper.begin() + skip, b1.upper.end()}});
  out.validate();
  return out;
}

}  // namespace

Approach parse_approach(int value) {
  if (value < 1 || value > 3) throw ConfigError("approach must be 1, 2 or 3");
  return static_cast<Approach>(value);
}

double planned_add_point(const CalibratedDesign& design) {
  check_supported(design.spec);
  return design.schedule.control[design.spec.adding_stage[1] - 1];
}

std::vector<long long> largest_remainder(long long total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0.0) || total < 0) throw ConfigError("largest_remainder: need positive weights and total");
  std::vector<long long> out(weights.size());
  std::vector<std::pair<double, std::size_t>> frac;
  long long used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double share = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<long long>(std::floor(share + 1e-9));
    used += out[i];
    frac.emplace_back(share - static_cast<double>(out[i]), i);
  }
  std::stable_sort(frac.begin(), frac.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t i = 0; used < total; ++i, ++used) ++out[frac[i % frac.size()].second];
  return out;
}

DeviationPlan deviation_plan(const CalibratedDesign& design, Approach approach, double a, GridCache& cache,
                             const CalibrationOptions& calib) {
  check_supported(design.spec);
  const double horizon = design.schedule.control.back();
  if (!(a >= 1.0) || !(a <= horizon - 1.0))
    throw ConfigError("deviation study: add point must lie in [1, control max - 1]");
  whole(a, "add point");
  DeviationPlan out;
  switch (approach) {
    case Approach::MoveInterim:
    case Approach::Recalibrate: {
      CalibratedDesign d = move_interim(design, a);
      if (approach == Approach::Recalibrate) {
        auto res = calibrate_boundaries(d.spec, d.schedule, cache, calib);
        d.bounds = std::move(res.bounds);
        d.fwer = res.fwer;
      }
      out.plan = plan_from_design(d);
      out.design = std::move(d);
      break;
    }
    case Approach::KeepTiming:
      out.plan = keep_timing(design, a);
      break;
  }
  return out;
}

std::vector<DeviationRow> deviation_study(const CalibratedDesign& design, const DeviationStudyOptions& opt,
                                          GridCache& cache) {
  check_supported(design.spec);
  std::vector<EffectConfig> thetas = opt.thetas;
  if (thetas.empty()) {
    thetas.push_back(EffectConfig::global_null(design.spec.arms));
    for (int k = 0; k < design.spec.arms; ++k) thetas.push_back(EffectConfig::lfc(design.spec, k));
  }
  std::vector<DeviationRow> rows;
  for (Approach ap : opt.approaches) {
    for (double a : opt.add_points) {
      DeviationRow base{a, static_cast<int>(ap), "", "", {}, opt.replicates, opt.seed, ""};
      DeviationPlan dp;
      try {
        dp = deviation_plan(design, ap, a, cache, opt.calibration);
      } catch (const Error& e) {
        base.metric = "error";
        base.error = e.what();
        rows.push_back(base);
        continue;
      }
      for (const auto& th : thetas) {
        SimConfig cfg{dp.plan, th, design.spec.sigma, opt.replicates, opt.seed, opt.ranking};
        const SimReport r = simulate(cfg);
        auto add = [&](std::string metric, Estimate e) {
          DeviationRow row = base;
          row.theta_label = th.label;
          row.metric = std::move(metric);
          row.value = e;
          rows.push_back(std::move(row));
        };
        add("fwer", r.fwer);
        for (std::size_t k = 0; k < r.recommend.size(); ++k) add("power_" + std::to_string(k + 1), r.recommend[k]);
        for (std::size_t k = 0; k < r.reject.size(); ++k) add("reject_" + std::to_string(k + 1), r.reject[k]);
        add("expected_n", r.expected_n);
      }
    }
  }
  return rows;
}

}  // namespace ptd
