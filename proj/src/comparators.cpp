#include "ptd/comparators.hpp"

#include <algorithm>
#include <cmath>

#include "ptd/error.hpp"
#include "ptd/error_engine.hpp"
#include "ptd/size_analytics.hpp"

namespace ptd {

namespace {

DesignSpec single_trial(const DesignSpec& base, int k, double alpha) {
  DesignSpec s;
  s.arms = 1;
  s.initial_arms = 1;
  s.adding_stage = {0};
  s.stages = {base.stages[k]};
  s.control_stages = base.stages[k];
  s.sigma = base.sigma;
  s.theta_interesting = base.theta_interesting;
  s.theta_null = base.theta_null;
  s.alpha = alpha;
  s.beta = base.beta;
  s.rate_per_month = base.rate_per_month;
  s.shapes = {base.shapes[k]};
  s.validate();
  return s;
}

std::vector<double> per_stage_of(const Schedule& sch, int k) {
  std::vector<double> out;
  for (std::size_t j = 0; j < sch.active[k].size(); ++j)
    out.push_back(sch.active[k][j] - (j ? sch.active[k][j - 1] : 0.0));
  return out;
}

std::vector<EffectConfig> scenarios_of(const DesignSpec& spec) {
  std::vector<EffectConfig> out{EffectConfig::global_null(spec.arms)};
  for (int k = 0; k < spec.arms; ++k) out.push_back(EffectConfig::lfc(spec, k));
  return out;
}

void fill_from_joint(ComparatorResult& r, const CalibratedDesign& d, GridCache& cache, const PowerOptions& popt) {
  r.designs = {d};
  r.fwer = fwer(d, cache);
  for (int k = 0; k < d.spec.arms; ++k) {
    r.power.push_back(power(d, k, cache, popt).total);
    r.per_stage.push_back(per_stage_of(d.schedule, k));
    r.stages.push_back(d.spec.stages[k]);
  }
  r.max_n = d.schedule.max_n();
  for (const auto& th : scenarios_of(d.spec)) r.expected_n.push_back(expected_n_efficient(d, th, cache));
}

ComparatorResult separate(const CalibratedDesign& proposed, bool control_fwer, GridCache& cache,
                          const SizingOptions& sizing) {
  const DesignSpec& base = proposed.spec;
  const int K = base.arms;
  const double alpha = control_fwer ? 1.0 - std::pow(1.0 - base.alpha, 1.0 / K) : base.alpha;
  ComparatorResult r;
  double keep = 1.0;
  std::vector<std::vector<double>> en(K);  // en[k][0] null, en[k][1] theta', en[k][2] theta_0
  for (int k = 0; k < K; ++k) {
    const DesignSpec s = single_trial(base, k, alpha);
    SizingResult sz = size_for_power(s, cache, sizing);
    const CalibratedDesign& d = sz.design;
    keep *= 1.0 - fwer(d, cache);
    r.power.push_back(sz.power[0].total);
    r.per_stage.push_back(per_stage_of(d.schedule, 0));
    r.stages.push_back(s.stages[0]);
    r.max_n += d.schedule.max_n();
    for (double th : {0.0, base.theta_interesting, base.theta_null})
      en[k].push_back(expected_n_efficient(d, EffectConfig{{th}, ""}, cache));
    r.designs.push_back(std::move(sz.design));
  }
  r.fwer = 1.0 - keep;
  double null_total = 0.0;
  for (int k = 0; k < K; ++k) null_total += en[k][0];
  r.expected_n.push_back(null_total);
  for (int kp = 0; kp < K; ++kp) {
    double e = 0.0;
    for (int k = 0; k < K; ++k) e += en[k][k == kp ? 1 : 2];
    r.expected_n.push_back(e);
  }
  return r;
}

// The original single-arm design with arm 1's number of stages; every arm
// reuses the last J_k of its boundaries.
ComparatorResult naive(const CalibratedDesign& proposed, bool same_max_n, GridCache& cache,
                       const SizingOptions& sizing) {
  const DesignSpec& base = proposed.spec;
  const int K = base.arms;
  const SizingResult orig = size_for_power(single_trial(base, 0, base.alpha), cache, sizing);
  const ArmBounds& ob = orig.design.bounds[0];
  const int J = base.stages[0];
  const double n0 = orig.design.schedule.n[0];
  for (int k = 0; k < K; ++k)
    if (base.stages[k] > J) throw ConfigError("naive comparator: an arm has more stages than the original design");

  DesignSpec spec = base;
  std::vector<double> n(K, n0);
  if (same_max_n) {
    // Patients left after the first period, split evenly over every later
    // arm-stage and control-period cell; arms present from the start round
    // down, later arms round up.
    const double max_n = orig.design.schedule.max_n();
    const int first_add = *std::min_element(base.adding_stage.begin() + base.initial_arms, base.adding_stage.end());
    double before = 0.0;
    int cells = 0;
    for (int m = 1; m <= base.control_stages; ++m) {
      int here = 0;
      for (int k = 0; k < K; ++k) {
        const int j = m - base.adding_stage[k];
        if (j >= 1 && j <= base.stages[k]) ++here;
      }
      if (m <= first_add) {
        before += n0 * (here + 1);
      } else {
        cells += here + 1;
      }
    }
    if (cells == 0) throw ConfigError("naive comparator: no stages after the first arm is added");
    const double later = (max_n - before) / cells;
    spec.ratios.assign(K, {});
    for (int k = 0; k < K; ++k) {
      const bool initial = base.adding_stage[k] == 0;
      const double step = initial ? std::floor(later) : std::ceil(later);
      double cum = 0.0;
      for (int j = 1; j <= base.stages[k]; ++j) {
        cum += (initial && j + base.adding_stage[k] <= first_add) ? n0 : step;
        spec.ratios[k].push_back(cum);
      }
      n[k] = spec.ratios[k][0];
      for (double& x : spec.ratios[k]) x /= n[k];
    }
  }
  spec.validate();
  CalibratedDesign d{spec, control_schedule(spec, n), {}, std::nullopt};
  for (int k = 0; k < K; ++k) {
    const std::size_t skip = static_cast<std::size_t>(J - spec.stages[k]);
    d.bounds.push_back(ArmBounds{ob.shape, ob.a, {ob.lower.begin() + skip, ob.lower.end()},
                                 {ob.upper.begin() + skip, ob.upper.end()}});
  }
  ComparatorResult r;
  fill_from_joint(r, d, cache, sizing.power);
  return r;
}

}  // namespace

std::string_view comparator_name(ComparatorKind kind) {
  switch (kind) {
    case ComparatorKind::SeparateFWER: return "separate_fwer";
    case ComparatorKind::SeparateNoFWER: return "separate_no_fwer";
    case ComparatorKind::SimultaneousMAMS: return "mams";
    case ComparatorKind::NaiveSameN: return "naive_same_n";
    case ComparatorKind::NaiveSameMaxN: return "naive_same_max_n";
  }
  return "?";
}

ComparatorKind parse_comparator(std::string_view name) {
  for (auto k : {ComparatorKind::SeparateFWER, ComparatorKind::SeparateNoFWER, ComparatorKind::SimultaneousMAMS,
                 ComparatorKind::NaiveSameN, ComparatorKind::NaiveSameMaxN})
    if (comparator_name(k) == name) return k;
  throw ConfigError("unknown comparator: " + std::string(name));
}

double waiting_patients(const CalibratedDesign& proposed) {
  const DesignSpec& spec = proposed.spec;
  const int s_star = *std::max_element(spec.adding_stage.begin(), spec.adding_stage.end());
  if (s_star == 0) return 0.0;
  double total = proposed.schedule.control[s_star - 1];
  for (int k = 0; k < spec.arms; ++k) {
    const int j = std::min(s_star - spec.adding_stage[k], spec.stages[k]);
    if (j >= 1) total += proposed.schedule.active[k][j - 1];
  }
  return total;
}

ComparatorResult build_comparator(const CalibratedDesign& proposed, const ComparatorSpec& cs, GridCache& cache,
                                  const SizingOptions& sizing) {
  const DesignSpec& base = proposed.spec;
  ComparatorResult r;
  switch (cs.kind) {
    case ComparatorKind::SeparateFWER:
    case ComparatorKind::SeparateNoFWER:
      r = separate(proposed, cs.kind == ComparatorKind::SeparateFWER, cache, sizing);
      break;
    case ComparatorKind::SimultaneousMAMS: {
      if (cs.stages < 1) throw ConfigError("mams comparator: stages must be at least 1");
      DesignSpec s = base;
      s.initial_arms = s.arms;
      s.adding_stage.assign(s.arms, 0);
      s.stages.assign(s.arms, cs.stages);
      s.control_stages = cs.stages;
      s.ratios.clear();
      s.validate();
      const SizingResult sz = size_for_power(s, cache, sizing);
      fill_from_joint(r, sz.design, cache, sizing.power);
      r.wait_months = duration(waiting_patients(proposed), base.rate_per_month);
      break;
    }
    case ComparatorKind::NaiveSameN:
    case ComparatorKind::NaiveSameMaxN:
      r = naive(proposed, cs.kind == ComparatorKind::NaiveSameMaxN, cache, sizing);
      break;
  }
  r.kind = cs.kind;
  r.name = std::string(comparator_name(cs.kind));
  if (cs.kind == ComparatorKind::SimultaneousMAMS) r.name += "_" + std::to_string(cs.stages);
  r.max_t = duration(r.max_n, base.rate_per_month) + r.wait_months;
  for (double e : r.expected_n) r.expected_t.push_back(duration(e, base.rate_per_month) + r.wait_months);
  return r;
}

}  // namespace ptd
