#include "ptd/size_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ptd/arm_model.hpp"
#include "ptd/error.hpp"
#include "ptd/error_engine.hpp"

namespace ptd {

namespace {

// Per-point stage probabilities of one arm on the full J_0-dimensional grid.
struct StageVectors {
  std::vector<std::vector<double>> fut, eff, below, cont;
};

StageVectors stage_vectors(const CalibratedDesign& design, int k, double theta, GridCache& cache) {
  const DesignSpec& spec = design.spec;
  const int dims = spec.control_stages;
  const std::size_t size = cache.grid(dims).size();
  const ArmModel arm(spec, design.schedule, k);
  StageVectors sv;
  auto fill = [&](int j, LastLimit last) {
    const SubGrid& sub = cache.sub(dims, arm.start, j);
    std::vector<double> v(sub.size());
    stage_probs(arm, design.bounds[k], j, theta, last, sub, v);
    return broadcast(sub, v);
  };
  for (int j = 1; j <= arm.stages; ++j) {
    sv.fut.push_back(fill(j, LastLimit::Futility));
    sv.eff.push_back(fill(j, LastLimit::Efficacy));
    sv.below.push_back(fill(j, LastLimit::BelowUpper));
    sv.cont.push_back(j < arm.stages ? fill(j, LastLimit::Continue) : std::vector<double>(size, 0.0));
  }
  return sv;
}

std::vector<StageVectors> all_stage_vectors(const CalibratedDesign& design, const EffectConfig& theta,
                                            GridCache& cache) {
  if (static_cast<int>(theta.theta.size()) != design.spec.arms) throw ShapeError("effect vector has wrong length");
  std::vector<StageVectors> out;
  for (int k = 0; k < design.spec.arms; ++k) out.push_back(stage_vectors(design, k, theta.theta[k], cache));
  return out;
}

double arm_n_at(const Schedule& sch, int k, int j) { return j <= 0 ? 0.0 : sch.active[k][j - 1]; }

Pmf group(const std::vector<std::pair<double, double>>& atoms) {
  std::map<double, double> m;
  for (const auto& [x, p] : atoms) m[x] += p;
  Pmf out;
  for (const auto& [x, p] : m) {
    out.support.push_back(x);
    out.prob.push_back(p);
  }
  return out;
}

}  // namespace

double Pmf::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) s += support[i] * prob[i];
  return s;
}

double Pmf::mass() const {
  double s = 0.0;
  for (double p : prob) s += p;
  return s;
}

std::vector<double> Pmf::cdf() const {
  std::vector<double> c(prob.size());
  double s = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) c[i] = (s += prob[i]);
  return c;
}

std::vector<OutcomeCell> outcome_cells(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache) {
  const DesignSpec& spec = design.spec;
  const int K = spec.arms;
  const auto sv = all_stage_vectors(design, theta, cache);
  const auto& w = cache.grid(spec.control_stages).weights();

  std::vector<OutcomeCell> cells;
  std::vector<int> stop(K, 1);
  std::vector<bool> eff(K, false);
  std::vector<double> prod(w.size());
  for (;;) {
    std::copy(w.begin(), w.end(), prod.begin());
    for (int k = 0; k < K; ++k) {
      const auto& f = eff[k] ? sv[k].eff[stop[k] - 1] : sv[k].fut[stop[k] - 1];
      for (std::size_t p = 0; p < prod.size(); ++p) prod[p] *= f[p];
    }
    OutcomeCell c{stop, eff, 0.0, 0.0, std::vector<double>(K), 0.0};
    for (double x : prod) c.prob += x;

    // Earliest efficacy period; futility verdicts never end the trial.
    int first_eff = INT32_MAX, last_end = 0;
    for (int k = 0; k < K; ++k) {
      const int end = stop[k] + spec.adding_stage[k];
      last_end = std::max(last_end, end);
      if (eff[k]) first_eff = std::min(first_eff, end);
    }
    for (int k = 0; k < K; ++k) {
      const int s = spec.adding_stage[k];
      c.arm_n[k] = arm_n_at(design.schedule, k, std::max(std::min(stop[k] + s, first_eff) - s, 0));
      c.total_n += c.arm_n[k];
    }
    c.control_n = design.schedule.control[std::min(last_end, first_eff) - 1];
    c.total_n += c.control_n;
    cells.push_back(std::move(c));

    // Next cell: odometer over (verdict, stop) per arm.
    int k = 0;
    for (; k < K; ++k) {
      if (!eff[k]) {
        eff[k] = true;
        break;
      }
      eff[k] = false;
      if (stop[k] < spec.stages[k]) {
        ++stop[k];
        break;
      }
      stop[k] = 1;
    }
    if (k == K) break;
  }
  return cells;
}

SampleSizePMF sample_size_pmf(const std::vector<OutcomeCell>& cells, int arms) {
  std::vector<std::pair<double, double>> total, control;
  std::vector<std::vector<std::pair<double, double>>> per_arm(arms);
  for (const auto& c : cells) {
    total.emplace_back(c.total_n, c.prob);
    control.emplace_back(c.control_n, c.prob);
    for (int k = 0; k < arms; ++k) per_arm[k].emplace_back(c.arm_n[k], c.prob);
  }
  SampleSizePMF out{group(total), {}, group(control)};
  for (const auto& a : per_arm) out.arms.push_back(group(a));
  return out;
}

double expected_n_enumeration(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache) {
  double e = 0.0;
  for (const auto& c : outcome_cells(design, theta, cache)) e += c.prob * c.total_n;
  return e;
}

EfficientBreakdown expected_n_breakdown(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache) {
  const DesignSpec& spec = design.spec;
  const int K = spec.arms, J0 = spec.control_stages;
  const auto sv = all_stage_vectors(design, theta, cache);
  const auto& w = cache.grid(J0).weights();
  const std::size_t size = w.size();
  const int s_star = *std::max_element(spec.adding_stage.begin(), spec.adding_stage.end());

  // P(arm k has no rejection by period j0 | t).
  auto not_rejected = [&](int k, int j0, std::vector<double>& out) {
    const int rel = j0 - spec.adding_stage[k];
    if (rel <= 0) {
      std::fill(out.begin(), out.end(), 1.0);
      return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 1; j <= std::min(spec.stages[k], rel - 1); ++j)
      for (std::size_t p = 0; p < size; ++p) out[p] += sv[k].fut[j - 1][p];
    if (rel <= spec.stages[k])
      for (std::size_t p = 0; p < size; ++p) out[p] += sv[k].below[rel - 1][p];
  };
  // Product over arms other than `skip` (-1 for none) of not_rejected.
  auto varpi = [&](int skip, int j0) {
    std::vector<double> prod(size, 1.0), v(size);
    for (int k = 0; k < K; ++k) {
      if (k == skip) continue;
      not_rejected(k, j0, v);
      for (std::size_t p = 0; p < size; ++p) prod[p] *= v[p];
    }
    return prod;
  };
  auto integrate = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t p = 0; p < size; ++p) s += w[p] * f[p];
    return s;
  };

  EfficientBreakdown out;
  // Control: all arms futile by j0 (Psi) or some rejection by j0 (Upsilon).
  double prev = 0.0;
  for (int j0 = 1; j0 <= J0; ++j0) {
    double psi = 0.0;
    if (j0 > s_star) {
      std::vector<double> prod(size, 1.0);
      for (int k = 0; k < K; ++k) {
        std::vector<double> f(size, 0.0);
        for (int j = 1; j <= std::min(spec.stages[k], j0 - spec.adding_stage[k]); ++j)
          for (std::size_t p = 0; p < size; ++p) f[p] += sv[k].fut[j - 1][p];
        for (std::size_t p = 0; p < size; ++p) prod[p] *= f[p];
      }
      psi = integrate(prod);
    }
    const double upsilon = 1.0 - integrate(varpi(-1, j0));
    out.control_stop.push_back(psi + upsilon - prev);
    prev = psi + upsilon;
  }
  for (int j0 = 1; j0 <= J0; ++j0) out.expected_n += out.control_stop[j0 - 1] * design.schedule.control[j0 - 1];

  // Arms: ended by another arm's rejection (Lambda) or on their own (Xi).
  out.arm_end.resize(K);
  for (int kp = 0; kp < K; ++kp) {
    for (int jp = 1; jp <= spec.stages[kp]; ++jp) {
      const int m = spec.adding_stage[kp] + jp;
      const auto before = varpi(kp, m - 1);
      const auto at = varpi(kp, m);
      std::vector<double> lam(size), xi(size);
      for (std::size_t p = 0; p < size; ++p) {
        const double reached = jp > 1 ? sv[kp].cont[jp - 2][p] : 1.0;
        lam[p] = (before[p] - at[p]) * reached;
        xi[p] = at[p] * (sv[kp].fut[jp - 1][p] + sv[kp].eff[jp - 1][p]);
      }
      const double end = integrate(lam) + integrate(xi);
      out.arm_end[kp].push_back(end);
      out.expected_n += end * design.schedule.active[kp][jp - 1];
    }
  }
  return out;
}

double expected_n_efficient(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache) {
  return expected_n_breakdown(design, theta, cache).expected_n;
}

OperatingChars operating_chars(const CalibratedDesign& design, GridCache& cache, const PowerOptions& opt) {
  const DesignSpec& spec = design.spec;
  OperatingChars oc;
  oc.fwer = fwer(design, cache);
  oc.max_n = design.schedule.max_n();
  oc.max_t = duration(oc.max_n, spec.rate_per_month);
  std::vector<EffectConfig> thetas{EffectConfig::global_null(spec.arms)};
  for (int k = 0; k < spec.arms; ++k) {
    oc.power.push_back(power(design, k, cache, opt));
    thetas.push_back(EffectConfig::lfc(spec, k));
  }
  for (const auto& th : thetas) {
    ScenarioChars sc{th, 0.0, 0.0, 0.0, {}};
    sc.expected_n = expected_n_efficient(design, th, cache);
    const auto cells = outcome_cells(design, th, cache);
    sc.pmf = sample_size_pmf(cells, spec.arms);
    sc.expected_n_enumeration = sc.pmf.total.mean();
    sc.expected_t = duration(sc.expected_n, spec.rate_per_month);
    oc.scenarios.push_back(std::move(sc));
  }
  return oc;
}

}  // namespace ptd
