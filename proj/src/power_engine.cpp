#include "ptd/power_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptd/error.hpp"
#include "ptd/kernels.hpp"
#include "ptd/mvn.hpp"
#include "ptd/normal.hpp"
#include "ptd/parallel.hpp"
#include "ptd/quadrature.hpp"

namespace ptd {

namespace {

constexpr double kInf = HUGE_VAL;
constexpr double kVMax = 7.0;
constexpr std::size_t kPointBlock = 32;

// Analysis of arm k that falls in control period m (1-based), or 0.
int analysis_at(const DesignSpec& spec, int k, int m) {
  const int j = m - spec.adding_stage[k];
  return j >= 1 && j <= spec.stages[k] ? j : 0;
}

double mean_rank_offset(const DesignSpec& spec, const ArmModel& arm, int jk) {
  return std::sqrt(arm.n[jk - 1]) * (spec.theta_interesting - spec.theta_null) / spec.sigma;
}

}  // namespace

double recommend_limit(const CalibratedDesign& design, int k, int jk, int kp, int jp, double v,
                       std::span<const double> t, Ranking ranking) {
  const DesignSpec& spec = design.spec;
  const ArmModel ak(spec, design.schedule, k);
  const ArmModel akp(spec, design.schedule, kp);
  const auto tk = t.subspan(ak.start);
  const double u = design.bounds[k].upper[jk - 1];
  if (ranking == Ranking::ZStatistic) {
    const double z = akp.z_of(v, jp - 1, spec.theta_interesting, t.subspan(akp.start));
    return ak.shifted(std::max(u, z), jk - 1, spec.theta_null, tk);
  }
  const double su = ak.shifted(u, jk - 1, spec.theta_null, tk);
  const double mean = std::sqrt(ak.n[jk - 1] / akp.n[jp - 1]) * v + mean_rank_offset(spec, ak, jk);
  return std::max(su, mean);
}

double competitor_block(const CalibratedDesign& design, int k, int kp, int jp, double v, std::span<const double> t,
                        const PowerOptions& opt) {
  const DesignSpec& spec = design.spec;
  if (k == kp) throw ShapeError("competitor_block: k must differ from k'");
  const int m = spec.adding_stage[kp] + jp;
  if (static_cast<int>(t.size()) < m) throw ShapeError("competitor_block: t too short");
  const int s = spec.adding_stage[k];
  if (s >= m) return 1.0;
  const ArmModel ak(spec, design.schedule, k);
  const auto tk = t.subspan(s);
  const ArmBounds& b = design.bounds[k];
  double sum = 0.0;
  for (int j = 1; j <= std::min(spec.stages[k], m - s); ++j) {
    std::vector<double> tau(ak.n.begin(), ak.n.begin() + j);
    Rectangle rect{std::vector<double>(j), std::vector<double>(j)};
    for (int c = 0; c + 1 < j; ++c) {
      rect.lower[c] = ak.shifted(b.lower[c], c, spec.theta_null, tk);
      rect.upper[c] = ak.shifted(b.upper[c], c, spec.theta_null, tk);
    }
    rect.lower[j - 1] = -kInf;
    rect.upper[j - 1] = s + j < m ? ak.shifted(b.lower[j - 1], j - 1, spec.theta_null, tk)
                                  : recommend_limit(design, k, j, kp, jp, v, t, opt.ranking);
    sum += markov_rect_prob(tau, rect);
  }
  return sum;
}

double power_term(const CalibratedDesign& design, int kp, int jp, GridCache& cache, const PowerOptions& opt) {
  const DesignSpec& spec = design.spec;
  if (kp < 0 || kp >= spec.arms) throw ShapeError("power_term: arm out of range");
  if (jp < 1 || jp > spec.stages[kp]) throw ShapeError("power_term: analysis out of range");
  if (!(opt.panel_width > 0.0)) throw ConfigError("power_term: panel width must be positive");
  const int m = spec.adding_stage[kp] + jp;
  const OuterGrid& grid = cache.grid(m);
  const std::size_t size = grid.size();
  const ArmModel own(spec, design.schedule, kp);
  const double th1 = spec.theta_interesting, th0 = spec.theta_null;

  // Competitors: futility-stop mass before period m (depends on t only) and
  // the analysis shared with period m, if any.
  struct Competitor {
    ArmModel arm;
    std::vector<double> fut;
    int sync = 0;
    double rank_ratio = 0.0, rank_offset = 0.0;
  };
  std::vector<Competitor> comps;
  for (int k = 0; k < spec.arms; ++k) {
    if (k == kp || spec.adding_stage[k] >= m) continue;
    Competitor c{ArmModel(spec, design.schedule, k), std::vector<double>(size, 0.0), analysis_at(spec, k, m)};
    const int last_fut = std::min(spec.stages[k], m - 1 - spec.adding_stage[k]);
    for (int j = 1; j <= last_fut; ++j) {
      const SubGrid& sub = cache.sub(m, c.arm.start, j);
      std::vector<double> v(sub.size());
      stage_probs(c.arm, design.bounds[k], j, th0, LastLimit::Futility, sub, v);
      for (std::size_t p = 0; p < size; ++p) c.fut[p] += v[sub.map[p]];
    }
    if (c.sync) {
      c.rank_ratio = std::sqrt(c.arm.n[c.sync - 1] / own.n[jp - 1]);
      c.rank_offset = mean_rank_offset(spec, c.arm, c.sync);
    }
    comps.push_back(std::move(c));
  }

  // Bridge of arm k' analyses 1..J'-1 given v_{J'}.
  const int od = jp - 1;
  std::vector<double> own_tau(od), own_f(od), own_g(od);
  for (int i = 0; i < od; ++i) {
    const double nj = own.n[jp - 1], ni = own.n[i];
    own_tau[i] = ni / (nj - ni);
    own_f[i] = std::sqrt(nj / (nj - ni));
    own_g[i] = std::sqrt(ni / nj);
  }

  const Rule1D gl = gauss_legendre_rule(10);
  std::vector<double> per_point(size, 0.0);

  parallel_blocks(size, kPointBlock, [&](std::size_t p0, std::size_t p1) {
    std::vector<double> t(m);
    // Items: one (point, v) pair per quadrature node of the v integral.
    std::vector<std::size_t> item_point;
    std::vector<double> item_v, item_w;
    std::vector<double> cuts;
    for (std::size_t p = p0; p < p1; ++p) {
      for (int d = 0; d < m; ++d) t[d] = grid.coord(d)[p];
      const std::span<const double> tw(t.data() + own.start, jp);
      const double lo = std::max(own.shifted(design.bounds[kp].upper[jp - 1], jp - 1, th1, tw), -kVMax);
      if (lo >= kVMax) continue;
      cuts.assign({lo, kVMax});
      for (const auto& c : comps) {
        if (!c.sync) continue;
        const std::span<const double> tk(t.data() + c.arm.start, c.sync);
        const double u = design.bounds[c.arm.arm].upper[c.sync - 1];
        double kink;
        if (opt.ranking == Ranking::ZStatistic) {
          kink = own.shifted(u, jp - 1, th1, tw);
        } else {
          kink = (c.arm.shifted(u, c.sync - 1, th0, tk) - c.rank_offset) / c.rank_ratio;
        }
        if (kink > lo && kink < kVMax) cuts.push_back(kink);
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        if (!(b > a)) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / opt.panel_width)));
        const double h = (b - a) / panels;
        for (int q = 0; q < panels; ++q) {
          const double mid = a + (q + 0.5) * h;
          for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
            const double v = mid + 0.5 * h * gl.nodes[g];
            item_point.push_back(p);
            item_v.push_back(v);
            item_w.push_back(0.5 * h * gl.weights[g] * norm_pdf(v));
          }
        }
      }
    }
    const std::size_t items = item_v.size();
    if (items == 0) return;
    std::vector<double> value(item_w);

    auto run = [&](std::span<const double> tau, std::vector<std::vector<double>>& lo,
                   std::vector<std::vector<double>>& hi, std::vector<double>& out) {
      const int d = static_cast<int>(tau.size());
      std::vector<const double*> lp(d), hp(d);
      for (int c = 0; c < d; ++c) {
        lp[c] = lo[c].data();
        hp[c] = hi[c].data();
      }
      out.resize(items);
      kernels::markov_rect(kernels::MarkovBatch{tau, lp.data(), hp.data(), items, out.data()});
    };

    std::vector<double> prob;
    if (od > 0) {
      std::vector<std::vector<double>> lo(od, std::vector<double>(items)), hi(od, std::vector<double>(items));
      std::size_t last = SIZE_MAX;
      std::vector<double> sl(od), su(od);
      for (std::size_t i = 0; i < items; ++i) {
        const std::size_t p = item_point[i];
        if (p != last) {
          for (int d = 0; d < m; ++d) t[d] = grid.coord(d)[p];
          const std::span<const double> tw(t.data() + own.start, jp);
          for (int c = 0; c < od; ++c) {
            sl[c] = own.shifted(design.bounds[kp].lower[c], c, th1, tw);
            su[c] = own.shifted(design.bounds[kp].upper[c], c, th1, tw);
          }
          last = p;
        }
        for (int c = 0; c < od; ++c) {
          lo[c][i] = own_f[c] * (sl[c] - item_v[i] * own_g[c]);
          hi[c][i] = own_f[c] * (su[c] - item_v[i] * own_g[c]);
        }
      }
      run(own_tau, lo, hi, prob);
      for (std::size_t i = 0; i < items; ++i) value[i] *= prob[i];
    }

    for (const auto& c : comps) {
      if (!c.sync) {
        for (std::size_t i = 0; i < items; ++i) value[i] *= c.fut[item_point[i]];
        continue;
      }
      const int d = c.sync;
      const ArmBounds& b = design.bounds[c.arm.arm];
      std::vector<std::vector<double>> lo(d, std::vector<double>(items)), hi(d, std::vector<double>(items));
      std::size_t last = SIZE_MAX;
      std::vector<double> sl(d), su(d);
      for (std::size_t i = 0; i < items; ++i) {
        const std::size_t p = item_point[i];
        if (p != last) {
          for (int q = 0; q < m; ++q) t[q] = grid.coord(q)[p];
          const std::span<const double> tk(t.data() + c.arm.start, d);
          for (int q = 0; q < d; ++q) {
            sl[q] = c.arm.shifted(b.lower[q], q, th0, tk);
            su[q] = c.arm.shifted(b.upper[q], q, th0, tk);
          }
          last = p;
        }
        for (int q = 0; q + 1 < d; ++q) {
          lo[q][i] = sl[q];
          hi[q][i] = su[q];
        }
        lo[d - 1][i] = -kInf;
        if (opt.ranking == Ranking::ZStatistic) {
          const std::span<const double> tw(t.data() + own.start, jp);
          const double z = own.z_of(item_v[i], jp - 1, th1, tw);
          const std::span<const double> tk(t.data() + c.arm.start, d);
          hi[d - 1][i] = c.arm.shifted(std::max(b.upper[d - 1], z), d - 1, th0, tk);
        } else {
          hi[d - 1][i] = std::max(su[d - 1], c.rank_ratio * item_v[i] + c.rank_offset);
        }
      }
      run(std::span<const double>(c.arm.n.data(), d), lo, hi, prob);
      for (std::size_t i = 0; i < items; ++i) value[i] *= c.fut[item_point[i]] + prob[i];
    }

    for (std::size_t i = 0; i < items; ++i) per_point[item_point[i]] += value[i];
  });

  double total = 0.0;
  for (std::size_t p = 0; p < size; ++p) total += grid.weights()[p] * per_point[p];
  if (!std::isfinite(total)) throw NumericError("power_term: non-finite result");
  return total;
}

PowerDecomposition power(const CalibratedDesign& design, int kp, GridCache& cache, const PowerOptions& opt) {
  PowerDecomposition out{kp, {}, 0.0};
  for (int j = 1; j <= design.spec.stages[kp]; ++j) {
    out.terms.push_back(power_term(design, kp, j, cache, opt));
    out.total += out.terms.back();
  }
  return out;
}

CalibratedDesign calibrated_design(const DesignSpec& spec, std::span<const double> n, GridCache& cache,
                                   const CalibrationOptions& opt) {
  CalibratedDesign d{spec, control_schedule(spec, n), {}, std::nullopt};
  const CalibrationResult res = calibrate_boundaries(spec, d.schedule, cache, opt);
  d.bounds = res.bounds;
  d.fwer = res.fwer;
  return d;
}

double fixed_sample_n(const DesignSpec& spec) {
  const double z = norm_quantile(1.0 - spec.alpha) + norm_quantile(1.0 - spec.beta);
  return 2.0 * spec.sigma * spec.sigma * z * z / (spec.theta_interesting * spec.theta_interesting);
}

SizingResult size_for_power(const DesignSpec& spec, GridCache& cache, const SizingOptions& opt) {
  if (!(spec.theta_interesting > 0.0)) throw ConfigError("size_for_power: theta_interesting must be positive");
  if (!(opt.eps_n > 0.0)) throw ConfigError("size_for_power: eps_n must be positive");
  const double target = 1.0 - spec.beta;
  const double max_n = 10.0 * fixed_sample_n(spec);
  constexpr double kMinN = 2.0;

  auto power_with = [&](const CalibratedDesign& base, const std::vector<double>& n, int k) {
    CalibratedDesign d = base;
    d.schedule = control_schedule(spec, n);
    return power(d, k, cache, opt.power).total;
  };
  auto solve_n = [&](const CalibratedDesign& base, std::vector<double> n, int k, bool common) {
    auto f = [&](double x) {
      if (common) {
        std::fill(n.begin(), n.end(), x);
      } else {
        n[k] = x;
      }
      return power_with(base, n, k);
    };
    const double start = common ? fixed_sample_n(spec) : n[k];
    const double lo = std::clamp(0.9 * start, kMinN, max_n), hi = std::clamp(1.1 * start, kMinN, max_n);
    try {
      return solve_monotone(f, target, lo, hi, opt.n_tol, kMinN, max_n, "sample size");
    } catch (const CalibrationError& e) {
      throw SizingError(std::string("size_for_power: power target not attainable: ") + e.what());
    }
  };

  // Boundaries depend on the sizes only through their ratios.
  std::vector<double> n(spec.arms, 1.0);
  CalibratedDesign design = calibrated_design(spec, n, cache, opt.calibration);
  std::fill(n.begin(), n.end(), solve_n(design, n, 0, true));

  SizingResult res;
  for (int it = 1;; ++it) {
    if (it > opt.max_iter) throw ConvergenceError("size_for_power: no convergence within max_iter iterations");
    const std::vector<double> prev = n;
    for (int k = 0; k < spec.arms; ++k) n[k] = solve_n(design, n, k, false);
    design = calibrated_design(spec, n, cache, opt.calibration);
    double change = 0.0;
    for (int k = 0; k < spec.arms; ++k) change = std::max(change, std::abs(n[k] - prev[k]));
    res.iterations = it;
    if (change < opt.eps_n) break;
  }
  res.continuous_n = n;
  if (opt.round) {
    for (auto& x : n) x = std::ceil(x);
    design = calibrated_design(spec, n, cache, opt.calibration);
  }
  res.design = design;
  for (int k = 0; k < spec.arms; ++k) res.power.push_back(power(design, k, cache, opt.power));
  return res;
}

}  // namespace ptd
