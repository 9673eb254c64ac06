#include "ptd/error_engine.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "ptd/error.hpp"

namespace ptd {

ShiftedLimits shifted_limits(const CalibratedDesign& design, int k, int j, double theta, std::span<const double> t) {
  const ArmModel arm(design.spec, design.schedule, k);
  if (j < 1 || j > arm.stages) throw ShapeError("shifted_limits: analysis out of range");
  if (static_cast<int>(t.size()) < arm.start + j) throw ShapeError("shifted_limits: t too short");
  const auto tw = t.subspan(arm.start);
  return {k, j, arm.shifted(design.bounds[k].lower[j - 1], j - 1, theta, tw),
          arm.shifted(design.bounds[k].upper[j - 1], j - 1, theta, tw)};
}

std::vector<double> arm_futility_factor(const DesignSpec& spec, const ArmModel& arm, const ArmBounds& bounds,
                                        double theta, GridCache& cache, int dims) {
  const std::size_t size = cache.grid(dims).size();
  std::vector<double> total(size, 0.0);
  for (int j = 1; j <= spec.stages[arm.arm]; ++j) {
    const SubGrid& sub = cache.sub(dims, arm.start, j);
    std::vector<double> v(sub.size());
    stage_probs(arm, bounds, j, theta, LastLimit::Futility, sub, v);
    for (std::size_t p = 0; p < size; ++p) total[p] += v[sub.map[p]];
  }
  return total;
}

double non_rejection_prob(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache) {
  const DesignSpec& spec = design.spec;
  if (static_cast<int>(theta.theta.size()) != spec.arms) throw ShapeError("non_rejection_prob: theta has wrong length");
  const int dims = spec.control_stages;
  const OuterGrid& grid = cache.grid(dims);
  std::vector<double> prod(grid.weights());
  for (int k = 0; k < spec.arms; ++k) {
    const ArmModel arm(spec, design.schedule, k);
    const auto f = arm_futility_factor(spec, arm, design.bounds[k], theta.theta[k], cache, dims);
    for (std::size_t p = 0; p < prod.size(); ++p) prod[p] *= f[p];
  }
  double sum = 0.0;
  for (double v : prod) sum += v;
  return sum;
}

double fwer(const CalibratedDesign& design, GridCache& cache) {
  return 1.0 - non_rejection_prob(design, EffectConfig::global_null(design.spec.arms), cache);
}

double pwer(const CalibratedDesign& design, int k) {
  const ArmModel arm(design.spec, design.schedule, k);
  double cont = 0.0;
  for (int j = 1; j <= arm.stages; ++j) cont += stage_prob_raw(arm, design.bounds[k], j, LastLimit::Futility);
  return 1.0 - cont;
}

double pwer_mvn(const CalibratedDesign& design, int k, const MvnOptions& opt) {
  const ArmModel arm(design.spec, design.schedule, k);
  const ArmBounds& b = design.bounds[k];
  constexpr double inf = std::numeric_limits<double>::infinity();
  double reject = 0.0;
  for (int j = 1; j <= arm.stages; ++j) {
    std::vector<double> tau;
    Rectangle rect;
    for (int i = 0; i < j; ++i) {
      tau.push_back(1.0 / (1.0 / arm.n[i] + 1.0 / arm.delta[i]));
      rect.lower.push_back(i + 1 < j ? b.lower[i] : b.upper[i]);
      rect.upper.push_back(i + 1 < j ? b.upper[i] : inf);
    }
    reject += mvn_rect_prob(CorrelationMatrix::markov(tau), rect, opt);
  }
  return reject;
}

double solve_monotone(const std::function<double(double)>& f, double target, double lo, double hi, double x_tol,
                      double min_x, double max_x, const char* what) {
  auto g = [&](double x) { return f(x) - target; };
  double glo = g(lo), ghi = g(hi);
  for (int widen = 0; glo * ghi > 0.0; ++widen) {
    if (widen > 60 || (lo <= min_x && hi >= max_x)) {
      std::ostringstream msg;
      msg << what << ": target " << target << " not bracketed; f(" << lo << ") = " << glo + target << ", f(" << hi
          << ") = " << ghi + target;
      throw CalibrationError(msg.str());
    }
    // Move whichever end is closer to the target outward.
    if (std::abs(glo) < std::abs(ghi)) {
      const double next = std::max(min_x, lo - (hi - lo));
      hi = lo;
      ghi = glo;
      lo = next;
      glo = g(lo);
    } else {
      const double next = std::min(max_x, hi + (hi - lo));
      lo = hi;
      glo = ghi;
      hi = next;
      ghi = g(hi);
    }
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto tol = [x_tol](double a, double b) { return std::abs(b - a) <= x_tol; };
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
  if (iters >= 200) throw ConvergenceError(std::string(what) + ": root solve did not converge");
  return 0.5 * (a + b);
}

namespace {

std::vector<ArmBounds> bounds_for(const DesignSpec& spec, const std::vector<double>& a) {
  std::vector<ArmBounds> out;
  for (int k = 0; k < spec.arms; ++k) out.push_back(make_arm_bounds(spec.shapes[k], a[k], spec.ratio(k)));
  return out;
}

}  // namespace

CalibrationResult calibrate_boundaries(const DesignSpec& spec, const Schedule& schedule, GridCache& cache,
                                       const CalibrationOptions& opt) {
  if (!(opt.eps > 0.0)) throw ConfigError("calibrate_boundaries: eps must be positive");
  CalibratedDesign d{spec, schedule, {}, std::nullopt};
  const double x_tol = opt.eps * 1e-3;
  constexpr double kMinA = 1e-3, kMaxA = 50.0;

  auto fwer_at = [&](const std::vector<double>& a) {
    d.bounds = bounds_for(spec, a);
    return fwer(d, cache);
  };
  // FWER decreases in every a_k.
  auto solve_scale = [&](const std::vector<double>& base) {
    auto f = [&](double c) {
      std::vector<double> a(base);
      for (auto& x : a) x *= c;
      return -fwer_at(a);
    };
    return solve_monotone(f, -spec.alpha, 1.0 / *std::max_element(base.begin(), base.end()),
                          4.0 / *std::min_element(base.begin(), base.end()), x_tol, kMinA, kMaxA, "FWER calibration");
  };

  std::vector<double> a(spec.arms, 1.0);
  const double a1 = solve_scale(a);
  for (auto& x : a) x = a1;

  CalibrationResult res;
  for (int it = 1;; ++it) {
    if (it > opt.max_iter) throw ConvergenceError("calibrate_boundaries: no convergence within max_iter iterations");
    const std::vector<double> prev = a;
    if (spec.arms > 1) {
      d.bounds = bounds_for(spec, a);
      const double target = opt.split->arm_error(d, 0);
      for (int k = 1; k < spec.arms; ++k) {
        auto f = [&](double ak) {
          std::vector<double> trial(a);
          trial[k] = ak;
          d.bounds = bounds_for(spec, trial);
          return -opt.split->arm_error(d, k);
        };
        a[k] = solve_monotone(f, -target, 1.0, 4.0, x_tol, kMinA, kMaxA, "equal arm-error calibration");
      }
    }
    const double c = solve_scale(a);
    for (auto& x : a) x *= c;
    double change = 0.0;
    for (int k = 0; k < spec.arms; ++k) change = std::max(change, std::abs(a[k] - prev[k]));
    res.iterations = it;
    if (change < opt.eps || spec.arms == 1) break;
  }
  res.bounds = bounds_for(spec, a);
  d.bounds = res.bounds;
  res.fwer = fwer(d, cache);
  return res;
}

}  // namespace ptd
