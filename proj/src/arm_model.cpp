#include "ptd/arm_model.hpp"

#include <cmath>

#include "ptd/error.hpp"
#include "ptd/mvn.hpp"
#include "ptd/parallel.hpp"

namespace ptd {

ArmModel::ArmModel(const DesignSpec& spec, const Schedule& schedule, int k)
    : arm(k), start(spec.adding_stage[k]), stages(spec.stages[k]), sigma(spec.sigma) {
  n = schedule.active[k];
  for (int j = 0; j < stages; ++j) {
    const double d = schedule.concurrent(spec, k, j + 1);
    if (!(d > 0.0)) throw ScheduleError("arm has no concurrent controls at an analysis");
    delta.push_back(d);
    scale.push_back(std::sqrt(1.0 + n[j] / d));
    theta_coef.push_back(std::sqrt(n[j]) / sigma);
    std::vector<double> c;
    for (int i = 0; i <= j; ++i) c.push_back(std::sqrt(n[j]) * std::sqrt(schedule.increments[start + i]) / d);
    tcoef.push_back(std::move(c));
  }
}

double ArmModel::shifted(double c, int j, double theta, std::span<const double> t) const {
  double s = 0.0;
  for (int i = 0; i <= j; ++i) s += tcoef[j][i] * t[i];
  return c * scale[j] + s - theta * theta_coef[j];
}

double ArmModel::z_of(double v, int j, double theta, std::span<const double> t) const {
  double s = 0.0;
  for (int i = 0; i <= j; ++i) s += tcoef[j][i] * t[i];
  return (v - s + theta * theta_coef[j]) / scale[j];
}

namespace {

constexpr double kInf = HUGE_VAL;

void last_limits(const ArmBounds& b, int j, LastLimit last, double& lo, double& hi) {
  switch (last) {
    case LastLimit::Futility:
      lo = -kInf;
      hi = b.lower[j];
      return;
    case LastLimit::Efficacy:
      lo = b.upper[j];
      hi = kInf;
      return;
    case LastLimit::BelowUpper:
      lo = -kInf;
      hi = b.upper[j];
      return;
    case LastLimit::Continue:
      lo = b.lower[j];
      hi = b.upper[j];
      return;
  }
}

}  // namespace

void stage_probs(const ArmModel& arm, const ArmBounds& bounds, int j, double theta, LastLimit last,
                 const SubGrid& sub, std::span<double> out, const kernels::KernelTable& table) {
  if (j < 1 || j > arm.stages) throw ShapeError("stage_probs: analysis out of range");
  if (sub.first != arm.start || sub.len != j) throw ShapeError("stage_probs: sub-grid window does not match the analysis");
  const std::size_t count = sub.size();
  if (out.size() < count) throw ShapeError("stage_probs: output too short");

  // Raw limits per coordinate, before the t shift.
  std::vector<double> raw_lo(j), raw_hi(j);
  for (int c = 0; c + 1 < j; ++c) {
    raw_lo[c] = bounds.lower[c];
    raw_hi[c] = bounds.upper[c];
  }
  last_limits(bounds, j - 1, last, raw_lo[j - 1], raw_hi[j - 1]);

  parallel_blocks(count, 2048, [&](std::size_t lo_p, std::size_t hi_p) {
    const std::size_t m = hi_p - lo_p;
    std::vector<std::vector<double>> lo(j, std::vector<double>(m)), hi(j, std::vector<double>(m));
    for (int c = 0; c < j; ++c) {
      const double base_lo = raw_lo[c] * arm.scale[c] - theta * arm.theta_coef[c];
      const double base_hi = raw_hi[c] * arm.scale[c] - theta * arm.theta_coef[c];
      for (std::size_t p = 0; p < m; ++p) {
        double s = 0.0;
        for (int i = 0; i <= c; ++i) s += arm.tcoef[c][i] * sub.coord[i][lo_p + p];
        lo[c][p] = raw_lo[c] == -kInf ? -kInf : base_lo + s;
        hi[c][p] = raw_hi[c] == kInf ? kInf : base_hi + s;
      }
    }
    std::vector<const double*> lp(j), hp(j);
    for (int c = 0; c < j; ++c) {
      lp[c] = lo[c].data();
      hp[c] = hi[c].data();
    }
    kernels::MarkovBatch batch{std::span<const double>(arm.n.data(), j), lp.data(), hp.data(), m, out.data() + lo_p};
    kernels::markov_rect(table, batch);
  });
}

double stage_prob_raw(const ArmModel& arm, const ArmBounds& bounds, int j, LastLimit last) {
  if (j < 1 || j > arm.stages) throw ShapeError("stage_prob_raw: analysis out of range");
  std::vector<double> tau(j);
  Rectangle rect{std::vector<double>(j), std::vector<double>(j)};
  for (int c = 0; c < j; ++c) {
    tau[c] = 1.0 / (1.0 / arm.n[c] + 1.0 / arm.delta[c]);
    rect.lower[c] = bounds.lower[c];
    rect.upper[c] = bounds.upper[c];
  }
  last_limits(bounds, j - 1, last, rect.lower[j - 1], rect.upper[j - 1]);
  return markov_rect_prob(tau, rect);
}

}  // namespace ptd
