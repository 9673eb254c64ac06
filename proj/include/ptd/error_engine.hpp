#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ptd/arm_model.hpp"
#include "ptd/design.hpp"
#include "ptd/mvn.hpp"
#include "ptd/outer_grid.hpp"

namespace ptd {

struct ShiftedLimits {
  int arm = 0;
  int analysis = 0;  // 1-based
  double lower = 0.0;
  double upper = 0.0;
};

/// l_{k,j}(theta) and u_{k,j}(theta) on arm k's standardized-mean scale; t is
/// the full control-increment vector t_1, t_2, ... (j is 1-based).
ShiftedLimits shifted_limits(const CalibratedDesign& design, int k, int j, double theta, std::span<const double> t);

/// Sum over analyses of P(arm k stops for futility at j | t) on the full
/// dims-dimensional grid (dims >= s(k) + J_k).
std::vector<double> arm_futility_factor(const DesignSpec& spec, const ArmModel& arm, const ArmBounds& bounds,
                                        double theta, GridCache& cache, int dims);

/// P(no hypothesis rejected | theta).
double non_rejection_prob(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache);
double fwer(const CalibratedDesign& design, GridCache& cache);

/// Pairwise error of arm k: rejection probability when no other arm can stop
/// the trial.
double pwer(const CalibratedDesign& design, int k);

/// pwer through the general lattice integrator instead of the Markov kernel.
double pwer_mvn(const CalibratedDesign& design, int k, const MvnOptions& opt = {});

/// How the family-wise error is split among arms. Calibration equalizes
/// arm_error across arms.
class SplitCriterion {
 public:
  virtual ~SplitCriterion() = default;
  virtual double arm_error(const CalibratedDesign& design, int k) const = 0;
};

class EqualPwer final : public SplitCriterion {
 public:
  double arm_error(const CalibratedDesign& design, int k) const override { return pwer(design, k); }
};

struct CalibrationOptions {
  double eps = 1e-5;
  int max_iter = 50;
  std::shared_ptr<const SplitCriterion> split = std::make_shared<EqualPwer>();
};

struct CalibrationResult {
  std::vector<ArmBounds> bounds;
  double fwer = 0.0;
  int iterations = 0;
};

/// Iterative boundary calibration: a common scale for FWER = alpha, then
/// alternate per-arm equal-error solves with a global rescale.
CalibrationResult calibrate_boundaries(const DesignSpec& spec, const Schedule& schedule, GridCache& cache,
                                       const CalibrationOptions& opt = {});

/// Root of f(x) = target for monotone f, starting from [lo, hi] and widening
/// geometrically (within (min_x, max_x)) until the target is bracketed.
double solve_monotone(const std::function<double(double)>& f, double target, double lo, double hi, double x_tol,
                      double min_x, double max_x, const char* what);

}  // namespace ptd
