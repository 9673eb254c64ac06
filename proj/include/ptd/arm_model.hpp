#pragma once

#include <span>
#include <vector>

#include "ptd/design.hpp"
#include "ptd/kernels.hpp"
#include "ptd/outer_grid.hpp"

namespace ptd {

/// Arm k's test statistics rewritten on the scale of its own standardized
/// cumulative mean v_j (a Brownian motion in n_{k,j}) given the control
/// increments t. Z_{k,j} < c is equivalent to v_j < shifted(c, j, theta, t):
///
///   shifted = c * sqrt(1 + n_j / D_j) + sqrt(n_j) / D_j * sum_i t_{s+i} sqrt(d_{s+i})
///             - theta * sqrt(n_j) / sigma
///
/// with D_j the concurrent control count and d the control increments.
struct ArmModel {
  int arm = 0;
  int start = 0;   // s(k)
  int stages = 0;  // J_k
  double sigma = 1.0;
  std::vector<double> n;      // n_{k,j}
  std::vector<double> delta;  // D_j
  std::vector<double> scale;  // sqrt(1 + n_j / D_j)
  std::vector<std::vector<double>> tcoef;  // tcoef[j][i] for i <= j (0-based)
  std::vector<double> theta_coef;          // sqrt(n_j) / sigma

  ArmModel(const DesignSpec& spec, const Schedule& schedule, int k);

  /// t holds t_{s+1}, t_{s+2}, ... (at least j + 1 entries); j is 0-based.
  double shifted(double c, int j, double theta, std::span<const double> t) const;
  /// Inverse map: the Z value whose threshold on v equals v.
  double z_of(double v, int j, double theta, std::span<const double> t) const;
};

/// How the last coordinate of an analysis-j rectangle is bounded. All earlier
/// analyses use the continuation band (l, u).
enum class LastLimit {
  Futility,    // Z_j < l_j
  Efficacy,    // Z_j > u_j
  BelowUpper,  // Z_j < u_j
  Continue,    // l_j < Z_j < u_j
};

/// P(arm continues through analyses 1..j-1 and the last-limit event at j)
/// at every point of `sub`, which must project onto t_{s+1..s+j} (j 1-based).
void stage_probs(const ArmModel& arm, const ArmBounds& bounds, int j, double theta, LastLimit last,
                 const SubGrid& sub, std::span<double> out, const kernels::KernelTable& table = kernels::active());

/// Same probability with raw boundaries and no control noise: the Markov
/// structure with times 1 / I_j, I_j = 1/n_j + 1/D_j (used by PWER).
double stage_prob_raw(const ArmModel& arm, const ArmBounds& bounds, int j, LastLimit last);

}  // namespace ptd
