#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ptd/design.hpp"
#include "ptd/outer_grid.hpp"
#include "ptd/simulator.hpp"

namespace ptd {

/// Ways of running the trial when the second arm joins at a control count
/// other than planned. Maximum total sample size is always held fixed.
enum class Approach {
  MoveInterim = 1,  // arm 1's first interim moves to the add time, original bounds
  Recalibrate = 2,  // as MoveInterim, bounds re-derived for the realized ratios
  KeepTiming = 3,   // analyses stay at the planned totals; allocation switches at the add time
};

Approach parse_approach(int value);

struct DeviationPlan {
  SimPlan plan;
  /// Analytic counterpart where the engines can represent the plan
  /// (MoveInterim and Recalibrate).
  std::optional<CalibratedDesign> design;
};

/// Planned add point: control patients recruited when arm 2 was due to join.
double planned_add_point(const CalibratedDesign& design);

/// Plan for arm 2 joining after `add_n0` control patients. Only two-arm designs
/// with the second arm joining at control stage 1 are supported.
DeviationPlan deviation_plan(const CalibratedDesign& design, Approach approach, double add_n0, GridCache& cache,
                             const CalibrationOptions& calib = {});

struct DeviationRow {
  double add_point = 0.0;
  int approach = 0;
  std::string theta_label;
  std::string metric;  // fwer, power_k, reject_k, expected_n
  Estimate value;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::string error;  // set when the point could not be evaluated
};

struct DeviationStudyOptions {
  std::vector<Approach> approaches{Approach::MoveInterim, Approach::Recalibrate, Approach::KeepTiming};
  std::vector<double> add_points;
  std::vector<EffectConfig> thetas;  // empty means H_G, LFC_1, ..., LFC_K
  std::size_t replicates = 1'000'000;
  std::uint64_t seed = 1;
  Ranking ranking = Ranking::TreatmentMean;
  CalibrationOptions calibration;
};

/// Every (approach, add point, theta) cell is simulated with the same seed.
/// A point that cannot be planned or recalibrated yields one row with `error`
/// set and the study continues.
std::vector<DeviationRow> deviation_study(const CalibratedDesign& design, const DeviationStudyOptions& opt,
                                          GridCache& cache);

/// Splits `total` into integers proportional to `weights` (largest remainder).
std::vector<long long> largest_remainder(long long total, const std::vector<double>& weights);

}  // namespace ptd
