#pragma once

#include <span>
#include <vector>

#include "ptd/design.hpp"
#include "ptd/error_engine.hpp"
#include "ptd/outer_grid.hpp"

namespace ptd {

/// What "largest test statistic" means when two arms cross their upper bounds
/// at the same calendar analysis.
enum class Ranking {
  TreatmentMean,  // larger treatment mean wins (the u-dot display)
  ZStatistic,     // larger Z wins
};

struct PowerOptions {
  Ranking ranking = Ranking::TreatmentMean;
  /// Widest Gauss-Legendre panel used for the v integral (standard units).
  double panel_width = 3.0;
};

struct PowerDecomposition {
  int arm = 0;
  std::vector<double> terms;  // Pi_{k',1..J_k'}
  double total = 0.0;
};

/// Pi_{k',J'} under LFC_{k'}: no rejection before analysis J' of arm k', arm
/// k' rejected and recommended at J' (J' is 1-based).
double power_term(const CalibratedDesign& design, int kp, int jp, GridCache& cache, const PowerOptions& opt = {});

PowerDecomposition power(const CalibratedDesign& design, int kp, GridCache& cache, const PowerOptions& opt = {});

/// gamma_{k,J'} at one point: probability that arm k neither rejects before
/// analysis J' of arm k' nor beats k' at a shared analysis, given v = v_{J'}
/// and the full control-increment vector t (length >= s(k') + J').
double competitor_block(const CalibratedDesign& design, int k, int kp, int jp, double v, std::span<const double> t,
                        const PowerOptions& opt = {});

/// Same-analysis ranking threshold for arm k on its own v scale (u-dot).
double recommend_limit(const CalibratedDesign& design, int k, int jk, int kp, int jp, double v,
                       std::span<const double> t, Ranking ranking);

struct SizingOptions {
  double eps_n = 0.05;
  int max_iter = 50;
  /// Root tolerance for each per-arm n solve, in patients.
  double n_tol = 0.01;
  /// Round n up and recalibrate at the end.
  bool round = true;
  CalibrationOptions calibration;
  PowerOptions power;
};

struct SizingResult {
  CalibratedDesign design;
  std::vector<double> continuous_n;
  std::vector<PowerDecomposition> power;
  int iterations = 0;
};

/// Schedule for n plus boundaries from calibrate_boundaries.
CalibratedDesign calibrated_design(const DesignSpec& spec, std::span<const double> n, GridCache& cache,
                                   const CalibrationOptions& opt = {});

/// Per-arm sample size so every arm reaches power 1 - beta under its LFC,
/// alternating n solves with boundary recalibration.
SizingResult size_for_power(const DesignSpec& spec, GridCache& cache, const SizingOptions& opt = {});

/// Per-arm size of the two-arm fixed-sample z-test with the same alpha, beta.
double fixed_sample_n(const DesignSpec& spec);

}  // namespace ptd
