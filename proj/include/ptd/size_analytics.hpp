#pragma once

#include <vector>

#include "ptd/design.hpp"
#include "ptd/outer_grid.hpp"
#include "ptd/power_engine.hpp"

namespace ptd {

/// One trial outcome in the enumeration: arm k concludes at its analysis
/// stop[k] (1-based) with an efficacy or futility verdict, ignoring the
/// other arms' efficacy stops.
struct OutcomeCell {
  std::vector<int> stop;
  std::vector<bool> efficacy;
  double prob = 0.0;
  double total_n = 0.0;
  std::vector<double> arm_n;
  double control_n = 0.0;
};

/// Discrete distribution on sorted support points.
struct Pmf {
  std::vector<double> support;
  std::vector<double> prob;

  double mean() const;
  double mass() const;
  std::vector<double> cdf() const;
};

struct SampleSizePMF {
  Pmf total;
  std::vector<Pmf> arms;
  Pmf control;
};

std::vector<OutcomeCell> outcome_cells(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache);

/// Groups cells by total (and per-arm, control) sample size.
SampleSizePMF sample_size_pmf(const std::vector<OutcomeCell>& cells, int arms);

double expected_n_enumeration(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache);

/// Stopping probabilities of the four-part decomposition.
struct EfficientBreakdown {
  std::vector<double> control_stop;          // P(control ends at period j0)
  std::vector<std::vector<double>> arm_end;  // P(arm k ends at its analysis j), Xi + Lambda
  double expected_n = 0.0;
};

EfficientBreakdown expected_n_breakdown(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache);
double expected_n_efficient(const CalibratedDesign& design, const EffectConfig& theta, GridCache& cache);

struct ScenarioChars {
  EffectConfig theta;
  double expected_n = 0.0;
  double expected_n_enumeration = 0.0;
  double expected_t = 0.0;
  SampleSizePMF pmf;
};

struct OperatingChars {
  double fwer = 0.0;
  std::vector<PowerDecomposition> power;  // under LFC_k for each arm
  double max_n = 0.0;
  double max_t = 0.0;
  std::vector<ScenarioChars> scenarios;  // H_G, LFC_1, ..., LFC_K
};

OperatingChars operating_chars(const CalibratedDesign& design, GridCache& cache, const PowerOptions& opt = {});

}  // namespace ptd
