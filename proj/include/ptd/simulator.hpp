#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ptd/design.hpp"
#include "ptd/power_engine.hpp"
#include "ptd/size_analytics.hpp"

namespace ptd {

/// Recruitment between two consecutive looks. Counts are patients per group;
/// analysis[k] is arm k's analysis number (1-based) at the end of the
/// segment, or 0.
struct SimSegment {
  double control = 0.0;
  std::vector<double> arm;
  std::vector<int> analysis;
};

struct SimArm {
  int first_segment = 0;  // arm starts recruiting here; earlier controls are not concurrent
  std::vector<double> lower;
  std::vector<double> upper;
};

/// What a simulated trial follows: recruitment per segment and per-arm
/// boundaries. Arms that are dropped stop recruiting.
struct SimPlan {
  std::vector<SimSegment> segments;
  std::vector<SimArm> arms;

  void validate() const;
};

SimPlan plan_from_design(const CalibratedDesign& design);

struct SimConfig {
  SimPlan plan;
  EffectConfig theta;
  double sigma = 1.0;
  std::size_t replicates = 1'000'000;
  std::uint64_t seed = 1;
  Ranking ranking = Ranking::TreatmentMean;
};

struct Estimate {
  double estimate = 0.0;
  double se = 0.0;
};

struct SimReport {
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  Estimate fwer;                    // some H_0k with theta_k <= 0 rejected
  std::vector<Estimate> reject;     // H_0k rejected
  std::vector<Estimate> recommend;  // arm k rejected and ranked first
  Estimate expected_n;
  Pmf pmf;
};

/// Monte Carlo trials on the sufficient statistics (per-segment group sums).
/// Replicates are drawn in fixed blocks, each from its own generator seeded
/// by (seed, block), so results do not depend on the thread count.
SimReport simulate(const SimConfig& config);

Estimate proportion(std::size_t hits, std::size_t n);

}  // namespace ptd
