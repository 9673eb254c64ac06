#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ptd/design.hpp"
#include "ptd/outer_grid.hpp"
#include "ptd/power_engine.hpp"

namespace ptd {

enum class ComparatorKind {
  SeparateFWER,      // one trial per arm, each at 1 - (1 - alpha)^(1/K)
  SeparateNoFWER,    // one trial per arm, each at alpha
  SimultaneousMAMS,  // all arms start together, common number of stages
  NaiveSameN,        // single-arm design reused unadjusted for every arm
  NaiveSameMaxN,     // as NaiveSameN, later stages shrunk to keep its max(N)
};

std::string_view comparator_name(ComparatorKind kind);
ComparatorKind parse_comparator(std::string_view name);

struct ComparatorSpec {
  ComparatorKind kind = ComparatorKind::SeparateFWER;
  /// Stages per arm for SimultaneousMAMS.
  int stages = 0;
};

/// Operating characteristics of a comparator, in the layout of the proposed
/// design's table: scenarios are H_G, LFC_1, ..., LFC_K.
struct ComparatorResult {
  std::string name;
  ComparatorKind kind = ComparatorKind::SeparateFWER;
  std::vector<CalibratedDesign> designs;      // one per trial
  std::vector<std::vector<double>> per_stage;  // patients per arm per stage
  std::vector<int> stages;
  double fwer = 0.0;
  std::vector<double> power;
  double max_n = 0.0;
  double max_t = 0.0;
  std::vector<double> expected_n;
  std::vector<double> expected_t;
  double wait_months = 0.0;  // added to every duration (simultaneous start)
};

/// `proposed` is the sized platform design the comparator competes with; its
/// spec supplies effects, errors and shapes, and its schedule the waiting time
/// before a simultaneous start.
ComparatorResult build_comparator(const CalibratedDesign& proposed, const ComparatorSpec& spec, GridCache& cache,
                                  const SizingOptions& sizing = {});

/// Patients recruited before the last arm joins.
double waiting_patients(const CalibratedDesign& proposed);

}  // namespace ptd
