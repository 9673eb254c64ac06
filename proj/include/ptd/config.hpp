#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ptd/comparators.hpp"
#include "ptd/deviation.hpp"
#include "ptd/design.hpp"
#include "ptd/power_engine.hpp"

namespace ptd {

struct NumericsConfig {
  int nodes_per_dim = 32;
  double mvn_tol = 1e-6;      // general integrator (PWER cross-check)
  double eps_boundary = 1e-5;  // Algorithm 1 stopping tolerance
  double eps_n = 0.05;         // Algorithm 2 stopping tolerance
};

struct SimulateSection {
  std::size_t replicates = 1'000'000;
  std::uint64_t seed = 1;
  std::vector<Approach> approaches;
  std::vector<double> add_points;  // empty: no deviation study
};

/// Parsed config file. Keys:
///   arms{K, K_star, S, J_per_arm, shapes}
///   effects{theta_interesting, theta_null, sigma}
///   errors{alpha, power[, ranking]}
///   recruitment{rate_per_month}
///   numerics{nodes_per_dim, mvn_tol, eps_boundary, eps_n}
///   simulate{replicates, seed[, approaches, add_points]}
///   compare{comparators[, mams_stages]}
/// Every section but arms is optional; unknown keys are rejected. Effects
/// accept a number or a string "log(x)" / "-log(x)".
struct Config {
  DesignSpec spec;
  Ranking ranking = Ranking::TreatmentMean;
  NumericsConfig numerics;
  SimulateSection simulate;
  std::vector<ComparatorSpec> compare;

  CalibrationOptions calibration() const;
  SizingOptions sizing() const;
};

/// Throws ConfigError on malformed input.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace ptd
