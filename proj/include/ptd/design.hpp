#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ptd {

enum class Shape { Triangular, Pocock, OBF };

std::string_view shape_name(Shape s);
/// Accepts "triangular"/"tri", "pocock"/"po", "obf". Throws ConfigError.
Shape parse_shape(std::string_view name);

/// Pre-planned platform trial. Arm k (0-based here) joins at control stage
/// adding_stage[k] and has stages[k] analyses.
struct DesignSpec {
  int arms = 1;
  int initial_arms = 1;
  std::vector<int> adding_stage;
  std::vector<int> stages;
  int control_stages = 1;
  double sigma = 1.0;
  double theta_interesting = 0.0;
  double theta_null = 0.0;
  double alpha = 0.025;
  double beta = 0.2;
  double rate_per_month = 21.0;
  std::vector<Shape> shapes;
  /// Per-arm information ratios r_{k,j}; empty means r_{k,j} = j.
  std::vector<std::vector<double>> ratios;

  /// Fills defaults (ratios) and checks every invariant; throws ConfigError.
  void validate();
  std::vector<double> ratio(int k) const;
  int max_stages() const;
};

/// Patient counts implied by per-arm first-stage sizes.
struct Schedule {
  std::vector<double> n;                    // n_k
  std::vector<std::vector<double>> active;  // n_{k,j}, cumulative
  std::vector<double> control;              // n_{0,j}, cumulative
  std::vector<double> increments;           // control patients in period j

  double control_before(int stage) const { return stage == 0 ? 0.0 : control[stage - 1]; }
  /// Concurrent controls for arm k at its analysis j (1-based j).
  double concurrent(const DesignSpec& spec, int k, int j) const;
  double max_n() const;
};

/// Control period size = largest per-stage size among arms recruiting in it.
Schedule control_schedule(const DesignSpec& spec, std::span<const double> n);

struct ArmBounds {
  Shape shape = Shape::Triangular;
  double a = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// (lower, upper) for the given shape at scale a.
std::pair<std::vector<double>, std::vector<double>> shape_bounds(Shape shape, double a, std::span<const double> r);
ArmBounds make_arm_bounds(Shape shape, double a, std::span<const double> r);

/// True mean differences per arm.
struct EffectConfig {
  std::vector<double> theta;
  std::string label;

  static EffectConfig global_null(int arms);
  /// theta_interesting for arm k, theta_null elsewhere.
  static EffectConfig lfc(const DesignSpec& spec, int k);
};

double duration(double patients, double rate_per_month);

struct CalibratedDesign {
  DesignSpec spec;
  Schedule schedule;
  std::vector<ArmBounds> bounds;
  /// Set for designs whose boundaries were calibrated (not user supplied).
  std::optional<double> fwer;
};

}  // namespace ptd
