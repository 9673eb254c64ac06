#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ptd/quadrature.hpp"

namespace ptd {

/// Tensor points whose product weight falls below this are dropped.
inline constexpr double kDefaultPrune = 1e-15;

/// Projection of an OuterGrid onto a contiguous block of its dimensions:
/// the distinct projected points plus, for every grid point, the index of
/// its projection.
struct SubGrid {
  int first = 0;
  int len = 0;
  std::vector<std::vector<double>> coord;  // coord[d][q], d < len
  std::vector<std::uint32_t> map;          // grid point -> q
  std::size_t size() const { return count; }
  std::size_t count = 1;
};

/// Pruned tensor-product Gauss-Hermite rule in coordinate-major layout, used
/// for the outer integrals over standardized control increments.
class OuterGrid {
 public:
  OuterGrid(int nodes_per_dim, int dims, double prune = kDefaultPrune, std::size_t budget = kDefaultGridBudget);

  int dims() const { return dims_; }
  int nodes_per_dim() const { return nodes_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& coord(int d) const { return coord_[d]; }
  /// Weight mass removed by pruning.
  double dropped_mass() const { return dropped_; }

  SubGrid project(int first, int len) const;

 private:
  int nodes_ = 0;
  int dims_ = 0;
  std::vector<double> weights_;
  std::vector<std::vector<double>> coord_;
  std::vector<std::vector<std::uint8_t>> index_;
  double dropped_ = 0.0;
};

}  // namespace ptd

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace ptd {

/// Lazily built grids and projections for one node count; shared by every
/// engine evaluation so calibration loops never rebuild them.
class GridCache {
 public:
  explicit GridCache(int nodes_per_dim = 32, double prune = kDefaultPrune) : nodes_(nodes_per_dim), prune_(prune) {}

  int nodes_per_dim() const { return nodes_; }
  const OuterGrid& grid(int dims);
  const SubGrid& sub(int dims, int first, int len);

 private:
  int nodes_;
  double prune_;
  std::mutex mu_;
  std::map<int, std::unique_ptr<OuterGrid>> grids_;
  std::map<std::tuple<int, int, int>, std::unique_ptr<SubGrid>> subs_;
};

/// values[map[p]] for every grid point p.
std::vector<double> broadcast(const SubGrid& sub, const std::vector<double>& values);

}  // namespace ptd
