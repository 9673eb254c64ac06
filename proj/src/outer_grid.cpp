#include "ptd/outer_grid.hpp"

#include <algorithm>
#include <sstream>

#include "ptd/error.hpp"

namespace ptd {

OuterGrid::OuterGrid(int nodes_per_dim, int dims, double prune, std::size_t budget)
    : nodes_(nodes_per_dim), dims_(dims), coord_(dims), index_(dims) {
  if (nodes_per_dim < 2 || nodes_per_dim > 256) throw ShapeError("OuterGrid: nodes_per_dim must be in 2..256");
  if (dims < 0 || dims > 8) throw ShapeError("OuterGrid: dims must be in 0..8");
  const Rule1D rule = gauss_hermite_rule(nodes_per_dim);

  // Depth-first enumeration in lexicographic order; weights are below one so a
  // partial product under the threshold prunes the whole subtree.
  std::vector<int> idx(dims, 0);
  std::vector<double> partial(dims + 1, 1.0);
  double kept = 0.0;
  int d = 0;
  if (dims == 0) {
    weights_.push_back(1.0);
    return;
  }
  for (;;) {
    if (idx[d] == nodes_per_dim) {
      if (d == 0) break;
      idx[d] = 0;
      --d;
      ++idx[d];
      continue;
    }
    const double w = partial[d] * rule.weights[idx[d]];
    if (w < prune) {
      ++idx[d];
      continue;
    }
    partial[d + 1] = w;
    if (d + 1 < dims) {
      ++d;
      continue;
    }
    if (weights_.size() >= budget) {
      std::ostringstream msg;
      msg << "OuterGrid: more than " << budget << " points at " << nodes_per_dim << " nodes in " << dims << " dims";
      throw CapacityError(msg.str());
    }
    weights_.push_back(w);
    kept += w;
    for (int c = 0; c < dims; ++c) {
      coord_[c].push_back(rule.nodes[idx[c]]);
      index_[c].push_back(static_cast<std::uint8_t>(idx[c]));
    }
    ++idx[d];
  }
  dropped_ = std::max(0.0, 1.0 - kept);
}

SubGrid OuterGrid::project(int first, int len) const {
  if (first < 0 || len < 0 || first + len > dims_) throw ShapeError("OuterGrid::project: window outside the grid");
  SubGrid sub;
  sub.first = first;
  sub.len = len;
  sub.coord.assign(len, {});
  sub.map.assign(size(), 0);
  if (len == 0) return sub;

  std::vector<std::uint64_t> keys(size());
  for (std::size_t p = 0; p < size(); ++p) {
    std::uint64_t key = 0;
    for (int c = 0; c < len; ++c) key = (key << 8) | index_[first + c][p];
    keys[p] = key;
  }
  std::vector<std::uint64_t> distinct = keys;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  sub.count = distinct.size();

  const Rule1D rule = gauss_hermite_rule(nodes_);
  for (int c = 0; c < len; ++c) {
    sub.coord[c].resize(distinct.size());
    const int shift = 8 * (len - 1 - c);
    for (std::size_t q = 0; q < distinct.size(); ++q) sub.coord[c][q] = rule.nodes[(distinct[q] >> shift) & 0xff];
  }
  for (std::size_t p = 0; p < size(); ++p)
    sub.map[p] = static_cast<std::uint32_t>(std::lower_bound(distinct.begin(), distinct.end(), keys[p]) - distinct.begin());
  return sub;
}

}  // namespace ptd

namespace ptd {

const OuterGrid& GridCache::grid(int dims) {
  std::lock_guard lock(mu_);
  auto& slot = grids_[dims];
  if (!slot) slot = std::make_unique<OuterGrid>(nodes_, dims, prune_);
  return *slot;
}

const SubGrid& GridCache::sub(int dims, int first, int len) {
  const OuterGrid& g = grid(dims);
  std::lock_guard lock(mu_);
  auto& slot = subs_[{dims, first, len}];
  if (!slot) slot = std::make_unique<SubGrid>(g.project(first, len));
  return *slot;
}

std::vector<double> broadcast(const SubGrid& sub, const std::vector<double>& values) {
  std::vector<double> out(sub.map.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = values[sub.map[p]];
  return out;
}

}  // namespace ptd
