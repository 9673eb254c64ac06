// Scalar reference kernels. The AVX2 variants are checked against these.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels_impl.hpp"
#include "ptd/normal.hpp"

namespace ptd::kernels::detail {

void norm_cdf_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = ptd::norm_cdf(x[i]);
}

namespace {

// P(lower < rho*z + sd*e < upper) for e ~ N(0, 1).
inline double cond_interval(double lower, double upper, double rho, double sd, double z) {
  const double m = rho * z;
  const double d = ptd::norm_cdf((upper - m) / sd) - ptd::norm_cdf((lower - m) / sd);
  return d > 0.0 ? d : 0.0;
}

double markov_1(double l, double u) { return std::max(0.0, ptd::norm_cdf(u) - ptd::norm_cdf(l)); }

double markov_2(const MarkovPlan& plan, const double* l, const double* u) {
  const double a = clamp_limit(l[0]);
  const double b = clamp_limit(u[0]);
  if (!(a < b) || !(l[1] < u[1])) return 0.0;
  const int panels = plan.panels[0];
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double left = a + h * p;
    for (int g = 0; g < kPanelNodes; ++g) {
      const double z = left + 0.5 * h * (1.0 + kGlNodes[g]);
      acc += 0.5 * h * kGlWeights[g] * norm_pdf(z) *
             cond_interval(l[1], u[1], plan.rho[0], plan.sd[0], z);
    }
  }
  return std::max(acc, 0.0);
}

// Conditions on the middle coordinate; Z1 and Z3 are independent given Z2.
double markov_3(const MarkovPlan& plan, const double* l, const double* u) {
  const double a = clamp_limit(l[1]);
  const double b = clamp_limit(u[1]);
  if (!(a < b) || !(l[0] < u[0]) || !(l[2] < u[2])) return 0.0;
  const int panels = plan.panels[1];
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double left = a + h * p;
    for (int g = 0; g < kPanelNodes; ++g) {
      const double z = left + 0.5 * h * (1.0 + kGlNodes[g]);
      acc += 0.5 * h * kGlWeights[g] * norm_pdf(z) *
             cond_interval(l[0], u[0], plan.rho[0], plan.sd[0], z) *
             cond_interval(l[2], u[2], plan.rho[1], plan.sd[1], z);
    }
  }
  return std::max(acc, 0.0);
}

// Forward recursion of the marginal density over coordinates 1..d-1.
double markov_general(const MarkovPlan& plan, const double* l, const double* u) {
  const int d = plan.dims;
  for (int c = 0; c < d; ++c)
    if (!(l[c] < u[c])) return 0.0;

  std::vector<double> nodes, weights, dens;
  std::vector<double> next_nodes, next_weights, next_dens;
  auto build = [&](int c, std::vector<double>& zs, std::vector<double>& ws) {
    const double a = clamp_limit(l[c]);
    const double b = clamp_limit(u[c]);
    zs.clear();
    ws.clear();
    if (!(a < b)) return;
    const int panels = plan.panels[c];
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
      for (int g = 0; g < kPanelNodes; ++g) {
        zs.push_back(a + h * p + 0.5 * h * (1.0 + kGlNodes[g]));
        ws.push_back(0.5 * h * kGlWeights[g]);
      }
  };

  build(0, nodes, weights);
  dens.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) dens[i] = norm_pdf(nodes[i]);

  for (int c = 1; c < d - 1; ++c) {
    build(c, next_nodes, next_weights);
    next_dens.assign(next_nodes.size(), 0.0);
    const double rho = plan.rho[c - 1];
    const double sd = plan.sd[c - 1];
    for (std::size_t j = 0; j < next_nodes.size(); ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        acc += weights[i] * dens[i] * norm_pdf((next_nodes[j] - rho * nodes[i]) / sd);
      next_dens[j] = acc / sd;
    }
    nodes.swap(next_nodes);
    weights.swap(next_weights);
    dens.swap(next_dens);
  }

  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    acc += weights[i] * dens[i] * cond_interval(l[d - 1], u[d - 1], plan.rho[d - 2], plan.sd[d - 2], nodes[i]);
  return std::max(acc, 0.0);
}

}  // namespace

double markov_point_scalar(const MarkovPlan& plan, const MarkovBatch& batch, std::size_t p) {
  double l[kMaxMarkovDims];
  double u[kMaxMarkovDims];
  for (int c = 0; c < plan.dims; ++c) {
    l[c] = batch.lower[c][p];
    u[c] = batch.upper[c][p];
  }
  switch (plan.dims) {
    case 1:
      return markov_1(l[0], u[0]);
    case 2:
      return markov_2(plan, l, u);
    case 3:
      return markov_3(plan, l, u);
    default:
      return markov_general(plan, l, u);
  }
}

void markov_rect_scalar(const MarkovPlan& plan, const MarkovBatch& batch) {
  for (std::size_t p = 0; p < batch.count; ++p) batch.out[p] = markov_point_scalar(plan, batch, p);
}

}  // namespace ptd::kernels::detail
