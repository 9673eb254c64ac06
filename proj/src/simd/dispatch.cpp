#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "ptd/error.hpp"

namespace ptd::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

namespace {

constexpr KernelTable kScalar{Isa::Scalar, detail::norm_cdf_scalar, detail::markov_rect_scalar};

#if defined(PTD_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, detail::norm_cdf_avx2, detail::markov_rect_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& choose() {
  const char* env = std::getenv("PTD_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return kScalar;
  if (const KernelTable* t = avx2()) return *t;
  return kScalar;
}

}  // namespace

const KernelTable& scalar() { return kScalar; }

const KernelTable* avx2() {
#if defined(PTD_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = choose();
  return table;
}

MarkovPlan plan_markov(const MarkovBatch& batch) {
  MarkovPlan plan;
  const int d = static_cast<int>(batch.times.size());
  if (d < 1 || d > kMaxMarkovDims) throw ShapeError("markov_rect: dimension must be in 1..8");
  plan.dims = d;
  for (int i = 0; i + 1 < d; ++i) {
    const double t0 = batch.times[i];
    const double t1 = batch.times[i + 1];
    if (!(t0 > 0.0) || !(t1 > t0)) throw MatrixDomainError("markov_rect: times must be positive and increasing");
    plan.rho[i] = std::sqrt(t0 / t1);
    plan.sd[i] = std::sqrt(1.0 - t0 / t1);
  }
  if (d == 1) return plan;

  // Coordinate integrated numerically: 0 for d = 2, the middle one for d = 3,
  // all but the last for the recursion.
  auto feature = [&](int c) {
    double w = 1.0;
    if (c >= 1) w = std::min(w, plan.sd[c - 1] / std::max(plan.rho[c - 1], 1e-300));
    if (c + 1 < d) w = std::min(w, plan.sd[c] / std::max(plan.rho[c], 1e-300));
    if (c >= 1 && d > 3) w = std::min(w, plan.sd[c - 1]);
    return w;
  };
  auto panels_for = [&](int c) {
    double width = 0.0;
    for (std::size_t p = 0; p < batch.count; ++p) {
      const double a = detail::clamp_limit(batch.lower[c][p]);
      const double b = detail::clamp_limit(batch.upper[c][p]);
      if (b > a) width = std::max(width, b - a);
    }
    const double panel = detail::kPanelWidth * feature(c);
    return std::max(1, static_cast<int>(std::ceil(width / panel - 1e-9)));
  };
  if (d == 2) {
    plan.panels[0] = panels_for(0);
  } else if (d == 3) {
    plan.panels[1] = panels_for(1);
  } else {
    for (int c = 0; c + 1 < d; ++c) plan.panels[c] = panels_for(c);
  }
  return plan;
}

void norm_cdf(std::span<const double> x, std::span<double> out) {
  if (out.size() < x.size()) throw ShapeError("norm_cdf: output shorter than input");
  active().norm_cdf(x.data(), out.data(), x.size());
}

void markov_rect(const KernelTable& table, const MarkovBatch& batch) {
  if (batch.count == 0) return;
  const MarkovPlan plan = plan_markov(batch);
  table.markov_rect(plan, batch);
}

void markov_rect(const MarkovBatch& batch) { markov_rect(active(), batch); }

}  // namespace ptd::kernels
