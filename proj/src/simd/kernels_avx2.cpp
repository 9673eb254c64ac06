// AVX2/FMA variants. Four points per register; dimensions above three fall
// back to the scalar recursion point by point.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"
#include "ptd/normal.hpp"

namespace ptd::kernels::detail {

namespace {

using V = __m256d;

inline V splat(double x) { return _mm256_set1_pd(x); }

// exp for x in [-708, 708]: range reduction by ln 2 and a degree-13 Taylor
// polynomial on |r| <= ln2 / 2.
inline V vexp(V x) {
  x = _mm256_max_pd(_mm256_min_pd(x, splat(708.0)), splat(-708.0));
  const V n = _mm256_round_pd(_mm256_mul_pd(x, splat(1.4426950408889634)),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  V r = _mm256_fnmadd_pd(n, splat(0.693145751953125), x);
  r = _mm256_fnmadd_pd(n, splat(1.42860682030941723212e-6), r);

  static constexpr double inv_fact[14] = {1.0,
                                          1.0,
                                          1.0 / 2,
                                          1.0 / 6,
                                          1.0 / 24,
                                          1.0 / 120,
                                          1.0 / 720,
                                          1.0 / 5040,
                                          1.0 / 40320,
                                          1.0 / 362880,
                                          1.0 / 3628800,
                                          1.0 / 39916800,
                                          1.0 / 479001600,
                                          1.0 / 6227020800.0};
  V p = splat(inv_fact[13]);
  for (int i = 12; i >= 0; --i) p = _mm256_fmadd_pd(p, r, splat(inv_fact[i]));

  const V magic = splat(6755399441055744.0);  // 1.5 * 2^52
  __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                _mm256_castpd_si256(magic));
  ni = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(ni));
}

// Rational erfc approximations on [0, 0.5), [0.5, 1.5), [1.5, 2.5), [2.5, 4.5)
// and [4.5, 28). Coefficients are the 53-bit set used by Boost.Math.
alignas(32) constexpr double kErfY[5] = {1.044948577880859375, 0.405935764312744140625,
                                         0.50672817230224609375, 0.5405750274658203125,
                                         0.5579090118408203125};
alignas(32) constexpr double kErfP[5][7] = {
    {0.0834305892146531832907, -0.338165134459360935041, -0.0509990735146777432841,
     -0.00772758345802133288487, -0.000322780120964605683831, 0.0, 0.0},
    {-0.098090592216281240205, 0.178114665841120341155, 0.191003695796775433986,
     0.0888900368967884466578, 0.0195049001251218801359, 0.00180424538297014223957, 0.0},
    {-0.0243500476207698441272, 0.0386540375035707201728, 0.04394818964209516296,
     0.0175679436311802092299, 0.00323962406290842133584, 0.000235839115596880717416, 0.0},
    {0.00295276716530971662634, 0.0137384425896355332126, 0.00840807615555585383007,
     0.00212825620914618649141, 0.000250269961544794627958, 0.113212406648847561139e-4, 0.0},
    {0.00628057170626964891937, 0.0175389834052493308818, -0.212652252872804219852,
     -0.687717681153649930619, -2.5518551727311523996, -3.22729451764143718517,
     -2.8175401114513378771}};
alignas(32) constexpr double kErfQ[5][7] = {
    {1.0, 0.455004033050794024546, 0.0875222600142252549554, 0.00858571925074406212772,
     0.000370900071787748000569, 0.0, 0.0},
    {1.0, 1.84759070983002217845, 1.42628004845511324508, 0.578052804889902404909,
     0.12385097467900864233, 0.0113385233577001411017, 0.337511472483094676155e-5},
    {1.0, 1.53991494948552447182, 0.982403709157920235114, 0.325732924782444448493,
     0.0563921837420478160373, 0.00410369723978904575884, 0.0},
    {1.0, 1.04217814166938418171, 0.442597659481563127003, 0.0958492726301061423444,
     0.0105982906484876531489, 0.000479411269521714493907, 0.0},
    {1.0, 2.79257750980575282228, 11.0567237927800161565, 15.930646027911794143,
     22.9367376522880577224, 13.5064170191802889145, 5.48409182238641741584}};
alignas(32) constexpr double kErfShift[5] = {0.0, 0.5, 1.5, 3.5, 0.0};

// erfc(z) for z >= 0.
inline V verfc_pos(V z) {
  z = _mm256_min_pd(z, splat(27.0));
  __m256i idx = _mm256_setzero_si256();
  const double cuts[4] = {0.5, 1.5, 2.5, 4.5};
  for (double c : cuts) {
    const __m256i ge = _mm256_castpd_si256(_mm256_cmp_pd(z, splat(c), _CMP_GE_OQ));
    idx = _mm256_sub_epi64(idx, ge);  // ge lanes are all-ones (-1)
  }
  const V zz = _mm256_mul_pd(z, z);
  const V shift = _mm256_i64gather_pd(kErfShift, idx, 8);
  V arg = _mm256_sub_pd(z, shift);
  const V is_small = _mm256_castsi256_pd(_mm256_cmpeq_epi64(idx, _mm256_setzero_si256()));
  const V is_large = _mm256_castsi256_pd(_mm256_cmpeq_epi64(idx, _mm256_set1_epi64x(4)));
  arg = _mm256_blendv_pd(arg, zz, is_small);
  arg = _mm256_blendv_pd(arg, _mm256_div_pd(splat(1.0), z), is_large);

  const __m256i row = _mm256_mul_epi32(idx, _mm256_set1_epi64x(7));
  V p = _mm256_i64gather_pd(&kErfP[0][6], row, 8);
  V q = _mm256_i64gather_pd(&kErfQ[0][6], row, 8);
  for (int i = 5; i >= 0; --i) {
    p = _mm256_fmadd_pd(p, arg, _mm256_i64gather_pd(&kErfP[0][i], row, 8));
    q = _mm256_fmadd_pd(q, arg, _mm256_i64gather_pd(&kErfQ[0][i], row, 8));
  }
  const V ratio = _mm256_add_pd(_mm256_i64gather_pd(kErfY, idx, 8), _mm256_div_pd(p, q));

  const V small = _mm256_fnmadd_pd(z, ratio, splat(1.0));
  const V safe_z = _mm256_max_pd(z, splat(0.25));
  const V tail = _mm256_div_pd(_mm256_mul_pd(ratio, vexp(_mm256_sub_pd(_mm256_setzero_pd(), zz))), safe_z);
  return _mm256_blendv_pd(tail, small, is_small);
}

inline V vnorm_cdf(V x) {
  x = _mm256_max_pd(_mm256_min_pd(x, splat(40.0)), splat(-40.0));
  const V z = _mm256_mul_pd(x, splat(-0.70710678118654752440));
  const V neg = _mm256_cmp_pd(z, _mm256_setzero_pd(), _CMP_LT_OQ);
  const V az = _mm256_andnot_pd(splat(-0.0), z);
  const V e = verfc_pos(az);
  const V full = _mm256_blendv_pd(e, _mm256_sub_pd(splat(2.0), e), neg);
  return _mm256_mul_pd(splat(0.5), full);
}

inline V vnorm_pdf(V x) {
  return _mm256_mul_pd(splat(kInvSqrt2Pi), vexp(_mm256_mul_pd(splat(-0.5), _mm256_mul_pd(x, x))));
}

inline V vclamp(V x) { return _mm256_max_pd(_mm256_min_pd(x, splat(kClamp)), splat(-kClamp)); }

inline V vcond_interval(V lower, V upper, V rho, V inv_sd, V z) {
  const V m = _mm256_mul_pd(rho, z);
  const V hi = vnorm_cdf(_mm256_mul_pd(_mm256_sub_pd(upper, m), inv_sd));
  const V lo = vnorm_cdf(_mm256_mul_pd(_mm256_sub_pd(lower, m), inv_sd));
  return _mm256_max_pd(_mm256_sub_pd(hi, lo), _mm256_setzero_pd());
}

inline V load(const double* row, std::size_t p) { return _mm256_loadu_pd(row + p); }

// Integrates coordinate `mid` by Gauss-Legendre panels; `sides` lists the
// neighbouring coordinates whose conditional intervals multiply the density.
template <int NSides>
void markov_conditioned(const MarkovPlan& plan, const MarkovBatch& batch, int mid,
                        const int (&side)[NSides], const int (&link)[NSides], std::size_t p) {
  const V a = vclamp(load(batch.lower[mid], p));
  const V b = vclamp(load(batch.upper[mid], p));
  V valid = _mm256_cmp_pd(a, b, _CMP_LT_OQ);
  V sl[NSides], su[NSides], rho[NSides], inv_sd[NSides];
  for (int s = 0; s < NSides; ++s) {
    sl[s] = load(batch.lower[side[s]], p);
    su[s] = load(batch.upper[side[s]], p);
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(sl[s], su[s], _CMP_LT_OQ));
    rho[s] = splat(plan.rho[link[s]]);
    inv_sd[s] = splat(1.0 / plan.sd[link[s]]);
  }
  const int panels = plan.panels[mid];
  const V h = _mm256_div_pd(_mm256_sub_pd(b, a), splat(static_cast<double>(panels)));
  const V half_h = _mm256_mul_pd(splat(0.5), h);
  V acc = _mm256_setzero_pd();
  for (int k = 0; k < panels; ++k) {
    const V left = _mm256_fmadd_pd(splat(static_cast<double>(k)), h, a);
    for (int g = 0; g < kPanelNodes; ++g) {
      const V z = _mm256_fmadd_pd(half_h, splat(1.0 + kGlNodes[g]), left);
      V f = vnorm_pdf(z);
      for (int s = 0; s < NSides; ++s) f = _mm256_mul_pd(f, vcond_interval(sl[s], su[s], rho[s], inv_sd[s], z));
      acc = _mm256_fmadd_pd(_mm256_mul_pd(half_h, splat(kGlWeights[g])), f, acc);
    }
  }
  acc = _mm256_max_pd(acc, _mm256_setzero_pd());
  _mm256_storeu_pd(batch.out + p, _mm256_and_pd(acc, valid));
}

}  // namespace

void norm_cdf_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, vnorm_cdf(_mm256_loadu_pd(x + i)));
  if (i < n) {
    alignas(32) double buf[4] = {0, 0, 0, 0};
    std::copy(x + i, x + n, buf);
    _mm256_store_pd(buf, vnorm_cdf(_mm256_load_pd(buf)));
    std::copy(buf, buf + (n - i), out + i);
  }
}

void markov_rect_avx2(const MarkovPlan& plan, const MarkovBatch& batch) {
  if (plan.dims > 3) {
    markov_rect_scalar(plan, batch);
    return;
  }
  std::size_t p = 0;
  for (; p + 4 <= batch.count; p += 4) {
    switch (plan.dims) {
      case 1: {
        const V l = load(batch.lower[0], p);
        const V u = load(batch.upper[0], p);
        const V d = _mm256_max_pd(_mm256_sub_pd(vnorm_cdf(u), vnorm_cdf(l)), _mm256_setzero_pd());
        _mm256_storeu_pd(batch.out + p, d);
        break;
      }
      case 2:
        markov_conditioned<1>(plan, batch, 0, {1}, {0}, p);
        break;
      default:
        markov_conditioned<2>(plan, batch, 1, {0, 2}, {0, 1}, p);
        break;
    }
  }
  for (; p < batch.count; ++p) batch.out[p] = markov_point_scalar(plan, batch, p);
}

}  // namespace ptd::kernels::detail
