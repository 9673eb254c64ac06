#include "ptd/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ptd/error.hpp"
#include "ptd/kernels.hpp"
#include "ptd/normal.hpp"
#include "ptd/quadrature.hpp"

namespace ptd {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPsdTol = 1e-10;

// Cholesky factor that tolerates semi-definite input: a pivot below kPsdTol
// is treated as zero provided the remaining column vanishes too.
bool cholesky(int d, const std::vector<double>& a, std::vector<double>& l) {
  l.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int j = 0; j < d; ++j) {
    double s = a[j * d + j];
    for (int k = 0; k < j; ++k) s -= l[j * d + k] * l[j * d + k];
    if (s < -kPsdTol) return false;
    const double pivot = s > kPsdTol ? std::sqrt(s) : 0.0;
    l[j * d + j] = pivot;
    for (int i = j + 1; i < d; ++i) {
      double t = a[i * d + j];
      for (int k = 0; k < j; ++k) t -= l[i * d + k] * l[j * d + k];
      if (pivot == 0.0) {
        if (std::abs(t) > 1e-7) return false;
        l[i * d + j] = 0.0;
      } else {
        l[i * d + j] = t / pivot;
      }
    }
  }
  return true;
}

void check_rect(const CorrelationMatrix& corr, const Rectangle& rect) {
  const auto d = static_cast<std::size_t>(corr.dim());
  if (rect.lower.size() != d || rect.upper.size() != d)
    throw ShapeError("mvn_rect_prob: rectangle dimension does not match the correlation matrix");
}

double bvn_rect(double a1, double b1, double a2, double b2, double r) {
  return bvn_upper(a1, a2, r) - bvn_upper(b1, a2, r) - bvn_upper(a1, b2, r) + bvn_upper(b1, b2, r);
}

// Separation of variables (Genz 1992) over a randomized Richtmyer lattice with
// the baker's transform.
double sov_lattice(const CorrelationMatrix& corr, const Rectangle& rect, const MvnOptions& opt) {
  const int d = corr.dim();
  std::vector<double> l;
  if (!cholesky(d, corr.entries(), l)) throw MatrixDomainError("mvn_rect_prob: matrix is not positive semi-definite");

  static constexpr double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  std::vector<double> gen(d - 1);
  for (int i = 0; i + 1 < d; ++i) gen[i] = std::sqrt(kPrimes[i % 16]) + (i / 16);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr int kShifts = 12;

  std::vector<double> y(d);
  auto sample = [&](std::span<const double> w) {
    double f = 1.0;
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int k = 0; k < i; ++k) s += l[i * d + k] * y[k];
      const double lii = l[i * d + i];
      double lo, hi;
      if (lii > 0.0) {
        lo = norm_cdf((rect.lower[i] - s) / lii);
        hi = norm_cdf((rect.upper[i] - s) / lii);
      } else {
        const bool inside = rect.lower[i] <= s && s <= rect.upper[i];
        lo = 0.0;
        hi = inside ? 1.0 : 0.0;
      }
      const double width = hi - lo;
      if (width <= 0.0) return 0.0;
      f *= width;
      if (i + 1 < d) {
        double q = lo + w[i] * width;
        q = std::clamp(q, 1e-300, 1.0 - 1e-16);
        y[i] = lii > 0.0 ? norm_quantile(q) : 0.0;
      }
    }
    return f;
  };

  std::vector<double> shift(d - 1), w(d - 1);
  std::vector<double> shift_means(kShifts);
  std::size_t n = 1000;
  std::size_t evals = 0;
  double estimate = 0.0;
  for (;;) {
    double mean = 0.0;
    for (int s = 0; s < kShifts; ++s) {
      for (auto& v : shift) v = unif(rng);
      double acc = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        for (int i = 0; i + 1 < d; ++i) {
          const double u = std::fmod(static_cast<double>(k) * gen[i] + shift[i], 1.0);
          w[i] = std::abs(2.0 * u - 1.0);
        }
        acc += sample(w);
      }
      shift_means[s] = acc / static_cast<double>(n);
      mean += shift_means[s];
    }
    evals += n * kShifts;
    mean /= kShifts;
    double var = 0.0;
    for (double m : shift_means) var += (m - mean) * (m - mean);
    const double se = std::sqrt(var / (kShifts * (kShifts - 1.0)));
    estimate = mean;
    if (3.0 * se <= opt.tol) break;
    if (evals >= opt.max_evals) break;
    n = static_cast<std::size_t>(n * 1.5);
  }
  return std::clamp(estimate, 0.0, 1.0);
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(int dim, std::vector<double> entries) : dim_(dim), entries_(std::move(entries)) {
  if (dim < 1 || entries_.size() != static_cast<std::size_t>(dim) * dim)
    throw ShapeError("CorrelationMatrix: entries must be a dim x dim matrix");
  for (int i = 0; i < dim; ++i) {
    if (std::abs((*this)(i, i) - 1.0) > kSymTol) throw MatrixDomainError("CorrelationMatrix: diagonal must be 1");
    for (int j = 0; j < dim; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < -1.0 - kSymTol || v > 1.0 + kSymTol)
        throw MatrixDomainError("CorrelationMatrix: entry outside [-1, 1]");
      if (std::abs(v - (*this)(j, i)) > kSymTol) throw MatrixDomainError("CorrelationMatrix: not symmetric");
    }
  }
  std::vector<double> l;
  if (!cholesky(dim, entries_, l)) throw MatrixDomainError("CorrelationMatrix: not positive semi-definite");
}

CorrelationMatrix CorrelationMatrix::identity(int dim) {
  std::vector<double> e(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) e[i * dim + i] = 1.0;
  return CorrelationMatrix(dim, std::move(e));
}

CorrelationMatrix CorrelationMatrix::markov(std::span<const double> tau) {
  const int d = static_cast<int>(tau.size());
  std::vector<double> e(static_cast<std::size_t>(d) * d, 1.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) e[i * d + j] = e[j * d + i] = std::sqrt(tau[i] / tau[j]);
  return CorrelationMatrix(d, std::move(e));
}

double bvn_upper(double h, double k, double r) {
  if (h == HUGE_VAL || k == HUGE_VAL) return 0.0;
  if (h == -HUGE_VAL) return k == -HUGE_VAL ? 1.0 : norm_sf(k);
  if (k == -HUGE_VAL) return norm_sf(h);
  if (r == 0.0) return norm_sf(h) * norm_sf(k);

  static const Rule1D gl6 = gauss_legendre_rule(6);
  static const Rule1D gl12 = gauss_legendre_rule(12);
  static const Rule1D gl20 = gauss_legendre_rule(20);
  const Rule1D& gl = std::abs(r) < 0.3 ? gl6 : (std::abs(r) < 0.75 ? gl12 : gl20);
  const double tp = 2.0 * std::numbers::pi;
  double hk = h * k;
  double bvn = 0.0;

  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r) / 2.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double sn = std::sin(asr * (1.0 + gl.nodes[i]));
      bvn += gl.weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    bvn = bvn * asr / tp + norm_sf(h) * norm_sf(k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(r) < 1.0) {
      const double as = 1.0 - r * r;
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double dd = (12.0 - hk) / 80.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0) bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - dd * bs) / 3.0 + c * dd * as * as);
      if (hk > -100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(tp) * norm_cdf(-b / a);
        bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - dd * bs) / 3.0);
      }
      a /= 2.0;
      double sum = 0.0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double xs = (a * (1.0 + gl.nodes[i])) * (a * (1.0 + gl.nodes[i]));
        asr = -(bs / xs + hk) / 2.0;
        if (asr <= -100.0) continue;
        const double sp = 1.0 + c * xs * (1.0 + 5.0 * dd * xs);
        const double rs = std::sqrt(1.0 - xs);
        const double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
        sum += gl.weights[i] * std::exp(asr) * (sp - ep);
      }
      bvn = (a * sum - bvn) / tp;
    }
    if (r > 0.0) {
      bvn += norm_sf(std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      const double band = h < 0.0 ? norm_cdf(k) - norm_cdf(h) : norm_sf(h) - norm_sf(k);
      bvn = band - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

double mvn_rect_prob(const CorrelationMatrix& corr, const Rectangle& rect, const MvnOptions& opt) {
  check_rect(corr, rect);
  if (!(opt.tol > 0.0)) throw ShapeError("mvn_rect_prob: tol must be positive");
  const int d = corr.dim();
  for (int i = 0; i < d; ++i)
    if (!(rect.lower[i] < rect.upper[i])) return 0.0;
  if (d == 1) return norm_interval(rect.lower[0], rect.upper[0]);
  if (d == 2)
    return std::clamp(bvn_rect(rect.lower[0], rect.upper[0], rect.lower[1], rect.upper[1], corr(0, 1)), 0.0, 1.0);
  return sov_lattice(corr, rect, opt);
}

double markov_rect_prob(std::span<const double> tau, const Rectangle& rect) {
  const std::size_t d = tau.size();
  if (rect.lower.size() != d || rect.upper.size() != d)
    throw ShapeError("markov_rect_prob: rectangle dimension does not match tau");
  std::vector<const double*> lo(d), hi(d);
  for (std::size_t c = 0; c < d; ++c) {
    lo[c] = &rect.lower[c];
    hi[c] = &rect.upper[c];
  }
  double out = 0.0;
  kernels::MarkovBatch batch{tau, lo.data(), hi.data(), 1, &out};
  kernels::markov_rect(batch);
  return out;
}

}  // namespace ptd
