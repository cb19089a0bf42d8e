#include <cmath>

#include "crackdual/kernels.hpp"

#if defined(CRACKDUAL_X86)
#include <immintrin.h>
#endif

namespace crackdual::kernels::avx2 {

namespace {

// t^{k/4} through square roots and repeated multiplication.
struct QuarterPower {
  int root = 0;  // 0: t, 1: sqrt t, 2: sqrt sqrt t
  int n = 0;     // multiplicity of the base
  bool invert = false;

  explicit QuarterPower(int k) {
    const int m = k < 0 ? -k : k;
    invert = k < 0;
    if (m % 4 == 0) {
      root = 0;
      n = m / 4;
    } else if (m % 2 == 0) {
      root = 1;
      n = m / 2;
    } else {
      root = 2;
      n = m;
    }
  }

  double operator()(double t) const {
    double b = t;
    if (root >= 1) b = std::sqrt(b);
    if (root == 2) b = std::sqrt(b);
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= b;
    return invert ? 1.0 / r : r;
  }

#if defined(CRACKDUAL_X86)
  __attribute__((target("avx2,fma"))) __m256d operator()(__m256d t) const {
    __m256d b = t;
    if (root >= 1) b = _mm256_sqrt_pd(b);
    if (root == 2) b = _mm256_sqrt_pd(b);
    __m256d r = _mm256_set1_pd(1.0);
    for (int i = 0; i < n; ++i) r = _mm256_mul_pd(r, b);
    return invert ? _mm256_div_pd(_mm256_set1_pd(1.0), r) : r;
  }
#endif
};

bool quarter(double x, int& k) {
  const double q = 4.0 * x;
  if (std::abs(q) > 32.0 || q != std::round(q)) return false;
  k = static_cast<int>(q);
  return true;
}

}  // namespace

bool supports_exponent(double p) {
  int k;
  return quarter(0.5 * (p - 2.0), k) && quarter(0.5 * p, k);
}

#if defined(CRACKDUAL_X86)

__attribute__((target("avx2,fma"))) double power_cells(std::span<const double> gx,
                                                       std::span<const double> gy,
                                                       std::span<const double> w, double p,
                                                       double eps, std::span<double> scale) {
  int k;
  if (!quarter(0.5 * (p - 2.0), k)) return scalar::power_cells(gx, gy, w, p, eps, scale);
  const QuarterPower pw(k);
  const double eps2 = eps * eps;
  const double epsp = std::pow(eps, p);
  const double zero_scale = (p == 2.0) ? 1.0 : 0.0;
  const std::size_t n = gx.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  const __m256d veps2 = _mm256_set1_pd(eps2), vepsp = _mm256_set1_pd(epsp);
  const __m256d vzero = _mm256_setzero_pd(), vzs = _mm256_set1_pd(zero_scale);
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(gx.data() + i);
    const __m256d y = _mm256_loadu_pd(gy.data() + i);
    const __m256d ww = _mm256_loadu_pd(w.data() + i);
    const __m256d t = _mm256_fmadd_pd(x, x, _mm256_fmadd_pd(y, y, veps2));
    const __m256d is0 = _mm256_cmp_pd(t, vzero, _CMP_EQ_OQ);
    const __m256d te = pw(t);
    const __m256d s = _mm256_blendv_pd(_mm256_mul_pd(ww, te), _mm256_mul_pd(ww, vzs), is0);
    _mm256_storeu_pd(scale.data() + i, s);
    const __m256d e = _mm256_mul_pd(ww, _mm256_fmsub_pd(t, te, vepsp));
    acc = _mm256_add_pd(acc, _mm256_blendv_pd(e, vzero, is0));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    const double t = std::fma(gx[i], gx[i], std::fma(gy[i], gy[i], eps2));
    if (t == 0.0) {
      scale[i] = w[i] * zero_scale;
      continue;
    }
    const double te = pw(t);
    scale[i] = w[i] * te;
    sum += w[i] * std::fma(t, te, -epsp);
  }
  return sum / p;
}

__attribute__((target("avx2,fma"))) double power_sum(std::span<const double> dx,
                                                     std::span<const double> dy,
                                                     std::span<const double> w, double p) {
  int k;
  if (!quarter(0.5 * p, k)) return scalar::power_sum(dx, dy, w, p);
  const QuarterPower pw(k);
  const std::size_t n = dx.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  const __m256d vzero = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(dx.data() + i);
    const __m256d y = _mm256_loadu_pd(dy.data() + i);
    const __m256d ww = _mm256_loadu_pd(w.data() + i);
    const __m256d t = _mm256_fmadd_pd(x, x, _mm256_mul_pd(y, y));
    const __m256d is0 = _mm256_cmp_pd(t, vzero, _CMP_EQ_OQ);
    const __m256d v = _mm256_mul_pd(ww, pw(t));
    acc = _mm256_add_pd(acc, _mm256_blendv_pd(v, vzero, is0));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    const double t = std::fma(dx[i], dx[i], dy[i] * dy[i]);
    if (t > 0.0) sum += w[i] * pw(t);
  }
  return sum;
}

#else

double power_cells(std::span<const double> gx, std::span<const double> gy,
                   std::span<const double> w, double p, double eps, std::span<double> scale) {
  return scalar::power_cells(gx, gy, w, p, eps, scale);
}

double power_sum(std::span<const double> dx, std::span<const double> dy,
                 std::span<const double> w, double p) {
  return scalar::power_sum(dx, dy, w, p);
}

#endif

}  // namespace crackdual::kernels::avx2
