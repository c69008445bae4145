// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "sqr/simd.hpp"

namespace sqr::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(std::span<const double> a) noexcept {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a.data() + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double sum_squares(std::span<const double> a) noexcept { return dot(a, a); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, vy);
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

BandSums band_sums(std::span<const double> x, std::span<const double> r, double h) noexcept {
  const std::size_t n = x.size();
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d vnh = _mm256_set1_pd(-h);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d sx = _mm256_setzero_pd();
  __m256d sxx = _mm256_setzero_pd();
  __m256d sxr = _mm256_setzero_pd();
  __m256d su = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vr = _mm256_loadu_pd(r.data() + i);
    const __m256d absr = _mm256_andnot_pd(sign_mask, vr);
    const __m256d in_band = _mm256_cmp_pd(absr, vh, _CMP_LE_OQ);
    const __m256d upper = _mm256_cmp_pd(vr, vnh, _CMP_LT_OQ);
    const __m256d xb = _mm256_and_pd(in_band, vx);
    sx = _mm256_add_pd(sx, xb);
    sxx = _mm256_fmadd_pd(xb, vx, sxx);
    sxr = _mm256_fmadd_pd(xb, vr, sxr);
    su = _mm256_add_pd(su, _mm256_and_pd(upper, vx));
  }
  BandSums out{hsum(sx), hsum(sxx), hsum(sxr), hsum(su)};
  for (; i < n; ++i) {
    const double xi = x[i];
    const double ri = r[i];
    if (std::abs(ri) <= h) {
      out.sum_x_band += xi;
      out.sum_xx_band += xi * xi;
      out.sum_xr_band += xi * ri;
    } else if (ri < 0.0) {
      out.sum_x_upper += xi;
    }
  }
  return out;
}

}  // namespace sqr::simd::avx2
