// AVX2 + FMA variants. This translation unit is compiled with
// -mavx2 -mfma; nothing here may run unless the dispatcher confirmed
// CPU support.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "cohortlab/kernels.hpp"

namespace cohortlab::kernels::avx2 {

namespace {

inline double hadd(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

double sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  double s = hadd(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  double s = hadd(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sumsq(const double* x, std::size_t n) { return dot(x, x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double gather_subtract(double* x, const std::int32_t* gid, const double* g, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(gid + i));
    const __m256d vg = _mm256_i32gather_pd(g, idx, 8);
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), vg));
    vmax = _mm256_max_pd(vmax, _mm256_andnot_pd(sign_mask, vg));
  }
  __m128d lo = _mm256_castpd256_pd128(vmax);
  __m128d hi = _mm256_extractf128_pd(vmax, 1);
  lo = _mm_max_pd(lo, hi);
  double max_abs = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) {
    const double v = g[gid[i]];
    x[i] -= v;
    max_abs = std::max(max_abs, std::fabs(v));
  }
  return max_abs;
}

void gather_subtract_mul(double* x, const std::int32_t* gid, const double* g,
                         const double* t, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(gid + i));
    const __m256d vg = _mm256_i32gather_pd(g, idx, 8);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(x + i, _mm256_fnmadd_pd(vg, _mm256_loadu_pd(t + i), vx));
  }
  for (; i < n; ++i) x[i] -= g[gid[i]] * t[i];
}

}  // namespace cohortlab::kernels::avx2

#endif  // x86_64
