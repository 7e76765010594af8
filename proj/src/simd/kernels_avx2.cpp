// AVX2/FMA variants of the inner-loop primitives. This translation unit is
// the only one compiled with -mavx2 -mfma; it must not be entered unless
// detail::avx2_supported() returned true.

#include "bgk/simd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace bgk::simd::detail {

bool avx2_compiled_in() { return true; }

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}
}  // namespace

double dot_avx2(const double* w, const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(x + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i), acc0);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += w[i] * x[i];
  return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

void dot2_avx2(const double* w, const double* xr, const double* xi,
               std::size_t n, double& out_re, double& out_im) {
  __m256d ar = _mm256_setzero_pd();
  __m256d ai = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d wv = _mm256_loadu_pd(w + i);
    ar = _mm256_fmadd_pd(wv, _mm256_loadu_pd(xr + i), ar);
    ai = _mm256_fmadd_pd(wv, _mm256_loadu_pd(xi + i), ai);
  }
  double tr = 0.0, ti = 0.0;
  for (; i < n; ++i) {
    tr += w[i] * xr[i];
    ti += w[i] * xi[i];
  }
  out_re = hsum(ar) + tr;
  out_im = hsum(ai) + ti;
}

std::complex<double> cdot_avx2(const double* cr, const double* ci,
                               const double* ur, const double* ui,
                               std::size_t n) {
  __m256d are = _mm256_setzero_pd();
  __m256d aim = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vcr = _mm256_loadu_pd(cr + i);
    __m256d vci = _mm256_loadu_pd(ci + i);
    __m256d vur = _mm256_loadu_pd(ur + i);
    __m256d vui = _mm256_loadu_pd(ui + i);
    are = _mm256_fmadd_pd(vcr, vur, are);
    are = _mm256_fnmadd_pd(vci, vui, are);
    aim = _mm256_fmadd_pd(vcr, vui, aim);
    aim = _mm256_fmadd_pd(vci, vur, aim);
  }
  double re = hsum(are), im = hsum(aim);
  for (; i < n; ++i) {
    re += cr[i] * ur[i] - ci[i] * ui[i];
    im += cr[i] * ui[i] + ci[i] * ur[i];
  }
  return {re, im};
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  return hsum(acc) + tail;
}

}  // namespace bgk::simd::detail

#else

namespace bgk::simd::detail {

bool avx2_compiled_in() { return false; }

double dot_avx2(const double* w, const double* x, std::size_t n) {
  return dot_scalar(w, x, n);
}
void dot2_avx2(const double* w, const double* xr, const double* xi,
               std::size_t n, double& out_re, double& out_im) {
  dot2_scalar(w, xr, xi, n, out_re, out_im);
}
std::complex<double> cdot_avx2(const double* cr, const double* ci,
                               const double* ur, const double* ui,
                               std::size_t n) {
  return cdot_scalar(cr, ci, ur, ui, n);
}
void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  axpy_scalar(a, x, y, n);
}
double sum_avx2(const double* x, std::size_t n) { return sum_scalar(x, n); }

}  // namespace bgk::simd::detail

#endif
