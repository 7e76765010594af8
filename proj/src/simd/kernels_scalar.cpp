#include "bgk/simd/kernels.hpp"

namespace bgk::simd::detail {

double dot_scalar(const double* w, const double* x, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    acc0 += w[i] * x[i];
    acc1 += w[i + 1] * x[i + 1];
  }
  if (i < n) acc0 += w[i] * x[i];
  return acc0 + acc1;
}

void dot2_scalar(const double* w, const double* xr, const double* xi,
                 std::size_t n, double& out_re, double& out_im) {
  double ar = 0.0, ai = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ar += w[i] * xr[i];
    ai += w[i] * xi[i];
  }
  out_re = ar;
  out_im = ai;
}

std::complex<double> cdot_scalar(const double* cr, const double* ci,
                                 const double* ur, const double* ui,
                                 std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += cr[i] * ur[i] - ci[i] * ui[i];
    im += cr[i] * ui[i] + ci[i] * ur[i];
  }
  return {re, im};
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    acc0 += x[i];
    acc1 += x[i + 1];
  }
  if (i < n) acc0 += x[i];
  return acc0 + acc1;
}

}  // namespace bgk::simd::detail
