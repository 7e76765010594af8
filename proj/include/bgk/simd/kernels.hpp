#pragma once

#include <complex>
#include <cstddef>
#include <string>

// Data-parallel inner loops used by the series-kernel evaluators and the
// quasi-Monte-Carlo moment accumulation. Every primitive has a scalar
// reference implementation and an AVX2 variant; the active one is picked
// at runtime from CPUID (overridable with BGK_SIMD=scalar|avx2). The two
// paths are equivalence-tested against each other in tests/test_simd.cpp.
namespace bgk::simd {

enum class Isa { Scalar, Avx2 };

// ISA selected at process start. Honors the BGK_SIMD env var.
Isa active_isa();
std::string isa_name(Isa isa);

// sum_i w[i]*x[i]
double dot(const double* w, const double* x, std::size_t n);

// Weighted accumulation of a split-complex vector with real weights:
// out_re = sum w[i]*xr[i], out_im = sum w[i]*xi[i].
void dot2(const double* w, const double* xr, const double* xi, std::size_t n,
          double& out_re, double& out_im);

// Complex dot with split storage: sum (cr+i*ci)[k] * (ur+i*ui)[k].
std::complex<double> cdot(const double* cr, const double* ci, const double* ur,
                          const double* ui, std::size_t n);

// y[i] += a*x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// sum_i x[i]
double sum(const double* x, std::size_t n);

namespace detail {
double dot_scalar(const double* w, const double* x, std::size_t n);
void dot2_scalar(const double* w, const double* xr, const double* xi,
                 std::size_t n, double& out_re, double& out_im);
std::complex<double> cdot_scalar(const double* cr, const double* ci,
                                 const double* ur, const double* ui,
                                 std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
double sum_scalar(const double* x, std::size_t n);

double dot_avx2(const double* w, const double* x, std::size_t n);
void dot2_avx2(const double* w, const double* xr, const double* xi,
               std::size_t n, double& out_re, double& out_im);
std::complex<double> cdot_avx2(const double* cr, const double* ci,
                               const double* ur, const double* ui,
                               std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
double sum_avx2(const double* x, std::size_t n);

bool avx2_compiled_in();
bool avx2_supported();
}  // namespace detail

}  // namespace bgk::simd
