#include <cstdlib>
#include <cstring>

#include "bgk/simd/kernels.hpp"

namespace bgk::simd {

namespace detail {

bool avx2_supported() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Isa pick_isa() {
  if (const char* env = std::getenv("BGK_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_compiled_in() && avx2_supported())
      return Isa::Avx2;
    return Isa::Scalar;
  }
  return (avx2_compiled_in() && avx2_supported()) ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace
}  // namespace detail

Isa active_isa() {
  static const Isa isa = detail::pick_isa();
  return isa;
}

std::string isa_name(Isa isa) {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

double dot(const double* w, const double* x, std::size_t n) {
  return active_isa() == Isa::Avx2 ? detail::dot_avx2(w, x, n)
                                   : detail::dot_scalar(w, x, n);
}

void dot2(const double* w, const double* xr, const double* xi, std::size_t n,
          double& out_re, double& out_im) {
  if (active_isa() == Isa::Avx2)
    detail::dot2_avx2(w, xr, xi, n, out_re, out_im);
  else
    detail::dot2_scalar(w, xr, xi, n, out_re, out_im);
}

std::complex<double> cdot(const double* cr, const double* ci, const double* ur,
                          const double* ui, std::size_t n) {
  return active_isa() == Isa::Avx2 ? detail::cdot_avx2(cr, ci, ur, ui, n)
                                   : detail::cdot_scalar(cr, ci, ur, ui, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  if (active_isa() == Isa::Avx2)
    detail::axpy_avx2(a, x, y, n);
  else
    detail::axpy_scalar(a, x, y, n);
}

double sum(const double* x, std::size_t n) {
  return active_isa() == Isa::Avx2 ? detail::sum_avx2(x, n)
                                   : detail::sum_scalar(x, n);
}

}  // namespace bgk::simd
