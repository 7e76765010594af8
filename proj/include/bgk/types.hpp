#pragma once

#include <Eigen/Core>
#include <complex>

namespace bgk {

using C = std::complex<double>;

// Complex dimension is at most 3 throughout; real states (position +
// velocity) are at most 12 wide. Fixed-capacity Eigen types keep the hot
// paths allocation-free.
constexpr int kMaxDim = 3;

using CPoint = Eigen::Matrix<C, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using CMat = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxDim, 1>;
using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2 * kMaxDim, 2 * kMaxDim>;
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4 * kMaxDim, 1>;

// Identification C^n = R^2n: x[2k] = Re z_k, x[2k+1] = Im z_k.
inline RVec to_real(const CPoint& z) {
  RVec x(2 * z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    x[2 * k] = z[k].real();
    x[2 * k + 1] = z[k].imag();
  }
  return x;
}

inline CPoint to_complex(const RVec& x) {
  CPoint z(x.size() / 2);
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = C(x[2 * k], x[2 * k + 1]);
  return z;
}

inline CPoint cpoint(std::initializer_list<C> vals) {
  CPoint z(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (const C& v : vals) z[i++] = v;
  return z;
}

}  // namespace bgk
