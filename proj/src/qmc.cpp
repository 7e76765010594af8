#include "bgk/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace bgk {

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
}

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 1 || dim > 12) throw std::invalid_argument("HaltonSequence: dim out of range");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int d = 0; d < dim; ++d) {
    int b = kPrimes[d];
    bases_.push_back(b);
    std::vector<int> perm(static_cast<std::size_t>(b));
    std::iota(perm.begin(), perm.end(), 0);
    // keep 0 fixed so the sequence stays in (0,1); shuffle the rest
    std::shuffle(perm.begin() + 1, perm.end(), rng);
    perms_.push_back(std::move(perm));
  }
}

void HaltonSequence::point(std::uint64_t i, double* out) const {
  // index offset skips the degenerate initial runs of the raw sequence
  std::uint64_t idx = i + 17;
  for (int d = 0; d < dim_; ++d) {
    const int b = bases_[static_cast<std::size_t>(d)];
    const auto& perm = perms_[static_cast<std::size_t>(d)];
    double f = 1.0, x = 0.0;
    std::uint64_t k = idx;
    while (k > 0) {
      f /= b;
      x += f * perm[static_cast<std::size_t>(k % static_cast<std::uint64_t>(b))];
      k /= static_cast<std::uint64_t>(b);
    }
    out[d] = x;
  }
}

std::vector<double> HaltonSequence::point(std::uint64_t i) const {
  std::vector<double> p(static_cast<std::size_t>(dim_));
  point(i, p.data());
  return p;
}

namespace {

// Acklam-style inverse normal CDF; ~1e-9 absolute accuracy, plenty for
// direction generation.
double inv_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace

std::vector<std::vector<double>> sphere_directions(int dim, int count,
                                                   std::uint64_t seed) {
  std::vector<std::vector<double>> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (dim == 2) {
    // exact uniform angles on S^1
    for (int k = 0; k < count; ++k) {
      double th = 2.0 * M_PI * (k + 0.5) / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  HaltonSequence seq(dim, seed);
  std::vector<double> u(static_cast<std::size_t>(dim));
  for (int k = 0; k < count; ++k) {
    seq.point(static_cast<std::uint64_t>(k), u.data());
    std::vector<double> g(static_cast<std::size_t>(dim));
    double norm2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      g[static_cast<std::size_t>(d)] = inv_normal_cdf(u[static_cast<std::size_t>(d)]);
      norm2 += g[static_cast<std::size_t>(d)] * g[static_cast<std::size_t>(d)];
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (double& v : g) v *= inv;
    dirs.push_back(std::move(g));
  }
  return dirs;
}

}  // namespace bgk
