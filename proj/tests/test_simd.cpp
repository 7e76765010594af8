#include <cmath>
#include <random>
#include <vector>

#include "bgk/simd/kernels.hpp"
#include "doctest.h"

using namespace bgk;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar and avx2 paths agree on random inputs") {
  if (!simd::detail::avx2_compiled_in() || !simd::detail::avx2_supported()) {
    MESSAGE("avx2 unavailable; scalar-only build");
    return;
  }
  std::mt19937_64 rng(1234);
  for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 8ul, 64ul, 1000ul, 1003ul}) {
    auto w = random_vec(n, rng);
    auto x = random_vec(n, rng);
    auto y = random_vec(n, rng);

    double ds = simd::detail::dot_scalar(w.data(), x.data(), n);
    double dv = simd::detail::dot_avx2(w.data(), x.data(), n);
    CHECK(std::abs(ds - dv) <= 1e-12 * (1.0 + std::abs(ds)));

    double sr, si, vr, vi;
    simd::detail::dot2_scalar(w.data(), x.data(), y.data(), n, sr, si);
    simd::detail::dot2_avx2(w.data(), x.data(), y.data(), n, vr, vi);
    CHECK(std::abs(sr - vr) <= 1e-12 * (1.0 + std::abs(sr)));
    CHECK(std::abs(si - vi) <= 1e-12 * (1.0 + std::abs(si)));

    auto cs = simd::detail::cdot_scalar(w.data(), x.data(), y.data(), x.data(), n);
    auto cv = simd::detail::cdot_avx2(w.data(), x.data(), y.data(), x.data(), n);
    CHECK(std::abs(cs - cv) <= 1e-12 * (1.0 + std::abs(cs)));

    auto y1 = y, y2 = y;
    simd::detail::axpy_scalar(0.37, x.data(), y1.data(), n);
    simd::detail::axpy_avx2(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

    CHECK(std::abs(simd::detail::sum_scalar(x.data(), n) - simd::detail::sum_avx2(x.data(), n)) <=
          1e-12 * (1.0 + static_cast<double>(n)));
  }
}

TEST_CASE("dispatch reports a valid isa") {
  auto isa = simd::active_isa();
  CHECK((isa == simd::Isa::Scalar || isa == simd::Isa::Avx2));
  CHECK(!simd::isa_name(isa).empty());
}

TEST_CASE("dot matches straightforward accumulation") {
  std::mt19937_64 rng(99);
  auto w = random_vec(257, rng);
  auto x = random_vec(257, rng);
  double expect = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) expect += w[i] * x[i];
  CHECK(simd::dot(w.data(), x.data(), w.size()) == doctest::Approx(expect).epsilon(1e-12));
}
