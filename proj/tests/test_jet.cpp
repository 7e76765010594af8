#include <cmath>
#include <complex>

#include "bgk/jet.hpp"
#include "doctest.h"

using namespace bgk;
using std::complex;

TEST_CASE("jet arithmetic reproduces partial derivatives of a rational function") {
  // f(u,v) = 1 / (1 - u*v)^2 at (u0, v0); derivatives known in closed form
  const JetSpace& sp = JetSpace::get(2, 3);
  C u0(0.3, 0.1), v0(0.2, -0.4);
  Jet u = Jet::variable(sp, 0, u0);
  Jet v = Jet::variable(sp, 1, v0);
  Jet f = (Jet::constant(sp, C(1.0)) - u * v).pow(-2);

  C q = C(1.0) - u0 * v0;
  std::uint8_t e00[2] = {0, 0};
  std::uint8_t e10[2] = {1, 0};
  std::uint8_t e11[2] = {1, 1};
  std::uint8_t e21[2] = {2, 1};
  CHECK(std::abs(f.deriv(e00) - std::pow(q, -2.0)) < 1e-12);
  // d/du (1-uv)^-2 = 2v (1-uv)^-3
  CHECK(std::abs(f.deriv(e10) - 2.0 * v0 * std::pow(q, -3.0)) < 1e-12);
  // d2/dudv = 2(1-uv)^-3 + 6uv(1-uv)^-4
  CHECK(std::abs(f.deriv(e11) - (2.0 * std::pow(q, -3.0) + 6.0 * u0 * v0 * std::pow(q, -4.0))) <
        1e-12);
  // d3/du2dv = d/du [above] = 6v(1-uv)^-4 + 6v(1-uv)^-4 + 24uv^2(1-uv)^-5
  C expect = 12.0 * v0 * std::pow(q, -4.0) + 24.0 * u0 * v0 * v0 * std::pow(q, -5.0);
  CHECK(std::abs(f.deriv(e21) - expect) < 1e-12);
}

TEST_CASE("jet log agrees with finite differences") {
  const JetSpace& sp = JetSpace::get(1, 3);
  C u0(0.4, 0.2);
  Jet u = Jet::variable(sp, 0, u0);
  Jet f = ((u * u + C(2.0)) * u + C(0.5)).log();

  auto fn = [](C x) { return std::log(x * x * x + 2.0 * x + 0.5); };
  const double h = 1e-5;
  C d1 = (fn(u0 + h) - fn(u0 - h)) / (2.0 * h);
  C d2 = (fn(u0 + h) - 2.0 * fn(u0) + fn(u0 - h)) / (h * h);
  std::uint8_t e1[1] = {1};
  std::uint8_t e2[1] = {2};
  CHECK(std::abs(f.deriv(e1) - d1) < 1e-8);
  CHECK(std::abs(f.deriv(e2) - d2) < 1e-5);
}

TEST_CASE("recip is the multiplicative inverse up to truncation order") {
  const JetSpace& sp = JetSpace::get(3, 3);
  Jet a = Jet::variable(sp, 0, C(1.2, 0.3)) * Jet::variable(sp, 1, C(0.5, -0.2)) +
          Jet::variable(sp, 2, C(2.0, 0.0));
  Jet prod = a * a.recip();
  CHECK(std::abs(prod.value() - C(1.0)) < 1e-13);
  for (int i = 1; i < sp.size; ++i) CHECK(std::abs(prod.coeff(i)) < 1e-12);
}
