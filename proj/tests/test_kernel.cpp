#include <cmath>
#include <random>
#include <sstream>

#include "bgk/errors.hpp"
#include "bgk/kernel.hpp"
#include "bgk/qmc.hpp"
#include "doctest.h"

using namespace bgk;

namespace {

CPoint pt1(C a) {
  CPoint z(1);
  z << a;
  return z;
}

CPoint pt2(C a, C b) {
  CPoint z(2);
  z << a, b;
  return z;
}

}  // namespace

TEST_CASE("disc kernel closed form values") {
  KernelModel disc = KernelModel::build(Domain::disc());
  CHECK(disc.diag(pt1(0.0)) == doctest::Approx(1.0 / M_PI).epsilon(1e-13));
  // K(0.5, 0.5) = 1/(pi (1-0.25)^2) = 16/(9 pi)
  CHECK(disc.diag(pt1(0.5)) == doctest::Approx(16.0 / (9.0 * M_PI)).epsilon(1e-13));
}

TEST_CASE("ball(2) kernel at the center") {
  KernelModel ball = KernelModel::build(Domain::ball(2));
  CHECK(ball.diag(pt2(0.0, 0.0)) == doctest::Approx(2.0 / (M_PI * M_PI)).epsilon(1e-13));
}

TEST_CASE("polydisc kernel factorizes") {
  KernelModel bidisc = KernelModel::build(Domain::polydisc(2));
  KernelModel disc = KernelModel::build(Domain::disc());
  CPoint z = pt2(C(0.3, 0.2), C(-0.4, 0.1));
  double expect = disc.diag(pt1(z[0])) * disc.diag(pt1(z[1]));
  CHECK(bidisc.diag(z) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("disc closed form vs truncated series") {
  KernelOptions opts;
  opts.degree = 60;
  opts.prefer_series = true;
  KernelModel series = KernelModel::build(Domain::disc(), opts);
  KernelModel closed = KernelModel::build(Domain::disc());
  // the truncation tail at |z|^2 = t is sum_{k>d} (k+1) t^k / pi
  for (double r : {0.1, 0.3, 0.5, 0.7}) {
    CPoint z = pt1(C(r, 0.1));
    if (!Domain::disc().member(z)) continue;
    double a = series.diag(z), b = closed.diag(z);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    CHECK(a <= b + 1e-15);  // partial sums increase to the closed form
  }
}

TEST_CASE("half-plane kernel via the Cayley chart") {
  KernelModel hp = KernelModel::build(Domain::halfplane());
  // K(z,z) = 1/(4 pi (Re z)^2)
  CHECK(hp.diag(pt1(-1.0)) == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));
  CHECK(hp.diag(pt1(C(-0.5, 3.0))) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("egg series: diagonal positivity, Hermitian symmetry, monotone truncation") {
  Domain egg = Domain::egg(2, 4);
  KernelOptions o40;
  o40.degree = 40;
  KernelOptions o45;
  o45.degree = 45;
  KernelModel k40 = KernelModel::build(egg, o40);
  KernelModel k45 = KernelModel::build(egg, o45);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.55, 0.55);
  for (int i = 0; i < 1000; ++i) {
    CPoint z = pt2(C(u(rng), u(rng)), C(u(rng), u(rng)));
    if (!egg.member(z)) continue;
    double d40 = k40.diag(z);
    CHECK(d40 > 0.0);
    CHECK(k45.diag(z) >= d40 - 1e-14);
  }
  CPoint z = pt2(C(0.3, 0.1), C(0.2, -0.2));
  CPoint w = pt2(C(-0.1, 0.2), C(0.4, 0.1));
  C kzw = k40.eval(z, w);
  C kwz = k40.eval(w, z);
  CHECK(std::abs(kzw - std::conj(kwz)) < 1e-13 * std::abs(kzw));
}

TEST_CASE("egg Beta moments against quasi-random quadrature") {
  Domain egg = Domain::egg(2, 4);
  MomentTable beta = MomentTable::closed_form(egg, 5);
  MomentTable quad = MomentTable::quadrature(egg, 5, 1000000, 20240811);
  int checked = 0;
  for (const auto& [alpha, v] : beta.entries()) {
    if (checked >= 20) break;
    ++checked;
    CHECK(quad.at(alpha) == doctest::Approx(v).epsilon(1e-3));
  }
  CHECK(checked == 20);
}

TEST_CASE("domain monotonicity: ball(2) inside bidisc") {
  KernelModel ball = KernelModel::build(Domain::ball(2));
  KernelModel bidisc = KernelModel::build(Domain::polydisc(2));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 200; ++i) {
    CPoint z = pt2(C(u(rng), u(rng)), C(u(rng), u(rng)));
    if (!Domain::ball(2).member(z)) continue;
    CHECK(bidisc.diag(z) <= ball.diag(z) + 1e-12);
  }
}

TEST_CASE("transformation rule under disc automorphisms") {
  KernelModel disc = KernelModel::build(Domain::disc());
  C a(0.3, -0.2);
  auto phi = [&](C z) { return (z - a) / (C(1.0) - std::conj(a) * z); };
  auto dphi = [&](C z) {
    C d = C(1.0) - std::conj(a) * z;
    return (C(1.0) - std::norm(a)) / (d * d);
  };
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int i = 0; i < 100; ++i) {
    C z(u(rng), u(rng));
    if (std::abs(z) >= 0.93) continue;
    double lhs = disc.diag(pt1(z));
    double rhs = disc.diag(pt1(phi(z))) * std::norm(dphi(z));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("cauchy-schwarz bound on random pairs") {
  KernelModel egg = KernelModel::build(Domain::egg(2, 4));
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.55, 0.55);
  int done = 0;
  while (done < 50) {
    CPoint z = pt2(C(u(rng), u(rng)), C(u(rng), u(rng)));
    CPoint w = pt2(C(u(rng), u(rng)), C(u(rng), u(rng)));
    if (!egg.domain().member(z) || !egg.domain().member(w)) continue;
    ++done;
    CHECK(std::abs(egg.eval(z, w)) <=
          std::sqrt(egg.diag(z)) * std::sqrt(egg.diag(w)) * (1.0 + 1e-12));
  }
}

TEST_CASE("kernel derivatives: disc mixed second derivative at the origin") {
  KernelModel disc = KernelModel::build(Domain::disc());
  KernelJet kj = disc.derivs(pt1(0.0), pt1(0.0), 3);
  // K = (1/pi) sum (k+1) (z wbar)^k -> d_z d_wbar K at 0 = 2/pi
  CHECK(std::abs(kj.deriv2zw(0, 0) - C(2.0 / M_PI)) < 1e-13);
  CHECK(std::abs(kj.value() - C(1.0 / M_PI)) < 1e-14);
}

TEST_CASE("kernel derivatives match central finite differences on the egg") {
  KernelModel egg = KernelModel::build(Domain::egg(2, 4));
  CPoint z = pt2(0.3, 0.3);
  KernelJet kj = egg.derivs(z, z, 3);
  const double h = 1e-4;
  // d_{z_0} K: difference along Re and Im of the z slot
  auto evalz = [&](C dz0) { return egg.eval(pt2(z[0] + dz0, z[1]), z); };
  C fd_re = (evalz(C(h, 0)) - evalz(C(-h, 0))) / (2.0 * h);
  C fd_im = (evalz(C(0, h)) - evalz(C(0, -h))) / (2.0 * h);
  C fd = 0.5 * (fd_re - C(0, 1) * fd_im);  // Wirtinger d/dz
  CHECK(std::abs(kj.deriv1z(0) - fd) < 1e-5 * std::abs(fd));

  // mixed d_{z_1} d_{wbar_1}
  auto evalzw = [&](C dz1, C dw1) {
    return egg.eval(pt2(z[0], z[1] + dz1), pt2(z[0], z[1] + dw1));
  };
  C acc(0.0);
  // second-order mixed FD via Wirtinger combinations on both slots
  auto wirt_w = [&](C dz1) {
    C fr = (evalzw(dz1, C(h, 0)) - evalzw(dz1, C(-h, 0))) / (2.0 * h);
    C fi = (evalzw(dz1, C(0, h)) - evalzw(dz1, C(0, -h))) / (2.0 * h);
    return 0.5 * (fr + C(0, 1) * fi);  // d/d wbar
  };
  C gr = (wirt_w(C(h, 0)) - wirt_w(C(-h, 0))) / (2.0 * h);
  C gi = (wirt_w(C(0, h)) - wirt_w(C(0, -h))) / (2.0 * h);
  acc = 0.5 * (gr - C(0, 1) * gi);
  CHECK(std::abs(kj.deriv2zw(1, 1) - acc) < 1e-5 * std::max(1.0, std::abs(acc)));
}

TEST_CASE("derivative order zero equals eval") {
  KernelModel egg = KernelModel::build(Domain::egg(2, 4));
  CPoint z = pt2(C(0.2, 0.1), C(0.3, 0.0));
  CPoint w = pt2(C(0.1, -0.2), C(0.2, 0.1));
  CHECK(std::abs(egg.derivs(z, w, 0).value() - egg.eval(z, w)) == 0.0);
  CHECK(std::abs(egg.derivs(z, w, 3).value() - egg.eval(z, w)) < 1e-14);
}

TEST_CASE("reproducing property") {
  KernelOptions opts;
  opts.degree = 40;
  opts.prefer_series = true;
  KernelModel disc = KernelModel::build(Domain::disc(), opts);

  MonomialPoly one{{{{0}, C(1.0)}}};
  CHECK(reproducing_residual(disc, one, pt1(0.0)) < 1e-10);

  MonomialPoly zsq{{{{2}, C(1.0)}}};
  CHECK(reproducing_residual(disc, zsq, pt1(0.5)) < 1e-8);

  KernelOptions eggopts;
  eggopts.degree = 12;
  eggopts.moments = MomentSource::Quadrature;
  eggopts.quad_nodes = 1000000;
  KernelModel egg = KernelModel::build(Domain::egg(2, 4), eggopts);
  MonomialPoly z1z2{{{{1, 1}, C(1.0)}}};
  CHECK(reproducing_residual(egg, z1z2, pt2(0.2, 0.2)) < 1e-3);
}

TEST_CASE("extremal problem: kernel slice is the minimizer") {
  KernelOptions opts;
  opts.degree = 40;
  opts.prefer_series = true;
  KernelModel disc = KernelModel::build(Domain::disc(), opts);

  // g = 1 at w=0: the minimum is 1/K(0,0) = pi
  MonomialPoly one{{{{0}, C(1.0)}}};
  MonomialPoly one_plus_5z{{{{0}, C(1.0)}, {{1}, C(5.0)}}};
  auto res = extremal_check(disc, pt1(0.0), {one, one_plus_5z});
  CHECK(res.ok);
  CHECK(res.min_value == doctest::Approx(M_PI).epsilon(1e-10));
  // trial 1 + 5z has norm^2 = pi + 25 pi/2 > pi
  CHECK(res.worst_trial_slack >= 0.0);
}

TEST_CASE("moment table io round trip") {
  MomentTable t = MomentTable::closed_form(Domain::egg(2, 4), 6);
  std::stringstream ss;
  t.save(ss);
  MomentTable back = MomentTable::load(ss);
  for (const auto& [alpha, v] : t.entries())
    CHECK(back.at(alpha) == doctest::Approx(v).epsilon(1e-15));
}

TEST_CASE("unsupported domains are rejected") {
  CHECK_THROWS_AS(KernelModel::build(Domain::model_poly(4)), UnsupportedDomain);
}

TEST_CASE("outside-domain evaluation throws") {
  KernelModel disc = KernelModel::build(Domain::disc());
  CHECK_THROWS_AS(disc.eval(pt1(1.5), pt1(0.0)), OutsideDomain);
}

TEST_CASE("boundary warnings accumulate inside the trust margin") {
  KernelOptions opts;
  opts.degree = 20;
  opts.trust_margin = 0.05;
  KernelModel egg = KernelModel::build(Domain::egg(2, 4), opts);
  long before = egg.boundary_warnings();
  egg.diag(pt2(0.98, 0.0));  // within 0.05 of the boundary
  CHECK(egg.boundary_warnings() > before);
}
