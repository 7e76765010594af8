#include <cmath>
#include <random>

#include "bgk/domains.hpp"
#include "bgk/errors.hpp"
#include "bgk/qmc.hpp"
#include "doctest.h"

using namespace bgk;

namespace {

CPoint pt2(C a, C b) {
  CPoint z(2);
  z << a, b;
  return z;
}

CPoint pt1(C a) {
  CPoint z(1);
  z << a;
  return z;
}

// independent oracle for the egg boundary distance from a positive-real
// point: 1-d minimization over the boundary profile (|z1|, |z2|) =
// (c, (1-c^2)^{1/4}) by golden-section search
double egg22_boundary_distance_oracle(double x1, double x2) {
  auto f = [&](double c) {
    double r2 = std::pow(1.0 - c * c, 0.25);
    return (c - x1) * (c - x1) + (r2 - x2) * (r2 - x2);
  };
  double a = 0.0, b = 1.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (f(c) < f(d))
      b = d;
    else
      a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return std::sqrt(f(0.5 * (a + b)));
}

}  // namespace

TEST_CASE("membership follows the defining inequalities") {
  CHECK(Domain::ball(2).member(pt2(0.0, 0.0)));
  CHECK_FALSE(Domain::halfplane().member(pt1(0.1)));
  CHECK(Domain::halfplane().member(pt1(-0.1)));
  // 0.81 + 0.7^4 = 1.0501 >= 1
  CHECK_FALSE(Domain::egg(2, 4).member(pt2(0.9, 0.7)));
  CHECK(Domain::egg(2, 4).member(pt2(0.9, 0.6)));
}

TEST_CASE("boundary distance: exact kinds") {
  CHECK(Domain::ball(2).boundary_distance(pt2(0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(Domain::polydisc(2).boundary_distance(pt2(0.5, 0.0)) == doctest::Approx(0.5));
  CHECK(Domain::halfplane().boundary_distance(pt1(-0.75)) == doctest::Approx(0.75));
  CHECK_THROWS_AS(Domain::ball(2).boundary_distance(pt2(1.5, 0.0)), NotInDomain);
}

TEST_CASE("boundary distance on the egg matches the sampling oracle") {
  double oracle = egg22_boundary_distance_oracle(0.5, 0.5);
  double got = Domain::egg(2, 4).boundary_distance(pt2(0.5, 0.5));
  CHECK(got == doctest::Approx(oracle).epsilon(1e-6));
  // quick bound stays below the true distance
  double quick = Domain::egg(2, 4).boundary_distance_quick(pt2(0.5, 0.5));
  CHECK(quick > 0.0);
  CHECK(quick <= got * (1.0 + 1e-9));
}

TEST_CASE("boundary distance is 1-Lipschitz along interior segments") {
  Domain egg = Domain::egg(2, 4);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  int checked = 0;
  while (checked < 20) {
    CPoint a = pt2(C(u(rng), u(rng)), C(u(rng), u(rng)));
    CPoint b = pt2(C(u(rng), u(rng)), C(u(rng), u(rng)));
    if (!egg.member(a) || !egg.member(b)) continue;
    ++checked;
    double da = egg.boundary_distance(a, 1024);
    double db = egg.boundary_distance(b, 1024);
    CHECK(std::abs(da - db) <= (a - b).norm() + 1e-6);
  }
}

TEST_CASE("bounded domains classify samples inside their bounding boxes") {
  for (const char* id : {"disc", "ball:2", "bidisc", "egg:2:4", "ellipsoid:1,2"}) {
    Domain dom = Domain::from_id(id);
    RVec lo, hi;
    dom.bounding_box(lo, hi);
    HaltonSequence seq(2 * dom.dim(), 7);
    std::vector<double> u(static_cast<std::size_t>(2 * dom.dim()));
    int inside = 0;
    for (int i = 0; i < 10000; ++i) {
      seq.point(static_cast<std::uint64_t>(i), u.data());
      CPoint z(dom.dim());
      bool in_box = true;
      for (int k = 0; k < dom.dim(); ++k) {
        double re = lo[2 * k] + (hi[2 * k] - lo[2 * k]) * u[static_cast<std::size_t>(2 * k)];
        double im = lo[2 * k + 1] + (hi[2 * k + 1] - lo[2 * k + 1]) * u[static_cast<std::size_t>(2 * k + 1)];
        z[k] = C(re, im);
      }
      if (dom.member(z)) {
        ++inside;
        for (int r = 0; r < 2 * dom.dim(); ++r) {
          double coord = (r % 2 == 0) ? z[r / 2].real() : z[r / 2].imag();
          in_box = in_box && coord >= lo[r] && coord <= hi[r];
        }
        CHECK(in_box);
        CHECK(dom.boundary_distance_quick(z) > 0.0);
      }
    }
    CHECK(inside > 100);
  }
}

TEST_CASE("cayley: halfplane chart fixed values") {
  CayleyChart ch = Domain::halfplane().cayley();
  CHECK(ch.type == ChartType::HalfPlaneToDisc);
  CHECK(std::abs(ch.forward(pt1(-1.0))[0]) < 1e-15);
  // forward(0) would be the boundary point 1; check an interior value instead
  CPoint w = ch.forward(pt1(C(-2.0, 1.0)));
  CHECK(std::abs(w[0]) < 1.0);
}

TEST_CASE("cayley: siegel chart maps (-1,0) to the ball center") {
  CayleyChart ch = Domain::siegel(2).cayley();
  CPoint q = ch.forward(pt2(-1.0, 0.0));
  CHECK(q.norm() < 1e-15);
}

TEST_CASE("cayley: identity for bounded domains") {
  CHECK(Domain::disc().cayley().type == ChartType::Identity);
  CHECK_THROWS_AS(Domain::model_poly(4).cayley(), NoChart);
}

TEST_CASE("cayley round trip on interior samples") {
  for (const Domain& dom : {Domain::halfplane(), Domain::siegel(2),
                            Domain::from_id("corner:2")}) {
    CayleyChart ch = dom.cayley();
    Domain target = ch.target();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    int tested = 0;
    while (tested < 1000) {
      CPoint w(dom.dim());
      for (int k = 0; k < dom.dim(); ++k) w[k] = C(u(rng), u(rng));
      if (!target.member(w)) continue;
      ++tested;
      CPoint z = ch.inverse(w);
      CHECK(dom.member(z));
      CPoint back = ch.forward(z);
      CHECK((back - w).norm() < 1e-10);
      CHECK(std::abs(ch.det_forward(z)) > 0.0);
    }
  }
}

TEST_CASE("catalogue ids round-trip") {
  CHECK(Domain::from_id("egg:2:4").egg_exponent() == 4);
  CHECK(Domain::from_id("ball:3").dim() == 3);
  CHECK(Domain::from_id("bidisc").kind() == DomainKind::Polydisc);
  CHECK(Domain::from_id("ellipsoid:1,2").coeffs()[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(Domain::from_id("noSuchDomain"), UnsupportedDomain);
}

TEST_CASE("intersection carries the union of defining functions") {
  Domain cap = Domain::intersection(
      {Domain::ellipsoid({1.0, 2.0}),
       Domain::affine_image(Domain::ball(2), CMat::Identity(2, 2) * C(0.8), pt2(1.0, 0.0))});
  CHECK(cap.num_defining() == 2);
  CPoint inside = pt2(0.7, 0.0);
  CHECK(cap.member(inside));
  CHECK(cap.boundary_distance(inside, 2048) > 0.0);
  CPoint in_ell_not_ball = pt2(-0.5, 0.0);
  CHECK_FALSE(cap.member(in_ell_not_ball));
}

TEST_CASE("affine image membership and quick distance") {
  // disc shifted and scaled: {2 z : |z| < 1} + 3
  CMat A = CMat::Identity(1, 1) * C(2.0);
  Domain img = Domain::affine_image(Domain::disc(), A, pt1(3.0));
  CHECK(img.member(pt1(3.5)));
  CHECK_FALSE(img.member(pt1(5.5)));
  double quick = img.boundary_distance_quick(pt1(3.0));
  CHECK(quick == doctest::Approx(2.0));
}
