#include <cmath>
#include <random>

#include "bgk/errors.hpp"
#include "bgk/geodesics.hpp"
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

double disc_dist(C z, C w) {
  return std::sqrt(2.0) * std::atanh(std::abs((w - z) / (C(1.0) - std::conj(z) * w)));
}

}  // namespace

TEST_CASE("radial geodesic in the disc hits the closed-form endpoint") {
  KernelModel disc = KernelModel::build(Domain::disc());
  double L = std::sqrt(2.0) * std::atanh(0.5);
  GeodesicPath path = integrate_geodesic(disc, pt1(0.0), pt1(1.0), L);
  CPoint end = path.endpoint();
  CHECK(end[0].real() == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(std::abs(end[0].imag()) < 1e-9);
  CHECK(path.length == doctest::Approx(L).epsilon(1e-12));
}

TEST_CASE("half-plane geodesic from -1 along the real axis stays real") {
  KernelModel hp = KernelModel::build(Domain::halfplane());
  GeodesicPath path = integrate_geodesic(hp, pt1(-1.0), pt1(-1.0), 1.0);
  for (const auto& s : path.samples) CHECK(std::abs(s.x[1]) < 1e-10);
  // d(-1,-t) = log(t)/sqrt(2)  ->  t = exp(sqrt(2) L)
  double expect = -std::exp(std::sqrt(2.0) * 1.0);
  CHECK(path.endpoint()[0].real() == doctest::Approx(expect).epsilon(1e-7));
}

TEST_CASE("ball(2) geodesics reduce to the disc slice through the center") {
  KernelModel ball = KernelModel::build(Domain::ball(2));
  for (double L : {0.4, 1.0}) {
    GeodesicPath p = integrate_geodesic(ball, pt2(0.0, 0.0), pt2(C(0.3, 0.4), C(0.5, -0.1)), L);
    // |endpoint| = tanh(L / sqrt(3))
    CHECK(p.endpoint().norm() == doctest::Approx(std::tanh(L / std::sqrt(3.0))).epsilon(1e-7));
  }
}

TEST_CASE("speed is conserved along integrated geodesics") {
  KernelModel egg = KernelModel::build(Domain::egg(2, 4));
  GeodesicPath p = integrate_geodesic(egg, pt2(C(0.1, 0.05), C(0.2, 0.0)),
                                      pt2(C(0.7, 0.2), C(-0.3, 0.4)), 0.8);
  for (const auto& s : p.samples) {
    MetricState ms = metric_tensor(egg, to_complex(s.x));
    double speed = std::sqrt(s.y.dot(ms.gt * s.y));
    CHECK(speed == doctest::Approx(1.0).epsilon(1e-6));
  }
  // recorded length agrees with the arc-length target
  CHECK(p.length == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("LeftDomain is raised when the target length cannot fit") {
  KernelOptions kopts;
  kopts.degree = 30;
  KernelModel egg = KernelModel::build(Domain::egg(2, 4), kopts);
  CHECK_THROWS_AS(
      integrate_geodesic(egg, pt2(0.5, 0.5), pt2(1.0, 0.0), 50.0),
      LeftDomain);
}

TEST_CASE("bergman distance on the disc matches sqrt2 arctanh") {
  KernelModel disc = KernelModel::build(Domain::disc());
  auto res = bergman_distance(disc, pt1(0.0), pt1(0.5));
  CHECK(res.value == doctest::Approx(std::sqrt(2.0) * std::atanh(0.5)).epsilon(1e-4));
  CHECK(res.method == DistanceMethod::Shooting);
  CHECK(res.shoot_miss < 1e-6);

  auto zero = bergman_distance(disc, pt1(C(0.2, 0.1)), pt1(C(0.2, 0.1)));
  CHECK(zero.value == 0.0);
}

TEST_CASE("bergman distance in the bidisc slice") {
  KernelModel bidisc = KernelModel::build(Domain::polydisc(2));
  auto res = bergman_distance(bidisc, pt2(0.0, 0.0), pt2(0.5, 0.0));
  CHECK(res.value == doctest::Approx(std::sqrt(2.0) * std::atanh(0.5)).epsilon(1e-4));
}

TEST_CASE("distance is symmetric") {
  KernelModel disc = KernelModel::build(Domain::disc());
  CPoint a = pt1(C(0.3, -0.2)), b = pt1(C(-0.4, 0.25));
  double d1 = bergman_distance(disc, a, b).value;
  double d2 = bergman_distance(disc, b, a).value;
  CHECK(std::abs(d1 - d2) < 1e-4);
}

TEST_CASE("shooting and energy methods cross-validate on random pairs") {
  KernelModel disc = KernelModel::build(Domain::disc());
  KernelModel bidisc = KernelModel::build(Domain::polydisc(2));
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-0.55, 0.55);
  DistanceOptions both;
  both.mode = DistanceOptions::Mode::Both;

  int done = 0;
  while (done < 25) {
    CPoint a = pt1(C(u(rng), u(rng))), b = pt1(C(u(rng), u(rng)));
    if ((a - b).norm() < 0.05) continue;
    ++done;
    auto res = bergman_distance(disc, a, b, both);
    CHECK(res.shooting_converged);
    CHECK(std::abs(res.energy_value - disc_dist(a[0], b[0])) < 5e-4);
    CHECK(std::abs(res.value - disc_dist(a[0], b[0])) < 1e-4);
  }
  done = 0;
  while (done < 25) {
    CPoint a = pt2(C(u(rng), u(rng)), C(u(rng), u(rng)));
    CPoint b = pt2(C(u(rng), u(rng)), C(u(rng), u(rng)));
    if ((a - b).norm() < 0.05) continue;
    ++done;
    auto res = bergman_distance(bidisc, a, b, both);
    double closed = std::sqrt(std::pow(disc_dist(a[0], b[0]), 2) + std::pow(disc_dist(a[1], b[1]), 2));
    CHECK(res.shooting_converged);
    CHECK(std::abs(res.value - closed) < 1e-4);
    CHECK(std::abs(res.energy_value - res.value) < 5e-4);
  }
}

TEST_CASE("triangle inequality on random disc triples") {
  KernelModel disc = KernelModel::build(Domain::disc());
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 100; ++i) {
    C a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    double ab = disc_dist(a, b), bc = disc_dist(b, c), ac = disc_dist(a, c);
    // closed forms first (fast sanity), then a shot pair per few iterations
    CHECK(ab + bc >= ac - 1e-4);
    if (i % 20 == 0) {
      double s_ab = bergman_distance(disc, pt1(a), pt1(b)).value;
      double s_bc = bergman_distance(disc, pt1(b), pt1(c)).value;
      double s_ac = bergman_distance(disc, pt1(a), pt1(c)).value;
      CHECK(s_ab + s_bc >= s_ac - 1e-4);
    }
  }
}

TEST_CASE("distance is invariant under disc automorphisms") {
  KernelModel disc = KernelModel::build(Domain::disc());
  C a(0.35, -0.15);
  auto phi = [&](C z) { return (z - a) / (C(1.0) - std::conj(a) * z); };
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 5; ++i) {
    C z(u(rng), u(rng)), w(u(rng), u(rng));
    double d0 = bergman_distance(disc, pt1(z), pt1(w)).value;
    double d1 = bergman_distance(disc, pt1(phi(z)), pt1(phi(w))).value;
    CHECK(std::abs(d0 - d1) < 1e-4);
  }
}

TEST_CASE("bergman ball in the disc is a euclidean circle of the predicted radius") {
  KernelModel disc = KernelModel::build(Domain::disc());
  double r = std::sqrt(2.0) * std::atanh(0.5);
  BergmanBallSample ball = bergman_ball(disc, pt1(0.0), r, 64);
  int used = 0;
  for (std::size_t i = 0; i < ball.endpoints.size(); ++i) {
    if (ball.flagged[i]) continue;
    ++used;
    CHECK(ball.endpoints[i].norm() == doctest::Approx(0.5).epsilon(1e-6));
  }
  CHECK(used == 64);
}

TEST_CASE("small radii collapse to the center") {
  KernelModel disc = KernelModel::build(Domain::disc());
  BergmanBallSample ball = bergman_ball(disc, pt1(C(0.2, 0.1)), 1e-4, 32);
  for (std::size_t i = 0; i < ball.endpoints.size(); ++i) {
    REQUIRE_FALSE(ball.flagged[i]);
    CHECK((ball.endpoints[i] - pt1(C(0.2, 0.1))).norm() < 1e-4);
  }
}

TEST_CASE("ball(2) sphere radius matches the slice prediction") {
  KernelModel ball = KernelModel::build(Domain::ball(2));
  BergmanBallSample bb = bergman_ball(ball, pt2(0.0, 0.0), 1.0, 32);
  for (std::size_t i = 0; i < bb.endpoints.size(); ++i) {
    REQUIRE_FALSE(bb.flagged[i]);
    CHECK(bb.endpoints[i].norm() == doctest::Approx(std::tanh(1.0 / std::sqrt(3.0))).epsilon(1e-6));
  }
}

TEST_CASE("ball nesting: smaller spheres stay strictly inside larger radii") {
  KernelModel bidisc = KernelModel::build(Domain::polydisc(2));
  CPoint p = pt2(C(0.1, 0.0), C(0.0, 0.1));
  double r1 = 0.5, r2 = 0.8;
  BergmanBallSample b1 = bergman_ball(bidisc, p, r1, 16);
  for (std::size_t i = 0; i < b1.endpoints.size(); ++i) {
    REQUIRE_FALSE(b1.flagged[i]);
    double d = bergman_distance(bidisc, p, b1.endpoints[i]).value;
    CHECK(d < r2);
    CHECK(d == doctest::Approx(r1).epsilon(2e-4));
  }
}

TEST_CASE("sphere sweep records every crossing radius once") {
  KernelModel disc = KernelModel::build(Domain::disc());
  std::vector<double> radii{0.25, 0.5, 1.0, 2.0};
  SphereSweep sw = sphere_sweep(disc, pt1(0.0), radii, 16);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    CHECK(sw.flagged_fraction(k) == 0.0);
    for (const auto& e : sw.endpoints[k])
      CHECK(e.norm() == doctest::Approx(std::tanh(radii[k] / std::sqrt(2.0))).epsilon(1e-6));
  }
}

TEST_CASE("hahn-lu margins are nonnegative on disc and bidisc") {
  KernelModel disc = KernelModel::build(Domain::disc());
  std::vector<std::pair<CPoint, CPoint>> pairs;
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(-0.55, 0.55);
  for (int i = 0; i < 8; ++i)
    pairs.emplace_back(pt1(C(u(rng), u(rng))), pt1(C(u(rng), u(rng))));
  pairs.emplace_back(pt1(0.0), pt1(0.5));
  auto margins = hahn_lu_check(disc, pairs, true);
  for (const auto& m : margins) CHECK(m.margin >= -1e-4);
  // the frozen disc example: d^c = arctanh(.5), d^b = sqrt2 arctanh(.5)
  CHECK(margins.back().caratheodory == doctest::Approx(std::atanh(0.5)).epsilon(1e-12));
  CHECK(margins.back().bergman == doctest::Approx(std::sqrt(2.0) * std::atanh(0.5)).epsilon(1e-4));
}

TEST_CASE("geodesic path csv has one row per sample") {
  KernelModel disc = KernelModel::build(Domain::disc());
  GeodesicPath p = integrate_geodesic(disc, pt1(0.0), pt1(1.0), 0.4);
  std::string csv = geodesic_path_csv(p);
  std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(rows == p.samples.size() + 1);
}
