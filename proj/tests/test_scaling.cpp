#include <cmath>
#include <random>

#include "bgk/errors.hpp"
#include "bgk/scaling.hpp"
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

ScalingSequence disc_seq(const std::vector<double>& deltas = default_delta_ladder()) {
  return build_scaling(Domain::disc(), pt1(1.0), ApproachSpec{}, ScalingClass::StronglyPseudoconvex,
                       deltas);
}

}  // namespace

TEST_CASE("disc scaling: scaled domain, transported point, declared limit") {
  ScalingSequence seq = disc_seq({0.1, 0.01});
  CHECK(seq.limit.kind() == DomainKind::HalfSpace);
  CHECK(seq.limit_has_kernel);
  for (const auto& r : seq.rungs) {
    // q^j = -1 exactly
    CHECK(std::abs(r.q[0] - C(-1.0)) < 1e-14);
    // D^j = {2 Re w + delta |w|^2 < 0}: test membership against the formula
    for (C w : {C(-1.0, 0.0), C(-0.5, 1.0), C(-3.0, -2.0), C(0.5, 0.0), C(-19.0, 0.1)}) {
      bool expect = 2.0 * w.real() + r.delta * std::norm(w) < 0.0;
      CHECK(r.scaled.member(pt1(w)) == expect);
    }
  }
}

TEST_CASE("egg cone scaling: weights and limit model") {
  ApproachSpec cone;
  cone.cone = true;
  cone.aperture = M_PI / 6.0;
  cone.angle = M_PI / 8.0;
  ScalingSequence seq =
      build_scaling(Domain::egg(2, 4), pt2(1.0, 0.0), cone, ScalingClass::LeviCorankOne, {0.1, 0.03});
  CHECK(seq.weights[0] == doctest::Approx(1.0));
  CHECK(seq.weights[1] == doctest::Approx(0.25));
  CHECK(seq.limit.kind() == DomainKind::ModelPoly);
  CHECK_FALSE(seq.limit_has_kernel);
  // D^j membership matches 2 Re w1 + delta |w1|^2 + |w2|^4 < 0
  const auto& r = seq.rungs[0];
  for (C w1 : {C(-1.0, 0.2), C(-0.2, 0.0)}) {
    for (C w2 : {C(0.3, 0.1), C(1.0, -0.4)}) {
      bool expect = 2.0 * w1.real() + r.delta * std::norm(w1) + std::pow(std::abs(w2), 4) < 0.0;
      CHECK(r.scaled.member(pt2(w1, w2)) == expect);
    }
  }
  // q^j constant at (-e^{i beta}, 0)
  CHECK(std::abs(seq.rungs[0].q[0] - (-std::polar(1.0, M_PI / 8.0))) < 1e-13);
  CHECK(std::abs(seq.rungs[0].q[1]) < 1e-13);
}

TEST_CASE("cone aperture is enforced") {
  ApproachSpec bad;
  bad.cone = true;
  bad.aperture = M_PI / 6.0;
  bad.angle = M_PI / 3.0;
  CHECK_THROWS_AS(
      build_scaling(Domain::egg(2, 4), pt2(1.0, 0.0), bad, ScalingClass::LeviCorankOne, {0.1}),
      ApproachLeavesCone);
}

TEST_CASE("ellipsoid scaling lands on the siegel half-space") {
  ScalingSequence seq = build_scaling(Domain::ellipsoid({1.0, 2.0}), pt2(1.0, 0.0), ApproachSpec{},
                                      ScalingClass::StronglyPseudoconvex, {0.1, 0.01});
  CHECK(seq.limit.kind() == DomainKind::Siegel);
  // D^j = {2 Re w1 + d |w1|^2 + |w2|^2 < 0} after the Levi normalization
  const auto& r = seq.rungs[0];
  for (C w1 : {C(-1.0, 0.3), C(-0.1, 0.0)})
    for (C w2 : {C(0.4, 0.2), C(1.2, 0.0)}) {
      bool expect = 2.0 * w1.real() + r.delta * std::norm(w1) + std::norm(w2) < 0.0;
      CHECK(r.scaled.member(pt2(w1, w2)) == expect);
    }
  CHECK(std::abs(r.q[0] - C(-1.0)) < 1e-14);
}

TEST_CASE("unknown classes are rejected") {
  CHECK_THROWS_AS(build_scaling(Domain::egg(2, 4), pt2(1.0, 0.0), ApproachSpec{},
                                ScalingClass::BidiscCorner, {0.1}),
                  UnknownClass);
  CHECK_THROWS_AS(build_scaling(Domain::disc(), pt1(C(0.0, 1.0)), ApproachSpec{},
                                ScalingClass::StronglyPseudoconvex, {0.1}),
                  UnknownClass);
}

TEST_CASE("scaling maps are bijections on sample points") {
  ScalingSequence seq = disc_seq({0.1, 0.001});
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (std::size_t j = 0; j < seq.rungs.size(); ++j) {
    for (int i = 0; i < 500; ++i) {
      CPoint z = pt1(C(u(rng), u(rng)));
      CPoint back = seq.apply_inv(j, seq.apply(j, z));
      CHECK((back - z).norm() < 1e-12 * (1.0 + z.norm()));
    }
  }
}

TEST_CASE("transformation rule is exact for the scaled kernels") {
  ScalingSequence seq = disc_seq({0.1, 0.01});
  KernelModel base = KernelModel::build(Domain::disc());
  for (std::size_t j = 0; j < seq.rungs.size(); ++j) {
    KernelModel mj = base.affine_pullback(seq.rungs[j].scale, seq.rungs[j].shift);
    double det2 = std::norm(seq.rungs[j].scale[0]);
    CPoint p = seq.rungs[j].p;
    // K_{D^j}(q,q) = K_D(p,p) / |det A|^2
    CHECK(mj.diag(seq.rungs[j].q) == doctest::Approx(base.diag(p) / det2).epsilon(1e-14));
  }
}

TEST_CASE("hausdorff gap: identical and nested domains") {
  RVec lo, hi;
  default_window(1, lo, hi);
  CHECK(hausdorff_gap(Domain::disc(), Domain::ball(1), lo, hi) == 0.0);

  // scaled-disc rungs against the half-plane on the window [-3,0]x[-2,2]
  lo[0] = -3.0;
  hi[0] = 0.0;
  Domain hp = Domain::halfplane();
  ScalingSequence seq = disc_seq({0.1, 0.03, 0.01});
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : seq.rungs) {
    double g = hausdorff_gap(r.scaled, hp, lo, hi);
    CHECK(g >= 0.0);
    CHECK(g <= prev * 1.10 + 1e-12);  // nonincreasing up to 10% grid noise
    prev = g;
  }
  double g01 = hausdorff_gap(seq.rungs[0].scaled, hp, lo, hi);
  CHECK(g01 > 0.0);
  CHECK(g01 < 1.0);  // boundary offset is delta |w|^2 / 2 on the window
}

TEST_CASE("monotone hausdorff on the ellipsoid sequence") {
  ScalingSequence seq = build_scaling(Domain::ellipsoid({1.0, 2.0}), pt2(1.0, 0.0), ApproachSpec{},
                                      ScalingClass::StronglyPseudoconvex, {0.1, 0.03, 0.01});
  RVec lo, hi;
  default_window(2, lo, hi);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : seq.rungs) {
    double g = hausdorff_gap(r.scaled, seq.limit, lo, hi, 16);
    CHECK(g <= prev * 1.10 + 1e-12);
    prev = g;
  }
}

TEST_CASE("verify_chain on the disc sequence: decreasing gaps, small final values") {
  ScalingSequence seq = disc_seq();
  std::vector<CPoint> S{pt1(-2.0), pt1(-1.0), pt1(-0.5)};
  auto reports = verify_chain(seq, S,
                              {ChainQuantity::Kernel, ChainQuantity::Metric,
                               ChainQuantity::Christoffel, ChainQuantity::Distance},
                              ChainOptions{});
  for (const auto& rep : reports) {
    INFO("quantity ", quantity_name(rep.quantity));
    CHECK(rep.decreasing);
    for (const auto& row : rep.rows) CHECK(row.flagged_points == 0);
  }
  // kernel: relative sup-gap < 1e-2 at delta = 1e-3
  CHECK(reports[0].rows.back().sup_gap_rel < 1e-2);
  // distance gap shrinks by at least 5x from first to last rung
  const auto& dist = reports[3];
  CHECK(dist.rows.back().sup_gap * 5.0 <= dist.rows.front().sup_gap);

  // saturation: fitted decay order from the last two rungs stays sane
  for (const auto& rep : reports) {
    const auto& r = rep.rows;
    double p = std::log(r[r.size() - 1].sup_gap / r[r.size() - 2].sup_gap) /
               std::log(r[r.size() - 1].delta / r[r.size() - 2].delta);
    double predicted = r.back().sup_gap * std::pow(0.5, p);
    CHECK(r.back().sup_gap < 10.0 * predicted);
  }
}

TEST_CASE("verify_chain ball inclusions at the finest rung") {
  ScalingSequence seq = disc_seq({1e-1, 1e-3});
  std::vector<CPoint> S{pt1(-1.0)};
  ChainOptions opts;
  opts.ball_dirs = 16;
  auto reports = verify_chain(seq, S, {ChainQuantity::Ball}, opts);
  const auto& rows = reports[0].rows;
  CHECK(rows.back().inclusion_upper);
  CHECK(rows.back().inclusion_lower);
  CHECK(rows.back().sup_gap < rows.front().sup_gap);
}

TEST_CASE("identical sequence gives zero gaps") {
  // hand-built sequence whose rungs are all the identity
  ScalingSequence seq;
  seq.source = Domain::disc();
  seq.p0 = pt1(1.0);
  seq.limit = Domain::disc();
  seq.limit_has_kernel = true;
  seq.q0 = pt1(0.0);
  for (double d : {0.1, 0.01}) {
    ScalingRung r;
    r.delta = d;
    r.p = pt1(0.0);
    r.scale = pt1(1.0);
    r.shift = pt1(0.0);
    r.scaled = Domain::disc();
    r.q = pt1(0.0);
    seq.rungs.push_back(r);
  }
  std::vector<CPoint> S{pt1(C(0.3, 0.1)), pt1(C(-0.2, 0.4))};
  auto reports = verify_chain(
      seq, S, {ChainQuantity::Kernel, ChainQuantity::Metric, ChainQuantity::Christoffel},
      ChainOptions{});
  for (const auto& rep : reports)
    for (const auto& row : rep.rows) CHECK(row.sup_gap < 1e-12);
}

TEST_CASE("egg sequence runs in cauchy mode") {
  ScalingSequence seq = build_scaling(Domain::egg(2, 4), pt2(1.0, 0.0), ApproachSpec{},
                                      ScalingClass::LeviCorankOne, {0.4, 0.3, 0.2});
  std::vector<CPoint> S{pt2(-1.5, 0.2), pt2(-1.0, 0.0)};
  ChainOptions opts;
  opts.kernel.degree = 30;
  auto reports = verify_chain(seq, S, {ChainQuantity::Kernel}, opts);
  CHECK(reports[0].cauchy_mode);
  CHECK(reports[0].rows.size() == 2);  // last rung is the reference
  for (const auto& row : reports[0].rows) CHECK(row.flagged_points == 0);
}

TEST_CASE("convergence report csv shape") {
  ScalingSequence seq = disc_seq({0.1, 0.01});
  std::vector<CPoint> S{pt1(-1.0)};
  auto reports = verify_chain(seq, S, {ChainQuantity::Kernel}, ChainOptions{});
  std::string csv = convergence_report_csv(reports);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
}
