#include "bgk/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "bgk/errors.hpp"
#include "bgk/metric.hpp"
#include "bgk/parallel.hpp"

namespace bgk {

std::vector<double> default_delta_ladder() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

CPoint ScalingSequence::apply(std::size_t j, const CPoint& z) const {
  const ScalingRung& r = rungs[j];
  CPoint out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = r.scale[i] * z[i] + r.shift[i];
  return out;
}

CPoint ScalingSequence::apply_inv(std::size_t j, const CPoint& z) const {
  const ScalingRung& r = rungs[j];
  CPoint out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = (z[i] - r.shift[i]) / r.scale[i];
  return out;
}

namespace {

bool is_first_axis_boundary_point(const Domain& dom, const CPoint& p0) {
  const int n = dom.dim();
  if (std::abs(p0[0].imag()) > 1e-12) return false;
  for (int k = 1; k < n; ++k)
    if (std::abs(p0[k]) > 1e-12) return false;
  return std::abs(dom.rho_max(p0)) < 1e-10;
}

Domain make_scaled(const Domain& dom, const CPoint& scale, const CPoint& shift) {
  const int n = dom.dim();
  CMat A = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = scale[i];
  return Domain::affine_image(dom, A, shift);
}

CPoint apply_map(const ScalingRung& r, const CPoint& z) {
  CPoint out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = r.scale[i] * z[i] + r.shift[i];
  return out;
}

}  // namespace

ScalingSequence build_scaling(const Domain& dom, const CPoint& p0, const ApproachSpec& approach,
                              ScalingClass klass, const std::vector<double>& deltas) {
  const int n = dom.dim();
  ScalingSequence seq;
  seq.source = dom;
  seq.p0 = p0;
  seq.klass = klass;
  seq.approach = approach;

  double beta = approach.cone ? approach.angle : 0.0;
  if (std::abs(beta) > approach.aperture + 1e-12)
    throw ApproachLeavesCone("approach angle exceeds the cone aperture");
  const C u = std::polar(1.0, beta);

  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw Error("delta ladder must decrease strictly");

  switch (klass) {
    case ScalingClass::StronglyPseudoconvex: {
      if (dom.kind() != DomainKind::Ball && dom.kind() != DomainKind::Ellipsoid)
        throw UnknownClass("strongly pseudoconvex scaling registered for ball/ellipsoid");
      std::vector<double> coeffs(static_cast<std::size_t>(n), 1.0);
      if (dom.kind() == DomainKind::Ellipsoid) coeffs = dom.coeffs();
      if (std::abs(coeffs[0] - 1.0) > 1e-12)
        throw UnknownClass("catalogued boundary point requires unit first coefficient");
      if (!is_first_axis_boundary_point(dom, p0))
        throw UnknownClass("scaling registered at the boundary point (1, 0')");
      seq.weights.assign(static_cast<std::size_t>(n), 0.5);
      seq.weights[0] = 1.0;
      for (double d : deltas) {
        ScalingRung r;
        r.delta = d;
        r.p = p0;
        r.p[0] = p0[0] - d * u;
        if (!dom.member(r.p)) throw ApproachLeavesCone("approach point left the domain");
        r.scale = CPoint(n);
        r.shift = CPoint(n);
        r.scale[0] = 1.0 / d;
        r.shift[0] = -p0[0] / d;
        for (int k = 1; k < n; ++k) {
          // tangential coordinates normalized by the Levi coefficient
          r.scale[k] = std::sqrt(coeffs[static_cast<std::size_t>(k)] / d);
          r.shift[k] = 0.0;
        }
        r.scaled = make_scaled(dom, r.scale, r.shift);
        r.q = apply_map(r, r.p);
        seq.rungs.push_back(std::move(r));
      }
      seq.limit = (n == 1) ? Domain::halfplane() : Domain::siegel(n);
      seq.limit_has_kernel = true;
      break;
    }
    case ScalingClass::LeviCorankOne: {
      if (dom.kind() != DomainKind::Egg || n != 2)
        throw UnknownClass("Levi corank one scaling registered for egg domains in C^2");
      if (!is_first_axis_boundary_point(dom, p0))
        throw UnknownClass("scaling registered at the boundary point (1, 0)");
      const int two_m = dom.egg_exponent();
      seq.weights = {1.0, 1.0 / two_m};
      for (double d : deltas) {
        ScalingRung r;
        r.delta = d;
        r.p = p0;
        r.p[0] = p0[0] - d * u;
        if (!dom.member(r.p)) throw ApproachLeavesCone("approach point left the domain");
        r.scale = CPoint(2);
        r.shift = CPoint(2);
        r.scale[0] = 1.0 / d;
        r.shift[0] = -p0[0] / d;
        r.scale[1] = std::pow(d, -1.0 / two_m);
        r.shift[1] = 0.0;
        r.scaled = make_scaled(dom, r.scale, r.shift);
        r.q = apply_map(r, r.p);
        seq.rungs.push_back(std::move(r));
      }
      if (two_m == 2) {
        seq.limit = Domain::siegel(2);
        seq.limit_has_kernel = true;
      } else {
        seq.limit = Domain::model_poly(two_m);
        seq.limit_has_kernel = false;
      }
      break;
    }
    case ScalingClass::BidiscCorner: {
      if (dom.kind() != DomainKind::Polydisc || n != 2)
        throw UnknownClass("corner scaling registered for the bidisc");
      if ((p0 - cpoint({C(1.0), C(1.0)})).norm() > 1e-12)
        throw UnknownClass("corner scaling registered at the corner (1, 1)");
      seq.weights = {1.0, 1.0};
      for (double d : deltas) {
        ScalingRung r;
        r.delta = d;
        r.p = cpoint({p0[0] - d * u, p0[1] - d * u});
        if (!dom.member(r.p)) throw ApproachLeavesCone("approach point left the domain");
        r.scale = cpoint({C(1.0 / d), C(1.0 / d)});
        r.shift = cpoint({-p0[0] / d, -p0[1] / d});
        r.scaled = make_scaled(dom, r.scale, r.shift);
        r.q = apply_map(r, r.p);
        seq.rungs.push_back(std::move(r));
      }
      seq.limit = Domain::from_id("corner:2");
      seq.limit_has_kernel = true;
      break;
    }
  }
  seq.q0 = CPoint(n);
  seq.q0.setZero();
  seq.q0[0] = -u;
  if (klass == ScalingClass::BidiscCorner) seq.q0[1] = -u;
  return seq;
}

// ---------------------------------------------------------------------------
// local Hausdorff gap on a grid

void default_window(int n, RVec& lo, RVec& hi) {
  lo.resize(2 * n);
  hi.resize(2 * n);
  for (int k = 0; k < n; ++k) {
    lo[2 * k] = -4.0;
    hi[2 * k] = 0.0;
    lo[2 * k + 1] = -2.0;
    hi[2 * k + 1] = 2.0;
  }
}

double hausdorff_gap(const Domain& A, const Domain& B, const RVec& lo, const RVec& hi,
                     int grid_per_axis) {
  const int d = static_cast<int>(lo.size());
  const int n = d / 2;
  const int G = grid_per_axis;
  std::vector<double> spacing(static_cast<std::size_t>(d));
  for (int r = 0; r < d; ++r) spacing[static_cast<std::size_t>(r)] = (hi[r] - lo[r]) / (G - 1);

  std::size_t total = 1;
  for (int r = 0; r < d; ++r) total *= static_cast<std::size_t>(G);

  std::vector<std::uint8_t> inA(total), inB(total);
  {
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    CPoint z(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int r = 0; r < d; ++r) {
        idx[static_cast<std::size_t>(r)] = static_cast<int>(rem % static_cast<std::size_t>(G));
        rem /= static_cast<std::size_t>(G);
      }
      for (int k = 0; k < n; ++k)
        z[k] = C(lo[2 * k] +
                     spacing[static_cast<std::size_t>(2 * k)] * idx[static_cast<std::size_t>(2 * k)],
                 lo[2 * k + 1] + spacing[static_cast<std::size_t>(2 * k + 1)] *
                                     idx[static_cast<std::size_t>(2 * k + 1)]);
      inA[flat] = A.member(z) ? 1 : 0;
      inB[flat] = B.member(z) ? 1 : 0;
    }
  }

  auto nearest = [&](std::size_t flat, const std::vector<std::uint8_t>& other) {
    std::vector<int> c(static_cast<std::size_t>(d));
    {
      std::size_t rem = flat;
      for (int r = 0; r < d; ++r) {
        c[static_cast<std::size_t>(r)] = static_cast<int>(rem % static_cast<std::size_t>(G));
        rem /= static_cast<std::size_t>(G);
      }
    }
    double best = std::numeric_limits<double>::infinity();
    double min_spacing = *std::min_element(spacing.begin(), spacing.end());
    for (int ring = 1; ring < G; ++ring) {
      std::vector<int> off(static_cast<std::size_t>(d), -ring);
      for (;;) {
        bool on_shell = false;
        for (int r = 0; r < d; ++r)
          if (std::abs(off[static_cast<std::size_t>(r)]) == ring) on_shell = true;
        if (on_shell) {
          bool valid = true;
          std::size_t f = 0, mul = 1;
          double dist2 = 0.0;
          for (int r = 0; r < d; ++r) {
            int cc = c[static_cast<std::size_t>(r)] + off[static_cast<std::size_t>(r)];
            if (cc < 0 || cc >= G) {
              valid = false;
              break;
            }
            f += static_cast<std::size_t>(cc) * mul;
            mul *= static_cast<std::size_t>(G);
            double dd = off[static_cast<std::size_t>(r)] * spacing[static_cast<std::size_t>(r)];
            dist2 += dd * dd;
          }
          if (valid && other[f]) best = std::min(best, std::sqrt(dist2));
        }
        int r = 0;
        while (r < d) {
          if (++off[static_cast<std::size_t>(r)] <= ring) break;
          off[static_cast<std::size_t>(r)] = -ring;
          ++r;
        }
        if (r == d) break;
      }
      if (std::isfinite(best) && best <= ring * min_spacing) break;
    }
    return best;
  };

  double gap = 0.0;
  double diam = 0.0;
  for (int r = 0; r < d; ++r) diam += (hi[r] - lo[r]) * (hi[r] - lo[r]);
  diam = std::sqrt(diam);
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (inA[flat] == inB[flat]) continue;
    double b = nearest(flat, inA[flat] ? inB : inA);
    gap = std::max(gap, std::isfinite(b) ? b : diam);
  }
  return gap;
}

// ---------------------------------------------------------------------------
// stability chain

std::string quantity_name(ChainQuantity q) {
  switch (q) {
    case ChainQuantity::Kernel:
      return "kernel";
    case ChainQuantity::Metric:
      return "metric";
    case ChainQuantity::Christoffel:
      return "christoffel";
    case ChainQuantity::Distance:
      return "distance";
    case ChainQuantity::Ball:
      return "ball";
  }
  return "?";
}

namespace {

struct RungModels {
  std::vector<KernelModel> scaled;
  std::unique_ptr<KernelModel> limit;  // null in Cauchy mode
};

RungModels build_models(const ScalingSequence& seq, const ChainOptions& opts) {
  RungModels m;
  KernelModel base = KernelModel::build(seq.source, opts.kernel);
  for (std::size_t j = 0; j < seq.rungs.size(); ++j)
    m.scaled.push_back(base.affine_pullback(seq.rungs[j].scale, seq.rungs[j].shift));
  if (seq.limit_has_kernel)
    m.limit = std::make_unique<KernelModel>(KernelModel::build(seq.limit, opts.kernel));
  return m;
}

}  // namespace

std::vector<ConvergenceReport> verify_chain(const ScalingSequence& seq,
                                            const std::vector<CPoint>& test_points,
                                            const std::vector<ChainQuantity>& quantities,
                                            const ChainOptions& opts) {
  if (seq.rungs.empty()) throw Error("verify_chain: empty sequence");
  RungModels models = build_models(seq, opts);
  const bool cauchy = !seq.limit_has_kernel;
  const std::size_t J = seq.rungs.size();
  const std::size_t rows = cauchy ? J - 1 : J;

  const KernelModel* ref = cauchy ? &models.scaled.back() : models.limit.get();
  const CPoint& qref = cauchy ? seq.rungs.back().q : seq.q0;

  std::vector<ConvergenceReport> out;
  for (ChainQuantity quantity : quantities) {
    ConvergenceReport rep;
    rep.quantity = quantity;
    rep.cauchy_mode = cauchy;

    std::vector<double> ref_kernel(test_points.size());
    std::vector<CMat> ref_metric(test_points.size());
    std::vector<ChristoffelArray> ref_gamma(test_points.size());
    std::vector<double> ref_dist(test_points.size());
    SphereSweep ref_sphere;

    switch (quantity) {
      case ChainQuantity::Kernel:
        for (std::size_t s = 0; s < test_points.size(); ++s)
          ref_kernel[s] = ref->diag(test_points[s]);
        break;
      case ChainQuantity::Metric:
        for (std::size_t s = 0; s < test_points.size(); ++s)
          ref_metric[s] = metric_tensor(*ref, test_points[s]).g;
        break;
      case ChainQuantity::Christoffel:
        for (std::size_t s = 0; s < test_points.size(); ++s)
          ref_gamma[s] = metric_state(*ref, test_points[s]).gamma;
        break;
      case ChainQuantity::Distance:
        for (std::size_t s = 0; s < test_points.size(); ++s) {
          if (!cauchy && has_closed_form_distance(seq.limit))
            ref_dist[s] = bergman_distance_closed_form(seq.limit, qref, test_points[s]);
          else
            ref_dist[s] = bergman_distance(*ref, qref, test_points[s], opts.distance).value;
        }
        break;
      case ChainQuantity::Ball:
        ref_sphere = sphere_sweep(*ref, qref, {opts.ball_radius}, opts.ball_dirs, 7);
        break;
    }

    for (std::size_t j = 0; j < rows; ++j) {
      const KernelModel& mj = models.scaled[j];
      const CPoint& qj = seq.rungs[j].q;
      ConvergenceRow row;
      row.j = static_cast<int>(j);
      row.delta = seq.rungs[j].delta;
      double sup = 0.0, sup_rel = 0.0;
      int flags = 0;

      switch (quantity) {
        case ChainQuantity::Kernel:
          for (std::size_t s = 0; s < test_points.size(); ++s) {
            try {
              double gap = std::abs(mj.diag(test_points[s]) - ref_kernel[s]);
              sup = std::max(sup, gap);
              sup_rel = std::max(sup_rel, gap / std::abs(ref_kernel[s]));
            } catch (const Error&) {
              ++flags;
            }
          }
          break;
        case ChainQuantity::Metric:
          for (std::size_t s = 0; s < test_points.size(); ++s) {
            try {
              double gap = (metric_tensor(mj, test_points[s]).g - ref_metric[s]).norm();
              sup = std::max(sup, gap);
              sup_rel = std::max(sup_rel, gap / ref_metric[s].norm());
            } catch (const Error&) {
              ++flags;
            }
          }
          break;
        case ChainQuantity::Christoffel:
          for (std::size_t s = 0; s < test_points.size(); ++s) {
            try {
              ChristoffelArray gj = metric_state(mj, test_points[s]).gamma;
              double gap = 0.0;
              for (std::size_t t = 0; t < gj.a.size(); ++t)
                gap = std::max(gap, std::abs(gj.a[t] - ref_gamma[s].a[t]));
              sup = std::max(sup, gap);
              sup_rel = std::max(sup_rel, gap / std::max(ref_gamma[s].max_norm(), 1e-12));
            } catch (const Error&) {
              ++flags;
            }
          }
          break;
        case ChainQuantity::Distance:
          for (std::size_t s = 0; s < test_points.size(); ++s) {
            try {
              double dj = bergman_distance(mj, qj, test_points[s], opts.distance).value;
              double gap = std::abs(dj - ref_dist[s]);
              sup = std::max(sup, gap);
              sup_rel = std::max(sup_rel, gap / std::max(ref_dist[s], 1e-12));
            } catch (const Error&) {
              ++flags;
            }
          }
          break;
        case ChainQuantity::Ball: {
          row.inclusion_upper = true;
          for (std::size_t di = 0; di < ref_sphere.directions.size(); ++di) {
            if (ref_sphere.flagged[0][di]) continue;
            const CPoint& x = ref_sphere.endpoints[0][di];
            try {
              double dj = bergman_distance(mj, qj, x, opts.distance).value;
              sup = std::max(sup, std::abs(dj - opts.ball_radius));
              if (dj > opts.ball_radius + opts.ball_eps) row.inclusion_upper = false;
            } catch (const Error&) {
              ++flags;
            }
          }
          row.inclusion_lower = true;
          try {
            SphereSweep sj =
                sphere_sweep(mj, qj, {opts.ball_radius - opts.ball_eps}, opts.ball_dirs, 7);
            for (std::size_t di = 0; di < sj.directions.size(); ++di) {
              if (sj.flagged[0][di]) continue;
              const CPoint& y = sj.endpoints[0][di];
              double dl;
              if (!cauchy && has_closed_form_distance(seq.limit))
                dl = bergman_distance_closed_form(seq.limit, qref, y);
              else
                dl = bergman_distance(*ref, qref, y, opts.distance).value;
              if (dl > opts.ball_radius) row.inclusion_lower = false;
            }
          } catch (const Error&) {
            ++flags;
          }
          sup_rel = sup / opts.ball_radius;
          break;
        }
      }
      row.sup_gap = sup;
      row.sup_gap_rel = sup_rel;
      row.flagged_points = flags;
      rep.rows.push_back(row);
    }

    rep.decreasing = rep.rows.size() > 1;
    for (std::size_t j = 0; j + 1 < rep.rows.size(); ++j)
      if (!(rep.rows[j + 1].sup_gap < rep.rows[j].sup_gap)) rep.decreasing = false;
    rep.final_gap = rep.rows.empty() ? 0.0 : rep.rows.back().sup_gap;
    out.push_back(std::move(rep));
  }
  return out;
}

std::string convergence_report_csv(const std::vector<ConvergenceReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "quantity,j,delta,sup_gap,sup_gap_rel,flags,inclusion_upper,inclusion_lower,cauchy\n";
  for (const auto& rep : reports)
    for (const auto& row : rep.rows)
      os << quantity_name(rep.quantity) << "," << row.j << "," << row.delta << ","
         << row.sup_gap << "," << row.sup_gap_rel << "," << row.flagged_points << ","
         << (row.inclusion_upper ? 1 : 0) << "," << (row.inclusion_lower ? 1 : 0) << ","
         << (rep.cauchy_mode ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace bgk
