#include "bgk/geodesics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bgk/errors.hpp"
#include "bgk/parallel.hpp"
#include "bgk/qmc.hpp"

namespace bgk {

CPoint GeodesicPath::endpoint() const { return to_complex(samples.back().x); }
RVec GeodesicPath::end_velocity() const { return samples.back().y; }

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// embedded 4th-order weights
constexpr double E1 = 5179.0 / 57600, E3 = 7571.0 / 16695, E4 = 393.0 / 640,
                 E5 = -92097.0 / 339200, E6 = 187.0 / 2100, E7 = 1.0 / 40;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4 * kMaxDim + 1, 1>;

struct Rhs {
  const KernelModel& model;
  int n;          // complex dimension
  double margin;  // boundary safety margin

  // state = [x(2n), y(2n), s]
  Vec operator()(const Vec& st) const {
    const int d = 2 * n;
    RVec x = st.segment(0, d);
    RVec y = st.segment(d, d);
    CPoint z = to_complex(x);
    if (model.domain().boundary_distance_quick(z) < margin)
      throw LeftDomain("geodesic reached the boundary safety margin", st[2 * d]);
    MetricState ms = metric_state(model, z);
    Vec out(2 * d + 1);
    out.segment(0, d) = y;
    for (int eta = 0; eta < d; ++eta) {
      double acc = 0.0;
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) acc += ms.gamma.at(eta, mu, nu) * y[mu] * y[nu];
      out[d + eta] = -acc;
    }
    double speed2 = y.dot(ms.gt * y);
    out[2 * d] = std::sqrt(std::max(speed2, 0.0));
    return out;
  }
};

struct StepResult {
  Vec next;
  double err;
  Vec k1;  // FSAL not exploited; k1 kept for Hermite use if needed
};

StepResult dp_step(const Rhs& rhs, const Vec& st, double h) {
  Vec k1 = rhs(st);
  Vec k2 = rhs(st + h * (A21 * k1));
  Vec k3 = rhs(st + h * (A31 * k1 + A32 * k2));
  Vec k4 = rhs(st + h * (A41 * k1 + A42 * k2 + A43 * k3));
  Vec k5 = rhs(st + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
  Vec k6 = rhs(st + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
  Vec next = st + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
  Vec k7 = rhs(next);
  Vec err4 = st + h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
  double err = (next - err4).lpNorm<Eigen::Infinity>();
  return {next, err, k1};
}

double pick_margin(const KernelModel& model, const IntegrateOptions& opts) {
  if (opts.margin >= 0.0) return opts.margin;
  return std::max(model.trust_margin(), 1e-6);
}

}  // namespace

std::size_t integrate_to_lengths(const KernelModel& model, const CPoint& x0, const CPoint& X,
                                 const std::vector<double>& targets,
                                 const std::function<void(std::size_t, const GeodesicState&)>& on_target,
                                 const IntegrateOptions& opts) {
  const int n = model.domain().dim();
  const int d = 2 * n;
  if (!model.domain().member(x0)) throw OutsideDomain("geodesic start outside domain");
  if (targets.empty()) return 0;

  double b0 = metric_length(model, x0, X);
  if (!(b0 > 0.0)) throw DegenerateMetric("zero initial velocity for geodesic");

  Rhs rhs{model, n, pick_margin(model, opts)};
  Vec st(2 * d + 1);
  st.segment(0, d) = to_real(x0);
  RVec yv = to_real(X) / b0;  // metric-unit speed
  st.segment(d, d) = yv;
  st[2 * d] = 0.0;

  std::size_t tk = 0;
  const double L = targets.back();
  double h = std::min(0.05, std::max(1e-4, L / 16.0));
  int steps = 0, rejected = 0;

  auto emit = [&](const Vec& state) {
    GeodesicState gs;
    gs.x = state.segment(0, d);
    gs.y = state.segment(d, d);
    gs.s = state[2 * d];
    on_target(tk, gs);
  };

  try {
    while (tk < targets.size()) {
      if (steps + rejected > opts.max_steps)
        throw NoConvergence("geodesic integration exceeded the step budget");
      double target = targets[tk];
      double remaining = target - st[2 * d];
      if (remaining <= 1e-13 * std::max(1.0, target)) {
        emit(st);
        ++tk;
        continue;
      }
      // trim the step so arc length does not overshoot the next target
      double h_try = std::min(h, remaining * 1.05);
      StepResult sr = dp_step(rhs, st, h_try);
      double scale = opts.tol * (1.0 + st.lpNorm<Eigen::Infinity>());
      if (sr.err > scale) {
        ++rejected;
        h = h_try * std::max(0.2, 0.9 * std::pow(scale / sr.err, 0.2));
        continue;
      }
      double s_next = sr.next[2 * d];
      if (s_next > target + 1e-13) {
        // land exactly on the target: shrink proportionally and retry
        double frac = remaining / std::max(s_next - st[2 * d], 1e-300);
        h = h_try * std::min(0.95, std::max(0.05, frac));
        continue;
      }
      st = sr.next;
      ++steps;
      if (sr.err > 0.0)
        h = h_try * std::min(5.0, std::max(0.2, 0.9 * std::pow(scale / sr.err, 0.2)));
      else
        h = h_try * 5.0;
    }
  } catch (const LeftDomain&) {
    return tk;
  }
  return tk;
}

GeodesicPath integrate_geodesic(const KernelModel& model, const CPoint& x0, const CPoint& X,
                                double L, const IntegrateOptions& opts) {
  const int n = model.domain().dim();
  const int d = 2 * n;
  if (!model.domain().member(x0)) throw OutsideDomain("geodesic start outside domain");
  double b0 = metric_length(model, x0, X);
  if (!(b0 > 0.0)) throw DegenerateMetric("zero initial velocity for geodesic");

  Rhs rhs{model, n, pick_margin(model, opts)};
  Vec st(2 * d + 1);
  st.segment(0, d) = to_real(x0);
  st.segment(d, d) = to_real(X) / b0;
  st[2 * d] = 0.0;

  GeodesicPath path;
  auto push = [&](const Vec& state) {
    GeodesicState gs;
    gs.x = state.segment(0, d);
    gs.y = state.segment(d, d);
    gs.s = state[2 * d];
    if (opts.record_samples || path.samples.empty())
      path.samples.push_back(gs);
    else
      path.samples.back() = gs;
  };
  push(st);

  double h = std::min(0.05, std::max(1e-4, L / 16.0));
  while (st[2 * d] < L * (1.0 - 1e-13)) {
    if (path.steps + path.rejected > opts.max_steps)
      throw NoConvergence("geodesic integration exceeded the step budget");
    double remaining = L - st[2 * d];
    double h_try = std::min(h, remaining * 1.05);
    StepResult sr;
    try {
      sr = dp_step(rhs, st, h_try);
    } catch (const LeftDomain&) {
      throw LeftDomain("geodesic reached the boundary safety margin", st[2 * d]);
    }
    double scale = opts.tol * (1.0 + st.lpNorm<Eigen::Infinity>());
    if (sr.err > scale) {
      ++path.rejected;
      h = h_try * std::max(0.2, 0.9 * std::pow(scale / sr.err, 0.2));
      continue;
    }
    double s_next = sr.next[2 * d];
    if (s_next > L + 1e-13) {
      double frac = remaining / std::max(s_next - st[2 * d], 1e-300);
      h = h_try * std::min(0.95, std::max(0.05, frac));
      continue;
    }
    st = sr.next;
    ++path.steps;
    push(st);
    if (sr.err > 0.0)
      h = h_try * std::min(5.0, std::max(0.2, 0.9 * std::pow(scale / sr.err, 0.2)));
    else
      h = h_try * 5.0;
  }
  path.length = st[2 * d];
  return path;
}

// ---------------------------------------------------------------------------
// distance

namespace {

// straight-segment metric length by 8-node Gauss-Legendre
double segment_length(const KernelModel& model, const CPoint& a, const CPoint& b) {
  static const double gl_x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
  static const double gl_w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
  CPoint diff = b - a;
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      double t = 0.5 + 0.5 * sgn * gl_x[i];
      CPoint mid = a + t * diff;
      acc += 0.5 * gl_w[i] * metric_length(model, mid, diff);
    }
  }
  return acc;
}

struct ShootOutcome {
  bool ok = false;
  double length = 0.0;
  double miss = std::numeric_limits<double>::infinity();
  RVec dir;  // initial direction (euclidean-normalized), for tie-breaking
};

// endpoint of exp_z(u) where u is a real 2n velocity; length = |u|_g
bool shoot_endpoint(const KernelModel& model, const CPoint& z, const RVec& u, RVec& end,
                    double& len, const IntegrateOptions& iopts) {
  CPoint uc = to_complex(u);
  double l = metric_length(model, z, uc);
  if (!(l > 0.0)) return false;
  bool reached = false;
  std::vector<double> targets{l};
  std::size_t got = integrate_to_lengths(
      model, z, uc, targets,
      [&](std::size_t, const GeodesicState& gs) {
        end = gs.x;
        reached = true;
      },
      iopts);
  len = l;
  return got == 1 && reached;
}

ShootOutcome shoot_to(const KernelModel& model, const CPoint& z, const CPoint& w,
                      const RVec& u_init, double miss_goal, const IntegrateOptions& iopts) {
  const int d = static_cast<int>(u_init.size());
  RVec u = u_init;
  RVec target = to_real(w);
  ShootOutcome out;

  RVec end(d);
  double len = 0.0;
  auto residual = [&](const RVec& uu, RVec& f) -> bool {
    if (!shoot_endpoint(model, z, uu, end, len, iopts)) return false;
    f = end - target;
    return true;
  };

  RVec f(d);
  if (!residual(u, f)) return out;
  double fn = f.norm();
  for (int iter = 0; iter < 40 && fn > miss_goal; ++iter) {
    // finite-difference Jacobian
    RMat J(d, d);
    double hstep = 1e-6 * (1.0 + u.norm());
    bool jac_ok = true;
    for (int c = 0; c < d; ++c) {
      RVec up = u;
      up[c] += hstep;
      RVec fp(d);
      if (!residual(up, fp)) {
        jac_ok = false;
        break;
      }
      J.col(c) = (fp - f) / hstep;
    }
    if (!jac_ok) break;
    RVec delta = J.fullPivLu().solve(-f);
    if (!delta.allFinite()) break;
    double step = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 10; ++ls) {
      RVec u_new = u + step * delta;
      RVec f_new(d);
      if (residual(u_new, f_new) && f_new.norm() < fn) {
        u = u_new;
        f = f_new;
        fn = f_new.norm();
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  if (fn <= miss_goal) {
    if (!residual(u, f)) return out;
    out.ok = true;
    out.length = len;
    out.miss = fn;
    out.dir = u / std::max(u.norm(), 1e-300);
  } else {
    out.miss = fn;
  }
  return out;
}

// Total length of the piecewise-linear path, metric at segment midpoints.
double chain_length(const KernelModel& model, const std::vector<CPoint>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    CPoint mid = 0.5 * (pts[i] + pts[i + 1]);
    s += metric_length_fast(model, mid, pts[i + 1] - pts[i]);
  }
  return s;
}

// Exact gradient of the chain length with respect to the interior points,
// assembled from d g / d z at the segment midpoints.
double chain_length_grad(const KernelModel& model, const std::vector<CPoint>& pts,
                         Eigen::VectorXd& grad) {
  const int n = model.domain().dim();
  const std::size_t K = pts.size() - 1;
  grad.setZero();
  double total = 0.0;
  CMat g;
  std::vector<C> dg;
  for (std::size_t i = 0; i < K; ++i) {
    const CPoint& A = pts[i];
    const CPoint& B = pts[i + 1];
    CPoint mid = 0.5 * (A + B);
    CPoint delta = B - A;
    metric_with_derivative(model, mid, g, dg);
    C q = (delta.transpose() * g * delta.conjugate())(0, 0);
    double ell = std::sqrt(std::max(q.real(), 1e-300));
    total += ell;
    // Wirtinger derivative of Q with respect to the endpoints
    for (int k = 0; k < n; ++k) {
      C dq_g(0.0);  // through the metric argument (shared factor 1/2)
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu)
          dq_g += dg[static_cast<std::size_t>((k * n + mu) * n + nu)] * delta[mu] *
                  std::conj(delta[nu]);
      C dq_delta(0.0);  // through delta
      for (int nu = 0; nu < n; ++nu) dq_delta += g(k, nu) * std::conj(delta[nu]);
      C dQ_dA = 0.5 * dq_g - dq_delta;
      C dQ_dB = 0.5 * dq_g + dq_delta;
      // real gradient: dF/dx = 2 Re dF/dz, dF/dy = -2 Im dF/dz; then d ell = dQ/(2 ell)
      if (i >= 1) {
        grad[static_cast<Eigen::Index>(2 * n * (i - 1)) + 2 * k] += dQ_dA.real() / ell;
        grad[static_cast<Eigen::Index>(2 * n * (i - 1)) + 2 * k + 1] += -dQ_dA.imag() / ell;
      }
      if (i + 1 <= K - 1) {
        grad[static_cast<Eigen::Index>(2 * n * i) + 2 * k] += dQ_dB.real() / ell;
        grad[static_cast<Eigen::Index>(2 * n * i) + 2 * k + 1] += -dQ_dB.imag() / ell;
      }
    }
  }
  return total;
}

double energy_path_length(const KernelModel& model, const CPoint& z, const CPoint& w, int K,
                          std::vector<CPoint>& pts) {
  if (pts.empty()) {
    pts.reserve(static_cast<std::size_t>(K + 1));
    for (int i = 0; i <= K; ++i) pts.push_back(z + (static_cast<double>(i) / K) * (w - z));
  }
  const int n = model.domain().dim();
  const Eigen::Index dof = static_cast<Eigen::Index>(2 * n * (pts.size() - 2));
  if (dof <= 0) return chain_length(model, pts);

  auto pack = [&](Eigen::VectorXd& x) {
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      RVec r = to_real(pts[i]);
      for (int c = 0; c < 2 * n; ++c) x[static_cast<Eigen::Index>(2 * n * (i - 1)) + c] = r[c];
    }
  };
  auto unpack = [&](const Eigen::VectorXd& x, std::vector<CPoint>& target) {
    for (std::size_t i = 1; i + 1 < target.size(); ++i) {
      RVec r(2 * n);
      for (int c = 0; c < 2 * n; ++c) r[c] = x[static_cast<Eigen::Index>(2 * n * (i - 1)) + c];
      target[i] = to_complex(r);
    }
  };
  auto feasible = [&](const std::vector<CPoint>& ps) {
    for (std::size_t i = 1; i + 1 < ps.size(); ++i)
      if (!model.domain().member(ps[i])) return false;
    return true;
  };

  Eigen::VectorXd x(dof), gradv(dof), grad_new(dof);
  pack(x);
  double len = chain_length_grad(model, pts, gradv);
  double step = 1e-2 / std::max(gradv.norm(), 1e-12);
  std::vector<CPoint> trial = pts;
  int stall = 0;
  // gradient descent with backtracking; Barzilai-Borwein step proposal
  for (int iter = 0; iter < 800 && stall < 4; ++iter) {
    double gn = gradv.norm();
    if (gn < 1e-10) break;
    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < 25; ++bt) {
      Eigen::VectorXd x_new = x - s * gradv;
      unpack(x_new, trial);
      if (feasible(trial)) {
        double len_new = chain_length(model, trial);
        if (len_new < len) {
          grad_new.resize(dof);
          double check = chain_length_grad(model, trial, grad_new);
          Eigen::VectorXd sv = x_new - x;
          Eigen::VectorXd yv = grad_new - gradv;
          double sy = std::abs(sv.dot(yv));
          double yy = yv.squaredNorm();
          step = (yy > 1e-300) ? std::clamp(sy / yy, 1e-10, 1e3) : s * 2.0;
          if (len - len_new < 1e-10 * std::max(1.0, len))
            ++stall;
          else
            stall = 0;
          x = x_new;
          len = check;
          gradv = grad_new;
          pts.swap(trial);
          trial = pts;
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) break;
  }
  return chain_length(model, pts);
}

}  // namespace

DistanceResult bergman_distance(const KernelModel& model, const CPoint& z, const CPoint& w,
                                const DistanceOptions& opts) {
  if (!model.domain().member(z) || !model.domain().member(w))
    throw OutsideDomain("bergman_distance: endpoint outside the domain");
  DistanceResult res;
  if ((z - w).norm() < 1e-15) {
    res.value = 0.0;
    res.method = DistanceMethod::Shooting;
    res.shooting_converged = true;
    res.shoot_miss = 0.0;
    return res;
  }
  const int n = model.domain().dim();
  const int d = 2 * n;

  const bool want_shoot = opts.mode != DistanceOptions::Mode::EnergyOnly;
  const bool want_energy = opts.mode == DistanceOptions::Mode::EnergyOnly ||
                           opts.mode == DistanceOptions::Mode::Both;

  ShootOutcome best;
  if (want_shoot) {
    double L0 = segment_length(model, z, w);
    RVec dir0 = to_real(w) - to_real(z);
    dir0 /= dir0.norm();
    double b0 = metric_length(model, z, to_complex(dir0));
    RVec u0 = dir0 * (L0 / b0);

    std::vector<RVec> starts{u0};
    // perturbed restarts: small rotations of the initial direction and
    // rescaled lengths, deterministic order
    auto dirs = sphere_directions(d, opts.shooting_multistarts, 99);
    for (int k = 0; k < opts.shooting_multistarts; ++k) {
      RVec pert(d);
      for (int r = 0; r < d; ++r) pert[r] = dirs[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)];
      RVec u = u0 + 0.3 * u0.norm() * pert;
      starts.push_back(u);
    }
    for (const auto& u : starts) {
      ShootOutcome sc = shoot_to(model, z, w, u, opts.shooting_miss, opts.integrate);
      if (!sc.ok) continue;
      if (!best.ok || sc.length < best.length - 1e-9) {
        best = sc;
      } else if (std::abs(sc.length - best.length) <= 1e-9) {
        // deterministic tie-break: lexicographically smallest direction
        for (int r = 0; r < d; ++r) {
          if (sc.dir[r] < best.dir[r] - 1e-12) {
            best = sc;
            break;
          }
          if (sc.dir[r] > best.dir[r] + 1e-12) break;
        }
      }
      if (best.ok && opts.mode == DistanceOptions::Mode::Auto) break;
    }
    if (best.ok) {
      res.value = best.length;
      res.method = DistanceMethod::Shooting;
      res.shoot_miss = best.miss;
      res.shooting_converged = true;
      if (!want_energy) return res;
    }
  }

  if (want_energy || !best.ok) {
    std::vector<CPoint> pts;
    double prev = std::numeric_limits<double>::infinity();
    double len = 0.0;
    for (int K = opts.energy_segments; K <= opts.energy_segments_max; K *= 2) {
      if (!pts.empty()) {
        // resample to 2K by midpoint insertion
        std::vector<CPoint> finer;
        finer.reserve(pts.size() * 2);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
          finer.push_back(pts[i]);
          finer.push_back(0.5 * (pts[i] + pts[i + 1]));
        }
        finer.push_back(pts.back());
        pts = std::move(finer);
      }
      len = energy_path_length(model, z, w, K, pts);
      if (std::abs(prev - len) < opts.tol) break;
      prev = len;
    }
    res.energy_value = len;
    if (!best.ok) {
      if (!std::isfinite(len)) throw NoConvergence("bergman_distance: both methods failed");
      res.value = len;
      res.method = DistanceMethod::Energy;
      return res;
    }
    if (len < res.value) {
      res.value = len;
      res.method = DistanceMethod::Energy;
    }
  }
  if (!res.shooting_converged && res.energy_value < 0.0)
    throw NoConvergence("bergman_distance: no method produced a value");
  return res;
}

// ---------------------------------------------------------------------------
// balls and spheres

namespace {

std::vector<RVec> metric_unit_directions(const KernelModel& model, const CPoint& p, int n_dirs,
                                         std::uint64_t seed) {
  const int n = model.domain().dim();
  const int d = 2 * n;
  auto raw = sphere_directions(d, n_dirs, seed);
  MetricState ms = metric_tensor(model, p);
  std::vector<RVec> dirs;
  dirs.reserve(raw.size());
  for (const auto& rv : raw) {
    RVec v(d);
    for (int r = 0; r < d; ++r) v[r] = rv[static_cast<std::size_t>(r)];
    double bn = std::sqrt(std::max(v.dot(ms.gt * v), 1e-300));
    dirs.push_back(v / bn);
  }
  return dirs;
}

}  // namespace

SphereSweep sphere_sweep(const KernelModel& model, const CPoint& p,
                         const std::vector<double>& radii, int n_dirs, std::uint64_t seed,
                         const IntegrateOptions& opts) {
  const int n = model.domain().dim();
  if (n_dirs <= 0) n_dirs = (1 << n) * 64;
  SphereSweep sw;
  sw.center = p;
  sw.radii = radii;
  sw.directions = metric_unit_directions(model, p, n_dirs, seed);
  sw.endpoints.assign(radii.size(), std::vector<CPoint>(static_cast<std::size_t>(n_dirs)));
  sw.flagged.assign(radii.size(), std::vector<bool>(static_cast<std::size_t>(n_dirs), true));

  parallel_for(n_dirs, [&](int di) {
    const RVec& v = sw.directions[static_cast<std::size_t>(di)];
    try {
      integrate_to_lengths(
          model, p, to_complex(v), radii,
          [&](std::size_t k, const GeodesicState& gs) {
            sw.endpoints[k][static_cast<std::size_t>(di)] = to_complex(gs.x);
            sw.flagged[k][static_cast<std::size_t>(di)] = false;
          },
          opts);
    } catch (const DegenerateMetric&) {
      // direction stays flagged at every radius it failed to reach
    } catch (const NoConvergence&) {
    }
  });
  return sw;
}

double SphereSweep::flagged_fraction(std::size_t radius_index) const {
  const auto& f = flagged[radius_index];
  std::size_t count = 0;
  for (bool b : f) count += b ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(f.size());
}

BergmanBallSample bergman_ball(const KernelModel& model, const CPoint& p, double r, int n_dirs,
                               std::uint64_t seed, const IntegrateOptions& opts) {
  if (!(r > 0.0)) throw Error("bergman_ball: radius must be positive");
  SphereSweep sw = sphere_sweep(model, p, {r}, n_dirs, seed, opts);
  BergmanBallSample ball;
  ball.center = p;
  ball.radius = r;
  ball.directions = sw.directions;
  ball.flagged = sw.flagged[0];
  ball.endpoints.resize(sw.endpoints[0].size());
  for (std::size_t i = 0; i < sw.endpoints[0].size(); ++i)
    if (!ball.flagged[i]) ball.endpoints[i] = sw.endpoints[0][i];
  return ball;
}

// ---------------------------------------------------------------------------
// Hahn-Lu comparison (declared in metric.hpp; lives here to reuse shooting)

std::vector<HahnLuMargin> hahn_lu_check(const KernelModel& model,
                                        const std::vector<std::pair<CPoint, CPoint>>& pairs,
                                        bool shoot) {
  const Domain& dom = model.domain();
  std::vector<HahnLuMargin> out(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int i) {
    const auto& [z, w] = pairs[static_cast<std::size_t>(i)];
    HahnLuMargin m;
    m.z = z;
    m.w = w;
    m.caratheodory = caratheodory_distance(dom, z, w);
    m.bergman = shoot ? bergman_distance(model, z, w).value
                      : bergman_distance_closed_form(dom, z, w);
    m.margin = m.bergman - m.caratheodory;
    out[static_cast<std::size_t>(i)] = m;
  });
  return out;
}

// ---------------------------------------------------------------------------
// CSV exports

std::string geodesic_path_csv(const GeodesicPath& path) {
  std::ostringstream os;
  os.precision(17);
  os << "t";
  const Eigen::Index d = path.samples.empty() ? 0 : path.samples.front().x.size();
  for (Eigen::Index r = 0; r < d; ++r) os << ",x" << r;
  for (Eigen::Index r = 0; r < d; ++r) os << ",y" << r;
  os << "\n";
  for (const auto& s : path.samples) {
    os << s.s;
    for (Eigen::Index r = 0; r < d; ++r) os << "," << s.x[r];
    for (Eigen::Index r = 0; r < d; ++r) os << "," << s.y[r];
    os << "\n";
  }
  return os.str();
}

std::string ball_sample_csv(const BergmanBallSample& ball) {
  std::ostringstream os;
  os.precision(17);
  const Eigen::Index d = ball.directions.empty() ? 0 : ball.directions.front().size();
  os << "t";
  for (Eigen::Index r = 0; r < d; ++r) os << ",x" << r;
  for (Eigen::Index r = 0; r < d; ++r) os << ",y" << r;
  os << ",flagged\n";
  for (std::size_t i = 0; i < ball.directions.size(); ++i) {
    os << ball.radius;
    if (ball.flagged[i]) {
      for (Eigen::Index r = 0; r < 2 * d; ++r) os << ",nan";
      os << ",1\n";
      continue;
    }
    RVec x = to_real(ball.endpoints[i]);
    for (Eigen::Index r = 0; r < d; ++r) os << "," << x[r];
    for (Eigen::Index r = 0; r < d; ++r) os << "," << ball.directions[i][r];
    os << ",0\n";
  }
  return os.str();
}

}  // namespace bgk
