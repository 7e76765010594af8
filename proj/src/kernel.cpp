#include "bgk/kernel.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>

#include "bgk/errors.hpp"
#include "bgk/qmc.hpp"
#include "bgk/simd/kernels.hpp"

namespace bgk {

C MonomialPoly::eval(const CPoint& z) const {
  C acc(0.0);
  for (const auto& [alpha, coeff] : terms) {
    C t = coeff;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (int p = 0; p < alpha[i]; ++p) t *= z[static_cast<Eigen::Index>(i)];
    acc += t;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// KernelJet accessors

C KernelJet::deriv(const int* a, const int* b) const {
  std::array<std::uint8_t, kJetMaxVars> e{};
  for (int i = 0; i < n; ++i) {
    e[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(a ? a[i] : 0);
    e[static_cast<std::size_t>(n + i)] = static_cast<std::uint8_t>(b ? b[i] : 0);
  }
  int idx = sp->index(e.data());
  if (idx < 0) throw Error("KernelJet::deriv: order exceeds table");
  return d[static_cast<std::size_t>(idx)];
}

C KernelJet::deriv1z(int mu) const {
  int a[kMaxDim] = {0, 0, 0};
  a[mu] = 1;
  return deriv(a, nullptr);
}

C KernelJet::deriv1w(int nu) const {
  int b[kMaxDim] = {0, 0, 0};
  b[nu] = 1;
  return deriv(nullptr, b);
}

C KernelJet::deriv2zw(int mu, int nu) const {
  int a[kMaxDim] = {0, 0, 0};
  int b[kMaxDim] = {0, 0, 0};
  a[mu] = 1;
  b[nu] = 1;
  return deriv(a, b);
}

C KernelJet::deriv2zz(int mu, int nu) const {
  int a[kMaxDim] = {0, 0, 0};
  a[mu] += 1;
  a[nu] += 1;
  return deriv(a, nullptr);
}

C KernelJet::deriv3zzw(int k, int mu, int nu) const {
  int a[kMaxDim] = {0, 0, 0};
  int b[kMaxDim] = {0, 0, 0};
  a[k] += 1;
  a[mu] += 1;
  b[nu] = 1;
  return deriv(a, b);
}

// ---------------------------------------------------------------------------
// Model internals

struct KernelModel::Impl {
  Domain dom{Domain::disc()};
  KernelMode mode = KernelMode::ClosedForm;
  KernelOptions opts;

  enum class Closed { BallK, PolydiscK };
  Closed closed = Closed::BallK;

  // chart pullback
  ChartType chart = ChartType::Identity;
  Closed chart_target = Closed::BallK;

  // affine pullback: this domain = { scale .* z + shift : z in base domain }
  std::shared_ptr<const Impl> base;
  CPoint scale;
  CPoint shift;
  double inv_det2 = 1.0;  // |det diag(scale)|^{-2}

  // diagonal series
  struct SeriesRow {
    std::array<int, kMaxDim - 1> prefix{};
    int offset = 0;
    int len = 0;
  };
  std::vector<SeriesRow> rows;
  std::vector<double> csq;  // 1/M(alpha), rows flattened, inner index = last exponent
  MomentTable mtable;

  // gram series (registered caps)
  std::vector<std::vector<int>> gexps;
  Eigen::MatrixXcd gcoeff;

  const JetSpace* spaces[4] = {nullptr, nullptr, nullptr, nullptr};

  mutable std::atomic<long> warns{0};

  const JetSpace& space(int order) const { return *spaces[order]; }
};

namespace {

using Impl = KernelModel::Impl;
using Closed = Impl::Closed;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// falling factorial k (k-1) ... (k-o+1); 0 when k < o
double ff(int k, int o) {
  double f = 1.0;
  for (int i = 0; i < o; ++i) f *= (k - i);
  return (k >= o) ? f : 0.0;
}

// --- closed forms in jet arithmetic --------------------------------------

Jet ball_kernel_jet(const std::vector<Jet>& zj, const std::vector<Jet>& wj, int n,
                    const JetSpace& sp) {
  Jet s(sp);
  for (int i = 0; i < n; ++i) s += zj[static_cast<std::size_t>(i)] * wj[static_cast<std::size_t>(i)];
  Jet one_minus = Jet::constant(sp, C(1.0)) - s;
  double c = factorial(n) / std::pow(M_PI, n);
  return one_minus.pow(-(n + 1)) * C(c);
}

Jet polydisc_kernel_jet(const std::vector<Jet>& zj, const std::vector<Jet>& wj, int n,
                        const JetSpace& sp) {
  Jet k = Jet::constant(sp, C(1.0));
  for (int i = 0; i < n; ++i) {
    Jet d = Jet::constant(sp, C(1.0)) - zj[static_cast<std::size_t>(i)] * wj[static_cast<std::size_t>(i)];
    k = k * d.pow(-2) * C(1.0 / M_PI);
  }
  return k;
}

Jet closed_kernel_jet(Closed kind, const std::vector<Jet>& zj, const std::vector<Jet>& wj,
                      int n, const JetSpace& sp) {
  return kind == Closed::BallK ? ball_kernel_jet(zj, wj, n, sp)
                               : polydisc_kernel_jet(zj, wj, n, sp);
}

// Chart component jets and Jacobian-determinant jet. All registered charts
// have real coefficients, so the same formulas serve the z-slot jets and
// the conjugated w-slot jets.
void chart_jets(ChartType type, int n, const std::vector<Jet>& v, const JetSpace& sp,
                std::vector<Jet>& image, Jet& det) {
  image.clear();
  switch (type) {
    case ChartType::HalfPlaneToDisc: {
      Jet d = Jet::constant(sp, C(1.0)) - v[0];
      Jet dinv = d.recip();
      image.push_back((Jet::constant(sp, C(1.0)) + v[0]) * dinv);
      det = dinv * dinv * C(2.0);
      return;
    }
    case ChartType::SiegelToBall: {
      Jet d = Jet::constant(sp, C(1.0)) - v[0];
      Jet dinv = d.recip();
      image.push_back((Jet::constant(sp, C(1.0)) + v[0]) * dinv);
      for (int k = 1; k < n; ++k)
        image.push_back(v[static_cast<std::size_t>(k)] * dinv * C(std::sqrt(2.0)));
      det = dinv.pow(n + 1) * C(2.0 * std::pow(std::sqrt(2.0), n - 1));
      return;
    }
    case ChartType::HalfSpaceProductToPolydisc: {
      det = Jet::constant(sp, C(1.0));
      for (int k = 0; k < n; ++k) {
        Jet d = Jet::constant(sp, C(1.0)) - v[static_cast<std::size_t>(k)];
        Jet dinv = d.recip();
        image.push_back((Jet::constant(sp, C(1.0)) + v[static_cast<std::size_t>(k)]) * dinv);
        det = det * dinv * dinv * C(2.0);
      }
      return;
    }
    case ChartType::Identity:
      image = v;
      det = Jet::constant(sp, C(1.0));
      return;
  }
  throw NoChart("chart_jets: bad chart");
}

void jet_to_kernel_jet(const Jet& j, int n, int order, const JetSpace& sp, KernelJet& out) {
  out.n = n;
  out.order = order;
  out.sp = &sp;
  for (int idx = 0; idx < sp.size; ++idx) {
    double fact = 1.0;
    for (int v = 0; v < sp.nv; ++v) {
      int e = sp.exps[static_cast<std::size_t>(idx)][static_cast<std::size_t>(v)];
      for (int k = 2; k <= e; ++k) fact *= k;
    }
    out.d[static_cast<std::size_t>(idx)] = j.coeff(idx) * fact;
  }
}

// --- diagonal series ------------------------------------------------------

struct SeriesScratch {
  // power tables per coordinate, index [coord][exp]
  std::vector<std::vector<C>> zpow, wpow;
  // per (a_last, b_last) inner vectors, split re/im
  std::vector<std::vector<double>> ure, uim;
};

SeriesScratch& series_scratch() {
  thread_local SeriesScratch s;
  return s;
}

int pair_code(int a, int b) { return a * 4 + b; }

void eval_series(const Impl& im, const CPoint& z, const CPoint& w, int order, KernelJet& out) {
  const int n = im.dom.dim();
  const int deg = im.opts.degree;
  const JetSpace& sp = im.space(order);
  out.n = n;
  out.order = order;
  out.sp = &sp;

  auto& sc = series_scratch();
  sc.zpow.resize(static_cast<std::size_t>(n));
  sc.wpow.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& zp = sc.zpow[static_cast<std::size_t>(i)];
    auto& wp = sc.wpow[static_cast<std::size_t>(i)];
    zp.resize(static_cast<std::size_t>(deg + 1));
    wp.resize(static_cast<std::size_t>(deg + 1));
    zp[0] = C(1.0);
    wp[0] = C(1.0);
    C zc = z[i], wc = std::conj(w[i]);
    for (int k = 1; k <= deg; ++k) {
      zp[static_cast<std::size_t>(k)] = zp[static_cast<std::size_t>(k - 1)] * zc;
      wp[static_cast<std::size_t>(k)] = wp[static_cast<std::size_t>(k - 1)] * wc;
    }
  }

  // inner vectors for the last coordinate
  sc.ure.resize(16);
  sc.uim.resize(16);
  const auto& zl = sc.zpow[static_cast<std::size_t>(n - 1)];
  const auto& wl = sc.wpow[static_cast<std::size_t>(n - 1)];
  for (int a = 0; a <= order; ++a) {
    for (int b = 0; a + b <= order; ++b) {
      auto& re = sc.ure[static_cast<std::size_t>(pair_code(a, b))];
      auto& imv = sc.uim[static_cast<std::size_t>(pair_code(a, b))];
      re.assign(static_cast<std::size_t>(deg + 1), 0.0);
      imv.assign(static_cast<std::size_t>(deg + 1), 0.0);
      for (int k = std::max(a, b); k <= deg; ++k) {
        C u = ff(k, a) * ff(k, b) * zl[static_cast<std::size_t>(k - a)] *
              wl[static_cast<std::size_t>(k - b)];
        re[static_cast<std::size_t>(k)] = u.real();
        imv[static_cast<std::size_t>(k)] = u.imag();
      }
    }
  }

  for (int idx = 0; idx < sp.size; ++idx) {
    const auto& e = sp.exps[static_cast<std::size_t>(idx)];
    const int al = e[static_cast<std::size_t>(n - 1)];
    const int bl = e[static_cast<std::size_t>(2 * n - 1)];
    const auto& re = sc.ure[static_cast<std::size_t>(pair_code(al, bl))];
    const auto& imv = sc.uim[static_cast<std::size_t>(pair_code(al, bl))];
    C acc(0.0);
    for (const auto& row : im.rows) {
      C outer(1.0);
      bool zero = false;
      for (int i = 0; i + 1 < n; ++i) {
        int ai = e[static_cast<std::size_t>(i)];
        int bi = e[static_cast<std::size_t>(n + i)];
        int p = row.prefix[static_cast<std::size_t>(i)];
        double f = ff(p, ai) * ff(p, bi);
        if (f == 0.0) {
          zero = true;
          break;
        }
        outer *= f * sc.zpow[static_cast<std::size_t>(i)][static_cast<std::size_t>(p - ai)] *
                 sc.wpow[static_cast<std::size_t>(i)][static_cast<std::size_t>(p - bi)];
      }
      if (zero) continue;
      double dr, di;
      simd::dot2(im.csq.data() + row.offset, re.data(), imv.data(),
                 static_cast<std::size_t>(row.len), dr, di);
      acc += outer * C(dr, di);
    }
    out.d[static_cast<std::size_t>(idx)] = acc;
  }
}

// --- gram series ----------------------------------------------------------

void eval_gram(const Impl& im, const CPoint& z, const CPoint& w, int order, KernelJet& out) {
  const int n = im.dom.dim();
  const JetSpace& sp = im.space(order);
  out.n = n;
  out.order = order;
  out.sp = &sp;
  const auto T = static_cast<Eigen::Index>(im.gexps.size());

  // monomial derivative vectors per z multi-order and w multi-order
  auto build_vec = [&](const CPoint& pt, const int* o, bool conj_pt) {
    Eigen::VectorXcd v(T);
    for (Eigen::Index t = 0; t < T; ++t) {
      const auto& alpha = im.gexps[static_cast<std::size_t>(t)];
      C val(1.0);
      bool zero = false;
      for (int i = 0; i < n; ++i) {
        double f = ff(alpha[static_cast<std::size_t>(i)], o[i]);
        if (f == 0.0) {
          zero = true;
          break;
        }
        C base = conj_pt ? std::conj(pt[i]) : pt[i];
        C p(1.0);
        for (int k = 0; k < alpha[static_cast<std::size_t>(i)] - o[i]; ++k) p *= base;
        val *= f * p;
      }
      v[t] = zero ? C(0.0) : val;
    }
    return v;
  };

  // cache w-side products C * ub per b-order
  std::vector<Eigen::VectorXcd> yb(static_cast<std::size_t>(sp.size));
  std::vector<bool> have(static_cast<std::size_t>(sp.size), false);

  for (int idx = 0; idx < sp.size; ++idx) {
    const auto& e = sp.exps[static_cast<std::size_t>(idx)];
    int a[kMaxDim] = {0, 0, 0};
    int b[kMaxDim] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
      a[i] = e[static_cast<std::size_t>(i)];
      b[i] = e[static_cast<std::size_t>(n + i)];
    }
    int bkey = 0;
    {
      std::array<std::uint8_t, kJetMaxVars> be{};
      for (int i = 0; i < n; ++i) be[static_cast<std::size_t>(n + i)] = static_cast<std::uint8_t>(b[i]);
      bkey = sp.index(be.data());
    }
    if (!have[static_cast<std::size_t>(bkey)]) {
      Eigen::VectorXcd ub = build_vec(w, b, /*conj_pt=*/true);
      yb[static_cast<std::size_t>(bkey)] = im.gcoeff * ub;
      have[static_cast<std::size_t>(bkey)] = true;
    }
    Eigen::VectorXcd ua = build_vec(z, a, /*conj_pt=*/false);
    out.d[static_cast<std::size_t>(idx)] =
        ua.cwiseProduct(yb[static_cast<std::size_t>(bkey)]).sum();
  }
}

// --- helpers for build ----------------------------------------------------

void build_series_rows(Impl& im) {
  const int n = im.dom.dim();
  const int deg = im.opts.degree;
  im.rows.clear();
  im.csq.clear();
  std::vector<int> prefix(static_cast<std::size_t>(std::max(n - 1, 0)), 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == n - 1) {
      Impl::SeriesRow row;
      for (int i = 0; i < n - 1; ++i) row.prefix[static_cast<std::size_t>(i)] = prefix[static_cast<std::size_t>(i)];
      row.offset = static_cast<int>(im.csq.size());
      row.len = remaining + 1;
      std::vector<int> alpha(prefix.begin(), prefix.end());
      alpha.push_back(0);
      for (int k = 0; k <= remaining; ++k) {
        alpha[static_cast<std::size_t>(n - 1)] = k;
        im.csq.push_back(1.0 / im.mtable.at(alpha));
      }
      im.rows.push_back(row);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      prefix[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, deg);
}

bool euclidean_ball_params(const Domain& d, CPoint& center, double& radius) {
  if (d.kind() == DomainKind::Ball) {
    center = CPoint(d.dim());
    center.setZero();
    radius = 1.0;
    return true;
  }
  if (d.kind() != DomainKind::AffineImage || d.base().kind() != DomainKind::Ball) return false;
  const CMat& A = d.affine_map();
  C s = A(0, 0);
  if (std::abs(s.imag()) > 1e-14) return false;
  for (int i = 0; i < d.dim(); ++i)
    for (int j = 0; j < d.dim(); ++j) {
      C want = (i == j) ? s : C(0.0);
      if (std::abs(A(i, j) - want) > 1e-14) return false;
    }
  center = d.affine_shift();
  radius = s.real();
  return radius > 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// build

KernelModel KernelModel::build(const Domain& dom, const KernelOptions& opts) {
  auto im = std::make_shared<Impl>();
  im->dom = dom;
  im->opts = opts;
  const int n = dom.dim();
  for (int o = 0; o <= 3; ++o) im->spaces[o] = &JetSpace::get(2 * n, o);

  auto finish = [&](KernelMode mode) {
    im->mode = mode;
    return KernelModel(im);
  };

  switch (dom.kind()) {
    case DomainKind::Ball:
      if (opts.moments == MomentSource::Quadrature || opts.prefer_series) {
        im->mtable = (opts.moments == MomentSource::Quadrature)
                         ? (opts.moment_cache_dir.empty()
                                ? MomentTable::quadrature(dom, opts.degree, opts.quad_nodes, opts.seed)
                                : MomentTable::cached_quadrature(dom, opts.degree, opts.quad_nodes,
                                                                 opts.seed, opts.moment_cache_dir))
                         : MomentTable::closed_form(dom, opts.degree);
        build_series_rows(*im);
        return finish(KernelMode::Series);
      }
      im->closed = Closed::BallK;
      return finish(KernelMode::ClosedForm);
    case DomainKind::Polydisc:
      if (opts.prefer_series) {
        im->mtable = MomentTable::closed_form(dom, opts.degree);
        build_series_rows(*im);
        return finish(KernelMode::Series);
      }
      im->closed = Closed::PolydiscK;
      return finish(KernelMode::ClosedForm);
    case DomainKind::Ellipsoid: {
      if (opts.prefer_series) {
        im->mtable = MomentTable::closed_form(dom, opts.degree);
        build_series_rows(*im);
        return finish(KernelMode::Series);
      }
      // exact affine pullback of the ball kernel
      KernelOptions base_opts = opts;
      base_opts.prefer_series = false;
      KernelModel ball = build(Domain::ball(n), base_opts);
      CPoint scale(n), shift(n);
      shift.setZero();
      for (int i = 0; i < n; ++i) scale[i] = 1.0 / std::sqrt(dom.coeffs()[static_cast<std::size_t>(i)]);
      return ball.affine_pullback(scale, shift);
    }
    case DomainKind::Egg: {
      if (opts.moments == MomentSource::ClosedFormBeta && n != 2)
        throw UnsupportedDomain("closed-form egg moments registered for n=2 only");
      im->mtable = (opts.moments == MomentSource::Quadrature)
                       ? (opts.moment_cache_dir.empty()
                              ? MomentTable::quadrature(dom, opts.degree, opts.quad_nodes, opts.seed)
                              : MomentTable::cached_quadrature(dom, opts.degree, opts.quad_nodes,
                                                               opts.seed, opts.moment_cache_dir))
                       : MomentTable::closed_form(dom, opts.degree);
      build_series_rows(*im);
      return finish(KernelMode::Series);
    }
    case DomainKind::HalfSpace:
      if (n != 1) throw UnsupportedDomain("no Bergman space on a half-space in C^n, n>1");
      im->chart = ChartType::HalfPlaneToDisc;
      im->chart_target = Closed::BallK;
      return finish(KernelMode::ChartPullback);
    case DomainKind::Siegel:
      im->chart = ChartType::SiegelToBall;
      im->chart_target = Closed::BallK;
      return finish(KernelMode::ChartPullback);
    case DomainKind::ModelPoly:
      throw UnsupportedDomain(
          "no registered chart or kernel for the model domain " + dom.id() +
          "; it appears only as a scaling limit");
    case DomainKind::AffineImage: {
      const CMat& A = dom.affine_map();
      CPoint scale(n);
      for (int i = 0; i < n; ++i) {
        scale[i] = A(i, i);
        for (int j = 0; j < n; ++j)
          if (i != j && std::abs(A(i, j)) > 1e-14)
            throw UnsupportedDomain("kernel pullback implemented for diagonal affine maps");
      }
      KernelModel basem = build(dom.base(), opts);
      return basem.affine_pullback(scale, dom.affine_shift());
    }
    case DomainKind::Intersection: {
      // product of coordinate half-spaces (bidisc-corner limit)?
      try {
        CayleyChart ch = dom.cayley();
        if (ch.type == ChartType::HalfSpaceProductToPolydisc) {
          im->chart = ch.type;
          im->chart_target = Closed::PolydiscK;
          return finish(KernelMode::ChartPullback);
        }
      } catch (const NoChart&) {
      }
      // registered caps: bounded convex core intersected with a Euclidean ball
      if (dom.members().size() == 2) {
        const Domain* core = nullptr;
        const Domain* nbhd = nullptr;
        CPoint ucenter;
        double uradius = 0.0;
        for (const auto& m : dom.members()) {
          CPoint c;
          double r;
          if (euclidean_ball_params(m, c, r) && (m.kind() == DomainKind::AffineImage)) {
            nbhd = &m;
            ucenter = c;
            uradius = r;
          } else {
            core = &m;
          }
        }
        if (core && nbhd && core->bounded()) {
          // neighborhood swallows the core -> same domain, same kernel
          RVec lo, hi;
          core->bounding_box(lo, hi);
          double worst = 0.0;
          for (int mask = 0; mask < (1 << (2 * n)); ++mask) {
            double d2 = 0.0;
            for (int r = 0; r < 2 * n; ++r) {
              double coord = (mask >> r & 1) ? hi[r] : lo[r];
              double cc = (r % 2 == 0) ? ucenter[r / 2].real() : ucenter[r / 2].imag();
              d2 += (coord - cc) * (coord - cc);
            }
            worst = std::max(worst, std::sqrt(d2));
          }
          if (worst < uradius) return build(*core, opts);

          bool core_ok = core->kind() == DomainKind::Ball || core->kind() == DomainKind::Ellipsoid ||
                         core->kind() == DomainKind::Egg || core->kind() == DomainKind::Polydisc;
          if (core_ok) {
            // gram-matrix kernel on the cap; the monomial family is dense on
            // bounded convex caps. Degree capped to keep the Gram matrix
            // well-conditioned under quadrature noise.
            const int deg = std::min(opts.degree, 12);
            std::vector<int> a(static_cast<std::size_t>(n), 0);
            std::function<void(int, int)> rec = [&](int pos, int remaining) {
              if (pos == n - 1) {
                for (int v = 0; v <= remaining; ++v) {
                  a[static_cast<std::size_t>(pos)] = v;
                  im->gexps.push_back(a);
                }
                return;
              }
              for (int v = 0; v <= remaining; ++v) {
                a[static_cast<std::size_t>(pos)] = v;
                rec(pos + 1, remaining - v);
              }
            };
            rec(0, deg);
            const auto T = static_cast<Eigen::Index>(im->gexps.size());

            RVec blo, bhi;
            dom.bounding_box(blo, bhi);
            double boxvol = 1.0;
            for (int r = 0; r < 2 * n; ++r) boxvol *= bhi[r] - blo[r];
            HaltonSequence seq(2 * n, opts.seed);
            std::vector<double> u(static_cast<std::size_t>(2 * n));
            Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(T, T);
            Eigen::VectorXcd v(T);
            CPoint z(n);
            std::size_t accepted = 0;
            for (std::size_t i = 0; i < opts.quad_nodes; ++i) {
              seq.point(i, u.data());
              for (int k = 0; k < n; ++k)
                z[k] = C(blo[2 * k] + (bhi[2 * k] - blo[2 * k]) * u[static_cast<std::size_t>(2 * k)],
                         blo[2 * k + 1] +
                             (bhi[2 * k + 1] - blo[2 * k + 1]) * u[static_cast<std::size_t>(2 * k + 1)]);
              if (!dom.member(z)) continue;
              ++accepted;
              for (Eigen::Index t = 0; t < T; ++t) {
                C val(1.0);
                const auto& alpha = im->gexps[static_cast<std::size_t>(t)];
                for (int k = 0; k < n; ++k)
                  for (int p = 0; p < alpha[static_cast<std::size_t>(k)]; ++p) val *= z[k];
                v[t] = val;
              }
              G.selfadjointView<Eigen::Lower>().rankUpdate(v, 1.0);
            }
            if (accepted < static_cast<std::size_t>(4 * T))
              throw QuadratureUnavailable("too few quadrature nodes accepted on the cap");
            G = G.selfadjointView<Eigen::Lower>();
            G *= boxvol / static_cast<double>(opts.quad_nodes);
            Eigen::LDLT<Eigen::MatrixXcd> ldlt(G);
            if (ldlt.info() != Eigen::Success)
              throw UnsupportedIntersection("cap Gram matrix not positive definite");
            Eigen::MatrixXcd Ginv = ldlt.solve(Eigen::MatrixXcd::Identity(T, T));
            im->gcoeff = Ginv.transpose();
            return finish(KernelMode::GramSeries);
          }
        }
      }
      throw UnsupportedIntersection("no registered kernel for intersection " + dom.id());
    }
    default:
      throw UnsupportedDomain("build_kernel: unsupported domain " + dom.id());
  }
}

// ---------------------------------------------------------------------------
// accessors and evaluation

const Domain& KernelModel::domain() const { return impl_->dom; }
KernelMode KernelModel::mode() const { return impl_->mode; }
const KernelOptions& KernelModel::options() const { return impl_->opts; }

int KernelModel::degree() const {
  if (impl_->mode == KernelMode::Series) return impl_->opts.degree;
  if (impl_->mode == KernelMode::GramSeries) return std::min(impl_->opts.degree, 12);
  if (impl_->mode == KernelMode::AffinePullback) {
    KernelModel b(impl_->base);
    return b.degree();
  }
  return 0;
}

bool KernelModel::series_backed() const {
  switch (impl_->mode) {
    case KernelMode::Series:
    case KernelMode::GramSeries:
      return true;
    case KernelMode::AffinePullback:
      return KernelModel(impl_->base).series_backed();
    default:
      return false;
  }
}

double KernelModel::trust_margin() const {
  if (!series_backed()) return 0.0;
  if (impl_->mode == KernelMode::AffinePullback) {
    // margins scale with the smallest stretch of the map
    double smin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < impl_->scale.size(); ++i)
      smin = std::min(smin, std::abs(impl_->scale[i]));
    return smin * KernelModel(impl_->base).trust_margin();
  }
  return impl_->opts.trust_margin;
}

long KernelModel::boundary_warnings() const { return impl_->warns.load(); }

const MomentTable& KernelModel::moments() const {
  if (impl_->mode == KernelMode::Series) return impl_->mtable;
  if (impl_->mode == KernelMode::AffinePullback) return KernelModel(impl_->base).moments();
  throw Error("moments: not a series model");
}

KernelModel KernelModel::affine_pullback(const CPoint& diag_scale, const CPoint& shift) const {
  auto im = std::make_shared<Impl>();
  const int n = impl_->dom.dim();
  CMat A = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = diag_scale[i];
  im->dom = Domain::affine_image(impl_->dom, A, shift);
  im->opts = impl_->opts;
  im->mode = KernelMode::AffinePullback;
  im->base = impl_;
  im->scale = diag_scale;
  im->shift = shift;
  double det2 = 1.0;
  for (int i = 0; i < n; ++i) det2 *= std::norm(diag_scale[i]);
  im->inv_det2 = 1.0 / det2;
  for (int o = 0; o <= 3; ++o) im->spaces[o] = impl_->spaces[o];
  return KernelModel(im);
}

KernelJet KernelModel::derivs(const CPoint& z, const CPoint& w, int order) const {
  const Impl& im = *impl_;
  const int n = im.dom.dim();
  if (!im.dom.member(z) || !im.dom.member(w))
    throw OutsideDomain("kernel evaluation outside the domain");
  if (series_backed()) {
    double margin = trust_margin();
    if (im.dom.boundary_distance_quick(z) < margin || im.dom.boundary_distance_quick(w) < margin)
      im.warns.fetch_add(1);
  }

  KernelJet out;
  switch (im.mode) {
    case KernelMode::ClosedForm: {
      const JetSpace& sp = im.space(order);
      std::vector<Jet> zj, wj;
      for (int i = 0; i < n; ++i) {
        zj.push_back(Jet::variable(sp, i, z[i]));
        wj.push_back(Jet::variable(sp, n + i, std::conj(w[i])));
      }
      Jet K = closed_kernel_jet(im.closed, zj, wj, n, sp);
      jet_to_kernel_jet(K, n, order, sp, out);
      return out;
    }
    case KernelMode::ChartPullback: {
      const JetSpace& sp = im.space(order);
      std::vector<Jet> zj, wj;
      for (int i = 0; i < n; ++i) {
        zj.push_back(Jet::variable(sp, i, z[i]));
        wj.push_back(Jet::variable(sp, n + i, std::conj(w[i])));
      }
      std::vector<Jet> fz, fw;
      Jet detz(sp), detw(sp);
      chart_jets(im.chart, n, zj, sp, fz, detz);
      chart_jets(im.chart, n, wj, sp, fw, detw);
      Jet K = closed_kernel_jet(im.chart_target, fz, fw, n, sp) * detz * detw;
      jet_to_kernel_jet(K, n, order, sp, out);
      return out;
    }
    case KernelMode::AffinePullback: {
      CPoint pz(n), pw(n);
      for (int i = 0; i < n; ++i) {
        pz[i] = (z[i] - im.shift[i]) / im.scale[i];
        pw[i] = (w[i] - im.shift[i]) / im.scale[i];
      }
      KernelModel basem(im.base);
      KernelJet b = basem.derivs(pz, pw, order);
      out = b;
      const JetSpace& sp = *b.sp;
      for (int idx = 0; idx < sp.size; ++idx) {
        C factor(im.inv_det2);
        const auto& e = sp.exps[static_cast<std::size_t>(idx)];
        for (int i = 0; i < n; ++i) {
          for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) factor /= im.scale[i];
          for (int k = 0; k < e[static_cast<std::size_t>(n + i)]; ++k)
            factor /= std::conj(im.scale[i]);
        }
        out.d[static_cast<std::size_t>(idx)] = b.d[static_cast<std::size_t>(idx)] * factor;
      }
      return out;
    }
    case KernelMode::Series:
      eval_series(im, z, w, order, out);
      return out;
    case KernelMode::GramSeries:
      eval_gram(im, z, w, order, out);
      return out;
  }
  throw Error("derivs: bad mode");
}

C KernelModel::eval(const CPoint& z, const CPoint& w) const {
  return derivs(z, w, 0).value();
}

double KernelModel::diag(const CPoint& z) const {
  C v = eval(z, z);
  return v.real();
}

// ---------------------------------------------------------------------------
// variational oracles

double reproducing_residual(const KernelModel& model, const MonomialPoly& f, const CPoint& w) {
  if (model.mode() != KernelMode::Series)
    throw QuadratureUnavailable("reproducing_residual needs a diagonal series model");
  const MomentTable& M = model.moments();
  const Domain& dom = model.domain();
  const int n = dom.dim();
  C fw = f.eval(w);

  if (M.source() == MomentSource::ClosedFormBeta) {
    // exact orthogonality: integral f conj(K(.,w)) = sum_{|alpha|<=d} f_alpha w^alpha
    C acc(0.0);
    for (const auto& [alpha, coeff] : f.terms) {
      int total = 0;
      for (int a : alpha) total += a;
      if (total > model.degree()) continue;  // dropped by the truncated kernel
      C t = coeff;
      for (int i = 0; i < n; ++i)
        for (int p = 0; p < alpha[static_cast<std::size_t>(i)]; ++p) t *= w[i];
      acc += t;
    }
    return std::abs(acc - fw);
  }

  // quadrature: same node sweep as the moment build
  RVec lo, hi;
  dom.bounding_box(lo, hi);
  double boxvol = 1.0;
  for (int r = 0; r < 2 * n; ++r) boxvol *= hi[r] - lo[r];
  HaltonSequence seq(2 * n, M.seed());
  std::vector<double> u(static_cast<std::size_t>(2 * n));
  CPoint z(n);
  C acc(0.0);
  for (std::size_t i = 0; i < M.nodes(); ++i) {
    seq.point(i, u.data());
    for (int k = 0; k < n; ++k)
      z[k] = C(lo[2 * k] + (hi[2 * k] - lo[2 * k]) * u[static_cast<std::size_t>(2 * k)],
               lo[2 * k + 1] + (hi[2 * k + 1] - lo[2 * k + 1]) * u[static_cast<std::size_t>(2 * k + 1)]);
    if (!dom.member(z)) continue;
    acc += f.eval(z) * std::conj(model.eval(z, w));
  }
  acc *= boxvol / static_cast<double>(M.nodes());
  return std::abs(acc - fw);
}

ExtremalResult extremal_check(const KernelModel& model, const CPoint& w,
                              const std::vector<MonomialPoly>& trials, double tol) {
  if (model.mode() != KernelMode::Series)
    throw Error("extremal_check needs a diagonal series model");
  const MomentTable& M = model.moments();
  ExtremalResult res;

  // integral |K(.,w)/K(w,w)|^2 computed by moment algebra
  double Kww = model.diag(w);
  double acc = 0.0;
  const int n = model.domain().dim();
  for (const auto& [alpha, Mv] : M.entries()) {
    double wmod = 1.0;
    for (int i = 0; i < n; ++i) wmod *= std::pow(std::abs(w[i]), 2 * alpha[static_cast<std::size_t>(i)]);
    acc += wmod / Mv;  // c^4 |w^alpha|^2 M = |w^alpha|^2 / M
  }
  res.min_value = acc / (Kww * Kww);

  double worst = std::numeric_limits<double>::infinity();
  bool ok = std::abs(res.min_value - 1.0 / Kww) <= tol * std::max(1.0, 1.0 / Kww);
  for (const auto& g : trials) {
    C gw = g.eval(w);
    if (std::abs(gw - C(1.0)) > 1e-9) throw Error("extremal trial must satisfy g(w)=1");
    double norm2 = 0.0;
    for (const auto& [alpha, coeff] : g.terms) norm2 += std::norm(coeff) * M.at(alpha);
    worst = std::min(worst, norm2 - res.min_value);
    if (norm2 < res.min_value - tol) ok = false;
  }
  res.worst_trial_slack = trials.empty() ? 0.0 : worst;
  res.ok = ok;
  return res;
}

}  // namespace bgk
