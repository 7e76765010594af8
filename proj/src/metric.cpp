#include "bgk/metric.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "bgk/errors.hpp"

namespace bgk {

double ChristoffelArray::max_norm() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

RMat realify(const CMat& g) {
  const int n = static_cast<int>(g.rows());
  RMat gt(2 * n, 2 * n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      double a = g(mu, nu).real();
      double b = g(mu, nu).imag();
      gt(2 * mu, 2 * nu) = a;
      gt(2 * mu + 1, 2 * nu + 1) = a;
      gt(2 * mu, 2 * nu + 1) = b;
      gt(2 * mu + 1, 2 * nu) = -b;
    }
  }
  return gt;
}

namespace {

// g_{mu nu} and (optionally) its holomorphic derivative from the polarized
// kernel derivatives on the diagonal.
void log_hessian(const KernelJet& kj, int n, CMat& g) {
  const C K = kj.value();
  g.resize(n, n);
  for (int mu = 0; mu < n; ++mu) {
    C Kmu = kj.deriv1z(mu);
    for (int nu = 0; nu < n; ++nu) {
      C Knu = kj.deriv1w(nu);
      C Kmn = kj.deriv2zw(mu, nu);
      g(mu, nu) = Kmn / K - Kmu * Knu / (K * K);
    }
  }
}

// t1[k][mu][nu] = d_{z_k} g_{mu nu}
void log_hessian_deriv(const KernelJet& kj, int n, std::vector<C>& t1) {
  const C K = kj.value();
  const C K2 = K * K;
  const C K3 = K2 * K;
  t1.assign(static_cast<std::size_t>(n * n * n), C(0.0));
  for (int k = 0; k < n; ++k) {
    C Kk = kj.deriv1z(k);
    for (int mu = 0; mu < n; ++mu) {
      C Kmu = kj.deriv1z(mu);
      C Kkm = kj.deriv2zz(k, mu);
      for (int nu = 0; nu < n; ++nu) {
        C Knu = kj.deriv1w(nu);
        C Kmn = kj.deriv2zw(mu, nu);
        C Kkn = kj.deriv2zw(k, nu);
        C Kkmn = kj.deriv3zzw(k, mu, nu);
        t1[static_cast<std::size_t>((k * n + mu) * n + nu)] =
            Kkmn / K - (Kkm * Knu + Kkn * Kmu + Kmn * Kk) / K2 + 2.0 * Kk * Kmu * Knu / K3;
      }
    }
  }
}

double min_eigenvalue(const RMat& gt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(gt),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

MetricState metric_tensor(const KernelModel& model, const CPoint& z) {
  const int n = model.domain().dim();
  KernelJet kj = model.derivs(z, z, 2);
  if (kj.value().real() <= 0.0)
    throw DegenerateMetric("kernel diagonal not positive at the requested point");
  MetricState st;
  st.z = z;
  log_hessian(kj, n, st.g);
  st.gt = realify(st.g);
  st.min_eig = min_eigenvalue(st.gt);
  if (st.min_eig <= 1e-12)
    throw DegenerateMetric("metric eigenvalue below threshold (truncation too coarse?)");
  return st;
}

MetricState metric_state(const KernelModel& model, const CPoint& z) {
  const int n = model.domain().dim();
  KernelJet kj = model.derivs(z, z, 3);
  if (kj.value().real() <= 0.0)
    throw DegenerateMetric("kernel diagonal not positive at the requested point");
  MetricState st;
  st.z = z;
  log_hessian(kj, n, st.g);
  st.gt = realify(st.g);
  st.min_eig = min_eigenvalue(st.gt);
  if (st.min_eig <= 1e-12)
    throw DegenerateMetric("metric eigenvalue below threshold (truncation too coarse?)");

  std::vector<C> t1;
  log_hessian_deriv(kj, n, t1);
  auto t1_at = [&](int k, int mu, int nu) {
    return t1[static_cast<std::size_t>((k * n + mu) * n + nu)];
  };

  const int d = 2 * n;
  // dgt[t](r,s) = d gt_{rs} / d x_t
  std::vector<RMat> dgt(static_cast<std::size_t>(d), RMat::Zero(d, d));
  for (int k = 0; k < n; ++k) {
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = 0; nu < n; ++nu) {
        C dzk = t1_at(k, mu, nu);
        C dzbk = std::conj(t1_at(k, nu, mu));
        C d_re = dzk + dzbk;                  // d g_{mu nu} / d x_{2k}
        C d_im = C(0.0, 1.0) * (dzk - dzbk);  // d g_{mu nu} / d x_{2k+1}
        for (int part = 0; part < 2; ++part) {
          const C dv = part == 0 ? d_re : d_im;
          RMat& target = dgt[static_cast<std::size_t>(2 * k + part)];
          target(2 * mu, 2 * nu) += dv.real();
          target(2 * mu + 1, 2 * nu + 1) += dv.real();
          target(2 * mu, 2 * nu + 1) += dv.imag();
          target(2 * mu + 1, 2 * nu) -= dv.imag();
        }
      }
    }
  }

  RMat ginv = st.gt.inverse();
  st.gamma.dim2n = d;
  st.gamma.a.assign(static_cast<std::size_t>(d * d * d), 0.0);
  for (int eta = 0; eta < d; ++eta) {
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = 0; nu < d; ++nu) {
        double s = 0.0;
        for (int tau = 0; tau < d; ++tau) {
          s += (dgt[static_cast<std::size_t>(mu)](nu, tau) +
                dgt[static_cast<std::size_t>(nu)](tau, mu) -
                dgt[static_cast<std::size_t>(tau)](mu, nu)) *
               ginv(tau, eta);
        }
        st.gamma.at(eta, mu, nu) = 0.5 * s;
      }
    }
  }
  st.has_gamma = true;
  return st;
}

double metric_length(const KernelModel& model, const CPoint& z, const CPoint& xi) {
  if (xi.norm() == 0.0) return 0.0;
  MetricState st = metric_tensor(model, z);
  // sum g_{mu nu} xi_mu conj(xi_nu)
  C q = (xi.transpose() * st.g * xi.conjugate())(0, 0);
  return std::sqrt(std::max(q.real(), 0.0));
}

double metric_length_fast(const KernelModel& model, const CPoint& z, const CPoint& xi) {
  if (xi.norm() == 0.0) return 0.0;
  const int n = model.domain().dim();
  KernelJet kj = model.derivs(z, z, 2);
  CMat g;
  log_hessian(kj, n, g);
  C q = (xi.transpose() * g * xi.conjugate())(0, 0);
  return std::sqrt(std::max(q.real(), 0.0));
}

void metric_with_derivative(const KernelModel& model, const CPoint& z, CMat& g,
                            std::vector<C>& dg) {
  const int n = model.domain().dim();
  KernelJet kj = model.derivs(z, z, 3);
  log_hessian(kj, n, g);
  log_hessian_deriv(kj, n, dg);
}

ChristoffelArray christoffel(const KernelModel& model, const RVec& x) {
  return metric_state(model, to_complex(x)).gamma;
}

// ---------------------------------------------------------------------------
// registered closed-form distances

namespace {

double mobius_disc(C z, C w) { return std::abs((w - z) / (C(1.0) - std::conj(z) * w)); }

double mobius_ball(const CPoint& z, const CPoint& w) {
  C inner(0.0);
  for (Eigen::Index i = 0; i < z.size(); ++i) inner += z[i] * std::conj(w[i]);
  double num = (1.0 - z.squaredNorm()) * (1.0 - w.squaredNorm());
  double den = std::norm(C(1.0) - inner);
  double m2 = 1.0 - num / den;
  return std::sqrt(std::max(m2, 0.0));
}

}  // namespace

double caratheodory_distance(const Domain& dom, const CPoint& z, const CPoint& w) {
  switch (dom.kind()) {
    case DomainKind::Ball:
      return std::atanh(mobius_ball(z, w));
    case DomainKind::Polydisc: {
      double m = 0.0;
      for (int i = 0; i < dom.dim(); ++i) m = std::max(m, mobius_disc(z[i], w[i]));
      return std::atanh(m);
    }
    default:
      throw UnsupportedDomain("no registered Caratheodory closed form for " + dom.id());
  }
}

bool has_closed_form_distance(const Domain& dom) {
  switch (dom.kind()) {
    case DomainKind::Ball:
    case DomainKind::Polydisc:
      return true;
    case DomainKind::HalfSpace:
      return dom.dim() == 1;
    case DomainKind::Siegel:
      return true;
    case DomainKind::Intersection: {
      try {
        dom.cayley();
        return true;
      } catch (const NoChart&) {
        return false;
      }
    }
    default:
      return false;
  }
}

double bergman_distance_closed_form(const Domain& dom, const CPoint& z, const CPoint& w) {
  switch (dom.kind()) {
    case DomainKind::Ball: {
      int n = dom.dim();
      return std::sqrt(n + 1.0) * std::atanh(mobius_ball(z, w));
    }
    case DomainKind::Polydisc: {
      double s = 0.0;
      for (int i = 0; i < dom.dim(); ++i) {
        double d = std::sqrt(2.0) * std::atanh(mobius_disc(z[i], w[i]));
        s += d * d;
      }
      return std::sqrt(s);
    }
    case DomainKind::HalfSpace:
    case DomainKind::Siegel:
    case DomainKind::Intersection: {
      CayleyChart ch = dom.cayley();
      return bergman_distance_closed_form(ch.target(), ch.forward(z), ch.forward(w));
    }
    default:
      throw UnsupportedDomain("no registered Bergman closed form for " + dom.id());
  }
}

}  // namespace bgk
