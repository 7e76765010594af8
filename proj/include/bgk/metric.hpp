#pragma once

#include <vector>

#include "bgk/kernel.hpp"
#include "bgk/types.hpp"

namespace bgk {

// Christoffel symbols Gamma^eta_{mu nu} of the realified Bergman metric,
// indexed [eta][mu][nu], dimensions 2n each.
struct ChristoffelArray {
  int dim2n = 0;
  std::vector<double> a;  // dim2n^3
  double& at(int eta, int mu, int nu) { return a[static_cast<std::size_t>((eta * dim2n + mu) * dim2n + nu)]; }
  double at(int eta, int mu, int nu) const {
    return a[static_cast<std::size_t>((eta * dim2n + mu) * dim2n + nu)];
  }
  double max_norm() const;
};

struct MetricState {
  CPoint z;
  CMat g;    // Hermitian n x n, entries d^2 log K / dz dzbar
  RMat gt;   // realified 2n x 2n, symmetric positive definite
  ChristoffelArray gamma;  // filled when requested
  bool has_gamma = false;
  double min_eig = 0.0;    // smallest eigenvalue of gt
};

// g only (plus realification). Throws DegenerateMetric when the smallest
// eigenvalue of gt drops to 1e-12.
MetricState metric_tensor(const KernelModel& model, const CPoint& z);

// Full state including Christoffel symbols (third log-derivatives, analytic).
MetricState metric_state(const KernelModel& model, const CPoint& z);

// Infinitesimal length b(z, xi) = sqrt(sum g_{mu nu} xi_mu conj(xi_nu)).
double metric_length(const KernelModel& model, const CPoint& z, const CPoint& xi);

// Same value without the positivity diagnostics; inner-loop use only.
double metric_length_fast(const KernelModel& model, const CPoint& z, const CPoint& xi);

// g together with its holomorphic derivative dg[(k*n+mu)*n+nu] = d_{z_k} g_{mu nu};
// the antiholomorphic one follows from Hermitian symmetry.
void metric_with_derivative(const KernelModel& model, const CPoint& z, CMat& g,
                            std::vector<C>& dg);

// Christoffel symbols at a real 2n-point.
ChristoffelArray christoffel(const KernelModel& model, const RVec& x);

// Realify a Hermitian tensor; the quadratic form satisfies
// xi^T g conj(xi) = y^T gt y under z = x + iy splitting.
RMat realify(const CMat& g);

// Closed-form Caratheodory distances (registered data, not computed):
// disc, ball, polydisc.
double caratheodory_distance(const Domain& dom, const CPoint& z, const CPoint& w);

// Closed-form Bergman distances for the same catalogue (disc, ball,
// polydisc and their half-space charts); used as test oracles.
double bergman_distance_closed_form(const Domain& dom, const CPoint& z, const CPoint& w);
bool has_closed_form_distance(const Domain& dom);

struct HahnLuMargin {
  CPoint z, w;
  double caratheodory = 0.0;
  double bergman = 0.0;
  double margin = 0.0;  // bergman - caratheodory
};

// Margins d^b - d^c on a list of point pairs. The Bergman side is computed
// by the geodesics module when `shoot` is true, otherwise by closed form.
std::vector<HahnLuMargin> hahn_lu_check(const KernelModel& model,
                                        const std::vector<std::pair<CPoint, CPoint>>& pairs,
                                        bool shoot = true);

}  // namespace bgk
