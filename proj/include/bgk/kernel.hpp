#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "bgk/domains.hpp"
#include "bgk/jet.hpp"
#include "bgk/moments.hpp"
#include "bgk/types.hpp"

namespace bgk {

enum class KernelMode { ClosedForm, Series, GramSeries, ChartPullback, AffinePullback };

struct KernelOptions {
  int degree = 40;
  MomentSource moments = MomentSource::ClosedFormBeta;
  std::size_t quad_nodes = 1000000;
  std::uint64_t seed = 20240811;
  // Series values are trusted on {boundary_distance >= trust_margin};
  // evaluation closer only bumps the model's warning counter.
  double trust_margin = 0.05;
  std::string moment_cache_dir;  // empty: no cache
  // Build a truncated series even where a closed form exists (oracle duty).
  bool prefer_series = false;
};

// All mixed derivatives d^a_z d^b_wbar K(z,w) with |a|+|b| <= order, stored
// in the polarized jet space over (z_1..z_n, wbar_1..wbar_n).
struct KernelJet {
  int n = 1;
  int order = 0;
  const JetSpace* sp = nullptr;
  std::array<C, kJetMaxTerms> d{};  // derivative values (not Taylor coeffs)

  C value() const { return d[0]; }
  // a, b are multi-indices of length n (may be nullptr for zero).
  C deriv(const int* a, const int* b) const;
  C deriv1z(int mu) const;              // d_{z_mu} K
  C deriv1w(int nu) const;              // d_{wbar_nu} K
  C deriv2zw(int mu, int nu) const;     // d_{z_mu} d_{wbar_nu} K
  C deriv2zz(int mu, int nu) const;     // d_{z_mu} d_{z_nu} K
  C deriv3zzw(int k, int mu, int nu) const;  // d_{z_k} d_{z_mu} d_{wbar_nu} K
};

// An evaluable Bergman kernel with exact derivatives up to order 3.
class KernelModel {
 public:
  static KernelModel build(const Domain& dom, const KernelOptions& opts = {});

  const Domain& domain() const;
  KernelMode mode() const;
  const KernelOptions& options() const;
  int degree() const;  // series modes; 0 for closed forms

  C eval(const CPoint& z, const CPoint& w) const;
  double diag(const CPoint& z) const;  // K(z,z) > 0
  KernelJet derivs(const CPoint& z, const CPoint& w, int order = 3) const;

  // True when evaluation accuracy depends on a truncation degree.
  bool series_backed() const;
  // Margin below which series values are flagged (0 for closed forms).
  double trust_margin() const;
  long boundary_warnings() const;

  const MomentTable& moments() const;  // Series mode only

  // Affine pullback: kernel of {s .* z + t : z in this->domain()} via the
  // exact transformation rule (s = diagonal complex scales).
  KernelModel affine_pullback(const CPoint& diag_scale, const CPoint& shift) const;

  struct Impl;

 private:
  explicit KernelModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// --- test oracles from the variational characterization ------------------

// Sparse polynomial sum f = sum coeff * z^alpha.
struct MonomialPoly {
  std::vector<std::pair<std::vector<int>, C>> terms;
  C eval(const CPoint& z) const;
};

// |integral_Omega f(z) conj(K(z,w)) dlambda - f(w)| with the truncated
// kernel; the integral uses the model's moment provenance (exact
// orthogonality algebra for closed-form moments, the QMC node sweep for
// quadrature moments).
double reproducing_residual(const KernelModel& model, const MonomialPoly& f, const CPoint& w);

struct ExtremalResult {
  bool ok = false;
  double min_value = 0.0;        // integral |K(.,w)/K(w,w)|^2
  double worst_trial_slack = 0;  // min over trials of (trial - min_value)
};

// Checks that K(.,w)/K(w,w) minimizes the L2 norm among truncated-space
// trials g with g(w) = 1, and that the minimum equals 1/K(w,w).
ExtremalResult extremal_check(const KernelModel& model, const CPoint& w,
                              const std::vector<MonomialPoly>& trials, double tol = 1e-10);

}  // namespace bgk
