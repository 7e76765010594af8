#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bgk/geodesics.hpp"
#include "bgk/kernel.hpp"
#include "bgk/scaling.hpp"
#include "bgk/types.hpp"

namespace bgk {

struct FridmanOptions {
  // geometric radius grid r_k = radius0 * radius_factor^k
  double radius0 = 0.25;
  double radius_factor = 1.3;
  int radius_count = 24;
  double flag_cap = 0.01;   // grid capped when flagged directions exceed this
  int sphere_dirs = 0;      // 0 -> 2^n * 64
  int center_positions = 17;
  double center_reach = 1024.0;  // centers up to reach * |p - b| along the normal
  int anisotropy_levels = 5;
  int fit_boundary_samples = 256;
  double fit_shrink = 1e-3;  // final shrink after the fit bisection
  std::uint64_t seed = 7;
  bool use_registry = true;  // certified zeros through registered charts
  IntegrateOptions integrate;
};

struct FridmanWitness {
  CPoint center;
  CMat shape;      // embedding A(B^n) = center + shape * B^n, shape Hermitian pd
  double radius = 0.0;  // certified Bergman radius around p
  double margin = 0.0;  // worst |shape^{-1}(x - center)| - 1 over sphere samples (<= 0)
};

struct FridmanEstimate {
  CPoint p;
  double upper = 0.0;             // u >= h_D(p)
  double certified_radius = 0.0;  // 1/upper; infinity when certified zero
  bool certified_zero = false;    // registered ball biholomorphism
  std::optional<FridmanWitness> witness;
  int sphere_dirs = 0;
  int radii_usable = 0;  // grid radii below the flag cap
};

// Upper bound on the Fridman-Bergman invariant by searching affine-ellipsoid
// embeddings of the ball. Exact zeros only through the registered
// biholomorphism catalogue. Throws NoEmbeddingFound when no candidate
// contains even the smallest grid radius.
FridmanEstimate fridman_upper(const KernelModel& model, const CPoint& p,
                              const FridmanOptions& opts = {});

// Criterion: re-sample the Bergman sphere with `multiplier` x directions and
// re-run the exact quadratic containment check of the stored witness.
// Returns the worst margin (<= tol passes).
double witness_resample_margin(const KernelModel& model, const FridmanEstimate& est,
                               int multiplier = 4, const FridmanOptions& opts = {});

struct BoundaryLimitRow {
  int j = 0;
  double delta = 0.0;
  double u = 0.0;
  double certified_radius = 0.0;
  bool certified_zero = false;
};

// u_j = fridman_upper at p^j on the source domain (equal to the estimate at
// q^j on D^j for these affine scalings).
std::vector<BoundaryLimitRow> boundary_limit_experiment(const ScalingSequence& seq,
                                                        const KernelOptions& kopts,
                                                        const FridmanOptions& fopts,
                                                        std::vector<FridmanEstimate>* estimates = nullptr);

struct LocalizationRow {
  double delta = 0.0;
  double u_full = 0.0;
  double u_local = 0.0;
  double ratio = 0.0;  // u_local / u_full
};

// h estimates on D and on U cap D along a normal approach to the boundary
// point p0, with U the Euclidean ball of the given radius around p0.
std::vector<LocalizationRow> localization_experiment(const Domain& dom, const CPoint& p0,
                                                     double nbhd_radius,
                                                     const std::vector<double>& deltas,
                                                     const KernelOptions& kopts,
                                                     const FridmanOptions& fopts);

}  // namespace bgk
