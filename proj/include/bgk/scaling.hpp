#pragma once

#include <string>
#include <vector>

#include "bgk/geodesics.hpp"
#include "bgk/kernel.hpp"
#include "bgk/types.hpp"

namespace bgk {

enum class ScalingClass { StronglyPseudoconvex, LeviCorankOne, BidiscCorner };

struct ApproachSpec {
  bool cone = false;        // false: along the inward normal
  double aperture = M_PI / 6.0;
  double angle = 0.0;       // angle against the normal actually used
};

struct ScalingRung {
  double delta = 0.0;
  CPoint p;       // p^j in the source domain
  CPoint scale;   // diagonal affine A^j : z -> scale .* z + shift
  CPoint shift;
  Domain scaled{Domain::disc()};  // D^j
  CPoint q;       // q^j = A^j(p^j)
};

struct ScalingSequence {
  Domain source{Domain::disc()};
  CPoint p0;
  ScalingClass klass = ScalingClass::StronglyPseudoconvex;
  ApproachSpec approach;
  std::vector<double> weights;  // dilation exponents (1, w_2, ..., w_n)
  std::vector<ScalingRung> rungs;
  Domain limit{Domain::disc()};
  bool limit_has_kernel = false;
  CPoint q0;

  CPoint apply(std::size_t j, const CPoint& z) const;      // A^j
  CPoint apply_inv(std::size_t j, const CPoint& z) const;  // (A^j)^{-1}
};

// Default ladder {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}.
std::vector<double> default_delta_ladder();

ScalingSequence build_scaling(const Domain& dom, const CPoint& p0, const ApproachSpec& approach,
                              ScalingClass klass,
                              const std::vector<double>& deltas = default_delta_ladder());

// Local Hausdorff disagreement of two domains over a window box, measured on
// a uniform grid (per-axis count). For each grid point lying in exactly one
// of the sets, the distance to the nearest grid sample of the other set;
// returns the sup (0 when the grids agree).
double hausdorff_gap(const Domain& A, const Domain& B, const RVec& lo, const RVec& hi,
                     int grid_per_axis = 32);

// Default window: Re in [-4,0], Im in [-2,2] per complex coordinate.
void default_window(int n, RVec& lo, RVec& hi);

enum class ChainQuantity { Kernel, Metric, Christoffel, Distance, Ball };

std::string quantity_name(ChainQuantity q);

struct ConvergenceRow {
  int j = 0;
  double delta = 0.0;
  double sup_gap = 0.0;
  double sup_gap_rel = 0.0;
  int flagged_points = 0;
  bool inclusion_upper = true;  // limit sphere inside the scaled (R+eps)-ball
  bool inclusion_lower = true;  // scaled (R-eps)-sphere inside the limit R-ball
};

struct ConvergenceReport {
  ChainQuantity quantity = ChainQuantity::Kernel;
  std::vector<ConvergenceRow> rows;
  bool decreasing = false;
  double final_gap = 0.0;
  // gaps measured against the last rung instead of an unavailable limit
  // kernel (registered for the egg model sequences)
  bool cauchy_mode = false;
};

struct ChainOptions {
  double ball_radius = 1.0;
  double ball_eps = 0.05;
  int ball_dirs = 24;
  KernelOptions kernel;
  DistanceOptions distance;
};

// Runs the kernel -> metric -> Christoffel -> distance -> ball stability
// verification along the sequence at the given interior test points of the
// limit domain.
std::vector<ConvergenceReport> verify_chain(const ScalingSequence& seq,
                                            const std::vector<CPoint>& test_points,
                                            const std::vector<ChainQuantity>& quantities,
                                            const ChainOptions& opts = {});

std::string convergence_report_csv(const std::vector<ConvergenceReport>& reports);

}  // namespace bgk
