#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bgk/kernel.hpp"
#include "bgk/metric.hpp"
#include "bgk/types.hpp"

namespace bgk {

struct GeodesicState {
  RVec x;    // real position, 2n
  RVec y;    // real velocity, 2n
  double s = 0.0;  // accumulated metric arc length
};

struct GeodesicPath {
  std::vector<GeodesicState> samples;  // accepted steps, in order
  double length = 0.0;
  int steps = 0;
  int rejected = 0;

  CPoint endpoint() const;
  RVec end_velocity() const;
};

struct IntegrateOptions {
  double tol = 1e-8;          // embedded per-step error tolerance
  double margin = -1.0;       // boundary safety margin; <0 picks the kernel trust margin
  bool record_samples = true;
  int max_steps = 200000;
};

// Unit-speed geodesic from x0 with initial direction X (any nonzero vector;
// normalized in the metric), integrated to metric length L with an embedded
// Runge-Kutta 5(4) scheme. Throws LeftDomain when the trajectory comes
// closer to the boundary than the safety margin, DegenerateMetric when the
// metric collapses along the way.
GeodesicPath integrate_geodesic(const KernelModel& model, const CPoint& x0, const CPoint& X,
                                double L, const IntegrateOptions& opts = {});

// Multi-target variant: invokes on_target(k, state) at each requested arc
// length (ascending). Returns the index of the first target not reached
// (== targets.size() on full success); aborted directions do not throw.
std::size_t integrate_to_lengths(const KernelModel& model, const CPoint& x0, const CPoint& X,
                                 const std::vector<double>& targets,
                                 const std::function<void(std::size_t, const GeodesicState&)>& on_target,
                                 const IntegrateOptions& opts = {});

enum class DistanceMethod { Shooting, Energy };

struct DistanceOptions {
  double tol = 1e-4;
  int shooting_multistarts = 8;
  double shooting_miss = 1e-6;   // endpoint miss defining success
  int energy_segments = 64;      // initial K; doubles up to energy_segments_max
  int energy_segments_max = 512;
  IntegrateOptions integrate;
  enum class Mode { Auto, ShootingOnly, EnergyOnly, Both } mode = Mode::Auto;
};

struct DistanceResult {
  double value = 0.0;
  DistanceMethod method = DistanceMethod::Shooting;
  double shoot_miss = -1.0;      // Euclidean endpoint miss (shooting)
  bool shooting_converged = false;
  double energy_value = -1.0;    // filled when the energy path ran
};

// Bergman distance via geodesic shooting with a discrete path-energy
// fallback. Throws NoConvergence when both methods fail.
DistanceResult bergman_distance(const KernelModel& model, const CPoint& z, const CPoint& w,
                                const DistanceOptions& opts = {});

struct BergmanBallSample {
  CPoint center;
  double radius = 0.0;
  std::vector<RVec> directions;   // metric-unit initial velocities
  std::vector<CPoint> endpoints;  // geodesic-sphere points (aborted ones skipped)
  std::vector<bool> flagged;      // true when the direction aborted early
};

// Geodesic sphere sampling: unit-speed geodesics of length r over a
// quasi-uniform direction grid. Aborting directions are flagged, never a
// global failure. n_dirs <= 0 picks the default 2^n * 64.
BergmanBallSample bergman_ball(const KernelModel& model, const CPoint& p, double r,
                               int n_dirs = 0, std::uint64_t seed = 7,
                               const IntegrateOptions& opts = {});

// One outward integration per direction, recording the crossing points of
// every radius in `radii` (ascending). endpoints[k][d] is the point of the
// radius-k sphere along direction d; flagged[k][d] marks radii the
// direction never reached.
struct SphereSweep {
  CPoint center;
  std::vector<double> radii;
  std::vector<RVec> directions;
  std::vector<std::vector<CPoint>> endpoints;
  std::vector<std::vector<bool>> flagged;

  double flagged_fraction(std::size_t radius_index) const;
};

SphereSweep sphere_sweep(const KernelModel& model, const CPoint& p,
                         const std::vector<double>& radii, int n_dirs = 0,
                         std::uint64_t seed = 7, const IntegrateOptions& opts = {});

// CSV export (one sample per row: t, x components, y components).
std::string geodesic_path_csv(const GeodesicPath& path);
std::string ball_sample_csv(const BergmanBallSample& ball);

}  // namespace bgk
