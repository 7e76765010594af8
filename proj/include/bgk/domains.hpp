#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bgk/types.hpp"

namespace bgk {

enum class DomainKind {
  Disc,
  Ball,
  Polydisc,
  Ellipsoid,    // sum c_i |z_i|^2 < 1
  Egg,          // |z_1|^2 + ... + |z_{n-1}|^2 + |z_n|^{2m} < 1
  HalfSpace,    // Re z_k < 0 in C^n
  Siegel,       // 2 Re z_1 + sum_{j>=2} |z_j|^2 < 0
  ModelPoly,    // 2 Re z_1 + |z_2|^{2m} < 0 in C^2
  AffineImage,  // { A z + t : z in base }
  Intersection,
};

enum class ChartType { Identity, HalfPlaneToDisc, SiegelToBall, HalfSpaceProductToPolydisc };

class Domain;

// Biholomorphism from an unbounded model onto a bounded representative.
struct CayleyChart {
  ChartType type = ChartType::Identity;
  int n = 1;

  CPoint forward(const CPoint& z) const;  // model -> bounded representative
  CPoint inverse(const CPoint& w) const;
  C det_forward(const CPoint& z) const;   // complex Jacobian determinant

  Domain target() const;  // the bounded representative as a Domain
};

class Domain {
 public:
  static Domain disc();
  static Domain ball(int n);
  static Domain polydisc(int n);
  static Domain ellipsoid(std::vector<double> coeffs);
  static Domain egg(int n, int two_m);
  static Domain halfplane();                 // {Re z < 0} in C^1
  static Domain halfspace(int n, int k);     // {Re z_k < 0} in C^n
  static Domain siegel(int n);
  static Domain model_poly(int two_m);       // {2 Re z_1 + |z_2|^{2m} < 0}
  static Domain affine_image(const Domain& base, const CMat& map, const CPoint& shift);
  static Domain intersection(std::vector<Domain> members);

  // Catalogue lookup: "disc", "ball:2", "bidisc", "polydisc:3",
  // "ellipsoid:1,2", "egg:2:4", "halfplane", "siegel:2", "model:egg:4",
  // "corner:2".
  static Domain from_id(const std::string& id);

  DomainKind kind() const;
  int dim() const;
  bool bounded() const;
  std::string id() const;

  int num_defining() const;
  double rho(int i, const CPoint& z) const;
  // max_i rho_i; negative inside
  double rho_max(const CPoint& z) const;

  bool member(const CPoint& z) const;

  // Euclidean distance to the complement. Exact for disc/ball/polydisc/
  // half-space kinds; elsewhere boundary sampling plus local refinement
  // (relative accuracy ~1e-8). Throws NotInDomain outside.
  double boundary_distance(const CPoint& z, int samples = 4096) const;

  // Cheap conservative lower bound on boundary_distance, for integrator
  // safety margins. Zero or negative outside.
  double boundary_distance_quick(const CPoint& z) const;

  // Nearest boundary point and its distance (same accuracy notes as
  // boundary_distance).
  std::pair<CPoint, double> nearest_boundary(const CPoint& z, int samples = 4096) const;

  // Axis-aligned box containing the domain, in real coordinates
  // (size 2n). Throws UnsupportedDomain for unbounded domains.
  void bounding_box(RVec& lo, RVec& hi) const;

  // Chart onto a bounded representative. Identity for bounded kinds;
  // throws NoChart for models without a registered chart.
  CayleyChart cayley() const;

  // parameter accessors (valid for the matching kind)
  const std::vector<double>& coeffs() const;     // Ellipsoid
  int egg_exponent() const;                      // Egg / ModelPoly: 2m
  int halfspace_coord() const;                   // HalfSpace
  const Domain& base() const;                    // AffineImage
  const CMat& affine_map() const;                // AffineImage
  const CPoint& affine_shift() const;            // AffineImage
  const std::vector<Domain>& members() const;    // Intersection

  bool operator==(const Domain& o) const { return impl_ == o.impl_; }

 private:
  struct Impl;
  explicit Domain(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace bgk
