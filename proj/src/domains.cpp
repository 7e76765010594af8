#include "bgk/domains.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bgk/errors.hpp"
#include "bgk/qmc.hpp"

namespace bgk {

struct Domain::Impl {
  DomainKind kind;
  int n = 1;
  bool bounded = true;
  std::vector<double> coeffs;   // ellipsoid
  int two_m = 2;                // egg / model poly
  int hs_coord = 0;             // halfspace
  std::vector<Domain> members;  // intersection
  std::shared_ptr<const Domain> base;  // affine image
  CMat map;                     // affine image, z -> map*z + shift
  CMat map_inv;
  CPoint shift;
  double sigma_min = 1.0;       // smallest singular value of map
};

Domain Domain::disc() { return ball(1); }

Domain Domain::ball(int n) {
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::Ball;
  im->n = n;
  im->bounded = true;
  return Domain(im);
}

Domain Domain::polydisc(int n) {
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::Polydisc;
  im->n = n;
  im->bounded = true;
  return Domain(im);
}

Domain Domain::ellipsoid(std::vector<double> coeffs) {
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::Ellipsoid;
  im->n = static_cast<int>(coeffs.size());
  im->coeffs = std::move(coeffs);
  im->bounded = true;
  for (double c : im->coeffs)
    if (c <= 0.0) throw UnsupportedDomain("ellipsoid coefficients must be positive");
  return Domain(im);
}

Domain Domain::egg(int n, int two_m) {
  if (two_m < 2 || two_m % 2 != 0) throw UnsupportedDomain("egg exponent must be even >= 2");
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::Egg;
  im->n = n;
  im->two_m = two_m;
  im->bounded = true;
  return Domain(im);
}

Domain Domain::halfplane() { return halfspace(1, 0); }

Domain Domain::halfspace(int n, int k) {
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::HalfSpace;
  im->n = n;
  im->hs_coord = k;
  im->bounded = false;
  return Domain(im);
}

Domain Domain::siegel(int n) {
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::Siegel;
  im->n = n;
  im->bounded = false;
  return Domain(im);
}

Domain Domain::model_poly(int two_m) {
  if (two_m < 2 || two_m % 2 != 0) throw UnsupportedDomain("model exponent must be even >= 2");
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::ModelPoly;
  im->n = 2;
  im->two_m = two_m;
  im->bounded = false;
  return Domain(im);
}

Domain Domain::affine_image(const Domain& base, const CMat& map, const CPoint& shift) {
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::AffineImage;
  im->n = base.dim();
  im->bounded = base.bounded();
  im->base = std::make_shared<Domain>(base);
  im->map = map;
  im->map_inv = map.inverse();
  im->shift = shift;
  Eigen::MatrixXcd dense_map(map);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense_map);
  im->sigma_min = svd.singularValues().minCoeff();
  if (!(im->sigma_min > 0.0)) throw UnsupportedDomain("affine map must be invertible");
  return Domain(im);
}

Domain Domain::intersection(std::vector<Domain> members) {
  if (members.empty()) throw UnsupportedDomain("empty intersection");
  auto im = std::make_shared<Impl>();
  im->kind = DomainKind::Intersection;
  im->n = members.front().dim();
  im->bounded = false;
  for (const auto& m : members) {
    if (m.dim() != im->n) throw UnsupportedDomain("intersection dimension mismatch");
    if (m.bounded()) im->bounded = true;
  }
  im->members = std::move(members);
  return Domain(im);
}

DomainKind Domain::kind() const { return impl_->kind; }
int Domain::dim() const { return impl_->n; }
bool Domain::bounded() const { return impl_->bounded; }
const std::vector<double>& Domain::coeffs() const { return impl_->coeffs; }
int Domain::egg_exponent() const { return impl_->two_m; }
int Domain::halfspace_coord() const { return impl_->hs_coord; }
const Domain& Domain::base() const { return *impl_->base; }
const CMat& Domain::affine_map() const { return impl_->map; }
const CPoint& Domain::affine_shift() const { return impl_->shift; }
const std::vector<Domain>& Domain::members() const { return impl_->members; }

std::string Domain::id() const {
  std::ostringstream os;
  switch (impl_->kind) {
    case DomainKind::Ball:
      if (impl_->n == 1) return "disc";
      os << "ball:" << impl_->n;
      return os.str();
    case DomainKind::Polydisc:
      if (impl_->n == 2) return "bidisc";
      os << "polydisc:" << impl_->n;
      return os.str();
    case DomainKind::Ellipsoid: {
      os << "ellipsoid:";
      for (std::size_t i = 0; i < impl_->coeffs.size(); ++i) {
        if (i) os << ",";
        os << impl_->coeffs[i];
      }
      return os.str();
    }
    case DomainKind::Egg:
      os << "egg:" << impl_->n << ":" << impl_->two_m;
      return os.str();
    case DomainKind::HalfSpace:
      if (impl_->n == 1) return "halfplane";
      os << "halfspace:" << impl_->n << ":" << impl_->hs_coord;
      return os.str();
    case DomainKind::Siegel:
      os << "siegel:" << impl_->n;
      return os.str();
    case DomainKind::ModelPoly:
      os << "model:egg:" << impl_->two_m;
      return os.str();
    case DomainKind::AffineImage:
      os << "affine(" << impl_->base->id() << ")";
      return os.str();
    case DomainKind::Intersection: {
      os << "cap(";
      for (std::size_t i = 0; i < impl_->members.size(); ++i) {
        if (i) os << ",";
        os << impl_->members[i].id();
      }
      os << ")";
      return os.str();
    }
    default:
      return "domain";
  }
}

Domain Domain::from_id(const std::string& id) {
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == sep) {
        out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    return out;
  };
  auto parts = split(id, ':');
  const std::string& head = parts[0];
  try {
    if (head == "disc") return disc();
    if (head == "bidisc") return polydisc(2);
    if (head == "halfplane") return halfplane();
    if (head == "ball") return ball(std::stoi(parts.at(1)));
    if (head == "polydisc") return polydisc(std::stoi(parts.at(1)));
    if (head == "siegel") return siegel(std::stoi(parts.at(1)));
    if (head == "egg") return egg(std::stoi(parts.at(1)), std::stoi(parts.at(2)));
    if (head == "model" && parts.at(1) == "egg") return model_poly(std::stoi(parts.at(2)));
    if (head == "corner") {
      int n = std::stoi(parts.at(1));
      std::vector<Domain> hs;
      for (int k = 0; k < n; ++k) hs.push_back(halfspace(n, k));
      return intersection(std::move(hs));
    }
    if (head == "ellipsoid") {
      auto cs = split(parts.at(1), ',');
      std::vector<double> coeffs;
      for (const auto& c : cs) coeffs.push_back(std::stod(c));
      return ellipsoid(std::move(coeffs));
    }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw UnsupportedDomain("unknown domain id: " + id);
}

int Domain::num_defining() const {
  switch (impl_->kind) {
    case DomainKind::Polydisc:
      return impl_->n;
    case DomainKind::Intersection: {
      int total = 0;
      for (const auto& m : impl_->members) total += m.num_defining();
      return total;
    }
    case DomainKind::AffineImage:
      return impl_->base->num_defining();
    default:
      return 1;
  }
}

double Domain::rho(int i, const CPoint& z) const {
  switch (impl_->kind) {
    case DomainKind::Ball:
      return z.squaredNorm() - 1.0;
    case DomainKind::Polydisc:
      return std::norm(z[i]) - 1.0;
    case DomainKind::Ellipsoid: {
      double s = 0.0;
      for (int k = 0; k < impl_->n; ++k) s += impl_->coeffs[static_cast<std::size_t>(k)] * std::norm(z[k]);
      return s - 1.0;
    }
    case DomainKind::Egg: {
      double s = 0.0;
      for (int k = 0; k + 1 < impl_->n; ++k) s += std::norm(z[k]);
      s += std::pow(std::abs(z[impl_->n - 1]), impl_->two_m);
      return s - 1.0;
    }
    case DomainKind::HalfSpace:
      return z[impl_->hs_coord].real();
    case DomainKind::Siegel: {
      double s = 2.0 * z[0].real();
      for (int k = 1; k < impl_->n; ++k) s += std::norm(z[k]);
      return s;
    }
    case DomainKind::ModelPoly:
      return 2.0 * z[0].real() + std::pow(std::abs(z[1]), impl_->two_m);
    case DomainKind::AffineImage: {
      CPoint pre = impl_->map_inv * (z - impl_->shift);
      return impl_->base->rho(i, pre);
    }
    case DomainKind::Intersection: {
      for (const auto& m : impl_->members) {
        int k = m.num_defining();
        if (i < k) return m.rho(i, z);
        i -= k;
      }
      throw std::out_of_range("rho index");
    }
    default:
      throw UnsupportedDomain("rho: unsupported kind");
  }
}

double Domain::rho_max(const CPoint& z) const {
  double m = -std::numeric_limits<double>::infinity();
  int k = num_defining();
  for (int i = 0; i < k; ++i) m = std::max(m, rho(i, z));
  return m;
}

bool Domain::member(const CPoint& z) const {
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
  return rho_max(z) < 0.0;
}

void Domain::bounding_box(RVec& lo, RVec& hi) const {
  if (!impl_->bounded) throw UnsupportedDomain("bounding_box: unbounded domain");
  const int n = impl_->n;
  lo.resize(2 * n);
  hi.resize(2 * n);
  switch (impl_->kind) {
    case DomainKind::Ball:
    case DomainKind::Polydisc:
    case DomainKind::Egg:
      lo.setConstant(-1.0);
      hi.setConstant(1.0);
      return;
    case DomainKind::Ellipsoid: {
      for (int k = 0; k < n; ++k) {
        double r = 1.0 / std::sqrt(impl_->coeffs[static_cast<std::size_t>(k)]);
        lo[2 * k] = lo[2 * k + 1] = -r;
        hi[2 * k] = hi[2 * k + 1] = r;
      }
      return;
    }
    case DomainKind::AffineImage: {
      RVec blo, bhi;
      impl_->base->bounding_box(blo, bhi);
      // w = A z + t; bound each real coordinate of w by interval arithmetic
      for (int r = 0; r < 2 * n; ++r) {
        int i = r / 2;
        bool imag_row = (r % 2) != 0;
        double center = imag_row ? impl_->shift[i].imag() : impl_->shift[i].real();
        double spread = 0.0;
        for (int j = 0; j < n; ++j) {
          C a = impl_->map(i, j);
          // contribution of Re z_j and Im z_j rows
          double cre = imag_row ? a.imag() : a.real();
          double cim = imag_row ? a.real() : -a.imag();
          double mre = 0.5 * (blo[2 * j] + bhi[2 * j]);
          double mim = 0.5 * (blo[2 * j + 1] + bhi[2 * j + 1]);
          double hre = 0.5 * (bhi[2 * j] - blo[2 * j]);
          double him = 0.5 * (bhi[2 * j + 1] - blo[2 * j + 1]);
          center += cre * mre + cim * mim;
          spread += std::abs(cre) * hre + std::abs(cim) * him;
        }
        lo[r] = center - spread;
        hi[r] = center + spread;
      }
      return;
    }
    case DomainKind::Intersection: {
      bool first = true;
      for (const auto& m : impl_->members) {
        if (!m.bounded()) continue;
        RVec mlo, mhi;
        m.bounding_box(mlo, mhi);
        if (first) {
          lo = mlo;
          hi = mhi;
          first = false;
        } else {
          lo = lo.cwiseMax(mlo);
          hi = hi.cwiseMin(mhi);
        }
      }
      if (first) throw UnsupportedDomain("bounding_box: no bounded member");
      return;
    }
    default:
      throw UnsupportedDomain("bounding_box: unsupported kind");
  }
}

double Domain::boundary_distance_quick(const CPoint& z) const {
  switch (impl_->kind) {
    case DomainKind::Ball:
      return 1.0 - z.norm();
    case DomainKind::Polydisc: {
      double d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < impl_->n; ++k) d = std::min(d, 1.0 - std::abs(z[k]));
      return d;
    }
    case DomainKind::HalfSpace:
      return -z[impl_->hs_coord].real();
    case DomainKind::Ellipsoid: {
      double r = 0.0, cmax = 0.0;
      for (int k = 0; k < impl_->n; ++k) {
        r += impl_->coeffs[static_cast<std::size_t>(k)] * std::norm(z[k]);
        cmax = std::max(cmax, impl_->coeffs[static_cast<std::size_t>(k)]);
      }
      return (1.0 - std::sqrt(std::max(r, 0.0))) / std::sqrt(cmax);
    }
    case DomainKind::Egg: {
      // |grad rho| <= 2 sqrt(n-1) + 2m on the closed egg
      double g = 2.0 * std::sqrt(std::max(impl_->n - 1, 1)) + impl_->two_m;
      return -rho(0, z) / g;
    }
    case DomainKind::Siegel: {
      double g = 2.0;
      for (int k = 1; k < impl_->n; ++k) g += 2.0 * std::abs(z[k]) + 1.0;
      return -rho(0, z) / g;
    }
    case DomainKind::ModelPoly: {
      double a = std::abs(z[1]);
      double g = 2.0 + impl_->two_m * std::pow(a + 1.0, impl_->two_m - 1);
      return -rho(0, z) / g;
    }
    case DomainKind::AffineImage: {
      CPoint pre = impl_->map_inv * (z - impl_->shift);
      return impl_->sigma_min * impl_->base->boundary_distance_quick(pre);
    }
    case DomainKind::Intersection: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& m : impl_->members) d = std::min(d, m.boundary_distance_quick(z));
      return d;
    }
    default:
      throw UnsupportedDomain("boundary_distance_quick: unsupported kind");
  }
}

namespace {

// Central-difference real gradient of rho_i, h tuned for smooth defining
// functions.
RVec rho_grad(const Domain& dom, int i, const CPoint& z) {
  const int n = dom.dim();
  RVec g(2 * n);
  const double h = 1e-6;
  CPoint zp = z, zm = z;
  for (int r = 0; r < 2 * n; ++r) {
    int k = r / 2;
    C dz = (r % 2 == 0) ? C(h, 0.0) : C(0.0, h);
    zp[k] = z[k] + dz;
    zm[k] = z[k] - dz;
    g[r] = (dom.rho(i, zp) - dom.rho(i, zm)) / (2.0 * h);
    zp[k] = z[k];
    zm[k] = z[k];
  }
  return g;
}

// Walk from interior z along direction d (unit) until rho_max changes sign,
// then bisect. Returns distance, or +inf if no crossing within reach.
double ray_crossing(const Domain& dom, const CPoint& z, const RVec& d, double reach) {
  const int n = dom.dim();
  auto at = [&](double t) {
    CPoint p = z;
    for (int k = 0; k < n; ++k) p[k] += t * C(d[2 * k], d[2 * k + 1]);
    return p;
  };
  double t_lo = 0.0, t_hi = 0.0;
  double step = std::max(1e-3, reach / 64.0);
  while (t_hi < reach) {
    double t_next = std::min(reach, t_hi + step);
    if (dom.rho_max(at(t_next)) >= 0.0) {
      t_lo = t_hi;
      t_hi = t_next;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (t_lo + t_hi);
        if (dom.rho_max(at(mid)) >= 0.0)
          t_hi = mid;
        else
          t_lo = mid;
      }
      return 0.5 * (t_lo + t_hi);
    }
    t_hi = t_next;
    step *= 1.5;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

std::pair<CPoint, double> Domain::nearest_boundary(const CPoint& z, int samples) const {
  if (!member(z)) throw NotInDomain("nearest_boundary: point outside domain");
  const int n = impl_->n;

  // exact kinds
  switch (impl_->kind) {
    case DomainKind::Ball: {
      double r = z.norm();
      CPoint b(n);
      if (r > 1e-14) {
        b = z / r;
      } else {
        b.setZero();
        b[0] = 1.0;
      }
      return {b, 1.0 - r};
    }
    case DomainKind::Polydisc: {
      int kbest = 0;
      double dbest = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k) {
        double d = 1.0 - std::abs(z[k]);
        if (d < dbest) {
          dbest = d;
          kbest = k;
        }
      }
      CPoint b = z;
      double a = std::abs(z[kbest]);
      b[kbest] = (a > 1e-14) ? z[kbest] / a : C(1.0);
      return {b, dbest};
    }
    case DomainKind::HalfSpace: {
      CPoint b = z;
      b[impl_->hs_coord] = C(0.0, z[impl_->hs_coord].imag());
      return {b, -z[impl_->hs_coord].real()};
    }
    case DomainKind::Intersection: {
      std::pair<CPoint, double> best{CPoint(), std::numeric_limits<double>::infinity()};
      for (const auto& m : impl_->members) {
        auto nb = m.nearest_boundary(z, samples);
        if (nb.second < best.second) best = nb;
      }
      return best;
    }
    default:
      break;
  }

  // generic: quasi-random direction sweep, then Lagrange refinement
  double reach = 8.0 * (1.0 + z.norm());
  if (impl_->bounded) {
    RVec lo, hi;
    bounding_box(lo, hi);
    reach = (hi - lo).norm();
  }
  auto dirs = sphere_directions(2 * n, samples, /*seed=*/12345);
  double dbest = std::numeric_limits<double>::infinity();
  RVec dirbest;
  for (const auto& dv : dirs) {
    RVec d(2 * n);
    for (int r = 0; r < 2 * n; ++r) d[r] = dv[static_cast<std::size_t>(r)];
    double cross = ray_crossing(*this, z, d, std::min(reach, dbest * 1.5 + 1e-3));
    if (cross < dbest) {
      dbest = cross;
      dirbest = d;
    }
  }
  if (!std::isfinite(dbest)) throw UnsupportedDomain("nearest_boundary: no boundary crossing found");

  CPoint b = z;
  for (int k = 0; k < n; ++k) b[k] += dbest * C(dirbest[2 * k], dirbest[2 * k + 1]);

  // Refine: fixed-point for the foot-point condition z - b || grad rho(b),
  // projecting back to the active level set each sweep.
  int active = 0;
  {
    double best_rho = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < num_defining(); ++i) {
      double v = rho(i, b);
      if (v > best_rho) {
        best_rho = v;
        active = i;
      }
    }
  }
  for (int it = 0; it < 60; ++it) {
    RVec g = rho_grad(*this, active, b);
    double gn2 = g.squaredNorm();
    if (gn2 < 1e-20) break;
    // project b onto {rho=0}
    double r = rho(active, b);
    for (int k = 0; k < n; ++k) b[k] -= (r / gn2) * C(g[2 * k], g[2 * k + 1]);
    // slide toward the true foot point: b_new = z + ((b-z).g_hat) g_hat
    g = rho_grad(*this, active, b);
    double gn = g.norm();
    if (gn < 1e-12) break;
    RVec ghat = g / gn;
    RVec bz(2 * n);
    for (int k = 0; k < n; ++k) {
      bz[2 * k] = b[k].real() - z[k].real();
      bz[2 * k + 1] = b[k].imag() - z[k].imag();
    }
    double proj = bz.dot(ghat);
    CPoint bn = z;
    for (int k = 0; k < n; ++k) bn[k] += proj * C(ghat[2 * k], ghat[2 * k + 1]);
    double move = 0.0;
    for (int k = 0; k < n; ++k) move += std::norm(bn[k] - b[k]);
    b = bn;
    if (std::sqrt(move) < 1e-12 * (1.0 + z.norm())) break;
  }
  // final projection onto the zero set, and guard against refinement drift
  {
    RVec g = rho_grad(*this, active, b);
    double gn2 = g.squaredNorm();
    if (gn2 > 1e-20) {
      double r = rho(active, b);
      for (int k = 0; k < n; ++k) b[k] -= (r / gn2) * C(g[2 * k], g[2 * k + 1]);
    }
  }
  double dref = (b - z).norm();
  if (std::abs(rho_max(b)) < 1e-7 && dref <= dbest * (1.0 + 1e-6)) return {b, dref};
  CPoint bs = z;
  for (int k = 0; k < n; ++k) bs[k] += dbest * C(dirbest[2 * k], dirbest[2 * k + 1]);
  return {bs, dbest};
}

double Domain::boundary_distance(const CPoint& z, int samples) const {
  switch (impl_->kind) {
    case DomainKind::Ball:
    case DomainKind::Polydisc:
    case DomainKind::HalfSpace:
      if (!member(z)) throw NotInDomain("boundary_distance: point outside domain");
      return boundary_distance_quick(z);
    case DomainKind::Intersection: {
      if (!member(z)) throw NotInDomain("boundary_distance: point outside domain");
      double d = std::numeric_limits<double>::infinity();
      for (const auto& m : impl_->members) d = std::min(d, m.boundary_distance(z, samples));
      return d;
    }
    default:
      return nearest_boundary(z, samples).second;
  }
}

// ---------------------------------------------------------------------------
// Cayley charts

CayleyChart Domain::cayley() const {
  CayleyChart ch;
  ch.n = impl_->n;
  if (impl_->bounded) {
    ch.type = ChartType::Identity;
    return ch;
  }
  switch (impl_->kind) {
    case DomainKind::HalfSpace:
      if (impl_->n == 1) {
        ch.type = ChartType::HalfPlaneToDisc;
        return ch;
      }
      throw NoChart("no chart for a single half-space in C^n, n>1");
    case DomainKind::Siegel:
      ch.type = ChartType::SiegelToBall;
      return ch;
    case DomainKind::Intersection: {
      // registered: product of coordinate half-spaces -> polydisc
      if (static_cast<int>(impl_->members.size()) == impl_->n) {
        std::vector<bool> seen(static_cast<std::size_t>(impl_->n), false);
        bool ok = true;
        for (const auto& m : impl_->members) {
          if (m.kind() != DomainKind::HalfSpace || m.dim() != impl_->n) {
            ok = false;
            break;
          }
          seen[static_cast<std::size_t>(m.halfspace_coord())] = true;
        }
        for (bool s : seen) ok = ok && s;
        if (ok) {
          ch.type = ChartType::HalfSpaceProductToPolydisc;
          return ch;
        }
      }
      throw NoChart("no chart registered for this intersection");
    }
    default:
      throw NoChart("no chart registered for domain " + id());
  }
}

CPoint CayleyChart::forward(const CPoint& z) const {
  switch (type) {
    case ChartType::Identity:
      return z;
    case ChartType::HalfPlaneToDisc: {
      CPoint w(1);
      w[0] = (C(1.0) + z[0]) / (C(1.0) - z[0]);
      return w;
    }
    case ChartType::SiegelToBall: {
      CPoint w(n);
      C d = C(1.0) - z[0];
      w[0] = (C(1.0) + z[0]) / d;
      for (int k = 1; k < n; ++k) w[k] = std::sqrt(2.0) * z[k] / d;
      return w;
    }
    case ChartType::HalfSpaceProductToPolydisc: {
      CPoint w(n);
      for (int k = 0; k < n; ++k) w[k] = (C(1.0) + z[k]) / (C(1.0) - z[k]);
      return w;
    }
  }
  throw NoChart("forward: bad chart");
}

CPoint CayleyChart::inverse(const CPoint& w) const {
  switch (type) {
    case ChartType::Identity:
      return w;
    case ChartType::HalfPlaneToDisc: {
      CPoint z(1);
      z[0] = (w[0] - C(1.0)) / (w[0] + C(1.0));
      return z;
    }
    case ChartType::SiegelToBall: {
      CPoint z(n);
      C d = w[0] + C(1.0);
      z[0] = (w[0] - C(1.0)) / d;
      for (int k = 1; k < n; ++k) z[k] = std::sqrt(2.0) * w[k] / d;
      return z;
    }
    case ChartType::HalfSpaceProductToPolydisc: {
      CPoint z(n);
      for (int k = 0; k < n; ++k) z[k] = (w[k] - C(1.0)) / (w[k] + C(1.0));
      return z;
    }
  }
  throw NoChart("inverse: bad chart");
}

C CayleyChart::det_forward(const CPoint& z) const {
  switch (type) {
    case ChartType::Identity:
      return C(1.0);
    case ChartType::HalfPlaneToDisc: {
      C d = C(1.0) - z[0];
      return C(2.0) / (d * d);
    }
    case ChartType::SiegelToBall: {
      C d = C(1.0) - z[0];
      C det = C(2.0) / (d * d);
      for (int k = 1; k < n; ++k) det *= std::sqrt(2.0) / d;
      return det;
    }
    case ChartType::HalfSpaceProductToPolydisc: {
      C det = C(1.0);
      for (int k = 0; k < n; ++k) {
        C d = C(1.0) - z[k];
        det *= C(2.0) / (d * d);
      }
      return det;
    }
  }
  throw NoChart("det_forward: bad chart");
}

Domain CayleyChart::target() const {
  switch (type) {
    case ChartType::Identity:
      throw NoChart("identity chart has no separate target");
    case ChartType::HalfPlaneToDisc:
      return Domain::disc();
    case ChartType::SiegelToBall:
      return Domain::ball(n);
    case ChartType::HalfSpaceProductToPolydisc:
      return Domain::polydisc(n);
  }
  throw NoChart("target: bad chart");
}

}  // namespace bgk
