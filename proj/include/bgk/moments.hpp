#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bgk/domains.hpp"

namespace bgk {

enum class MomentSource { ClosedFormBeta, Quadrature };

// Monomial L2 moments M(alpha) = integral over the domain of |z^alpha|^2.
// Closed forms exist for the Reinhardt catalogue (disc, ball, polydisc,
// diagonal ellipsoids, the egg in C^2); everything else goes through
// scrambled quasi-Monte-Carlo with membership rejection.
class MomentTable {
 public:
  MomentTable() = default;

  static MomentTable closed_form(const Domain& dom, int degree);
  static MomentTable quadrature(const Domain& dom, int degree, std::size_t nodes,
                                std::uint64_t seed);

  double at(const std::vector<int>& alpha) const;  // throws if missing
  bool has(const std::vector<int>& alpha) const;
  int degree() const { return degree_; }
  int dim() const { return n_; }
  MomentSource source() const { return source_; }
  std::size_t nodes() const { return nodes_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& domain_id() const { return domain_id_; }

  const std::map<std::vector<int>, double>& entries() const { return values_; }

  // One record per exponent: exponents, value, provenance tag.
  void save(std::ostream& os) const;
  static MomentTable load(std::istream& is);

  // Cache round-trip under dir (keyed by domain/degree/source/nodes/seed);
  // returns an empty optional-like flag via `found`.
  static MomentTable cached_quadrature(const Domain& dom, int degree,
                                       std::size_t nodes, std::uint64_t seed,
                                       const std::string& cache_dir);

 private:
  int n_ = 0;
  int degree_ = 0;
  MomentSource source_ = MomentSource::ClosedFormBeta;
  std::size_t nodes_ = 0;
  std::uint64_t seed_ = 0;
  std::string domain_id_;
  std::map<std::vector<int>, double> values_;
};

// Closed-form single moments (used by the tables and directly by tests).
double disc_moment(int k);                                   // pi/(k+1)
double ball_moment(int n, const std::vector<int>& alpha);    // pi^n alpha!/(n+|alpha|)!
double egg2_moment(int two_m, int a, int b);                 // spec Beta formula
double ellipsoid_moment(const std::vector<double>& coeffs, const std::vector<int>& alpha);

}  // namespace bgk
