#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bgk/types.hpp"

namespace bgk {

// Truncated multivariate Taylor arithmetic ("jets") over up to 6 complex
// variables and total order up to 3. Kernel formulas are evaluated in the
// polarized variables (z_1..z_n, wbar_1..wbar_n), so one jet evaluation of a
// closed-form kernel yields every mixed derivative d^a_z d^b_wbar K exactly.
//
// Coefficients are Taylor coefficients: value = sum_e c_e * (v - v0)^e.
// The derivative of order e is c_e * e!.

constexpr int kJetMaxVars = 6;
constexpr int kJetMaxOrder = 3;
constexpr int kJetMaxTerms = 84;  // C(6+3,3)

struct JetSpace {
  int nv = 0;
  int order = 0;
  int size = 0;
  std::vector<std::array<std::uint8_t, kJetMaxVars>> exps;
  std::vector<int> total_degree;
  // packed exponent key -> index (exponents < 4, nv <= 6 -> 4^6 keys)
  std::array<std::int16_t, 4096> lookup{};
  // sparse multiplication table: c[k] += a[i] * b[j]
  struct Triple {
    std::int16_t i, j, k;
  };
  std::vector<Triple> mul;

  static int pack(const std::uint8_t* e, int nv);
  int index(const std::uint8_t* e) const;
  static const JetSpace& get(int nv, int order);
};

class Jet {
 public:
  Jet() = default;
  explicit Jet(const JetSpace& sp) : sp_(&sp) { c_.fill(C(0.0)); }

  static Jet constant(const JetSpace& sp, C value) {
    Jet j(sp);
    j.c_[0] = value;
    return j;
  }
  // The affine jet  value + (v_i - v_i^0).
  static Jet variable(const JetSpace& sp, int i, C value);

  const JetSpace& space() const { return *sp_; }
  C value() const { return c_[0]; }
  C coeff(int idx) const { return c_[idx]; }
  C& coeff(int idx) { return c_[idx]; }

  // Derivative of multi-order e (length nv), i.e. Taylor coeff times e!.
  C deriv(const std::uint8_t* e) const;

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet operator+(C s) const;
  Jet operator-(C s) const;
  Jet operator*(C s) const;
  Jet operator-() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);

  // 1/this; requires a nonzero constant term.
  Jet recip() const;
  // log(this) with the principal branch at the constant term.
  Jet log() const;
  Jet pow(int k) const;

 private:
  const JetSpace* sp_ = nullptr;
  std::array<C, kJetMaxTerms> c_{};
};

inline Jet operator*(C s, const Jet& j) { return j * s; }
inline Jet operator+(C s, const Jet& j) { return j + s; }
inline Jet operator-(C s, const Jet& j) { return (-j) + s; }

}  // namespace bgk
