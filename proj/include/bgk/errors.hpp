#pragma once

#include <stdexcept>
#include <string>

namespace bgk {

// Error taxonomy shared by all modules. Each condition the library can
// report maps to one subclass so callers (and the CLI exit-code mapping)
// can discriminate without string matching.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NotInDomain : public Error {
 public:
  using Error::Error;
};

class OutsideDomain : public Error {
 public:
  using Error::Error;
};

class NoChart : public Error {
 public:
  using Error::Error;
};

class UnsupportedDomain : public Error {
 public:
  using Error::Error;
};

class QuadratureUnavailable : public Error {
 public:
  using Error::Error;
};

class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

// A geodesic came closer to the boundary than the integration safety
// margin. Carries how far it got so sweeps can keep partial results.
class LeftDomain : public Error {
 public:
  LeftDomain(const std::string& what, double reached_length)
      : Error(what), reached_length_(reached_length) {}
  double reached_length() const { return reached_length_; }

 private:
  double reached_length_ = 0.0;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class UnknownClass : public Error {
 public:
  using Error::Error;
};

class ApproachLeavesCone : public Error {
 public:
  using Error::Error;
};

class NoEmbeddingFound : public Error {
 public:
  using Error::Error;
};

class UnsupportedIntersection : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bgk
