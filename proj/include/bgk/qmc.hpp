#pragma once

#include <cstdint>
#include <vector>

namespace bgk {

// Scrambled Halton sequence. The scramble is a per-base digit permutation
// drawn from the seed, so runs are reproducible given (dim, seed).
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed);

  // Point index i (0-based), coordinates in (0,1)^dim.
  std::vector<double> point(std::uint64_t i) const;
  void point(std::uint64_t i, double* out) const;

  int dim() const { return dim_; }

 private:
  int dim_;
  std::vector<int> bases_;
  std::vector<std::vector<int>> perms_;  // one digit permutation per base
};

// Deterministic low-discrepancy directions on the Euclidean unit sphere
// S^{d-1}, via inverse-normal mapping of a scrambled Halton sequence.
std::vector<std::vector<double>> sphere_directions(int dim, int count,
                                                   std::uint64_t seed);

}  // namespace bgk
