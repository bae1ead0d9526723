#pragma once

#include <cstdint>
#include <vector>

#include "rsm/core.hpp"

namespace rsm {

struct SyntheticSpec {
  index_t m = 0;
  index_t n = 0;
  index_t r = 0;
  double rho = 1.0;   // observation density in (0,1]
  double sigma = 0.0; // noise scale
  std::uint64_t seed = 0;
};

// Generated instance with the ground truth retained for oracle checks:
// Y = Ybar + Psi on an i.i.d. Bernoulli(rho) mask, Ybar = A*B of rank <= r,
// truth_basis = the r leading right singular vectors of Ybar.
struct SyntheticInstance {
  MaskedMatrix observed;
  std::vector<double> ground_truth; // row-major m*n
  std::vector<double> noise;        // row-major m*n
  std::vector<double> truth_basis;  // row-major n*r, orthonormal columns
};

SyntheticInstance generate(const SyntheticSpec& spec);

} // namespace rsm
