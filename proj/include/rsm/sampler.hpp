#pragma once

#include <optional>
#include <vector>

#include "rsm/core.hpp"
#include "rsm/rng.hpp"

namespace rsm {

// Fully observed rectangle of the source matrix. Index lists are strictly
// increasing; every (row, col) intersection is known in the source mask.
struct Submatrix {
  std::vector<index_t> row_indices;
  std::vector<index_t> col_indices;
  std::vector<double> values; // row-major |rows| x |cols|

  index_t rows() const { return static_cast<index_t>(row_indices.size()); }
  index_t cols() const { return static_cast<index_t>(col_indices.size()); }
  double operator()(index_t i, index_t j) const {
    return values[static_cast<std::size_t>(i * cols() + j)];
  }

  void track() { mem_.reprice(values.size() * sizeof(double)); }

private:
  memtrack::charge mem_;
};

// The random stream of trial i is a pure function of (master_seed, i);
// trials can run in any order on any number of workers.
struct TrialRng {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  Rng stream() const { return Rng(master_seed, stream::TRIAL, trial_index); }
};

// M1: draw l columns uniformly without replacement, keep every row fully
// observed on them. Returns nullopt when fewer than min_rows rows survive.
std::optional<Submatrix> sample_m1(const MaskedMatrix& M, index_t l, const TrialRng& rng,
                                   index_t min_rows = 1);

// M2: draw k rows, keep every column fully observed on them.
std::optional<Submatrix> sample_m2(const MaskedMatrix& M, index_t k, const TrialRng& rng,
                                   index_t min_cols = 1);

// Fraction of mask-true cells covered by at least one submatrix.
double visited_fraction(const std::vector<Submatrix>& trials, const MaskedMatrix& M);

} // namespace rsm
