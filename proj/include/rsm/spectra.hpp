#pragma once

#include <vector>

#include "rsm/core.hpp"
#include "rsm/sampler.hpp"

namespace rsm {

// Unit-norm right singular vector of a submatrix, addressed by the column
// indices it lives on; the embedding into R^n stays implicit.
struct ConstraintVector {
  std::vector<index_t> col_indices;
  std::vector<double> zeta; // same length as col_indices, unit 2-norm
  double singular_value = 0.0;

  void track() { mem_.reprice(zeta.size() * sizeof(double) + col_indices.size() * sizeof(index_t)); }

private:
  memtrack::charge mem_;
};

// Running G = Xi Xi^T plus the vector count z. Storage is exactly one n*n
// array; the constraint matrix Xi is never materialized.
class GramAccumulator {
public:
  GramAccumulator() = default;
  explicit GramAccumulator(index_t n)
      : n_(n), g_(static_cast<std::size_t>(n * n), 0.0),
        mem_(static_cast<std::size_t>(n * n) * sizeof(double)) {
    if (n < 1) fail(errc::invalid_config, "gram accumulator: dimension must be positive");
  }

  index_t n() const { return n_; }
  std::uint64_t z() const { return z_; }

  // G += xi xi^T for the embedded vector; touches only |col_indices|^2 cells.
  void accumulate(const ConstraintVector& cv);

  // Dense variant for tests and small callers.
  void accumulate_dense(const std::vector<double>& xi);

  void merge(const GramAccumulator& other);

  double at(index_t i, index_t j) const { return g_[static_cast<std::size_t>(i * n_ + j)]; }
  const std::vector<double>& data() const { return g_; }

  // Mutable access for the in-place eigensolve; invalidates the accumulator.
  std::vector<double>& raw() { return g_; }

private:
  index_t n_ = 0;
  std::uint64_t z_ = 0;
  std::vector<double> g_;
  memtrack::charge mem_;
};

GramAccumulator merge(const GramAccumulator& a, const GramAccumulator& b);

// The ell right singular vectors of S with smallest singular values, in
// ascending singular-value order, each sign-fixed (largest-magnitude entry
// positive). Vectors beyond rank(S) have singular value exactly 0.
std::vector<ConstraintVector> small_singular_vectors(const Submatrix& S, index_t r, index_t ell);

// Scatter zeta into an n-length zero vector at col_indices.
std::vector<double> embed(const ConstraintVector& cv, index_t n);

} // namespace rsm
