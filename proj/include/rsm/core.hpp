#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rsm/error.hpp"
#include "rsm/memtrack.hpp"

namespace rsm {

using index_t = std::int64_t;

enum class Mode { M1, M2 };

inline const char* mode_name(Mode m) noexcept { return m == Mode::M1 ? "m1" : "m2"; }

// Dense matrix with a boolean observation mask. Hidden cells hold NaN but the
// mask is authoritative: kernels read through the mask and never test for NaN.
// Immutable after construction in all pipeline code.
struct MaskedMatrix {
  index_t m = 0;
  index_t n = 0;
  std::vector<double> values;    // row-major m*n, NaN where mask is 0
  std::vector<std::uint8_t> mask; // 1 = known

  MaskedMatrix() = default;
  MaskedMatrix(index_t rows, index_t cols)
      : m(rows), n(cols),
        values(static_cast<std::size_t>(rows * cols), std::numeric_limits<double>::quiet_NaN()),
        mask(static_cast<std::size_t>(rows * cols), 0) {
    if (rows < 1 || cols < 1) fail(errc::invalid_config, "matrix dimensions must be positive");
  }

  double operator()(index_t i, index_t j) const { return values[static_cast<std::size_t>(i * n + j)]; }
  bool known(index_t i, index_t j) const { return mask[static_cast<std::size_t>(i * n + j)] != 0; }

  void set(index_t i, index_t j, double v) {
    values[static_cast<std::size_t>(i * n + j)] = v;
    mask[static_cast<std::size_t>(i * n + j)] = 1;
  }

  index_t known_count() const {
    index_t c = 0;
    for (auto b : mask) c += b;
    return c;
  }

  MaskedMatrix transposed() const {
    MaskedMatrix t(n, m);
    for (index_t i = 0; i < m; ++i)
      for (index_t j = 0; j < n; ++j)
        if (known(i, j)) t.set(j, i, (*this)(i, j));
    return t;
  }
};

// Rank-r factor pair; the decomposition is u * v^T.
struct Factorization {
  index_t m = 0;
  index_t n = 0;
  index_t r = 0;
  std::vector<double> u; // row-major m*r
  std::vector<double> v; // row-major n*r

  Factorization() = default;
  Factorization(index_t rows, index_t cols, index_t rank)
      : m(rows), n(cols), r(rank),
        u(static_cast<std::size_t>(rows * rank), 0.0),
        v(static_cast<std::size_t>(cols * rank), 0.0),
        mem_(static_cast<std::size_t>((rows + cols) * rank) * sizeof(double)) {
    if (rank < 1) fail(errc::invalid_config, "rank must be positive");
    if (rank >= rows || rank >= cols) fail(errc::invalid_config, "rank must be below min(rows, cols)");
  }

private:
  memtrack::charge mem_;
};

struct DecompositionReport {
  double e = 0.0;
  std::uint64_t trials_attempted = 0;
  std::uint64_t trials_accepted = 0;
  std::uint64_t z = 0;               // accumulated constraint vectors
  index_t underdetermined_rows = 0;
  index_t gram_rank = 0;
  bool borderline_rank_gate = false; // rank gate passed within 10x of the threshold
  double wall_time = 0.0;            // seconds
};

enum class norm_tag { frobenius, l1 };

double density(const MaskedMatrix& M);
double masked_residual_norm(const MaskedMatrix& M, const Factorization& F);
double masked_objective(const MaskedMatrix& M, const Factorization& F, norm_tag tag);

} // namespace rsm
