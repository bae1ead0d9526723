#include "rsm/sampler.hpp"

#include <algorithm>
#include <numeric>

namespace rsm {

namespace {

// Partial Fisher-Yates: first `count` slots of a fresh identity permutation.
// The scratch array is reused per thread; draws depend only on `rng`.
std::vector<index_t> draw_without_replacement(index_t pool, index_t count, Rng& rng) {
  thread_local std::vector<index_t> idx;
  idx.resize(static_cast<std::size_t>(pool));
  std::iota(idx.begin(), idx.end(), index_t{0});
  for (index_t t = 0; t < count; ++t) {
    const index_t j = t + static_cast<index_t>(rng.next_below(static_cast<std::uint64_t>(pool - t)));
    std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(j)]);
  }
  std::vector<index_t> out(idx.begin(), idx.begin() + count);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

std::optional<Submatrix> sample_m1(const MaskedMatrix& M, index_t l, const TrialRng& rng,
                                   index_t min_rows) {
  if (l < 1 || l > M.n) fail(errc::invalid_config, "sample_m1: column count out of range");
  Rng stream = rng.stream();
  std::vector<index_t> cols = draw_without_replacement(M.n, l, stream);

  std::vector<index_t> rows;
  for (index_t i = 0; i < M.m; ++i) {
    bool full = true;
    for (index_t c = 0; c < l; ++c) {
      if (!M.known(i, cols[static_cast<std::size_t>(c)])) {
        full = false;
        break;
      }
    }
    if (full) rows.push_back(i);
  }
  if (static_cast<index_t>(rows.size()) < min_rows) return std::nullopt;

  Submatrix S;
  S.col_indices = std::move(cols);
  S.row_indices = std::move(rows);
  S.values.resize(S.row_indices.size() * S.col_indices.size());
  for (index_t i = 0; i < S.rows(); ++i)
    for (index_t j = 0; j < S.cols(); ++j)
      S.values[static_cast<std::size_t>(i * S.cols() + j)] =
          M(S.row_indices[static_cast<std::size_t>(i)], S.col_indices[static_cast<std::size_t>(j)]);
  S.track();
  return S;
}

std::optional<Submatrix> sample_m2(const MaskedMatrix& M, index_t k, const TrialRng& rng,
                                   index_t min_cols) {
  if (k < 1 || k > M.m) fail(errc::invalid_config, "sample_m2: row count out of range");
  Rng stream = rng.stream();
  std::vector<index_t> rows = draw_without_replacement(M.m, k, stream);

  std::vector<index_t> cols;
  for (index_t j = 0; j < M.n; ++j) {
    bool full = true;
    for (index_t t = 0; t < k; ++t) {
      if (!M.known(rows[static_cast<std::size_t>(t)], j)) {
        full = false;
        break;
      }
    }
    if (full) cols.push_back(j);
  }
  if (static_cast<index_t>(cols.size()) < min_cols) return std::nullopt;

  Submatrix S;
  S.row_indices = std::move(rows);
  S.col_indices = std::move(cols);
  S.values.resize(S.row_indices.size() * S.col_indices.size());
  for (index_t i = 0; i < S.rows(); ++i)
    for (index_t j = 0; j < S.cols(); ++j)
      S.values[static_cast<std::size_t>(i * S.cols() + j)] =
          M(S.row_indices[static_cast<std::size_t>(i)], S.col_indices[static_cast<std::size_t>(j)]);
  S.track();
  return S;
}

double visited_fraction(const std::vector<Submatrix>& trials, const MaskedMatrix& M) {
  const index_t known = M.known_count();
  if (known == 0) return 0.0;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(M.m * M.n), 0);
  for (const Submatrix& S : trials)
    for (index_t i : S.row_indices)
      for (index_t j : S.col_indices) seen[static_cast<std::size_t>(i * M.n + j)] = 1;
  index_t hit = 0;
  for (std::size_t p = 0; p < seen.size(); ++p)
    if (seen[p] && M.mask[p]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(known);
}

} // namespace rsm
