#include <chrono>

#include "rsm/rng.hpp"
#include "rsm/solver.hpp"

namespace rsm {

// Alternating masked least squares from a seeded normal init. Each half-step
// is the exact block minimizer (the same row solver the RSM pipeline uses),
// so the masked objective never increases.
std::pair<Factorization, DecompositionReport> baseline_als(const MaskedMatrix& M, index_t r,
                                                           index_t iterations, std::uint64_t seed,
                                                           int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  if (r < 1 || r >= std::min(M.m, M.n))
    fail(errc::invalid_config, "rank must lie in [1, min(rows, cols))");
  if (iterations < 1) fail(errc::invalid_config, "iteration count must be positive");
  if (M.known_count() == 0) fail(errc::insufficient_coverage, "matrix has no observed entries");

  std::vector<double> v(static_cast<std::size_t>(M.n * r));
  memtrack::charge vmem(v.size() * sizeof(double));
  for (index_t i = 0; i < M.n; ++i) {
    Rng rng(seed, stream::ALS_INIT, static_cast<std::uint64_t>(i));
    for (index_t k = 0; k < r; ++k) v[static_cast<std::size_t>(i * r + k)] = rng.next_normal();
  }

  const MaskedMatrix MT = M.transposed();
  SolveUResult ustep;
  for (index_t it = 0; it < iterations; ++it) {
    ustep = solve_u(M, v, r, workers);
    v = solve_u(MT, ustep.u, r, workers).u;
  }
  ustep = solve_u(M, v, r, workers);

  Factorization F(M.m, M.n, r);
  F.u = std::move(ustep.u);
  F.v = std::move(v);

  DecompositionReport rep;
  rep.underdetermined_rows = ustep.underdetermined_rows;
  rep.e = masked_residual_norm(M, F);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(F), rep};
}

} // namespace rsm
