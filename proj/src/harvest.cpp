#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

#include "rsm/solver.hpp"

namespace rsm {

TrialParams trial_params(const RsmConfig& cfg, const MaskedMatrix& M) {
  if (cfg.rank < 1) fail(errc::invalid_config, "rank must be positive");
  if (cfg.rank >= std::min(M.m, M.n)) fail(errc::invalid_config, "rank must be below min(rows, cols)");

  TrialParams p;
  p.mode = cfg.mode;
  p.rank = cfg.rank;
  p.seed = cfg.seed;
  p.block = cfg.block > 0 ? cfg.block : cfg.rank + 1;
  if (p.block <= cfg.rank) fail(errc::invalid_config, "block must exceed rank");
  const index_t pool = cfg.mode == Mode::M1 ? M.n : M.m;
  if (p.block > pool) fail(errc::invalid_config, "block exceeds matrix dimension");

  p.min_count = cfg.min_dim > 0 ? cfg.min_dim : cfg.rank + 1;
  if (p.min_count < cfg.rank + 1) fail(errc::invalid_config, "min_dim must be at least rank+1");

  if (cfg.mode == Mode::M1) {
    p.ell = cfg.vectors_per_trial > 0 ? cfg.vectors_per_trial : p.block - cfg.rank;
    if (p.ell > p.block - cfg.rank)
      fail(errc::invalid_config, "vectors_per_trial exceeds block-rank");
  } else {
    p.ell = cfg.vectors_per_trial; // 0 = adaptive: surviving cols - rank
  }
  return p;
}

std::optional<std::vector<ConstraintVector>> attempt_trial(const MaskedMatrix& M,
                                                           const TrialParams& p,
                                                           std::uint64_t index) {
  const TrialRng rng{p.seed, index};
  if (p.mode == Mode::M1) {
    std::optional<Submatrix> S = sample_m1(M, p.block, rng, p.min_count);
    if (!S) return std::nullopt;
    return small_singular_vectors(*S, p.rank, p.ell);
  }
  std::optional<Submatrix> S = sample_m2(M, p.block, rng, p.min_count);
  if (!S) return std::nullopt;
  const index_t avail = S->cols() - p.rank;
  const index_t ell = p.ell > 0 ? std::min(p.ell, avail) : avail;
  return small_singular_vectors(*S, p.rank, ell);
}

namespace {

// Buffered constraint storage per chunk (coefficients plus their column
// indices) stays near n^2/8 doubles. The estimate uses only the config and
// the global density, so chunk boundaries are identical on every worker
// count; results do not depend on them either way, since consumption is
// always the attempt-order prefix.
index_t chunk_capacity(const MaskedMatrix& M, const TrialParams& p) {
  const index_t n = M.n;
  index_t per_attempt;
  if (p.mode == Mode::M1) {
    per_attempt = p.ell * p.block;
  } else {
    const double rho = density(M);
    const double expect = static_cast<double>(n) * std::pow(rho, static_cast<double>(p.block));
    const index_t q_est = std::clamp(static_cast<index_t>(std::ceil(expect * 1.5)) + 1,
                                     p.rank + 2, n);
    const index_t ell_est = p.ell > 0 ? std::min(p.ell, q_est - p.rank) : q_est - p.rank;
    per_attempt = ell_est * q_est;
  }
  const index_t cap_doubles = std::max<index_t>(n * n / 16, 2048);
  return std::clamp<index_t>(cap_doubles / std::max<index_t>(per_attempt, 1), 1, 8192);
}

} // namespace

HarvestResult harvest_gram(const MaskedMatrix& M, const TrialParams& p, std::uint64_t trials,
                           int workers) {
  if (trials < 1) fail(errc::invalid_config, "trial count must be positive");
  HarvestResult out;
  out.gram = GramAccumulator(M.n);

  const std::uint64_t budget = 20 * trials;
  const index_t cap = chunk_capacity(M, p);
  const int nw = workers > 0 ? workers : omp_get_max_threads();

  std::exception_ptr first_error;
  while (out.accepted < trials && out.attempted < budget) {
    const std::uint64_t want = std::max<std::uint64_t>(trials - out.accepted, 1);
    const std::uint64_t chunk =
        std::min({static_cast<std::uint64_t>(cap), budget - out.attempted, want});

    std::vector<std::optional<std::vector<ConstraintVector>>> results(chunk);
#pragma omp parallel for schedule(dynamic) num_threads(nw)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(chunk); ++i) {
      try {
        results[static_cast<std::size_t>(i)] =
            attempt_trial(M, p, out.attempted + static_cast<std::uint64_t>(i));
      } catch (...) {
#pragma omp critical
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);

    // Consume in attempt order; surplus acceptances past the target are
    // discarded so the consumed prefix is chunk-size independent.
    for (std::uint64_t i = 0; i < chunk; ++i) {
      auto& res = results[static_cast<std::size_t>(i)];
      ++out.attempted;
      if (!res) continue;
      for (const ConstraintVector& cv : *res) out.gram.accumulate(cv);
      ++out.accepted;
      if (out.accepted == trials) break;
    }
  }
  return out;
}

} // namespace rsm
