#include "rsm/solver.hpp"

#include <lapacke.h>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>

#include "detail/row_solve.hpp"

namespace rsm {

SolveVResult solve_v(GramAccumulator& G, index_t r, double tol) {
  const index_t n = G.n();
  if (n < 1) fail(errc::invalid_config, "solve_v: empty accumulator");
  if (r < 1 || r >= n) fail(errc::invalid_config, "solve_v: need 1 <= r < n");
  if (!(tol > 0.0)) fail(errc::invalid_config, "solve_v: tolerance must be positive");

  // In-place symmetric eigensolve: the Gram buffer is overwritten by the
  // eigenvectors (columns, ascending eigenvalues), so peak storage stays at
  // the accumulator's single n*n array.
  std::vector<double>& a = G.raw();
  std::vector<double> w(static_cast<std::size_t>(n));
  memtrack::charge wmem(w.size() * sizeof(double));
  const lapack_int info =
      LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), a.data(),
                    static_cast<lapack_int>(n), w.data());
  if (info != 0) fail(errc::internal, "symmetric eigensolver failed to converge");

  const double lambda_max = std::max(w[static_cast<std::size_t>(n - 1)], 0.0);
  const double threshold = tol * lambda_max;
  index_t significant = 0;
  for (index_t i = 0; i < n; ++i)
    if (w[static_cast<std::size_t>(i)] > threshold) ++significant;
  if (significant < n - r)
    fail(errc::insufficient_coverage,
         "rank gate failed: constraint coverage below n-r; raise the trial count or epsilon");

  SolveVResult out;
  out.gram_rank = significant;
  out.borderline = !(w[static_cast<std::size_t>(r)] > 10.0 * threshold);
  out.v.resize(static_cast<std::size_t>(n * r));
  memtrack::charge vmem(out.v.size() * sizeof(double));

  for (index_t c = 0; c < r; ++c) {
    const double* col = a.data() + c * n;
    index_t arg = 0;
    double best = -1.0;
    for (index_t i = 0; i < n; ++i) {
      const double mag = std::abs(col[i]);
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    const double flip = col[arg] < 0.0 ? -1.0 : 1.0;
    for (index_t i = 0; i < n; ++i) out.v[static_cast<std::size_t>(i * r + c)] = flip * col[i];
  }
  return out;
}

SolveUResult solve_u(const MaskedMatrix& M, const std::vector<double>& vhat, index_t r,
                     int workers) {
  if (r < 1) fail(errc::invalid_config, "solve_u: rank must be positive");
  if (static_cast<index_t>(vhat.size()) != M.n * r)
    fail(errc::invalid_config, "solve_u: basis shape does not match matrix");

  SolveUResult out;
  out.u.assign(static_cast<std::size_t>(M.m * r), 0.0);
  memtrack::charge mem(out.u.size() * sizeof(double));
  const int nw = workers > 0 ? workers : omp_get_max_threads();

  index_t flagged = 0;
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic, 64) num_threads(nw) reduction(+ : flagged)
  for (index_t i = 0; i < M.m; ++i) {
    try {
      if (!detail::solve_row(M, vhat, r, i, out.u.data() + i * r)) ++flagged;
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  out.underdetermined_rows = flagged;
  return out;
}

namespace {

std::pair<Factorization, DecompositionReport> decompose_oriented(const MaskedMatrix& M,
                                                                 const RsmConfig& cfg) {
  const TrialParams params = trial_params(cfg, M);
  HarvestResult H = harvest_gram(M, params, cfg.plan.trials, cfg.workers);

  DecompositionReport rep;
  rep.trials_attempted = H.attempted;
  rep.trials_accepted = H.accepted;
  rep.z = H.gram.z();

  SolveVResult sv = solve_v(H.gram, cfg.rank, cfg.gram_rank_tol);
  H.gram = GramAccumulator(); // release the n*n buffer before building U
  rep.gram_rank = sv.gram_rank;
  rep.borderline_rank_gate = sv.borderline;

  SolveUResult su = solve_u(M, sv.v, cfg.rank, cfg.workers);
  rep.underdetermined_rows = su.underdetermined_rows;

  Factorization F(M.m, M.n, cfg.rank);
  F.u = std::move(su.u);
  F.v = std::move(sv.v);
  return {std::move(F), rep};
}

} // namespace

std::pair<Factorization, DecompositionReport> decompose(const MaskedMatrix& M,
                                                        const RsmConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.rank < 1 || cfg.rank >= std::min(M.m, M.n))
    fail(errc::invalid_config, "rank must lie in [1, min(rows, cols))");
  if (!(cfg.plan.epsilon > 0.0 && cfg.plan.epsilon < 1.0))
    fail(errc::invalid_config, "epsilon must lie in (0,1)");
  if (cfg.plan.trials < 1) fail(errc::invalid_config, "trial plan must request at least one trial");
  if (M.known_count() == 0) fail(errc::insufficient_coverage, "matrix has no observed entries");

  std::pair<Factorization, DecompositionReport> result;
  if (M.m >= M.n) {
    result = decompose_oriented(M, cfg);
  } else {
    // The pipeline assumes rows >= cols; run on the transpose and swap factors.
    const MaskedMatrix MT = M.transposed();
    auto [FT, rep] = decompose_oriented(MT, cfg);
    Factorization F(M.m, M.n, cfg.rank);
    F.u = std::move(FT.v);
    F.v = std::move(FT.u);
    result = {std::move(F), rep};
  }

  result.second.e = masked_residual_norm(M, result.first);
  result.second.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

} // namespace rsm
