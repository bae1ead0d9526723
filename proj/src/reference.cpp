#include "rsm/solver.hpp"

#include "detail/row_solve.hpp"

// Straight-line serial versions of the two parallel kernels. These are the
// behavioral ground truth: the chunked OpenMP harvest must reproduce this
// attempt-by-attempt consumption bit for bit, and the parallel row solver
// must match the per-row solutions exactly.

namespace rsm::reference {

HarvestResult harvest_gram(const MaskedMatrix& M, const TrialParams& p, std::uint64_t trials) {
  if (trials < 1) fail(errc::invalid_config, "trial count must be positive");
  HarvestResult out;
  out.gram = GramAccumulator(M.n);
  const std::uint64_t budget = 20 * trials;
  while (out.accepted < trials && out.attempted < budget) {
    auto res = attempt_trial(M, p, out.attempted);
    ++out.attempted;
    if (!res) continue;
    for (const ConstraintVector& cv : *res) out.gram.accumulate(cv);
    ++out.accepted;
  }
  return out;
}

SolveUResult solve_u(const MaskedMatrix& M, const std::vector<double>& vhat, index_t r) {
  if (r < 1) fail(errc::invalid_config, "solve_u: rank must be positive");
  if (static_cast<index_t>(vhat.size()) != M.n * r)
    fail(errc::invalid_config, "solve_u: basis shape does not match matrix");

  SolveUResult out;
  out.u.assign(static_cast<std::size_t>(M.m * r), 0.0);
  memtrack::charge mem(out.u.size() * sizeof(double));
  for (index_t i = 0; i < M.m; ++i)
    if (!detail::solve_row(M, vhat, r, i, out.u.data() + i * r)) ++out.underdetermined_rows;
  return out;
}

} // namespace rsm::reference
