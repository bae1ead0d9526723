#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rsm/core.hpp"
#include "rsm/planner.hpp"
#include "rsm/spectra.hpp"

namespace rsm {

struct RsmConfig {
  index_t rank = 0;
  Mode mode = Mode::M1;
  index_t block = 0;             // columns (M1) / rows (M2) per trial; 0 = rank+1
  index_t vectors_per_trial = 0; // 0 = block-rank for M1, adaptive cols-rank for M2
  TrialPlan plan;                // trials + provenance
  std::uint64_t seed = 0;
  double gram_rank_tol = 1e-9;   // relative eigenvalue threshold of the rank gate
  index_t min_dim = 0;           // minimum surviving rows (M1) / cols (M2); 0 = rank+1
  int workers = 0;               // 0 = machine default
};

// Everything a single trial attempt needs; a pure function of these fields
// and the attempt index decides acceptance and the harvested vectors.
struct TrialParams {
  Mode mode = Mode::M1;
  index_t block = 0;
  index_t ell = 0; // 0 = adaptive cols-rank (M2)
  index_t rank = 0;
  index_t min_count = 0;
  std::uint64_t seed = 0;
};

TrialParams trial_params(const RsmConfig& cfg, const MaskedMatrix& M);

// Runs attempt `index`: sample, then harvest the small singular vectors.
// nullopt = rejected (too few surviving rows/cols).
std::optional<std::vector<ConstraintVector>> attempt_trial(const MaskedMatrix& M,
                                                           const TrialParams& p,
                                                           std::uint64_t index);

struct HarvestResult {
  GramAccumulator gram;
  std::uint64_t attempted = 0;
  std::uint64_t accepted = 0;
};

// Consumes the deterministic attempt stream 0,1,2,... until `trials` are
// accepted or the 20x retry budget runs out. The accumulation order is the
// attempt order, so results are bit-identical for any worker count.
HarvestResult harvest_gram(const MaskedMatrix& M, const TrialParams& p, std::uint64_t trials,
                           int workers = 0);

struct SolveVResult {
  std::vector<double> v; // row-major n*r, orthonormal columns
  index_t gram_rank = 0;
  bool borderline = false;
};

// Eigenvectors of the r smallest eigenvalues of G, computed in place (the
// accumulator's storage is overwritten). Fails the rank gate when fewer than
// n-r eigenvalues exceed tol * lambda_max.
SolveVResult solve_v(GramAccumulator& G, index_t r, double tol);

struct SolveUResult {
  std::vector<double> u; // row-major m*r
  index_t underdetermined_rows = 0;
};

// Row-wise masked least squares against Vhat; rank-deficient rows get the
// minimum-norm solution and are counted, empty rows get zeros.
SolveUResult solve_u(const MaskedMatrix& M, const std::vector<double>& vhat, index_t r,
                     int workers = 0);

std::pair<Factorization, DecompositionReport> decompose(const MaskedMatrix& M, const RsmConfig& cfg);

std::pair<Factorization, DecompositionReport> baseline_als(const MaskedMatrix& M, index_t r,
                                                           index_t iterations, std::uint64_t seed,
                                                           int workers = 0);

// Serial implementations kept as the ground truth for the parallel kernels.
namespace reference {
HarvestResult harvest_gram(const MaskedMatrix& M, const TrialParams& p, std::uint64_t trials);
SolveUResult solve_u(const MaskedMatrix& M, const std::vector<double>& vhat, index_t r);
} // namespace reference

} // namespace rsm
