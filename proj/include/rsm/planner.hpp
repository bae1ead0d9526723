#pragma once

#include <cstdint>
#include <vector>

#include "rsm/core.hpp"

namespace rsm {

enum class PlanSource { theorem3_bound, heuristic, explicit_count };

struct TrialPlan {
  std::uint64_t trials = 0;
  double epsilon = 0.99;
  index_t k_or_l = 0; // 0 = caller decides (heuristic/explicit plans)
  Mode mode = Mode::M1;
  PlanSource source = PlanSource::explicit_count;
};

// Spectrum hypothesis for the recovery-probability diagnostic: singular
// values in non-increasing order plus a bound on the noise magnitude.
struct SpectrumAssumption {
  std::vector<double> sigma;
  double psi_bnd = 0.0;
  index_t r = 0;
};

// Binary KL divergence phi(x, rho) between Bernoulli(x) and Bernoulli(rho);
// conventions 0*log 0 = 0 at the endpoints.
double kl_divergence_phi(double x, double rho);

// Normal-CDF bound C_{n,rho}(k) on the binomial CDF:
//   C(0) = (1-rho)^n, C(n) = 1 - rho^n,
//   else Phi(sgn(k/n - rho) * sqrt(2 n phi(k/n, rho))).
double zubkov_serov_bound(index_t n, double rho, index_t k);

// Complement 1 - C_{n,rho}(k), evaluated directly in the tail domain so it
// stays accurate when C saturates toward 1.
double zubkov_serov_tail(index_t n, double rho, index_t k);

// Exact partial binomial sum over i = 0..k inclusive (log-domain).
double binomial_cdf(index_t n, double rho, index_t k);

// Upper tail sum over i = k+1..n, computed without subtracting from 1.
double binomial_sf(index_t n, double rho, index_t k);

// Trial-count bound: m*n*rho / (k (r+1) (1 - C_{n,rho^k}(r+2))) * ln(1/(1-eps)).
double theorem3_raw_bound(index_t m, index_t n, double rho, index_t r, index_t k, double epsilon);
TrialPlan plan_trials_theorem3(index_t m, index_t n, double rho, index_t r, index_t k,
                               double epsilon, Mode mode = Mode::M2);

// Heuristic trial count multiplier*n; the working default is 25.
TrialPlan plan_trials_heuristic(index_t n, index_t multiplier = 25);

// One-sided Eaton comparison with the normal tail: 1 for x <= 0, else
// min(1, (2 e^3 / 9) (1 - Phi(x))).
double eaton_bound(double x);

// Recovery-probability lower bound: product over i <= r < j of
// 1 - B_E((s_i^2 - s_j^2) / (2 (s_i^2 + s_j^2) psi_bnd)), clamped to [0,1].
double theorem2_lower_bound(const SpectrumAssumption& spec);

// Standard normal CDF via erfc; absolute error well below 1e-14.
double normal_cdf(double x);

} // namespace rsm
