#include "rsm/planner.hpp"

#include <algorithm>
#include <cmath>

namespace rsm {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

void check_binomial_domain(index_t n, double rho, index_t k) {
  if (n < 1) fail(errc::invalid_config, "binomial domain: n must be positive");
  if (!(rho > 0.0 && rho < 1.0)) fail(errc::invalid_config, "binomial domain: rho must lie in (0,1)");
  if (k < 0 || k > n) fail(errc::invalid_config, "binomial domain: k must lie in [0,n]");
}

// Signed deviation term of the normal-approximation bound at interior k.
double zs_deviation(index_t n, double rho, index_t k) {
  const double x = static_cast<double>(k) / static_cast<double>(n);
  const double s = (x > rho) ? 1.0 : (x < rho ? -1.0 : 0.0);
  return s * std::sqrt(2.0 * static_cast<double>(n) * kl_divergence_phi(x, rho));
}

// Log-domain sum of binomial pmf over i in [lo, hi].
double binomial_range_sum(index_t n, double rho, index_t lo, index_t hi) {
  const double lr = std::log(rho);
  const double lq = std::log1p(-rho);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  double maxlog = -HUGE_VAL;
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (index_t i = lo; i <= hi; ++i) {
    const double t = lgn - std::lgamma(static_cast<double>(i) + 1.0) -
                     std::lgamma(static_cast<double>(n - i) + 1.0) +
                     static_cast<double>(i) * lr + static_cast<double>(n - i) * lq;
    logs.push_back(t);
    maxlog = std::max(maxlog, t);
  }
  double acc = 0.0;
  for (double t : logs) acc += std::exp(t - maxlog);
  return std::exp(maxlog) * acc;
}

} // namespace

double kl_divergence_phi(double x, double rho) {
  if (!(x >= 0.0 && x <= 1.0)) fail(errc::invalid_config, "kl_divergence_phi: x must lie in [0,1]");
  if (!(rho > 0.0 && rho < 1.0)) fail(errc::invalid_config, "kl_divergence_phi: rho must lie in (0,1)");
  double acc = 0.0;
  if (x > 0.0) acc += x * (std::log(x) - std::log(rho));
  if (x < 1.0) acc += (1.0 - x) * (std::log1p(-x) - std::log1p(-rho));
  return std::max(acc, 0.0);
}

double zubkov_serov_bound(index_t n, double rho, index_t k) {
  check_binomial_domain(n, rho, k);
  if (k == 0) return std::exp(static_cast<double>(n) * std::log1p(-rho));
  if (k == n) return -std::expm1(static_cast<double>(n) * std::log(rho));
  return normal_cdf(zs_deviation(n, rho, k));
}

double zubkov_serov_tail(index_t n, double rho, index_t k) {
  check_binomial_domain(n, rho, k);
  if (k == 0) return -std::expm1(static_cast<double>(n) * std::log1p(-rho));
  if (k == n) return std::exp(static_cast<double>(n) * std::log(rho));
  return normal_sf(zs_deviation(n, rho, k));
}

double binomial_cdf(index_t n, double rho, index_t k) {
  check_binomial_domain(n, rho, k);
  if (k == n) return 1.0;
  return binomial_range_sum(n, rho, 0, k);
}

double binomial_sf(index_t n, double rho, index_t k) {
  check_binomial_domain(n, rho, k);
  if (k == n) return 0.0;
  return binomial_range_sum(n, rho, k + 1, n);
}

double theorem3_raw_bound(index_t m, index_t n, double rho, index_t r, index_t k, double epsilon) {
  if (r < 1) fail(errc::invalid_config, "theorem3: rank must be positive");
  if (k <= r) fail(errc::invalid_config, "theorem3: k must exceed r");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(errc::invalid_config, "theorem3: epsilon must lie in (0,1)");
  if (!(rho > 0.0 && rho < 1.0)) fail(errc::invalid_config, "theorem3: rho must lie in (0,1)");
  if (r + 2 > n) fail(errc::insufficient_coverage, "theorem3 plan infeasible: r+2 exceeds n");

  const double rho_k = std::exp(static_cast<double>(k) * std::log(rho));
  const double tail = zubkov_serov_tail(n, rho_k, r + 2); // 1 - C_{n,rho^k}(r+2)
  if (tail <= 1e-12)
    fail(errc::insufficient_coverage, "theorem3 plan infeasible: density too low for the chosen k");

  const double base = static_cast<double>(m) * static_cast<double>(n) * rho /
                      (static_cast<double>(k) * static_cast<double>(r + 1) * tail);
  return base * (-std::log1p(-epsilon));
}

TrialPlan plan_trials_theorem3(index_t m, index_t n, double rho, index_t r, index_t k,
                               double epsilon, Mode mode) {
  const double raw = theorem3_raw_bound(m, n, rho, r, k, epsilon);
  TrialPlan plan;
  plan.trials = static_cast<std::uint64_t>(std::max(1.0, std::ceil(raw)));
  plan.epsilon = epsilon;
  plan.k_or_l = k;
  plan.mode = mode;
  plan.source = PlanSource::theorem3_bound;
  return plan;
}

TrialPlan plan_trials_heuristic(index_t n, index_t multiplier) {
  if (n < 1) fail(errc::invalid_config, "heuristic plan: n must be positive");
  if (multiplier < 1) fail(errc::invalid_config, "heuristic plan: multiplier must be positive");
  TrialPlan plan;
  plan.trials = static_cast<std::uint64_t>(multiplier) * static_cast<std::uint64_t>(n);
  plan.source = PlanSource::heuristic;
  return plan;
}

double eaton_bound(double x) {
  if (x <= 0.0) return 1.0;
  const double c = 2.0 * std::exp(3.0) / 9.0;
  return std::min(1.0, c * normal_sf(x));
}

double theorem2_lower_bound(const SpectrumAssumption& spec) {
  const index_t n = static_cast<index_t>(spec.sigma.size());
  if (spec.r < 1 || spec.r >= n) fail(errc::invalid_config, "theorem2: need 1 <= r < n");
  if (!(spec.psi_bnd > 0.0)) fail(errc::invalid_config, "theorem2: psi_bnd must be positive");
  for (index_t i = 0; i + 1 < n; ++i)
    if (spec.sigma[static_cast<std::size_t>(i)] < spec.sigma[static_cast<std::size_t>(i + 1)])
      fail(errc::invalid_config, "theorem2: singular values must be non-increasing");
  if (spec.sigma.back() < 0.0) fail(errc::invalid_config, "theorem2: singular values must be nonnegative");

  double prod = 1.0;
  for (index_t i = 0; i < spec.r; ++i) {
    const double si2 = spec.sigma[static_cast<std::size_t>(i)] * spec.sigma[static_cast<std::size_t>(i)];
    for (index_t j = spec.r; j < n; ++j) {
      const double sj2 = spec.sigma[static_cast<std::size_t>(j)] * spec.sigma[static_cast<std::size_t>(j)];
      const double denom = 2.0 * (si2 + sj2) * spec.psi_bnd;
      const double arg = denom > 0.0 ? (si2 - sj2) / denom : 0.0;
      prod *= 1.0 - eaton_bound(arg);
    }
  }
  return std::clamp(prod, 0.0, 1.0);
}

} // namespace rsm
