#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "rsm/solver.hpp"
#include "rsm/synth.hpp"

// Times the OpenMP kernels against their serial reference implementations on
// one synthetic instance and checks that both produce the same numbers.

namespace {

template <typename F>
double time_best_of(int repeats, F&& fn) {
  double best = HUGE_VAL;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, dt);
  }
  return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

} // namespace

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{"Parallel-vs-serial kernel benchmark"};
  rsm::index_t m = 4096, n = 128, rank = 3, multiplier = 25;
  double rho = 0.3, sigma = 0.1;
  std::uint64_t seed = 0;
  int workers = 0, repeats = 3;
  app.add_option("--rows", m, "Row count")->capture_default_str();
  app.add_option("--cols", n, "Column count")->capture_default_str();
  app.add_option("--rank,-r", rank, "Rank")->capture_default_str();
  app.add_option("--density", rho, "Observation density")->capture_default_str();
  app.add_option("--sigma", sigma, "Noise scale")->capture_default_str();
  app.add_option("--multiplier", multiplier, "Trials per column")->capture_default_str();
  app.add_option("--seed", seed, "Seed")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads; 0 = machine default")->capture_default_str();
  app.add_option("--repeats", repeats, "Timing repeats (best-of)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const rsm::SyntheticInstance inst =
        rsm::generate({m, n, rank, rho, sigma, seed});
    const rsm::MaskedMatrix& M = inst.observed;

    rsm::RsmConfig cfg;
    cfg.rank = rank;
    cfg.seed = seed;
    cfg.workers = workers;
    const rsm::TrialParams params = rsm::trial_params(cfg, M);
    const std::uint64_t trials = static_cast<std::uint64_t>(multiplier * n);

    rsm::HarvestResult par, ser;
    const double t_par =
        time_best_of(repeats, [&] { par = rsm::harvest_gram(M, params, trials, workers); });
    const double t_ser =
        time_best_of(repeats, [&] { ser = rsm::reference::harvest_gram(M, params, trials); });
    const double gram_diff = max_abs_diff(par.gram.data(), ser.gram.data());

    rsm::GramAccumulator G = par.gram;
    const rsm::SolveVResult sv = rsm::solve_v(G, rank, cfg.gram_rank_tol);

    rsm::SolveUResult upar, user;
    const double tu_par =
        time_best_of(repeats, [&] { upar = rsm::solve_u(M, sv.v, rank, workers); });
    const double tu_ser =
        time_best_of(repeats, [&] { user = rsm::reference::solve_u(M, sv.v, rank); });
    const double u_diff = max_abs_diff(upar.u, user.u);

    std::printf("instance: m=%lld n=%lld rank=%lld rho=%.3f sigma=%.3f trials=%llu\n",
                static_cast<long long>(m), static_cast<long long>(n),
                static_cast<long long>(rank), rho, sigma,
                static_cast<unsigned long long>(trials));
    std::printf("%-14s %12s %12s %9s %12s\n", "kernel", "parallel_s", "serial_s", "speedup",
                "max_diff");
    std::printf("%-14s %12.4f %12.4f %9.2fx %12.3e\n", "harvest_gram", t_par, t_ser,
                t_ser / t_par, gram_diff);
    std::printf("%-14s %12.4f %12.4f %9.2fx %12.3e\n", "solve_u", tu_par, tu_ser,
                tu_ser / tu_par, u_diff);

    if (gram_diff != 0.0 || u_diff != 0.0) {
      std::fprintf(stderr, "error: internal: parallel and serial kernels disagree\n");
      return 1;
    }
  } catch (const rsm::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", rsm::category_name(e.code()), e.what());
    return rsm::exit_code(e.code());
  }
  return 0;
}
