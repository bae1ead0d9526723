#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "oracles.hpp"
#include "rsm/solver.hpp"
#include "rsm/synth.hpp"

using namespace rsm;

namespace {

void add_diag(GramAccumulator& G, index_t i, double lambda) {
  ConstraintVector cv;
  cv.col_indices = {i};
  cv.zeta = {std::sqrt(lambda)};
  G.accumulate(cv);
}

GramAccumulator random_gram(index_t n, int count, std::uint64_t seed) {
  GramAccumulator G(n);
  Rng rng(seed, 96, 0);
  for (int t = 0; t < count; ++t) {
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (double& x : xi) x = rng.next_normal();
    G.accumulate_dense(xi);
  }
  return G;
}

TrialParams params_for(const MaskedMatrix& M, index_t rank, Mode mode, std::uint64_t seed,
                       index_t block = 0) {
  RsmConfig cfg;
  cfg.rank = rank;
  cfg.mode = mode;
  cfg.block = block;
  cfg.seed = seed;
  return trial_params(cfg, M);
}

} // namespace

TEST_CASE("solve_v recovers the small eigenspace of a diagonal gram") {
  GramAccumulator G(4);
  add_diag(G, 0, 5.0);
  add_diag(G, 1, 4.0);
  const SolveVResult res = solve_v(G, 2, 1e-9);
  CHECK(res.gram_rank == 2);
  CHECK_FALSE(res.borderline);

  // Projector onto span(v) must be diag(0,0,1,1).
  for (index_t i = 0; i < 4; ++i)
    for (index_t j = 0; j < 4; ++j) {
      double p = 0.0;
      for (index_t c = 0; c < 2; ++c)
        p += res.v[static_cast<std::size_t>(i * 2 + c)] * res.v[static_cast<std::size_t>(j * 2 + c)];
      const double want = (i == j && i >= 2) ? 1.0 : 0.0;
      CHECK(p == doctest::Approx(want).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("rank gate rejects an underfilled gram") {
  GramAccumulator G(4);
  add_diag(G, 0, 5.0);
  CHECK_THROWS_AS(solve_v(G, 2, 1e-9), Error);
  GramAccumulator G2(4);
  add_diag(G2, 0, 5.0);
  try {
    solve_v(G2, 2, 1e-9);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::insufficient_coverage);
  }
}

TEST_CASE("rank gate flags a borderline pass") {
  GramAccumulator G(4);
  add_diag(G, 0, 5.0);
  add_diag(G, 1, 2e-8); // above 1e-9 * 5 but within 10x of it
  const SolveVResult res = solve_v(G, 2, 1e-9);
  CHECK(res.gram_rank == 2);
  CHECK(res.borderline);
}

TEST_CASE("solve_v output has orthonormal columns and eigenvector residuals") {
  const index_t n = 8, r = 3;
  GramAccumulator G = random_gram(n, 100, 21);
  const GramAccumulator backup = G; // solve_v overwrites the buffer
  const SolveVResult res = solve_v(G, r, 1e-9);
  CHECK(res.gram_rank == n); // dense random accumulation is full rank

  for (index_t a = 0; a < r; ++a)
    for (index_t b = 0; b < r; ++b) {
      double dot = 0.0;
      for (index_t i = 0; i < n; ++i)
        dot += res.v[static_cast<std::size_t>(i * r + a)] * res.v[static_cast<std::size_t>(i * r + b)];
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }

  // Each column is an eigenvector: G vc - (vc' G vc) vc ~ 0.
  double gnorm = 0.0;
  for (index_t i = 0; i < n; ++i) gnorm = std::max(gnorm, std::abs(backup.at(i, i)));
  for (index_t c = 0; c < r; ++c) {
    std::vector<double> gv(static_cast<std::size_t>(n), 0.0);
    for (index_t i = 0; i < n; ++i)
      for (index_t j = 0; j < n; ++j)
        gv[static_cast<std::size_t>(i)] +=
            backup.at(i, j) * res.v[static_cast<std::size_t>(j * r + c)];
    double lambda = 0.0;
    for (index_t i = 0; i < n; ++i)
      lambda += res.v[static_cast<std::size_t>(i * r + c)] * gv[static_cast<std::size_t>(i)];
    for (index_t i = 0; i < n; ++i) {
      const double resid = gv[static_cast<std::size_t>(i)] -
                           lambda * res.v[static_cast<std::size_t>(i * r + c)];
      CHECK(std::abs(resid) <= 1e-9 * (1.0 + gnorm));
    }
  }

  // Sign convention: the largest-magnitude entry of each column is positive.
  for (index_t c = 0; c < r; ++c) {
    double best = 0.0;
    for (index_t i = 0; i < n; ++i) {
      const double v = res.v[static_cast<std::size_t>(i * r + c)];
      if (std::abs(v) > std::abs(best)) best = v;
    }
    CHECK(best > 0.0);
  }
}

TEST_CASE("solve_v validates its inputs") {
  GramAccumulator G = random_gram(4, 20, 22);
  CHECK_THROWS_AS(solve_v(G, 4, 1e-9), Error);  // r >= n
  CHECK_THROWS_AS(solve_v(G, 0, 1e-9), Error);
  CHECK_THROWS_AS(solve_v(G, 2, 0.0), Error);
}

TEST_CASE("solve_u on a fully observed row is plain least squares") {
  MaskedMatrix M(1, 4);
  for (index_t j = 0; j < 4; ++j) M.set(0, j, 1.0);
  const std::vector<double> vhat{0.5, 0.5, 0.5, 0.5}; // n*r, r=1
  const SolveUResult res = solve_u(M, vhat, 1);
  CHECK(res.underdetermined_rows == 0);
  CHECK(res.u[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("empty rows get zeros and are counted") {
  MaskedMatrix M(3, 4);
  for (index_t j = 0; j < 4; ++j) M.set(0, j, 1.0);
  for (index_t j = 0; j < 4; ++j) M.set(2, j, 3.0);
  const std::vector<double> vhat{0.5, 0.5, 0.5, 0.5};
  const SolveUResult res = solve_u(M, vhat, 1);
  CHECK(res.underdetermined_rows == 1);
  CHECK(res.u[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(res.u[1] == 0.0);
  CHECK(res.u[2] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("rows with fewer observations than rank are flagged min-norm") {
  MaskedMatrix M(1, 4);
  M.set(0, 1, 2.0); // one observation, rank 2
  std::vector<double> vhat(8, 0.0);
  vhat[1 * 2 + 0] = 1.0; // basis row at the observed column: (1, 1)
  vhat[1 * 2 + 1] = 1.0;
  const SolveUResult res = solve_u(M, vhat, 2);
  CHECK(res.underdetermined_rows == 1);
  // Minimum-norm solution of u1 + u2 = 2 is (1, 1).
  CHECK(res.u[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.u[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("solve_u satisfies the normal equations row by row") {
  const index_t m = 40, n = 12, r = 3;
  const MaskedMatrix M = oracle::random_masked(m, n, 0.6, 31);
  std::vector<double> vhat(static_cast<std::size_t>(n * r));
  Rng rng(31, 97, 0);
  for (double& x : vhat) x = rng.next_normal();

  const SolveUResult res = solve_u(M, vhat, r);
  for (index_t i = 0; i < m; ++i) {
    // Stationarity: V_J^T (V_J u - y) = 0 at the solution.
    double ynorm = 0.0;
    std::vector<double> grad(static_cast<std::size_t>(r), 0.0);
    for (index_t j = 0; j < n; ++j) {
      if (!M.known(i, j)) continue;
      double pred = 0.0;
      for (index_t k = 0; k < r; ++k)
        pred += res.u[static_cast<std::size_t>(i * r + k)] * vhat[static_cast<std::size_t>(j * r + k)];
      const double diff = pred - M(i, j);
      ynorm += M(i, j) * M(i, j);
      for (index_t k = 0; k < r; ++k)
        grad[static_cast<std::size_t>(k)] += vhat[static_cast<std::size_t>(j * r + k)] * diff;
    }
    for (index_t k = 0; k < r; ++k)
      CHECK(std::abs(grad[static_cast<std::size_t>(k)]) <= 1e-8 * (1.0 + std::sqrt(ynorm)));
  }
}

TEST_CASE("degenerate basis flags every row but stays stationary") {
  MaskedMatrix M(2, 3);
  for (index_t i = 0; i < 2; ++i)
    for (index_t j = 0; j < 3; ++j) M.set(i, j, static_cast<double>(i + j + 1));
  // Two identical basis columns: column rank 1 < r = 2.
  const std::vector<double> vhat{1, 1, 2, 2, 3, 3};
  const SolveUResult res = solve_u(M, vhat, 2);
  CHECK(res.underdetermined_rows == 2);
  for (index_t i = 0; i < 2; ++i)
    CHECK(res.u[static_cast<std::size_t>(i * 2)] ==
          doctest::Approx(res.u[static_cast<std::size_t>(i * 2 + 1)]).epsilon(1e-10));
}

TEST_CASE("parallel kernels reproduce the serial reference bitwise") {
  SyntheticSpec spec;
  spec.m = 160;
  spec.n = 36;
  spec.r = 3;
  spec.rho = 0.55;
  spec.sigma = 0.15;
  spec.seed = 41;
  const SyntheticInstance inst = generate(spec);
  const TrialParams p = params_for(inst.observed, spec.r, Mode::M1, spec.seed);

  const HarvestResult serial = reference::harvest_gram(inst.observed, p, 400);
  for (int workers : {1, 2, 4, 7}) {
    const HarvestResult par = harvest_gram(inst.observed, p, 400, workers);
    CHECK(par.attempted == serial.attempted);
    CHECK(par.accepted == serial.accepted);
    CHECK(par.gram.z() == serial.gram.z());
    CHECK(par.gram.data() == serial.gram.data());
  }

  std::vector<double> vhat(static_cast<std::size_t>(spec.n * spec.r));
  Rng rng(41, 98, 0);
  for (double& x : vhat) x = rng.next_normal();
  const SolveUResult su_serial = reference::solve_u(inst.observed, vhat, spec.r);
  for (int workers : {2, 5}) {
    const SolveUResult su = solve_u(inst.observed, vhat, spec.r, workers);
    CHECK(su.underdetermined_rows == su_serial.underdetermined_rows);
    CHECK(su.u == su_serial.u);
  }
}

TEST_CASE("noiseless decomposition recovers the planted factorization") {
  SyntheticSpec spec;
  spec.m = 200;
  spec.n = 40;
  spec.r = 3;
  spec.rho = 0.5;
  spec.sigma = 0.0;
  spec.seed = 17;
  const SyntheticInstance inst = generate(spec);

  RsmConfig cfg;
  cfg.rank = spec.r;
  cfg.seed = spec.seed;
  cfg.plan = plan_trials_heuristic(spec.n);
  const auto [F, rep] = decompose(inst.observed, cfg);

  CHECK(rep.e <= 1e-8);
  CHECK(rep.trials_accepted == cfg.plan.trials);
  CHECK(rep.gram_rank >= spec.n - spec.r);
  CHECK(oracle::max_angle_sin(F.v, inst.truth_basis, spec.n, spec.r) <= 1e-6);

  // The masked residual the report carries is the library formula.
  CHECK(rep.e == masked_residual_norm(inst.observed, F));
  CHECK(oracle::residual_loop(inst.observed, F) <= 1e-8);
}

TEST_CASE("decomposition is deterministic across runs and worker counts") {
  SyntheticSpec spec;
  spec.m = 120;
  spec.n = 24;
  spec.r = 2;
  spec.rho = 0.6;
  spec.sigma = 0.2;
  spec.seed = 53;
  const SyntheticInstance inst = generate(spec);

  RsmConfig cfg;
  cfg.rank = spec.r;
  cfg.seed = 99;
  cfg.plan = plan_trials_heuristic(spec.n);

  const auto [F1, r1] = decompose(inst.observed, cfg);
  const auto [F2, r2] = decompose(inst.observed, cfg);
  CHECK(F1.u == F2.u);
  CHECK(F1.v == F2.v);
  CHECK(r1.e == r2.e);
  CHECK(r1.z == r2.z);

  for (int workers : {1, 3}) {
    RsmConfig wcfg = cfg;
    wcfg.workers = workers;
    const auto [Fw, rw] = decompose(inst.observed, wcfg);
    CHECK(Fw.u == F1.u);
    CHECK(Fw.v == F1.v);
    CHECK(rw.e == r1.e);
    CHECK(rw.trials_attempted == r1.trials_attempted);
  }
}

TEST_CASE("wide matrices run on the transpose and swap the factors back") {
  SyntheticSpec spec;
  spec.m = 30;
  spec.n = 90;
  spec.r = 2;
  spec.rho = 0.6;
  spec.sigma = 0.0;
  spec.seed = 71;
  const SyntheticInstance inst = generate(spec);

  RsmConfig cfg;
  cfg.rank = spec.r;
  cfg.seed = 7;
  cfg.plan = plan_trials_heuristic(spec.m);
  const auto [F, rep] = decompose(inst.observed, cfg);
  CHECK(F.m == 30);
  CHECK(F.n == 90);
  CHECK(static_cast<index_t>(F.u.size()) == 30 * spec.r);
  CHECK(static_cast<index_t>(F.v.size()) == 90 * spec.r);
  CHECK(rep.e <= 1e-8);
}

TEST_CASE("row-sampling mode reaches the same floor") {
  SyntheticSpec spec;
  spec.m = 150;
  spec.n = 30;
  spec.r = 2;
  spec.rho = 0.85;
  spec.sigma = 0.0;
  spec.seed = 83;
  const SyntheticInstance inst = generate(spec);

  RsmConfig cfg;
  cfg.rank = spec.r;
  cfg.mode = Mode::M2;
  cfg.seed = 83;
  cfg.plan = plan_trials_heuristic(spec.n, 10);
  const auto [F, rep] = decompose(inst.observed, cfg);
  CHECK(rep.e <= 1e-8);
  CHECK(rep.z >= rep.trials_accepted); // adaptive harvest takes at least one vector per trial
}

TEST_CASE("decompose validates its configuration") {
  const MaskedMatrix M = oracle::random_masked(20, 10, 0.9, 5);
  RsmConfig cfg;
  cfg.rank = 10; // >= min(m, n)
  cfg.plan = plan_trials_heuristic(10);
  CHECK_THROWS_AS(decompose(M, cfg), Error);

  cfg.rank = 3;
  cfg.block = 2; // block <= rank
  CHECK_THROWS_AS(decompose(M, cfg), Error);

  cfg.block = 0;
  cfg.plan.epsilon = 1.0;
  CHECK_THROWS_AS(decompose(M, cfg), Error);

  cfg.plan.epsilon = 0.99;
  cfg.plan.trials = 0;
  CHECK_THROWS_AS(decompose(M, cfg), Error);

  MaskedMatrix empty(4, 4);
  RsmConfig ecfg;
  ecfg.rank = 2;
  ecfg.plan = plan_trials_heuristic(4);
  CHECK_THROWS_AS(decompose(empty, ecfg), Error);
}

TEST_CASE("als fits an exactly low-rank fully observed matrix") {
  SyntheticSpec spec;
  spec.m = 80;
  spec.n = 20;
  spec.r = 3;
  spec.rho = 1.0;
  spec.sigma = 0.0;
  spec.seed = 29;
  const SyntheticInstance inst = generate(spec);

  const auto [F, rep] = baseline_als(inst.observed, spec.r, 100, 1);
  CHECK(rep.e <= 1e-6);
  CHECK(rep.e == masked_residual_norm(inst.observed, F));
}

TEST_CASE("als error is non-increasing in the iteration count") {
  SyntheticSpec spec;
  spec.m = 60;
  spec.n = 18;
  spec.r = 2;
  spec.rho = 0.7;
  spec.sigma = 0.3;
  spec.seed = 37;
  const SyntheticInstance inst = generate(spec);

  double prev = std::numeric_limits<double>::infinity();
  for (index_t iters : {1, 2, 5, 20}) {
    const auto [F, rep] = baseline_als(inst.observed, spec.r, iters, 11);
    CHECK(rep.e <= prev + 1e-10);
    prev = rep.e;
  }
}

TEST_CASE("als is deterministic for a fixed seed") {
  const MaskedMatrix M = oracle::random_masked(40, 12, 0.8, 61);
  const auto [F1, r1] = baseline_als(M, 2, 10, 3);
  const auto [F2, r2] = baseline_als(M, 2, 10, 3);
  CHECK(F1.u == F2.u);
  CHECK(F1.v == F2.v);
  CHECK(r1.e == r2.e);
}
