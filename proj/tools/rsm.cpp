#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "rsm/io.hpp"
#include "rsm/planner.hpp"
#include "rsm/solver.hpp"
#include "rsm/synth.hpp"
#include "rsm/version.hpp"

namespace {

struct SynthArgs {
  rsm::SyntheticSpec spec;
  std::string out, truth_out, basis_out;
};

struct DecomposeArgs {
  std::string in, mode = "m1", trials = "auto";
  std::string out_u, out_v, report;
  rsm::index_t rank = 0, block = 0, vectors_per_trial = 0, multiplier = 25;
  double epsilon = 0.99, gram_rank_tol = 1e-9;
  std::uint64_t seed = 0;
  int workers = 0;
};

struct PlanArgs {
  rsm::index_t rows = 0, cols = 0, rank = 0, block = 0, multiplier = 25;
  double density = 0.0, epsilon = 0.99;
};

struct EvalArgs {
  std::string in, u, v;
};

struct BenchArgs {
  std::string preset = "table1-desk", out;
  rsm::index_t repeats = 3, als_iters = 200, multiplier = 25;
  bool als = false;
  std::uint64_t seed = 0;
  int workers = 0;
};

int run_synth(const SynthArgs& a) {
  rsm::SyntheticInstance inst = rsm::generate(a.spec);
  rsm::save_matrix(inst.observed, a.out);
  if (!a.truth_out.empty()) rsm::save_dense(a.spec.m, a.spec.n, inst.ground_truth, a.truth_out);
  if (!a.basis_out.empty()) rsm::save_dense(a.spec.n, a.spec.r, inst.truth_basis, a.basis_out);
  std::printf("wrote %s m=%lld n=%lld density=%.6f\n", a.out.c_str(),
              static_cast<long long>(a.spec.m), static_cast<long long>(a.spec.n),
              rsm::density(inst.observed));
  return 0;
}

rsm::TrialPlan resolve_trials(const DecomposeArgs& a, const rsm::MaskedMatrix& M, rsm::Mode mode,
                              rsm::index_t block) {
  const rsm::index_t nn = std::min(M.m, M.n);
  const rsm::index_t mm = std::max(M.m, M.n);
  if (a.trials == "auto") return rsm::plan_trials_heuristic(nn, a.multiplier);
  if (a.trials == "theorem3") {
    const double rho = rsm::density(M);
    // The bound is stated for row draws with surviving columns; for M1 the
    // roles swap, so the survival pool is the long dimension.
    if (mode == rsm::Mode::M2)
      return rsm::plan_trials_theorem3(mm, nn, rho, a.rank, block, a.epsilon, mode);
    return rsm::plan_trials_theorem3(nn, mm, rho, a.rank, block, a.epsilon, mode);
  }
  char* end = nullptr;
  const long long v = std::strtoll(a.trials.c_str(), &end, 10);
  if (end != a.trials.c_str() + a.trials.size() || v < 1)
    rsm::fail(rsm::errc::invalid_config, "--trials must be a positive integer, 'auto', or 'theorem3'");
  rsm::TrialPlan plan;
  plan.trials = static_cast<std::uint64_t>(v);
  plan.epsilon = a.epsilon;
  plan.k_or_l = block;
  plan.mode = mode;
  plan.source = rsm::PlanSource::explicit_count;
  return plan;
}

int run_decompose(const DecomposeArgs& a) {
  const rsm::MaskedMatrix M = rsm::load_matrix(a.in);
  rsm::RsmConfig cfg;
  cfg.rank = a.rank;
  cfg.mode = a.mode == "m2" ? rsm::Mode::M2 : rsm::Mode::M1;
  cfg.block = a.block > 0 ? a.block : a.rank + 1;
  cfg.vectors_per_trial = a.vectors_per_trial;
  cfg.seed = a.seed;
  cfg.gram_rank_tol = a.gram_rank_tol;
  cfg.workers = a.workers;
  cfg.plan = resolve_trials(a, M, cfg.mode, cfg.block);
  cfg.plan.epsilon = a.epsilon;

  auto [F, rep] = rsm::decompose(M, cfg);
  if (rep.borderline_rank_gate)
    std::fprintf(stderr, "warning: rank gate is borderline; consider more trials\n");

  if (!a.out_u.empty()) rsm::save_dense(F.m, F.r, F.u, a.out_u);
  if (!a.out_v.empty()) rsm::save_dense(F.n, F.r, F.v, a.out_v);
  if (!a.report.empty())
    rsm::write_text_file(a.report,
                         rsm::serialize_report(rsm::make_report(cfg, rep, rsm::dataset_checksum(M))));

  std::printf("e=%.17g trials_attempted=%llu trials_accepted=%llu z=%llu gram_rank=%lld "
              "underdetermined_rows=%lld wall_time=%.3f\n",
              rep.e, static_cast<unsigned long long>(rep.trials_attempted),
              static_cast<unsigned long long>(rep.trials_accepted),
              static_cast<unsigned long long>(rep.z), static_cast<long long>(rep.gram_rank),
              static_cast<long long>(rep.underdetermined_rows), rep.wall_time);
  return 0;
}

int run_plan(const PlanArgs& a) {
  const rsm::index_t k = a.block > 0 ? a.block : a.rank + 1;
  const rsm::TrialPlan t3 =
      rsm::plan_trials_theorem3(a.rows, a.cols, a.density, a.rank, k, a.epsilon);
  const rsm::TrialPlan h = rsm::plan_trials_heuristic(a.cols, a.multiplier);
  std::printf("theorem3_trials=%llu\n", static_cast<unsigned long long>(t3.trials));
  std::printf("heuristic_trials=%llu\n", static_cast<unsigned long long>(h.trials));
  return 0;
}

rsm::Factorization factor_from_files(const rsm::MaskedMatrix& Y, const std::string& upath,
                                     const std::string& vpath) {
  const rsm::MaskedMatrix U = rsm::load_matrix(upath);
  const rsm::MaskedMatrix V = rsm::load_matrix(vpath);
  if (U.known_count() != U.m * U.n || V.known_count() != V.m * V.n)
    rsm::fail(rsm::errc::invalid_config, "factor files must have no missing entries");
  if (U.n != V.n) rsm::fail(rsm::errc::invalid_config, "factor rank mismatch between U and V");
  if (U.m != Y.m || V.m != Y.n)
    rsm::fail(rsm::errc::invalid_config, "factor shapes do not match the matrix");
  rsm::Factorization F(Y.m, Y.n, U.n);
  F.u = U.values;
  F.v = V.values;
  return F;
}

int run_eval(const EvalArgs& a) {
  const rsm::MaskedMatrix Y = rsm::load_matrix(a.in);
  const rsm::Factorization F = factor_from_files(Y, a.u, a.v);
  std::printf("%.17g\n", rsm::masked_residual_norm(Y, F));
  return 0;
}

struct BenchCell {
  rsm::index_t m, n;
  double rho, sigma;
};

int run_bench(const BenchArgs& a) {
  std::vector<BenchCell> cells;
  rsm::index_t rank = 3;
  if (a.preset == "table1-desk") {
    const std::pair<rsm::index_t, rsm::index_t> shapes[] = {{4096, 256}, {8192, 256}, {8192, 128}};
    for (auto [m, n] : shapes)
      for (double rho : {0.2, 0.3, 0.5})
        for (double sigma : {0.1, 0.2, 0.3}) cells.push_back({m, n, rho, sigma});
  } else if (a.preset == "smoke") {
    rank = 2;
    for (double sigma : {0.0, 0.2}) cells.push_back({192, 48, 0.5, sigma});
  } else {
    rsm::fail(rsm::errc::invalid_config, "unknown preset: " + a.preset);
  }

  std::string csv = "m,n,rho,sigma,repeat,seed,e,wall_time,z,trials_attempted,trials_accepted";
  if (a.als) csv += ",als_e,als_wall_time";
  csv += '\n';

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const BenchCell& cell = cells[c];
    for (rsm::index_t rep = 0; rep < a.repeats; ++rep) {
      const std::uint64_t seed = a.seed + 9973 * static_cast<std::uint64_t>(c) +
                                 static_cast<std::uint64_t>(rep);
      std::fprintf(stderr, "bench: cell %zu/%zu repeat %lld/%lld (m=%lld n=%lld rho=%.2f sigma=%.2f)\n",
                   c + 1, cells.size(), static_cast<long long>(rep + 1),
                   static_cast<long long>(a.repeats), static_cast<long long>(cell.m),
                   static_cast<long long>(cell.n), cell.rho, cell.sigma);

      rsm::SyntheticSpec spec{cell.m, cell.n, rank, cell.rho, cell.sigma, seed};
      const rsm::SyntheticInstance inst = rsm::generate(spec);

      rsm::RsmConfig cfg;
      cfg.rank = rank;
      cfg.seed = seed;
      cfg.workers = a.workers;
      cfg.plan = rsm::plan_trials_heuristic(cell.n, a.multiplier);
      const auto [F, r] = rsm::decompose(inst.observed, cfg);

      char line[512];
      std::snprintf(line, sizeof line, "%lld,%lld,%.2f,%.2f,%lld,%llu,%.10g,%.3f,%llu,%llu,%llu",
                    static_cast<long long>(cell.m), static_cast<long long>(cell.n), cell.rho,
                    cell.sigma, static_cast<long long>(rep),
                    static_cast<unsigned long long>(seed), r.e, r.wall_time,
                    static_cast<unsigned long long>(r.z),
                    static_cast<unsigned long long>(r.trials_attempted),
                    static_cast<unsigned long long>(r.trials_accepted));
      csv += line;
      if (a.als) {
        const auto [FA, ra] =
            rsm::baseline_als(inst.observed, rank, a.als_iters, seed, a.workers);
        std::snprintf(line, sizeof line, ",%.10g,%.3f", ra.e, ra.wall_time);
        csv += line;
      }
      csv += '\n';
    }
  }

  if (a.out.empty())
    std::fputs(csv.c_str(), stdout);
  else
    rsm::write_text_file(a.out, csv);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{"Low-rank decomposition of matrices with missing entries via random submatrices"};
  app.set_version_flag("--version", rsm::VERSION);
  app.require_subcommand(1);

  SynthArgs sa;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic low-rank instance");
  synth->add_option("--rows", sa.spec.m, "Row count")->required();
  synth->add_option("--cols", sa.spec.n, "Column count")->required();
  synth->add_option("--rank,-r", sa.spec.r, "Ground-truth rank")->required();
  synth->add_option("--density", sa.spec.rho, "Observation density in (0,1]")->required();
  synth->add_option("--sigma", sa.spec.sigma, "Noise scale")->capture_default_str();
  synth->add_option("--seed", sa.spec.seed, "Master seed")->capture_default_str();
  synth->add_option("--out", sa.out, "Output CSV (NaN marks hidden cells)")->required();
  synth->add_option("--truth-out", sa.truth_out, "Also write the noise-free ground truth");
  synth->add_option("--basis-out", sa.basis_out, "Also write the truth row-space basis");

  DecomposeArgs da;
  CLI::App* dec = app.add_subcommand("decompose", "Factor a matrix with missing entries");
  dec->add_option("--in", da.in, "Input CSV")->required();
  dec->add_option("--rank,-r", da.rank, "Target rank")->required();
  dec->add_option("--mode", da.mode, "Sampling procedure: m1 or m2")
      ->capture_default_str()
      ->check(CLI::IsMember({"m1", "m2"}));
  dec->add_option("--block", da.block, "Columns (m1) or rows (m2) drawn per trial; 0 = rank+1")->capture_default_str();
  dec->add_option("--trials", da.trials, "Trial count: N, 'auto' (25n), or 'theorem3'")->capture_default_str();
  dec->add_option("--epsilon", da.epsilon, "Visit probability for theorem3 planning")->capture_default_str();
  dec->add_option("--vectors-per-trial", da.vectors_per_trial,
                  "Singular vectors harvested per trial; 0 = default")->capture_default_str();
  dec->add_option("--multiplier", da.multiplier, "Heuristic trials-per-column multiplier")->capture_default_str();
  dec->add_option("--seed", da.seed, "Master seed")->capture_default_str();
  dec->add_option("--workers", da.workers, "Worker threads; 0 = machine default")->capture_default_str();
  dec->add_option("--gram-rank-tol", da.gram_rank_tol, "Relative eigenvalue threshold")->capture_default_str();
  dec->add_option("--out-u", da.out_u, "Write the left factor CSV");
  dec->add_option("--out-v", da.out_v, "Write the right factor CSV");
  dec->add_option("--report", da.report, "Write a JSON run report");

  PlanArgs pa;
  CLI::App* plan = app.add_subcommand("plan", "Print trial-count bounds for a mask geometry");
  plan->add_option("--rows", pa.rows, "Row count")->required();
  plan->add_option("--cols", pa.cols, "Column count")->required();
  plan->add_option("--density", pa.density, "Observation density")->required();
  plan->add_option("--rank,-r", pa.rank, "Target rank")->required();
  plan->add_option("--block", pa.block, "Rows drawn per trial; 0 = rank+1")->capture_default_str();
  plan->add_option("--epsilon", pa.epsilon, "Visit probability")->capture_default_str();
  plan->add_option("--multiplier", pa.multiplier, "Heuristic multiplier")->capture_default_str();

  EvalArgs ea;
  CLI::App* ev = app.add_subcommand("eval", "Evaluate the factorization error on a matrix");
  ev->add_option("--in", ea.in, "Matrix CSV")->required();
  ev->add_option("--u", ea.u, "Left factor CSV")->required();
  ev->add_option("--v", ea.v, "Right factor CSV")->required();

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark grid and emit a CSV table");
  bench->add_option("--preset", ba.preset, "Grid preset: table1-desk or smoke")->capture_default_str();
  bench->add_option("--repeats", ba.repeats, "Repeats per cell")->capture_default_str();
  bench->add_flag("--als", ba.als, "Also run the ALS baseline per cell");
  bench->add_option("--als-iters", ba.als_iters, "ALS iteration count")->capture_default_str();
  bench->add_option("--multiplier", ba.multiplier, "Heuristic trials-per-column multiplier")->capture_default_str();
  bench->add_option("--seed", ba.seed, "Base seed")->capture_default_str();
  bench->add_option("--workers", ba.workers, "Worker threads; 0 = machine default")->capture_default_str();
  bench->add_option("--out", ba.out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(sa);
    if (dec->parsed()) return run_decompose(da);
    if (plan->parsed()) return run_plan(pa);
    if (ev->parsed()) return run_eval(ea);
    if (bench->parsed()) return run_bench(ba);
  } catch (const rsm::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", rsm::category_name(e.code()), e.what());
    return rsm::exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
