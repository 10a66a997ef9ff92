// maxnorm: command-line front end for max-norm constrained matrix completion.
//
// Exit codes: 0 success, 1 validation error, 2 solver divergence.

#include "maxnorm/core.hpp"
#include "maxnorm/errors.hpp"
#include "maxnorm/experiment.hpp"
#include "maxnorm/model_select.hpp"
#include "maxnorm/sampling.hpp"
#include "maxnorm/solver.hpp"
#include "maxnorm/text_io.hpp"
#include "maxnorm/theory.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace maxnorm;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitDivergence = 2;

struct SolverFlags {
  std::optional<double> alpha;
  std::optional<double> radius;
  long long k = 0;
  double tau = SolverConfig{}.tau;
  long max_iters = SolverConfig{}.max_iters;
  double tol = SolverConfig{}.tol;
  std::uint64_t seed = 0;
  std::string solver = "pgd";
  long epochs = SolverConfig{}.epochs;

  void add(CLI::App* cmd) {
    cmd->add_option("--k", k, "factor width (0 = default)");
    cmd->add_option("--tau", tau, "initial step size");
    cmd->add_option("--max-iters", max_iters, "PGD iteration cap");
    cmd->add_option("--tol", tol, "relative objective-change stop");
    cmd->add_option("--seed", seed, "initialization seed");
    cmd->add_option("--solver", solver, "pgd | stepwise");
    cmd->add_option("--epochs", epochs, "stepwise passes");
  }

  SolverConfig config() const {
    SolverConfig c;
    c.k = k;
    c.tau = tau;
    c.max_iters = max_iters;
    c.tol = tol;
    c.seed = seed;
    c.algorithm = parse_algorithm(solver);
    c.epochs = epochs;
    return c;
  }
};

void emit(const KeyValues& kv, const std::string& path) {
  if (path.empty()) {
    write_key_values(std::cout, kv);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  write_key_values(out, kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-norm constrained matrix completion toolkit"};
  app.require_subcommand(1);

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Generate a ground truth and noisy observations");
  long long sim_d1 = 0, sim_d2 = 0, sim_rank = 1;
  double sim_alpha = 1.0, sim_sigma = 0.0;
  std::uint64_t sim_truth_seed = 0, sim_seed = 0;
  std::size_t sim_n = 0;
  std::string sim_dist, sim_noise = "gaussian", sim_truth_out, sim_obs_out;
  sim->add_option("--d1", sim_d1, "rows")->required();
  sim->add_option("--d2", sim_d2, "columns")->required();
  sim->add_option("--rank", sim_rank, "ground-truth rank")->required();
  sim->add_option("--alpha", sim_alpha, "ground-truth l-infinity norm");
  sim->add_option("--truth-seed", sim_truth_seed, "ground-truth seed");
  sim->add_option("--n", sim_n, "number of sampled entries")->required();
  sim->add_option("--seed", sim_seed, "sampling and noise seed");
  sim->add_option("--distribution", sim_dist, "distribution file (default uniform)");
  sim->add_option("--noise", sim_noise, "none | gaussian | laplace");
  sim->add_option("--sigma", sim_sigma, "noise scale");
  sim->add_option("--truth-out", sim_truth_out, "dense matrix output")->required();
  sim->add_option("--obs-out", sim_obs_out, "observation file output")->required();

  // fit --------------------------------------------------------------------
  auto* fitc = app.add_subcommand("fit", "Complete a matrix from an observation file");
  std::string fit_obs, fit_out, fit_trace;
  SolverFlags fit_flags;
  fitc->add_option("--obs", fit_obs, "observation file")->required();
  fitc->add_option("--alpha", fit_flags.alpha, "l-infinity bound")->required();
  fitc->add_option("--radius", fit_flags.radius, "max-norm bound R")->required();
  fitc->add_option("--out", fit_out, "completed matrix output")->required();
  fitc->add_option("--trace-out", fit_trace, "objective trace output (one value per line)");
  fit_flags.add(fitc);

  // rank-estimate ----------------------------------------------------------
  auto* rank = app.add_subcommand("rank-estimate", "Spectral rank search over r = 2..r_max");
  std::string rank_obs, rank_out, rank_mode = "rank";
  std::optional<double> rank_alpha0, rank_delta;
  int rank_rmax = 6, rank_steps = 5;
  SolverFlags rank_flags;
  rank->add_option("--obs", rank_obs, "observation file")->required();
  rank->add_option("--alpha0", rank_alpha0, "l-infinity bound (default max |observed|)");
  rank->add_option("--r-max", rank_rmax, "largest candidate rank");
  rank->add_option("--mode", rank_mode, "rank | radius");
  rank->add_option("--delta", rank_delta, "radius step for --mode radius");
  rank->add_option("--steps", rank_steps, "radius candidates for --mode radius");
  rank->add_option("--out", rank_out, "report output")->required();
  rank_flags.add(rank);

  // experiment -------------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "Run a seeded scaling experiment from a config");
  std::string exp_config;
  exp->add_option("--config", exp_config, "config file")->required()->check(CLI::ExistingFile);

  // theory -----------------------------------------------------------------
  auto* theory = app.add_subcommand("theory", "Packing sets, Rademacher bound, rate calculators");
  theory->require_subcommand(1);
  std::string theory_out;

  auto* packing = theory->add_subcommand("packing", "Generate and verify a packing set");
  long long pk_d1 = 0, pk_d2 = 0;
  double pk_alpha = 1.0, pk_gamma = 1.0, pk_r = 1.0;
  std::size_t pk_count = 100;
  std::uint64_t pk_seed = 0;
  packing->add_option("--d1", pk_d1)->required();
  packing->add_option("--d2", pk_d2)->required();
  packing->add_option("--alpha", pk_alpha);
  packing->add_option("--gamma", pk_gamma);
  packing->add_option("--r", pk_r, "(R/alpha)^2");
  packing->add_option("--count", pk_count, "cap on the number of matrices");
  packing->add_option("--seed", pk_seed);
  packing->add_option("--out", theory_out, "report file (default stdout)");

  auto* rad = theory->add_subcommand("rademacher", "Empirical Rademacher complexity of sign matrices");
  long long rd_d1 = 0, rd_d2 = 0;
  std::size_t rd_n = 0, rd_draws = 2000;
  std::uint64_t rd_seed = 0;
  std::string rd_obs;
  rad->add_option("--d1", rd_d1);
  rad->add_option("--d2", rd_d2);
  rad->add_option("--n", rd_n, "uniform index sample size");
  rad->add_option("--obs", rd_obs, "take the index sample from an observation file");
  rad->add_option("--draws", rd_draws, "sign draws");
  rad->add_option("--seed", rd_seed);
  rad->add_option("--out", theory_out, "report file (default stdout)");

  auto* rates = theory->add_subcommand("rates", "Upper and lower rate formulas");
  RateParams rp;
  rates->add_option("--alpha", rp.alpha)->required();
  rates->add_option("--sigma", rp.sigma)->required();
  rates->add_option("--radius", rp.radius)->required();
  rates->add_option("--d1", rp.d1)->required();
  rates->add_option("--d2", rp.d2)->required();
  rates->add_option("--n", rp.n)->required();
  rates->add_option("--mu", rp.mu);
  rates->add_option("--L", rp.big_l);
  rates->add_option("--out", theory_out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*sim) {
      const auto gt = make_ground_truth(sim_d1, sim_d2, sim_rank, sim_alpha, sim_truth_seed);
      const auto pi = sim_dist.empty() ? SamplingDistribution::uniform(sim_d1, sim_d2)
                                       : load_distribution(sim_dist);
      if (pi.d1() != sim_d1 || pi.d2() != sim_d2) {
        throw InvalidInput("distribution dimensions do not match --d1/--d2");
      }
      const auto idx = sample_indices(pi, sim_n, sim_seed);
      const auto obs = observe(gt.matrix, idx, {parse_noise_kind(sim_noise), sim_sigma}, sim_seed);
      save_dense(sim_truth_out, gt.matrix);
      save_observations(sim_obs_out, obs);
      write_key_values(std::cout, {{"n", std::to_string(obs.size())},
                                   {"mu", text::format_double(pi.mu())},
                                   {"L", text::format_double(pi.big_l())},
                                   {"witness_radius", text::format_double(gt.witness_radius)},
                                   {"in_witness_set", gt.in_witness_set ? "true" : "false"}});
    } else if (*fitc) {
      const auto obs = load_observations(fit_obs);
      const auto res = fit(obs, ConstraintSet(*fit_flags.alpha, *fit_flags.radius), fit_flags.config());
      save_dense(fit_out, res.completed);
      if (!fit_trace.empty()) {
        std::ofstream t(fit_trace);
        if (!t) throw InvalidInput("cannot open for writing: " + fit_trace);
        for (double v : res.objective_trace) t << text::format_double(v) << '\n';
      }
      write_key_values(std::cout, {{"iterations", std::to_string(res.iterations_run)},
                                   {"final_loss", text::format_double(res.objective_trace.back())},
                                   {"feasible_rows", res.feasible_rows ? "true" : "false"},
                                   {"feasible_linf", res.feasible_linf ? "true" : "false"}});
    } else if (*rank) {
      const auto obs = load_observations(rank_obs);
      RankSearchConfig cfg;
      cfg.alpha0 = rank_alpha0;
      cfg.r_max = rank_rmax;
      cfg.solver = rank_flags.config();
      if (rank_mode == "rank") cfg.mode = SearchMode::kRank;
      else if (rank_mode == "radius") cfg.mode = SearchMode::kRadius;
      else throw InvalidInput("--mode must be rank or radius");
      cfg.radius_delta = rank_delta;
      cfg.radius_steps = rank_steps;
      const auto est = estimate_rank(obs, cfg);
      save_rank_report(rank_out, est);
      write_key_values(std::cout, {{"r_star", std::to_string(est.r_star)},
                                   {"radius_star", text::format_double(est.radius_star)},
                                   {"alpha0", text::format_double(est.alpha0)}});
    } else if (*exp) {
      const auto cfg = load_experiment_config(exp_config);
      const auto records = run_experiment_to_file(cfg);
      KeyValues kv{{"trials", std::to_string(records.size())}, {"output", cfg.output_path}};
      if (cfg.n_grid.size() >= 3) {
        const auto sf = fit_scaling_slope(records);
        kv.emplace_back("slope", text::format_double(sf.slope));
        kv.emplace_back("intercept", text::format_double(sf.intercept));
        kv.emplace_back("r2", text::format_double(sf.r2));
      }
      write_key_values(std::cout, kv);
    } else if (*packing) {
      PackingConfig pc{pk_d1, pk_d2, pk_alpha, pk_gamma, pk_r, pk_count};
      const auto set = packing_generate(pc, pk_seed);
      auto kv = packing_verify(set, pk_alpha, pk_gamma, pc.block_rows()).to_key_values();
      kv.insert(kv.begin(), {"block_rows", std::to_string(pc.block_rows())});
      emit(kv, theory_out);
    } else if (*rad) {
      std::vector<Cell> idx;
      if (!rd_obs.empty()) {
        const auto obs = load_observations(rd_obs);
        rd_d1 = obs.d1;
        rd_d2 = obs.d2;
        idx = obs.indices;
      } else {
        if (rd_d1 <= 0 || rd_d2 <= 0 || rd_n == 0) {
          throw InvalidInput("give --obs, or all of --d1 --d2 --n");
        }
        idx = sample_indices(SamplingDistribution::uniform(rd_d1, rd_d2), rd_n, rd_seed);
      }
      emit(rademacher_sign_sup(rd_d1, rd_d2, idx, rd_draws, rd_seed).to_key_values(), theory_out);
    } else if (*rates) {
      emit(rate_bounds(rp).to_key_values(), theory_out);
    }
  } catch (const Divergence& e) {
    std::cerr << "error: solver diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}
