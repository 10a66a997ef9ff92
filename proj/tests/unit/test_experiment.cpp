#include "maxnorm/config.hpp"
#include "maxnorm/errors.hpp"
#include "maxnorm/experiment.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace maxnorm;
using maxnorm::testing::random_matrix;

namespace {

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.d1 = 20;
  cfg.d2 = 20;
  cfg.rank = 2;
  cfg.truth_seed = 4;
  cfg.noise = {NoiseKind::kGaussian, 0.3};
  cfg.n_grid = {100, 200, 400, 800};
  cfg.replicates = 5;
  cfg.seed = 77;
  cfg.threads = 2;
  return cfg;
}

double median_at(const std::vector<TrialRecord>& recs, std::size_t n) {
  std::vector<double> v;
  for (const auto& r : recs)
    if (r.n == n) v.push_back(r.per_entry_mse);
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

TrialRecord synthetic(std::size_t n, double mse) {
  TrialRecord r;
  r.n = n;
  r.per_entry_mse = mse;
  return r;
}

Config parse_config(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

}  // namespace

TEST_CASE("make_ground_truth") {
  const auto g = make_ground_truth(15, 12, 3, 0.7, 9);
  CHECK(g.matrix.values().cwiseAbs().maxCoeff() == 0.7);
  CHECK(g.numeric_rank == 3);
  CHECK(g.in_witness_set);
  CHECK(g.witness_radius == doctest::Approx(0.7 * std::sqrt(3.0)));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g.matrix.values());
  CHECK(svd.singularValues()(2) > 1e-8 * svd.singularValues()(0));
  CHECK(svd.singularValues()(3) < 1e-10 * svd.singularValues()(0));
  CHECK(make_ground_truth(15, 12, 3, 0.7, 9).matrix == g.matrix);
  CHECK(!(make_ground_truth(15, 12, 3, 0.7, 10).matrix == g.matrix));

  const auto one = make_ground_truth(10, 10, 1, 2.0, 3);
  CHECK(one.numeric_rank == 1);
  CHECK(one.matrix.values().cwiseAbs().maxCoeff() == 2.0);
  CHECK(one.matrix.values().cwiseAbs().minCoeff() > 0.0);

  CHECK_THROWS_AS(make_ground_truth(4, 4, 5, 1.0, 0), InvalidInput);
}

TEST_CASE("experiment validation") {
  auto cfg = small_experiment();
  cfg.n_grid.clear();
  CHECK_THROWS_AS(run_experiment(cfg), InvalidInput);
  cfg.n_grid = {100, 100};
  CHECK_THROWS_AS(run_experiment(cfg), InvalidInput);
  cfg.n_grid = {100};
  cfg.replicates = 0;
  CHECK_THROWS_AS(run_experiment(cfg), InvalidInput);
}

TEST_CASE("noiseless near-complete observation recovers the truth") {
  auto cfg = small_experiment();
  cfg.noise = {NoiseKind::kNone, 0.0};
  cfg.n_grid = {400};
  cfg.replicates = 7;
  // With a wider factorization the interpolating solutions are not unique.
  cfg.solver.k = cfg.rank;
  const auto recs = run_experiment(cfg);
  REQUIRE(recs.size() == 7);
  const double med = median_at(recs, 400);
  MESSAGE("median per-entry mse " << med);
  CHECK(med < 1e-4);
}

TEST_CASE("records: count, order, feasibility, determinism") {
  auto cfg = small_experiment();
  std::ostringstream a, b;
  const auto recs = run_experiment(cfg, &a);
  cfg.threads = 1;
  run_experiment(cfg, &b);
  CHECK(a.str() == b.str());

  REQUIRE(recs.size() == cfg.n_grid.size() * std::size_t(cfg.replicates));
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].n == cfg.n_grid[i / 5]);
    CHECK(recs[i].replicate == int(i % 5));
    CHECK(recs[i].seed == trial_seed(cfg.seed, recs[i].n, recs[i].replicate));
    CHECK(recs[i].status == "ok");
    CHECK(recs[i].feasible_rows);
    CHECK(recs[i].feasible_linf);
    CHECK(recs[i].per_entry_mse >= 0.0);
    // Uniform sampling: the weighted loss is the per-entry loss.
    CHECK(recs[i].pi_weighted_mse == doctest::Approx(recs[i].per_entry_mse).epsilon(1e-12));
    CHECK(recs[i].runtime_ms == 0.0);
  }
  std::istringstream lines(a.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == kTrialCsvHeader);
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == recs.size());
}

TEST_CASE("doubling n does not increase the median error by more than 10%") {
  const auto cfg = small_experiment();
  const auto recs = run_experiment(cfg);
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i) {
    const double prev = median_at(recs, cfg.n_grid[i - 1]);
    const double cur = median_at(recs, cfg.n_grid[i]);
    MESSAGE("n=" << cfg.n_grid[i] << " median " << cur);
    CHECK(cur <= 1.1 * prev);
  }
}

TEST_CASE("weighted loss lies between the mu and L bounds") {
  Rng rng(808);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d1 = Eigen::Index(2 + rng.below(8));
    const auto d2 = Eigen::Index(2 + rng.below(8));
    Eigen::VectorXd row(d1), col(d2);
    for (auto& x : row) x = 0.2 + rng.uniform();
    for (auto& x : col) x = 0.2 + rng.uniform();
    const auto pi = SamplingDistribution::product(row, col);
    const Eigen::MatrixXd e = random_matrix(rng, d1, d2);
    const double frob = e.squaredNorm();
    const double w = pi_weighted_sq_norm(DenseMatrix(e), pi);
    const double cells = double(d1 * d2);
    REQUIRE(w <= pi.big_l() / cells * frob * (1 + 1e-12));
    REQUIRE(w >= frob / (pi.mu() * cells) * (1 - 1e-12));
  }
}

TEST_CASE("fit_scaling_slope on exact laws") {
  std::vector<TrialRecord> sqrt_law, inv_law;
  for (std::size_t n : {100, 400, 1600, 6400}) {
    for (double jitter : {0.9, 1.0, 1.1}) {
      sqrt_law.push_back(synthetic(n, (jitter == 1.0 ? 3.0 : 3.0 * jitter * jitter) / std::sqrt(double(n))));
    }
    inv_law.push_back(synthetic(n, 2.0 / double(n)));
  }
  // The median of each triple is the jitter-free value.
  const auto a = fit_scaling_slope(sqrt_law);
  CHECK(std::abs(a.slope + 0.5) < 1e-9);
  CHECK(a.intercept == doctest::Approx(std::log(3.0)));
  CHECK(a.r2 == doctest::Approx(1.0));
  CHECK(a.medians.size() == 4);
  const auto b = fit_scaling_slope(inv_law);
  CHECK(std::abs(b.slope + 1.0) < 1e-9);

  TrialRecord failed = synthetic(400, std::nan(""));
  failed.status = "diverged";
  inv_law.push_back(failed);
  CHECK(std::abs(fit_scaling_slope(inv_law).slope + 1.0) < 1e-9);

  CHECK_THROWS_AS(fit_scaling_slope({synthetic(10, 1.0), synthetic(20, 0.5)}), InvalidInput);
}

TEST_CASE("trial CSV row format") {
  TrialRecord r;
  r.n = 10;
  r.replicate = 2;
  r.seed = 5;
  r.per_entry_mse = 0.25;
  r.pi_weighted_mse = std::nan("");
  r.iterations = 7;
  r.feasible_rows = true;
  r.status = "diverged";
  std::ostringstream out;
  write_trial_row(out, r);
  CHECK(out.str() == "10,2,5,0.25,nan,0,7,1,0,diverged\n");
}

TEST_CASE("experiment config parsing") {
  const auto cfg = experiment_config_from(parse_config(R"(# scaling study
truth.d1 = 8
truth.d2 = 6
truth.rank = 2
truth.alpha = 0.5
sampling.kind = product
sampling.row_weights = linear
sampling.col_weights = 1, 2, 3, 4, 5, 6
noise.kind = laplace
noise.sigma = 0.1
experiment.n_grid = 10, 20, 40
experiment.replicates = 3
constraints.radius_rule = fixed
constraints.radius = 2.5
solver.algorithm = stepwise
solver.epochs = 40
output.path = out.csv
)"));
  CHECK(cfg.d1 == 8);
  CHECK(cfg.truth_alpha == 0.5);
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.noise.kind == NoiseKind::kLaplace);
  CHECK(cfg.n_grid == std::vector<std::size_t>{10, 20, 40});
  CHECK(cfg.effective_radius() == 2.5);
  CHECK(cfg.solver.algorithm == Algorithm::kStepwise);
  CHECK(cfg.solver.epochs == 40);
  CHECK(cfg.output_path == "out.csv");
  const auto pi = make_distribution(cfg.sampling, cfg.d1, cfg.d2);
  CHECK(pi.col_marginals()(5) == doctest::Approx(6.0 / 21.0));

  const auto dflt = experiment_config_from(
      parse_config("truth.d1 = 9\ntruth.d2 = 9\ntruth.rank = 4\nexperiment.n_grid = 5,6,7\n"));
  CHECK(dflt.effective_radius() == doctest::Approx(2.0));

  const std::string base = "truth.d1 = 4\ntruth.d2 = 4\ntruth.rank = 1\n";
  CHECK_THROWS_AS(experiment_config_from(parse_config(base)), InvalidInput);
  CHECK_THROWS_AS(experiment_config_from(parse_config(base + "experiment.n_grid = 3\nbogus = 1\n")),
                  InvalidInput);
  CHECK_THROWS_AS(experiment_config_from(parse_config(base + "experiment.n_grid = 3,2\n")),
                  InvalidInput);
  CHECK_THROWS_AS(parse_config("a = 1\na = 2\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("just text\n"), InvalidInput);
  CHECK_THROWS_AS(
      experiment_config_from(parse_config(base + "experiment.n_grid = 3\nnoise.kind = cauchy\n")),
      InvalidInput);
  CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.txt"), InvalidInput);
}
