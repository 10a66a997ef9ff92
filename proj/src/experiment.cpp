#include "maxnorm/experiment.hpp"

#include "maxnorm/errors.hpp"
#include "maxnorm/random.hpp"
#include "maxnorm/text_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <thread>

namespace maxnorm {

GroundTruth make_ground_truth(Eigen::Index d1, Eigen::Index d2, Eigen::Index rank, double alpha,
                              std::uint64_t seed) {
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("ground truth dimensions must be positive");
  if (rank < 1 || rank > std::min(d1, d2)) throw InvalidInput("rank must be in [1, min(d1, d2)]");
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  Rng rng(seed, kTruthStream);
  Eigen::MatrixXd a(d1, rank), b(d2, rank);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < d2; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::MatrixXd m = a * b.transpose();
  const double peak = m.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw InvalidInput("degenerate ground truth (all zeros)");
  m *= alpha / peak;
  // Pin the largest entry to alpha exactly despite rounding in the rescale.
  Eigen::Index pi = 0, pj = 0;
  m.cwiseAbs().maxCoeff(&pi, &pj);
  m(pi, pj) = std::copysign(alpha, m(pi, pj));
  m = m.cwiseMax(-alpha).cwiseMin(alpha);

  DenseMatrix mat(std::move(m));
  const auto norms = matrix_norms(mat);
  GroundTruth gt{std::move(mat), alpha, alpha * std::sqrt(double(rank)), norms.rank_numeric, false};
  gt.in_witness_set = norms.linf <= alpha && norms.rank_numeric <= std::size_t(rank);
  return gt;
}

double ExperimentConfig::effective_radius() const {
  return radius_rule == RadiusRule::kAlphaSqrtRank ? alpha * std::sqrt(double(rank)) : radius;
}

void ExperimentConfig::validate() const {
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("experiment: d1 and d2 must be positive");
  if (rank < 1 || rank > std::min(d1, d2)) throw InvalidInput("experiment: bad rank");
  if (n_grid.empty()) throw InvalidInput("experiment: n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw InvalidInput("experiment: n values must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw InvalidInput("experiment: n grid must be strictly increasing");
    }
  }
  if (replicates < 1) throw InvalidInput("experiment: replicates must be at least 1");
  if (threads < 0) throw InvalidInput("experiment: threads must be nonnegative");
  ConstraintSet(alpha, effective_radius());
  solver.validate(d1, d2);
}

namespace {

Eigen::VectorXd parse_weights(const Config& c, const std::string& key, Eigen::Index len) {
  const std::string raw = c.get_string(key);
  if (raw == "linear") {
    // 1 + index / len
    Eigen::VectorXd w(len);
    for (Eigen::Index i = 0; i < len; ++i) w(i) = 1.0 + double(i) / double(len);
    return w;
  }
  const auto v = c.get_double_list(key);
  if (static_cast<Eigen::Index>(v.size()) != len) {
    throw InvalidInput("config key '" + key + "': expected " + std::to_string(len) + " weights");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), len);
}

}  // namespace

ExperimentConfig experiment_config_from(const Config& c) {
  ExperimentConfig e;
  e.d1 = c.get_int("truth.d1");
  e.d2 = c.get_int("truth.d2");
  e.rank = c.get_int("truth.rank");
  e.truth_alpha = c.get_double("truth.alpha", 1.0);
  e.truth_seed = static_cast<std::uint64_t>(c.get_int("truth.seed", 0));

  const std::string kind = c.get_string("sampling.kind", std::string("uniform"));
  if (kind == "uniform") {
    e.sampling.kind = DistributionKind::kUniform;
  } else if (kind == "product") {
    e.sampling.kind = DistributionKind::kProduct;
    e.sampling.row_weights = parse_weights(c, "sampling.row_weights", e.d1);
    e.sampling.col_weights = parse_weights(c, "sampling.col_weights", e.d2);
  } else if (kind == "file") {
    const auto pi = load_distribution(c.get_string("sampling.file"));
    e.sampling.kind = DistributionKind::kExplicit;
    e.sampling.weights = pi.probs();
  } else {
    throw InvalidInput("config: sampling.kind must be uniform, product or file");
  }

  e.noise.kind = parse_noise_kind(c.get_string("noise.kind", std::string("gaussian")));
  e.noise.sigma = c.get_double("noise.sigma", 0.0);

  for (long long n : c.get_int_list("experiment.n_grid")) {
    if (n < 1) throw InvalidInput("experiment.n_grid: values must be positive");
    e.n_grid.push_back(static_cast<std::size_t>(n));
  }
  e.replicates = static_cast<int>(c.get_int("experiment.replicates", 1));
  e.seed = static_cast<std::uint64_t>(c.get_int("experiment.seed", 0));
  e.threads = static_cast<int>(c.get_int("experiment.threads", 0));

  e.alpha = c.get_double("constraints.alpha", e.truth_alpha);
  const std::string rule = c.get_string("constraints.radius_rule", std::string("alpha_sqrt_rank"));
  if (rule == "alpha_sqrt_rank") {
    e.radius_rule = RadiusRule::kAlphaSqrtRank;
  } else if (rule == "fixed") {
    e.radius_rule = RadiusRule::kFixed;
    e.radius = c.get_double("constraints.radius");
  } else {
    throw InvalidInput("config: constraints.radius_rule must be alpha_sqrt_rank or fixed");
  }

  e.solver.algorithm = parse_algorithm(c.get_string("solver.algorithm", std::string("pgd")));
  e.solver.k = c.get_int("solver.k", 0);
  e.solver.tau = c.get_double("solver.tau", e.solver.tau);
  e.solver.max_iters = c.get_int("solver.max_iters", e.solver.max_iters);
  e.solver.tol = c.get_double("solver.tol", e.solver.tol);
  e.solver.epochs = c.get_int("solver.epochs", e.solver.epochs);

  e.output_path = c.get_string("output.path", std::string(""));
  e.record_runtime = c.get_bool("output.record_runtime", false);

  c.check_all_used();
  e.validate();
  return e;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from(Config::load(path));
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, int replicate) {
  return derive_seed(derive_seed(base, static_cast<std::uint64_t>(n)),
                     static_cast<std::uint64_t>(replicate));
}

void write_trial_row(std::ostream& out, const TrialRecord& r) {
  auto num = [](double x) { return std::isfinite(x) ? text::format_double(x) : std::string("nan"); };
  out << r.n << ',' << r.replicate << ',' << r.seed << ',' << num(r.per_entry_mse) << ','
      << num(r.pi_weighted_mse) << ',' << num(r.runtime_ms) << ',' << r.iterations << ','
      << (r.feasible_rows ? 1 : 0) << ',' << (r.feasible_linf ? 1 : 0) << ',' << r.status << '\n';
}

namespace {

TrialRecord run_trial(const ExperimentConfig& cfg, const DenseMatrix& truth,
                      const SamplingDistribution& pi, std::size_t n, int replicate) {
  TrialRecord rec;
  rec.n = n;
  rec.replicate = replicate;
  rec.seed = trial_seed(cfg.seed, n, replicate);

  const auto start = std::chrono::steady_clock::now();
  const auto indices = sample_indices(pi, n, rec.seed);
  const auto obs = observe(truth, indices, cfg.noise, rec.seed);
  SolverConfig sc = cfg.solver;
  sc.seed = rec.seed;
  try {
    const auto res = fit(obs, ConstraintSet(cfg.alpha, cfg.effective_radius()), sc);
    const Eigen::MatrixXd diff = res.completed.values() - truth.values();
    rec.per_entry_mse = diff.squaredNorm() / double(diff.size());
    rec.pi_weighted_mse = (pi.probs().array() * diff.array().square()).sum();
    rec.iterations = res.iterations_run;
    rec.feasible_rows = res.feasible_rows;
    rec.feasible_linf = res.feasible_linf;
  } catch (const Divergence& e) {
    rec.per_entry_mse = std::nan("");
    rec.pi_weighted_mse = std::nan("");
    rec.iterations = e.iteration();
    rec.status = "diverged";
  }
  if (cfg.record_runtime) {
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, std::ostream* csv) {
  cfg.validate();
  const auto gt = make_ground_truth(cfg.d1, cfg.d2, cfg.rank, cfg.truth_alpha, cfg.truth_seed);
  const auto pi = make_distribution(cfg.sampling, cfg.d1, cfg.d2);

  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t n : cfg.n_grid)
    for (int rep = 0; rep < cfg.replicates; ++rep) jobs.emplace_back(n, rep);

  const std::size_t width =
      cfg.threads > 0 ? std::size_t(cfg.threads)
                      : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (csv) *csv << kTrialCsvHeader << '\n';

  std::vector<TrialRecord> records;
  records.reserve(jobs.size());
  // Batches of `width` concurrent trials, flushed in canonical order.
  for (std::size_t begin = 0; begin < jobs.size(); begin += width) {
    const std::size_t end = std::min(jobs.size(), begin + width);
    std::vector<std::future<TrialRecord>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, run_trial, std::cref(cfg),
                                 std::cref(gt.matrix), std::cref(pi), jobs[i].first,
                                 jobs[i].second));
    }
    for (auto& f : batch) {
      records.push_back(f.get());
      if (csv) {
        write_trial_row(*csv, records.back());
        csv->flush();
      }
    }
  }
  return records;
}

std::vector<TrialRecord> run_experiment_to_file(const ExperimentConfig& cfg) {
  if (cfg.output_path.empty()) throw InvalidInput("experiment: output.path is not set");
  std::ofstream out(cfg.output_path);
  if (!out) throw InvalidInput("cannot open for writing: " + cfg.output_path);
  return run_experiment(cfg, &out);
}

ScalingFit fit_scaling_slope(const std::vector<TrialRecord>& records) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : records) {
    if (r.status == "ok" && std::isfinite(r.per_entry_mse)) by_n[r.n].push_back(r.per_entry_mse);
  }
  if (by_n.size() < 3) throw InvalidInput("scaling fit needs at least 3 distinct n values");

  ScalingFit fit;
  std::vector<double> xs, ys;
  for (auto& [n, v] : by_n) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    const double median = m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    if (!(median > 0.0)) throw InvalidInput("scaling fit: median MSE must be positive");
    fit.medians.emplace_back(n, median);
    xs.push_back(std::log(double(n)));
    ys.push_back(std::log(median));
  }
  const double k = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / k;
    my += ys[i] / k;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace maxnorm
