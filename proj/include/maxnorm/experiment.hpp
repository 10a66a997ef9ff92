#pragma once

#include "maxnorm/config.hpp"
#include "maxnorm/core.hpp"
#include "maxnorm/sampling.hpp"
#include "maxnorm/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace maxnorm {

struct GroundTruth {
  DenseMatrix matrix;
  double alpha = 0.0;
  double witness_radius = 0.0;  // alpha * sqrt(rank)
  std::size_t numeric_rank = 0;
  bool in_witness_set = false;  // ||M0||_inf <= alpha and rank(M0) <= rank
};

/// M0 = A B^T with i.i.d. uniform(-1, 1) factors of width `rank`, rescaled so
/// that ||M0||_inf equals alpha.
GroundTruth make_ground_truth(Eigen::Index d1, Eigen::Index d2, Eigen::Index rank, double alpha,
                              std::uint64_t seed);

enum class RadiusRule { kAlphaSqrtRank, kFixed };

struct ExperimentConfig {
  // ground truth
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;
  Eigen::Index rank = 1;
  double truth_alpha = 1.0;
  std::uint64_t truth_seed = 0;
  // sampling and noise
  DistributionSpec sampling;
  NoiseModel noise;
  // grid
  std::vector<std::size_t> n_grid;
  int replicates = 1;
  std::uint64_t seed = 0;  // base for per-trial seeds
  int threads = 0;         // 0 = hardware concurrency
  // estimator
  double alpha = 1.0;
  RadiusRule radius_rule = RadiusRule::kAlphaSqrtRank;
  double radius = 0.0;  // used with kFixed
  SolverConfig solver;
  // output
  std::string output_path;
  bool record_runtime = false;  // runtime_ms is written as 0 unless set

  double effective_radius() const;
  void validate() const;
};

ExperimentConfig experiment_config_from(const Config& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

struct TrialRecord {
  std::size_t n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double per_entry_mse = 0.0;    // ||M_hat - M0||_F^2 / (d1 d2)
  double pi_weighted_mse = 0.0;  // sum pi_kl (M_hat - M0)_kl^2
  double runtime_ms = 0.0;
  long iterations = 0;
  bool feasible_rows = false;
  bool feasible_linf = false;
  std::string status = "ok";  // ok | diverged
};

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, int replicate);

inline constexpr const char* kTrialCsvHeader =
    "n,replicate,seed,per_entry_mse,pi_weighted_mse,runtime_ms,iterations,feasible_rows,"
    "feasible_linf,status";

void write_trial_row(std::ostream& out, const TrialRecord& rec);

/// One solve per (n, replicate). Rows are streamed to `csv` (when non-null)
/// in canonical order: sorted by n, then replicate. Diverged trials are kept
/// with status "diverged".
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

/// Runs the experiment and writes the CSV to cfg.output_path.
std::vector<TrialRecord> run_experiment_to_file(const ExperimentConfig& cfg);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<std::size_t, double>> medians;  // (n, median per-entry MSE)
};

/// OLS of log(median per-entry MSE) on log(n) over successful trials.
ScalingFit fit_scaling_slope(const std::vector<TrialRecord>& records);

}  // namespace maxnorm
