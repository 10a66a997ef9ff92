#pragma once

#include "maxnorm/core.hpp"
#include "maxnorm/sampling.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace maxnorm {

enum class Algorithm { kPgd, kStepwise };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm a);

struct SolverConfig {
  Eigen::Index k = 0;  // factor width; 0 selects default_factor_width()
  double tau = 0.1;
  long max_iters = 5000;
  double tol = 1e-7;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kPgd;
  long epochs = 200;
  int max_halvings = 20;
  // PGD: double tau after each accepted step, capped at max_tau.
  bool grow_step = true;
  double max_tau = 1e6;
  // Stepwise only: check the row constraint after every single update.
  bool audit = false;
  // Replaces the random initialization when set.
  std::optional<Factorization> initial;

  void validate(Eigen::Index d1, Eigen::Index d2) const;
};

/// min(d1, d2, rank_hint + 1) with a hint, else min(d1, d2, 32).
Eigen::Index default_factor_width(Eigen::Index d1, Eigen::Index d2,
                                  std::optional<Eigen::Index> rank_hint = std::nullopt);

struct SolveResult {
  Factorization factorization;
  std::vector<double> objective_trace;  // initial loss, then one entry per iteration/epoch
  long iterations_run = 0;
  bool feasible_rows = false;
  bool feasible_linf = false;
  DenseMatrix completed;
  std::size_t audited_updates = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  Eigen::SparseMatrix<double> grad;  // d1 x d2, nonzero only at observed cells
};

/// loss = (1/n) sum_t (y_t - (U V^T)_{i_t j_t})^2 and its gradient with respect
/// to the product matrix. Repeated cells accumulate with multiplicity.
LossAndGrad empirical_loss_and_grad(const Factorization& f, const ObservationSet& obs);
double empirical_loss(const Factorization& f, const ObservationSet& obs);

/// Rows whose squared l2 norm exceeds `radius` are rescaled onto the sphere of
/// squared norm `radius`; the others are untouched.
Eigen::MatrixXd project_factor_rows(const Eigen::MatrixXd& u, double radius);

/// If ||U V^T||_inf > alpha, both factors are scaled by sqrt(alpha / ||U V^T||_inf).
Factorization linf_rescale(const Factorization& f, double alpha);

/// Feasibility of a factorization for the factored program, to `slack`.
struct Feasibility {
  bool rows = false;
  bool linf = false;
};
Feasibility check_feasibility(const Factorization& f, const ConstraintSet& c,
                              double slack = 1e-9);

/// Random start: N(0, sqrt(R)/k) entries, then rescale and row projection.
Factorization initial_factorization(Eigen::Index d1, Eigen::Index d2, Eigen::Index k,
                                    const ConstraintSet& c, std::uint64_t seed);

SolveResult fit_pgd(const ObservationSet& obs, const ConstraintSet& constraints,
                    const SolverConfig& cfg);
SolveResult fit_stepwise(const ObservationSet& obs, const ConstraintSet& constraints,
                         const SolverConfig& cfg);
// Dispatches on cfg.algorithm.
SolveResult fit(const ObservationSet& obs, const ConstraintSet& constraints,
                const SolverConfig& cfg);

}  // namespace maxnorm
