#include "maxnorm/solver.hpp"

#include "maxnorm/errors.hpp"
#include "maxnorm/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace maxnorm {
namespace {

double relative_change(double prev, double cur) {
  return std::abs(cur - prev) / std::max(prev, 1e-12);
}

void check_dims(const ObservationSet& obs, const Factorization& f) {
  if (f.d1() != obs.d1 || f.d2() != obs.d2) {
    throw InvalidInput("factorization dimensions do not match the observations");
  }
}

Factorization starting_point(const ObservationSet& obs, const ConstraintSet& c,
                             const SolverConfig& cfg) {
  if (cfg.initial) {
    check_dims(obs, *cfg.initial);
    return *cfg.initial;
  }
  const Eigen::Index k = cfg.k > 0 ? cfg.k : default_factor_width(obs.d1, obs.d2);
  return initial_factorization(obs.d1, obs.d2, k, c, cfg.seed);
}

SolveResult finish(Factorization f, std::vector<double> trace, long iterations,
                   const ConstraintSet& c, std::size_t audited = 0) {
  const auto feas = check_feasibility(f, c);
  DenseMatrix completed(f.product());
  return SolveResult{std::move(f), std::move(trace), iterations, feas.rows, feas.linf,
                     std::move(completed), audited};
}

// Average of the values observed at each distinct cell, in cell order.
std::vector<std::pair<Cell, double>> distinct_cells(const ObservationSet& obs) {
  std::map<Cell, std::pair<double, int>> acc;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    auto& slot = acc[obs.indices[t]];
    slot.first += obs.values[t];
    slot.second += 1;
  }
  std::vector<std::pair<Cell, double>> out;
  out.reserve(acc.size());
  for (const auto& [cell, sum_count] : acc) {
    out.emplace_back(cell, sum_count.first / sum_count.second);
  }
  return out;
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "pgd") return Algorithm::kPgd;
  if (name == "stepwise") return Algorithm::kStepwise;
  throw InvalidInput("unknown solver '" + name + "' (expected pgd|stepwise)");
}

std::string to_string(Algorithm a) { return a == Algorithm::kPgd ? "pgd" : "stepwise"; }

void SolverConfig::validate(Eigen::Index d1, Eigen::Index d2) const {
  if (k < 0 || k > d1 + d2) throw InvalidInput("factor width k must be in [1, d1 + d2]");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInput("step size tau must be positive");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
  if (max_iters < 1) throw InvalidInput("max_iters must be at least 1");
  if (epochs < 1) throw InvalidInput("epochs must be at least 1");
  if (max_halvings < 0) throw InvalidInput("max_halvings must be nonnegative");
  if (!(max_tau >= tau)) throw InvalidInput("max_tau must be at least tau");
}

Eigen::Index default_factor_width(Eigen::Index d1, Eigen::Index d2,
                                  std::optional<Eigen::Index> rank_hint) {
  const Eigen::Index cap = rank_hint ? *rank_hint + 1 : 32;
  return std::max<Eigen::Index>(1, std::min({d1, d2, cap}));
}

LossAndGrad empirical_loss_and_grad(const Factorization& f, const ObservationSet& obs) {
  check_dims(obs, f);
  const double n = static_cast<double>(obs.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(obs.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    const auto& c = obs.indices[t];
    const double residual = f.entry(c.row, c.col) - obs.values[t];
    sum += residual * residual;
    triplets.emplace_back(c.row, c.col, 2.0 * residual / n);
  }
  LossAndGrad out;
  out.loss = sum / n;
  out.grad.resize(obs.d1, obs.d2);
  out.grad.setFromTriplets(triplets.begin(), triplets.end());  // sums duplicates
  return out;
}

double empirical_loss(const Factorization& f, const ObservationSet& obs) {
  check_dims(obs, f);
  double sum = 0.0;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    const double r = f.entry(obs.indices[t].row, obs.indices[t].col) - obs.values[t];
    sum += r * r;
  }
  return sum / static_cast<double>(obs.size());
}

Eigen::MatrixXd project_factor_rows(const Eigen::MatrixXd& u, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("projection radius must be positive");
  Eigen::MatrixXd out = u;
  const double target = std::sqrt(radius);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double sq = out.row(i).squaredNorm();
    if (sq > radius) out.row(i) *= target / std::sqrt(sq);
  }
  return out;
}

Factorization linf_rescale(const Factorization& f, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  const double peak = f.product().cwiseAbs().maxCoeff();
  // A non-finite peak is left alone so the caller sees the divergence.
  if (!(peak > alpha) || !std::isfinite(peak)) return f;
  const double s = std::sqrt(alpha) / std::sqrt(peak);
  return Factorization(f.u() * s, f.v() * s);
}

Feasibility check_feasibility(const Factorization& f, const ConstraintSet& c, double slack) {
  Feasibility out;
  const double u_sq = f.u().rowwise().squaredNorm().maxCoeff();
  const double v_sq = f.v().rowwise().squaredNorm().maxCoeff();
  out.rows = std::max(u_sq, v_sq) <= c.radius + slack;
  out.linf = f.product().cwiseAbs().maxCoeff() <= c.alpha + slack;
  return out;
}

Factorization initial_factorization(Eigen::Index d1, Eigen::Index d2, Eigen::Index k,
                                    const ConstraintSet& c, std::uint64_t seed) {
  if (k < 1 || k > d1 + d2) throw InvalidInput("factor width k must be in [1, d1 + d2]");
  Rng rng(seed, kInitStream);
  const double sd = std::sqrt(std::sqrt(c.radius) / double(k));
  Eigen::MatrixXd u(d1, k), v(d2, k);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < k; ++j) u(i, j) = sd * rng.normal();
  for (Eigen::Index i = 0; i < d2; ++i)
    for (Eigen::Index j = 0; j < k; ++j) v(i, j) = sd * rng.normal();
  const auto scaled = linf_rescale(Factorization(std::move(u), std::move(v)), c.alpha);
  return Factorization(project_factor_rows(scaled.u(), c.radius),
                       project_factor_rows(scaled.v(), c.radius));
}

SolveResult fit_pgd(const ObservationSet& obs, const ConstraintSet& constraints,
                    const SolverConfig& cfg) {
  obs.validate();
  cfg.validate(obs.d1, obs.d2);
  Factorization current = starting_point(obs, constraints, cfg);
  double loss = empirical_loss(current, obs);
  if (!std::isfinite(loss)) throw Divergence("objective is not finite", 0);

  std::vector<double> trace{loss};
  long iter = 0;
  double step = cfg.tau;
  while (iter < cfg.max_iters) {
    ++iter;
    const LossAndGrad lg = empirical_loss_and_grad(current, obs);
    const Eigen::MatrixXd grad_u = lg.grad * current.v();
    const Eigen::MatrixXd grad_v = lg.grad.transpose() * current.u();

    // With max_halvings == 0 every step is taken as is (plain projected
    // gradient); otherwise tau is halved until the objective does not increase.
    // With grow_step the next iteration starts from twice the accepted tau.
    const bool backtrack = cfg.max_halvings > 0;
    double tau = step;
    std::optional<Factorization> accepted;
    double accepted_loss = loss;
    bool any_finite = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving, tau *= 0.5) {
      Eigen::MatrixXd u = current.u() - tau * grad_u;
      Eigen::MatrixXd v = current.v() - tau * grad_v;
      if (!u.allFinite() || !v.allFinite()) continue;
      const auto scaled = linf_rescale(Factorization(std::move(u), std::move(v)),
                                       constraints.alpha);
      Factorization candidate(project_factor_rows(scaled.u(), constraints.radius),
                              project_factor_rows(scaled.v(), constraints.radius));
      const double cand_loss = empirical_loss(candidate, obs);
      if (!std::isfinite(cand_loss)) continue;
      any_finite = true;
      if (!backtrack || cand_loss <= loss) {
        accepted = std::move(candidate);
        accepted_loss = cand_loss;
        break;
      }
    }
    if (!any_finite) throw Divergence("objective is not finite", iter);
    if (!accepted) {
      // No descent step at the smallest step size: stationary to working precision.
      trace.push_back(loss);
      break;
    }
    if (cfg.grow_step) step = std::min(2.0 * tau, cfg.max_tau);
    const double prev = loss;
    current = std::move(*accepted);
    loss = accepted_loss;
    trace.push_back(loss);
    if (relative_change(prev, loss) < cfg.tol) break;
  }
  return finish(std::move(current), std::move(trace), iter, constraints);
}

SolveResult fit_stepwise(const ObservationSet& obs, const ConstraintSet& constraints,
                         const SolverConfig& cfg) {
  obs.validate();
  cfg.validate(obs.d1, obs.d2);
  const Factorization start = starting_point(obs, constraints, cfg);
  Eigen::MatrixXd u = start.u();
  Eigen::MatrixXd v = start.v();
  const double alpha = constraints.alpha;
  const double radius = constraints.radius;
  const double target = std::sqrt(radius);

  const auto cells = distinct_cells(obs);
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(cfg.seed, kShuffleStream);

  double loss = empirical_loss(start, obs);
  if (!std::isfinite(loss)) throw Divergence("objective is not finite", 0);
  std::vector<double> trace{loss};
  std::size_t audited = 0;
  long epoch = 0;

  while (epoch < cfg.epochs) {
    ++epoch;
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (std::size_t idx : order) {
      const auto& [cell, y] = cells[idx];
      auto ui = u.row(cell.row);
      auto vj = v.row(cell.col);
      const double residual = ui.dot(vj) - y;
      const Eigen::RowVectorXd ui_old = ui;
      ui -= (cfg.tau * 2.0 * residual) * vj;
      vj -= (cfg.tau * 2.0 * residual) * ui_old;

      const double p = std::abs(ui.dot(vj));
      if (!std::isfinite(p)) throw Divergence("objective is not finite", epoch);
      if (p > alpha) {
        const double s = std::sqrt(alpha) / std::sqrt(p);
        ui *= s;
        vj *= s;
      }
      if (const double sq = ui.squaredNorm(); sq > radius) ui *= target / std::sqrt(sq);
      if (const double sq = vj.squaredNorm(); sq > radius) vj *= target / std::sqrt(sq);

      if (cfg.audit) {
        if (ui.squaredNorm() > radius + 1e-9 || vj.squaredNorm() > radius + 1e-9) {
          throw std::logic_error("stepwise audit: row outside the radius after an update");
        }
        ++audited;
      }
    }
    Factorization f(u, v);
    const double prev = loss;
    loss = empirical_loss(f, obs);
    if (!std::isfinite(loss)) throw Divergence("objective is not finite", epoch);
    trace.push_back(loss);
    if (relative_change(prev, loss) < cfg.tol) break;
  }
  // The per-cell rescale only bounds the entries it touches; one global rescale
  // makes the returned iterate feasible for the entrywise bound as well.
  Factorization f(std::move(u), std::move(v));
  if (f.product().cwiseAbs().maxCoeff() > alpha) {
    f = linf_rescale(f, alpha);
    trace.back() = empirical_loss(f, obs);
  }
  return finish(std::move(f), std::move(trace), epoch, constraints, audited);
}

SolveResult fit(const ObservationSet& obs, const ConstraintSet& constraints,
                const SolverConfig& cfg) {
  return cfg.algorithm == Algorithm::kPgd ? fit_pgd(obs, constraints, cfg)
                                          : fit_stepwise(obs, constraints, cfg);
}

}  // namespace maxnorm
