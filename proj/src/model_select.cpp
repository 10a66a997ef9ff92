#include "maxnorm/model_select.hpp"

#include "maxnorm/errors.hpp"
#include "maxnorm/text_io.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <future>
#include <limits>
#include <mutex>
#include <ostream>

namespace maxnorm {
namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlan {
  fftw_plan plan = nullptr;
  ~FftwPlan() {
    if (plan) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

}  // namespace

PartialMatrix::PartialMatrix(Eigen::MatrixXd values,
                             Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
    throw InvalidInput("partial matrix: mask and values differ in shape");
  }
  if (values_.size() == 0) throw InvalidInput("partial matrix: empty");
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      if (!mask_(i, j)) values_(i, j) = 0.0;
      else if (!std::isfinite(values_(i, j))) throw InvalidInput("partial matrix: non-finite value");
    }
}

PartialMatrix PartialMatrix::from_observations(const ObservationSet& obs) {
  obs.validate();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(obs.d1, obs.d2);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(obs.d1, obs.d2);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    sums(obs.indices[t].row, obs.indices[t].col) += obs.values[t];
    counts(obs.indices[t].row, obs.indices[t].col) += 1;
  }
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask = (counts.array() > 0).matrix();
  Eigen::MatrixXd values =
      (mask.array()).select(sums.array() / counts.cast<double>().array().max(1.0), 0.0);
  return PartialMatrix(std::move(values), std::move(mask));
}

double PartialMatrix::max_abs_observed() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < rows(); ++i)
    for (Eigen::Index j = 0; j < cols(); ++j)
      if (mask_(i, j)) m = std::max(m, std::abs(values_(i, j)));
  return m;
}

ObservationSet PartialMatrix::to_observations() const {
  ObservationSet obs;
  obs.d1 = rows();
  obs.d2 = cols();
  for (Eigen::Index i = 0; i < rows(); ++i)
    for (Eigen::Index j = 0; j < cols(); ++j)
      if (mask_(i, j)) {
        obs.indices.push_back({i, j});
        obs.values.push_back(values_(i, j));
      }
  return obs;
}

DenseMatrix column_mean_init(const PartialMatrix& p) {
  if (p.observed_count() == 0) throw InvalidInput("partial matrix has no observed entries");
  double global_sum = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if (p.observed(i, j)) global_sum += p.value(i, j);
  const double global_mean = global_sum / double(p.observed_count());

  Eigen::MatrixXd out(p.rows(), p.cols());
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      if (p.observed(i, j)) {
        sum += p.value(i, j);
        ++count;
      }
    const double fill = count > 0 ? sum / count : global_mean;
    for (Eigen::Index i = 0; i < p.rows(); ++i) out(i, j) = p.observed(i, j) ? p.value(i, j) : fill;
  }
  return DenseMatrix(std::move(out));
}

DenseMatrix spectral_magnitude(const DenseMatrix& m) {
  const int n = static_cast<int>(m.rows());
  const int howmany = static_cast<int>(m.cols());
  const int bins = n / 2 + 1;
  // Column-major Eigen storage: column j starts at offset j*n.
  Eigen::MatrixXd in = m.values();
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(bins) * howmany);

  FftwPlan p;
  {
    std::lock_guard lock(fftw_planner_mutex());
    // FFTW_ESTIMATE picks the same algorithm every run, keeping output bit-stable.
    p.plan = fftw_plan_many_dft_r2c(1, &n, howmany, in.data(), nullptr, 1, n,
                                    reinterpret_cast<fftw_complex*>(spectrum.data()), nullptr, 1,
                                    bins, FFTW_ESTIMATE);
  }
  if (!p.plan) throw std::runtime_error("FFTW could not create a plan");
  fftw_execute(p.plan);

  Eigen::MatrixXd out(n, howmany);
  for (int j = 0; j < howmany; ++j) {
    const auto* col = spectrum.data() + static_cast<std::size_t>(j) * bins;
    for (int k = 0; k < n; ++k) {
      // Real input: X[k] = conj(X[n-k]).
      out(k, j) = std::abs(k < bins ? col[k] : col[n - k]);
    }
  }
  return DenseMatrix(std::move(out));
}

void RankSearchConfig::validate(Eigen::Index d1, Eigen::Index d2) const {
  if (alpha0 && !(*alpha0 > 0.0)) throw InvalidInput("alpha0 must be positive");
  if (mode == SearchMode::kRank) {
    if (r_max < 2) throw InvalidInput("r_max must be at least 2");
    if (r_max > std::min(d1, d2)) throw InvalidInput("r_max must not exceed min(d1, d2)");
  } else {
    if (radius_steps < 1) throw InvalidInput("radius_steps must be at least 1");
    if (radius_delta && !(*radius_delta > 0.0)) throw InvalidInput("radius delta must be positive");
  }
}

RankEstimate estimate_rank(const PartialMatrix& p, const RankSearchConfig& cfg) {
  return estimate_rank(p.to_observations(), cfg);
}

RankEstimate estimate_rank(const ObservationSet& obs, const RankSearchConfig& cfg) {
  obs.validate();
  cfg.validate(obs.d1, obs.d2);
  const PartialMatrix partial = PartialMatrix::from_observations(obs);
  const double alpha0 = cfg.alpha0 ? *cfg.alpha0 : partial.max_abs_observed();
  if (!(alpha0 > 0.0)) throw InvalidInput("alpha0 is zero (all observed values are zero)");

  const DenseMatrix profile_init = spectral_magnitude(column_mean_init(partial));

  struct Candidate {
    int r;
    double radius;
    Eigen::Index k;
  };
  std::vector<Candidate> candidates;
  if (cfg.mode == SearchMode::kRank) {
    for (int r = 2; r <= cfg.r_max; ++r) {
      const Eigen::Index k = std::min<Eigen::Index>(r + 1, obs.d1 + obs.d2);
      candidates.push_back({r, alpha0 * std::sqrt(double(r)), k});
    }
  } else {
    const double delta = cfg.radius_delta ? *cfg.radius_delta : alpha0 * (std::sqrt(2.0) - 1.0);
    const Eigen::Index k = cfg.solver.k > 0 ? cfg.solver.k : default_factor_width(obs.d1, obs.d2);
    for (int i = 0; i < cfg.radius_steps; ++i) {
      candidates.push_back({i, alpha0 * std::sqrt(2.0) + i * delta, k});
    }
  }

  struct Outcome {
    double error = std::numeric_limits<double>::infinity();
    std::optional<DenseMatrix> completed;
    std::optional<DenseMatrix> profile;
  };
  // Cold start for every candidate; solves are independent.
  std::vector<std::future<Outcome>> jobs;
  jobs.reserve(candidates.size());
  for (const auto& c : candidates) {
    jobs.push_back(std::async(std::launch::async, [&obs, &cfg, &profile_init, c, alpha0] {
      SolverConfig sc = cfg.solver;
      sc.k = c.k;
      sc.initial.reset();
      Outcome out;
      try {
        const SolveResult res = fit(obs, ConstraintSet(alpha0, c.radius), sc);
        DenseMatrix prof = spectral_magnitude(res.completed);
        out.error = (profile_init.values() - prof.values()).norm();
        out.completed = res.completed;
        out.profile = std::move(prof);
      } catch (const Divergence&) {
      }
      return out;
    }));
  }

  std::vector<SearchPoint> points;
  std::vector<Outcome> outcomes;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    outcomes.push_back(jobs[i].get());
    points.push_back({candidates[i].r, candidates[i].radius, outcomes.back().error});
  }

  std::size_t best = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].error)) continue;
    if (best == points.size() || points[i].error < points[best].error) best = i;
  }
  if (best == points.size()) throw Divergence("every candidate solve diverged", 0);

  RankEstimate est{points[best].r, points[best].radius, alpha0, points, *outcomes[best].completed,
                   profile_init, {}};
  if (cfg.keep_profiles) {
    for (auto& o : outcomes) {
      est.profiles.push_back(o.profile ? *o.profile : DenseMatrix(obs.d1, obs.d2));
    }
  }
  return est;
}

void write_rank_report(std::ostream& out, const RankEstimate& est) {
  for (const auto& pt : est.errors) {
    out << pt.r << ',' << (std::isfinite(pt.error) ? text::format_double(pt.error) : "inf") << '\n';
  }
  out << est.r_star << '\n';
  write_dense(out, est.chosen);
}

void save_rank_report(const std::string& path, const RankEstimate& est) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  write_rank_report(out, est);
}

}  // namespace maxnorm
