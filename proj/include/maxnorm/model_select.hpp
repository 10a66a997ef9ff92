#pragma once

#include "maxnorm/core.hpp"
#include "maxnorm/sampling.hpp"
#include "maxnorm/solver.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace maxnorm {

/// Observed cells of a d1 x d2 matrix. Cells observed more than once hold the
/// average of their values.
class PartialMatrix {
 public:
  PartialMatrix(Eigen::MatrixXd values, Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask);
  static PartialMatrix from_observations(const ObservationSet& obs);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  bool observed(Eigen::Index i, Eigen::Index j) const { return mask_(i, j); }
  double value(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  std::size_t observed_count() const { return static_cast<std::size_t>(mask_.count()); }
  // Largest |observed value|; the fallback for an unknown alpha0.
  double max_abs_observed() const;

  // One observation per observed cell, in row-major order.
  ObservationSet to_observations() const;

 private:
  Eigen::MatrixXd values_;  // zero where unobserved
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask_;
};

/// Observed cells copied; missing cells get their column's observed mean, or
/// the global observed mean when the column has no observations.
DenseMatrix column_mean_init(const PartialMatrix& p);

/// |DFT| of every column: unnormalized forward transform of length d1.
DenseMatrix spectral_magnitude(const DenseMatrix& m);

enum class SearchMode { kRank, kRadius };

struct RankSearchConfig {
  std::optional<double> alpha0;  // max |observed| when unset
  int r_max = 6;
  SolverConfig solver;  // template; k is overridden per candidate in rank mode
  SearchMode mode = SearchMode::kRank;
  // Radius mode: R runs over alpha0*sqrt(2) + i*delta for i < radius_steps.
  std::optional<double> radius_delta;  // alpha0*(sqrt(2)-1) when unset
  int radius_steps = 5;
  bool keep_profiles = false;

  void validate(Eigen::Index d1, Eigen::Index d2) const;
};

struct SearchPoint {
  int r = 0;            // candidate rank (rank mode) or step index (radius mode)
  double radius = 0.0;  // R used for the solve
  double error = 0.0;   // ||F - F_r||_F, +inf when the solve diverged
};

struct RankEstimate {
  int r_star = 0;
  double radius_star = 0.0;
  double alpha0 = 0.0;
  std::vector<SearchPoint> errors;
  DenseMatrix chosen;
  DenseMatrix profile_init;
  std::vector<DenseMatrix> profiles;  // filled when keep_profiles is set
};

/// Rank search over r = 2..r_max (or a radius sweep); returns the argmin of
/// e(r), smallest r on ties. Throws Divergence when every candidate diverged.
RankEstimate estimate_rank(const ObservationSet& obs, const RankSearchConfig& cfg);
RankEstimate estimate_rank(const PartialMatrix& p, const RankSearchConfig& cfg);

// Report: one "r,e_r" line per candidate, then r_star, then the completed
// matrix in the dense format.
void write_rank_report(std::ostream& out, const RankEstimate& est);
void save_rank_report(const std::string& path, const RankEstimate& est);

}  // namespace maxnorm
