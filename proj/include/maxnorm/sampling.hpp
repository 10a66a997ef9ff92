#pragma once

#include "maxnorm/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace maxnorm {

enum class DistributionKind { kUniform, kProduct, kExplicit };

/// Sampling probabilities pi_kl on [d1] x [d2], normalized to sum to one.
class SamplingDistribution {
 public:
  static SamplingDistribution uniform(Eigen::Index d1, Eigen::Index d2);
  // Marginal weights are normalized separately; pi_kl = row_k * col_l.
  static SamplingDistribution product(const Eigen::VectorXd& row_weights,
                                      const Eigen::VectorXd& col_weights,
                                      bool require_positive = true);
  static SamplingDistribution explicit_weights(const Eigen::MatrixXd& weights,
                                               bool require_positive = true);
  static SamplingDistribution point_mass(Eigen::Index d1, Eigen::Index d2, Eigen::Index row,
                                         Eigen::Index col);

  DistributionKind kind() const { return kind_; }
  Eigen::Index d1() const { return probs_.rows(); }
  Eigen::Index d2() const { return probs_.cols(); }
  const Eigen::MatrixXd& probs() const { return probs_; }
  double prob(Eigen::Index k, Eigen::Index l) const { return probs_(k, l); }
  // Only meaningful for kProduct.
  const Eigen::VectorXd& row_marginals() const { return row_; }
  const Eigen::VectorXd& col_marginals() const { return col_; }

  // mu = 1 / (d1 d2 min pi); +inf when some cell has zero probability.
  double mu() const;
  // L = d1 d2 max pi.
  double big_l() const;

 private:
  SamplingDistribution(DistributionKind kind, Eigen::MatrixXd probs);

  DistributionKind kind_;
  Eigen::MatrixXd probs_;
  Eigen::VectorXd row_;
  Eigen::VectorXd col_;
};

/// Parameters for make_distribution. Weights need not be normalized.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::kUniform;
  Eigen::VectorXd row_weights;
  Eigen::VectorXd col_weights;
  Eigen::MatrixXd weights;
  bool require_positive = true;
};

SamplingDistribution make_distribution(const DistributionSpec& spec, Eigen::Index d1,
                                       Eigen::Index d2);

struct Cell {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// n i.i.d. draws (with replacement) from pi; deterministic given the seed.
std::vector<Cell> sample_indices(const SamplingDistribution& pi, std::size_t n,
                                 std::uint64_t seed);

enum class NoiseKind { kNone, kGaussian, kLaplace };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double sigma = 0.0;
};

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

/// Sampled cells and their noisy values Y_t = M0(i_t, j_t) + sigma * xi_t.
struct ObservationSet {
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;
  std::vector<Cell> indices;
  std::vector<double> values;

  std::size_t size() const { return indices.size(); }
  void validate() const;
};

/// Fresh noise per draw; repeated cells get independent noise.
ObservationSet observe(const DenseMatrix& m0, const std::vector<Cell>& indices,
                       const NoiseModel& noise, std::uint64_t seed);

// Observation file: "d1,d2,n" then n lines "i,j,y" (0-based indices).
void write_observations(std::ostream& out, const ObservationSet& obs);
ObservationSet read_observations(std::istream& in);
void save_observations(const std::string& path, const ObservationSet& obs);
ObservationSet load_observations(const std::string& path);

// Distribution file: "d1,d2" then "uniform", or "product" with row and column
// marginal lines, or "explicit" with d1 rows of probabilities.
void write_distribution(std::ostream& out, const SamplingDistribution& pi);
SamplingDistribution read_distribution(std::istream& in, bool require_positive = true);
SamplingDistribution load_distribution(const std::string& path, bool require_positive = true);

}  // namespace maxnorm
