#pragma once

#include "maxnorm/core.hpp"
#include "maxnorm/sampling.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace maxnorm {

/// Ordered key=value report lines.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_key_values(std::ostream& out, const KeyValues& kv);

// ---------------------------------------------------------------------------
// Packing sets for K(alpha, R)

struct PackingConfig {
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;
  double alpha = 1.0;
  double gamma = 1.0;
  double r = 1.0;  // (R/alpha)^2
  std::size_t count_cap = 100;

  // Block height B = r / gamma^2; throws unless it is an integer in [1, min(d1, d2)].
  Eigen::Index block_rows() const;
  void validate() const;
};

/// min(count_cap, ceil(exp(r * max(d1,d2) / (16 gamma^2)))).
std::size_t packing_count(const PackingConfig& cfg);

/// Sign matrices with entries +-alpha*gamma: the first B rows are i.i.d.
/// symmetric signs and row k repeats row k mod B. Built with d1 <= d2 and
/// transposed back when d1 > d2.
std::vector<DenseMatrix> packing_generate(const PackingConfig& cfg, std::uint64_t seed);

struct PackingReport {
  std::size_t count = 0;
  bool property_i = true;   // every matrix: entries +-gamma*alpha (and rank <= B when given)
  std::vector<bool> property_i_each;
  bool property_ii = true;  // every pair: ||M^k - M^l||_F^2 / (d1 d2) > gamma^2 alpha^2 / 2
  double min_pair_distance = 0.0;  // normalized squared distance; +inf with < 2 matrices
  double threshold = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> offending_pair;

  KeyValues to_key_values() const;
};

PackingReport packing_verify(const std::vector<DenseMatrix>& set, double alpha, double gamma,
                             std::optional<Eigen::Index> rank_bound = std::nullopt);

// ---------------------------------------------------------------------------
// Empirical Rademacher complexity of rank-one sign matrices

inline constexpr int kMaxEnumerationDim = 24;

struct RademacherReport {
  double mc_mean = 0.0;   // (2/|S|) E sup_{M in M+-} |sum_t eps_t M(i_t, j_t)|
  double bound = 0.0;     // 12 sqrt((d1 + d2) / |S|)
  double kg_upper = 0.0;  // kGrothendieckUpper * mc_mean
  std::size_t draws = 0;

  KeyValues to_key_values() const;
};

/// Exact supremum over all 2^(d1+d2-1) rank-one sign matrices for each sign
/// draw, averaged over `epsilon_draws` draws. Requires d1 + d2 <= 24.
RademacherReport rademacher_sign_sup(Eigen::Index d1, Eigen::Index d2,
                                     const std::vector<Cell>& indices, std::size_t epsilon_draws,
                                     std::uint64_t seed);

/// Supremum for one fixed sign vector.
double sign_matrix_sup(Eigen::Index d1, Eigen::Index d2, const std::vector<Cell>& indices,
                       const std::vector<int>& eps);

// ---------------------------------------------------------------------------
// Rate calculators (absolute constants omitted)

struct RateParams {
  double alpha = 1.0;
  double sigma = 1.0;
  double radius = 1.0;
  double d1 = 1.0;
  double d2 = 1.0;
  double n = 1.0;
  double mu = 1.0;
  double big_l = 1.0;

  void validate() const;
};

struct RateReport {
  double upper_rate = 0.0;          // mu (alpha v sigma) R sqrt(d/n)
  double lower_rate_general = 0.0;  // min(alpha^2/16, sigma R/256 sqrt(d/(nL)))
  double lower_rate_large_n = 0.0;  // (alpha ^ sigma) R/256 sqrt(d/(nL))
  bool quater_ok = false;           // 48 alpha^2/(d1 v d2) <= R^2 <= sigma^2 (d1 ^ d2) d1 d2/(128 L n)
  bool sample_condition_ok = false; // n >= (R/alpha)^2 d / L

  KeyValues to_key_values() const;
};

RateReport rate_bounds(const RateParams& p);

}  // namespace maxnorm
