#include "maxnorm/theory.hpp"

#include "maxnorm/errors.hpp"
#include "maxnorm/random.hpp"
#include "maxnorm/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace maxnorm {

void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

namespace {

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return text::format_double(x);
}
std::string fmt(bool b) { return b ? "true" : "false"; }
std::string fmt(std::size_t n) { return std::to_string(n); }

}  // namespace

Eigen::Index PackingConfig::block_rows() const {
  if (!(gamma > 0.0) || gamma > 1.0) throw InvalidInput("gamma must lie in (0, 1]");
  if (!(r > 0.0)) throw InvalidInput("r must be positive");
  const double b = r / (gamma * gamma);
  const double rounded = std::round(b);
  if (std::abs(b - rounded) > 1e-9 * std::max(1.0, b) || rounded < 1.0) {
    throw InvalidInput("r / gamma^2 must be a positive integer");
  }
  const auto block = static_cast<Eigen::Index>(rounded);
  if (block > std::min(d1, d2)) throw InvalidInput("r / gamma^2 must not exceed min(d1, d2)");
  return block;
}

void PackingConfig::validate() const {
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("packing dimensions must be positive");
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  if (count_cap < 1) throw InvalidInput("count_cap must be at least 1");
  block_rows();
}

std::size_t packing_count(const PackingConfig& cfg) {
  cfg.validate();
  const double log_n = cfg.r * double(std::max(cfg.d1, cfg.d2)) / (16.0 * cfg.gamma * cfg.gamma);
  if (log_n >= std::log(double(cfg.count_cap))) return cfg.count_cap;
  return std::min(cfg.count_cap, static_cast<std::size_t>(std::ceil(std::exp(log_n))));
}

std::vector<DenseMatrix> packing_generate(const PackingConfig& cfg, std::uint64_t seed) {
  const std::size_t count = packing_count(cfg);
  const Eigen::Index block = cfg.block_rows();
  const bool transpose = cfg.d1 > cfg.d2;
  const Eigen::Index rows = transpose ? cfg.d2 : cfg.d1;
  const Eigen::Index cols = transpose ? cfg.d1 : cfg.d2;
  const double level = cfg.alpha * cfg.gamma;

  Rng rng(seed, "packing");
  std::vector<DenseMatrix> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index k = 0; k < block; ++k)
      for (Eigen::Index l = 0; l < cols; ++l) m(k, l) = level * rng.sign();
    for (Eigen::Index k = block; k < rows; ++k) m.row(k) = m.row(k % block);
    if (transpose) m.transposeInPlace();
    out.emplace_back(std::move(m));
  }
  return out;
}

PackingReport packing_verify(const std::vector<DenseMatrix>& set, double alpha, double gamma,
                             std::optional<Eigen::Index> rank_bound) {
  if (set.empty()) throw InvalidInput("packing set is empty");
  const Eigen::Index d1 = set.front().rows();
  const Eigen::Index d2 = set.front().cols();
  for (const auto& m : set)
    if (m.rows() != d1 || m.cols() != d2) throw InvalidInput("packing matrices differ in shape");

  const double level = alpha * gamma;
  const double cells = double(d1 * d2);
  PackingReport rep;
  rep.count = set.size();
  rep.threshold = level * level / 2.0;
  rep.min_pair_distance = std::numeric_limits<double>::infinity();

  for (const auto& m : set) {
    bool ok = (m.values().array().abs() == level).all();
    ok = ok && std::abs(m.values().squaredNorm() / cells - level * level) <=
                   1e-12 * std::max(1.0, level * level);
    if (ok && rank_bound) ok = matrix_norms(m).rank_numeric <= std::size_t(*rank_bound);
    rep.property_i_each.push_back(ok);
    rep.property_i = rep.property_i && ok;
  }

  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b) {
      const double dist = (set[a].values() - set[b].values()).squaredNorm() / cells;
      if (dist < rep.min_pair_distance) rep.min_pair_distance = dist;
      if (!(dist > rep.threshold) && !rep.offending_pair) {
        rep.property_ii = false;
        rep.offending_pair = std::make_pair(a, b);
      }
    }
  return rep;
}

KeyValues PackingReport::to_key_values() const {
  KeyValues kv{{"count", fmt(count)},
               {"property_i", fmt(property_i)},
               {"property_ii", fmt(property_ii)},
               {"min_pair_distance", fmt(min_pair_distance)},
               {"threshold", fmt(threshold)}};
  if (offending_pair) {
    kv.emplace_back("offending_pair",
                    std::to_string(offending_pair->first) + "," + std::to_string(offending_pair->second));
  }
  return kv;
}

double sign_matrix_sup(Eigen::Index d1, Eigen::Index d2, const std::vector<Cell>& indices,
                       const std::vector<int>& eps) {
  // For fixed u the best v matches the sign of each column sum, giving
  // sum_j |c_j|. Enumerate u over the smaller side with u_0 = +1 (global sign
  // flips leave |.| unchanged), which covers all 2^(d1+d2-1) matrices.
  const bool swap = d1 > d2;
  const Eigen::Index rows = swap ? d2 : d1;
  const Eigen::Index cols = swap ? d1 : d2;
  std::vector<double> col_sums(static_cast<std::size_t>(cols));
  double best = 0.0;
  const std::uint64_t patterns = std::uint64_t{1} << (rows - 1);
  for (std::uint64_t bits = 0; bits < patterns; ++bits) {
    std::fill(col_sums.begin(), col_sums.end(), 0.0);
    for (std::size_t t = 0; t < indices.size(); ++t) {
      const Eigen::Index i = swap ? indices[t].col : indices[t].row;
      const Eigen::Index j = swap ? indices[t].row : indices[t].col;
      // bit (i-1) set means u_i = -1; u_0 is fixed to +1.
      const int u = (i > 0 && ((bits >> (i - 1)) & 1u)) ? -1 : 1;
      col_sums[static_cast<std::size_t>(j)] += eps[t] * u;
    }
    double total = 0.0;
    for (double c : col_sums) total += std::abs(c);
    best = std::max(best, total);
  }
  return best;
}

RademacherReport rademacher_sign_sup(Eigen::Index d1, Eigen::Index d2,
                                     const std::vector<Cell>& indices, std::size_t epsilon_draws,
                                     std::uint64_t seed) {
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("dimensions must be positive");
  if (d1 + d2 > kMaxEnumerationDim) {
    throw InvalidInput("d1 + d2 = " + std::to_string(d1 + d2) +
                       " is too large for exhaustive enumeration (max " +
                       std::to_string(kMaxEnumerationDim) + ")");
  }
  if (indices.empty()) throw InvalidInput("index sample is empty");
  if (epsilon_draws < 1) throw InvalidInput("need at least one epsilon draw");
  for (const auto& c : indices)
    if (c.row < 0 || c.row >= d1 || c.col < 0 || c.col >= d2) {
      throw InvalidInput("index out of range");
    }

  const double n = double(indices.size());
  double total = 0.0;
  std::vector<int> eps(indices.size());
  for (std::size_t draw = 0; draw < epsilon_draws; ++draw) {
    Rng rng(derive_seed(seed, draw));
    for (auto& e : eps) e = rng.sign();
    total += sign_matrix_sup(d1, d2, indices, eps);
  }
  RademacherReport rep;
  rep.draws = epsilon_draws;
  rep.mc_mean = 2.0 / n * total / double(epsilon_draws);
  rep.bound = 12.0 * std::sqrt(double(d1 + d2) / n);
  rep.kg_upper = kGrothendieckUpper * rep.mc_mean;
  return rep;
}

KeyValues RademacherReport::to_key_values() const {
  return {{"draws", fmt(draws)},
          {"mc_mean", fmt(mc_mean)},
          {"bound", fmt(bound)},
          {"kg_upper", fmt(kg_upper)},
          {"within_bound", fmt(mc_mean <= bound)}};
}

void RateParams::validate() const {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  if (!(sigma >= 0.0)) throw InvalidInput("sigma must be nonnegative");
  if (!(radius >= alpha)) throw InvalidInput("R must be at least alpha");
  if (!(d1 >= 1.0) || !(d2 >= 1.0)) throw InvalidInput("d1 and d2 must be at least 1");
  if (!(n >= 1.0)) throw InvalidInput("n must be at least 1");
  if (!(mu >= 1.0)) throw InvalidInput("mu must be at least 1");
  if (!(big_l >= 1.0)) throw InvalidInput("L must be at least 1");
}

RateReport rate_bounds(const RateParams& p) {
  p.validate();
  const double d = p.d1 + p.d2;
  const double root = std::sqrt(d / p.n);
  const double root_l = std::sqrt(d / (p.n * p.big_l));
  RateReport r;
  r.upper_rate = p.mu * std::max(p.alpha, p.sigma) * p.radius * root;
  r.lower_rate_general =
      std::min(p.alpha * p.alpha / 16.0, p.sigma * p.radius / 256.0 * root_l);
  r.lower_rate_large_n = std::min(p.alpha, p.sigma) * p.radius / 256.0 * root_l;
  const double r2 = p.radius * p.radius;
  r.quater_ok = 48.0 * p.alpha * p.alpha / std::max(p.d1, p.d2) <= r2 &&
                r2 <= p.sigma * p.sigma * std::min(p.d1, p.d2) * p.d1 * p.d2 / (128.0 * p.big_l * p.n);
  r.sample_condition_ok = p.n >= (p.radius / p.alpha) * (p.radius / p.alpha) * d / p.big_l;
  return r;
}

KeyValues RateReport::to_key_values() const {
  return {{"upper_rate", fmt(upper_rate)},
          {"lower_rate_general", fmt(lower_rate_general)},
          {"lower_rate_large_n", fmt(lower_rate_large_n)},
          {"quater_ok", fmt(quater_ok)},
          {"sample_condition_ok", fmt(sample_condition_ok)}};
}

}  // namespace maxnorm
