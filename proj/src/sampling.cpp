#include "maxnorm/sampling.hpp"

#include "maxnorm/errors.hpp"
#include "maxnorm/random.hpp"
#include "maxnorm/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace maxnorm {
namespace {

Eigen::VectorXd normalized(const Eigen::VectorXd& w, bool require_positive, const char* what) {
  if (w.size() == 0) throw InvalidInput(std::string(what) + ": no weights given");
  if (!w.allFinite()) throw InvalidInput(std::string(what) + ": non-finite weight");
  if ((w.array() < 0.0).any()) throw InvalidInput(std::string(what) + ": negative weight");
  if (require_positive && (w.array() == 0.0).any()) {
    throw InvalidInput(std::string(what) + ": zero weight while positive probabilities required");
  }
  const double total = w.sum();
  if (!(total > 0.0)) throw InvalidInput(std::string(what) + ": weights sum to zero");
  return w / total;
}

}  // namespace

SamplingDistribution::SamplingDistribution(DistributionKind kind, Eigen::MatrixXd probs)
    : kind_(kind), probs_(std::move(probs)) {}

SamplingDistribution SamplingDistribution::uniform(Eigen::Index d1, Eigen::Index d2) {
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("distribution dimensions must be positive");
  return SamplingDistribution(DistributionKind::kUniform,
                              Eigen::MatrixXd::Constant(d1, d2, 1.0 / double(d1 * d2)));
}

SamplingDistribution SamplingDistribution::product(const Eigen::VectorXd& row_weights,
                                                   const Eigen::VectorXd& col_weights,
                                                   bool require_positive) {
  Eigen::VectorXd row = normalized(row_weights, require_positive, "row marginals");
  Eigen::VectorXd col = normalized(col_weights, require_positive, "column marginals");
  SamplingDistribution d(DistributionKind::kProduct, row * col.transpose());
  d.row_ = std::move(row);
  d.col_ = std::move(col);
  return d;
}

SamplingDistribution SamplingDistribution::explicit_weights(const Eigen::MatrixXd& weights,
                                                            bool require_positive) {
  if (weights.size() == 0) throw InvalidInput("explicit distribution: no weights given");
  const Eigen::VectorXd flat = weights.reshaped();
  const Eigen::VectorXd p = normalized(flat, require_positive, "explicit distribution");
  return SamplingDistribution(DistributionKind::kExplicit,
                              p.reshaped(weights.rows(), weights.cols()));
}

SamplingDistribution SamplingDistribution::point_mass(Eigen::Index d1, Eigen::Index d2,
                                                      Eigen::Index row, Eigen::Index col) {
  if (row < 0 || row >= d1 || col < 0 || col >= d2) throw InvalidInput("point mass out of range");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d1, d2);
  w(row, col) = 1.0;
  return explicit_weights(w, false);
}

double SamplingDistribution::mu() const {
  const double lo = probs_.minCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (double(probs_.size()) * lo);
}

double SamplingDistribution::big_l() const { return double(probs_.size()) * probs_.maxCoeff(); }

SamplingDistribution make_distribution(const DistributionSpec& spec, Eigen::Index d1,
                                       Eigen::Index d2) {
  switch (spec.kind) {
    case DistributionKind::kUniform:
      return SamplingDistribution::uniform(d1, d2);
    case DistributionKind::kProduct:
      if (spec.row_weights.size() != d1 || spec.col_weights.size() != d2) {
        throw InvalidInput("product marginals do not match d1, d2");
      }
      return SamplingDistribution::product(spec.row_weights, spec.col_weights,
                                           spec.require_positive);
    case DistributionKind::kExplicit:
      if (spec.weights.rows() != d1 || spec.weights.cols() != d2) {
        throw InvalidInput("explicit weights do not match d1, d2");
      }
      return SamplingDistribution::explicit_weights(spec.weights, spec.require_positive);
  }
  throw InvalidInput("unknown distribution kind");
}

std::vector<Cell> sample_indices(const SamplingDistribution& pi, std::size_t n,
                                 std::uint64_t seed) {
  if (n == 0) throw InvalidInput("sample size must be at least 1");
  const Eigen::Index d2 = pi.d2();
  // Row-major cumulative distribution over cells.
  std::vector<double> cdf;
  cdf.reserve(static_cast<std::size_t>(pi.probs().size()));
  double acc = 0.0;
  for (Eigen::Index k = 0; k < pi.d1(); ++k)
    for (Eigen::Index l = 0; l < d2; ++l) cdf.push_back(acc += pi.prob(k, l));

  Rng rng(seed, kSamplingStream);
  std::vector<Cell> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // Skip zero-probability cells that share a cumulative value.
    while (it != cdf.begin() && *(it - 1) == *it) --it;
    const auto idx = static_cast<Eigen::Index>(it - cdf.begin());
    out.push_back({idx / d2, idx % d2});
  }
  return out;
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "laplace") return NoiseKind::kLaplace;
  throw InvalidInput("unknown noise kind '" + name + "' (expected none|gaussian|laplace)");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kLaplace: return "laplace";
  }
  return "none";
}

void ObservationSet::validate() const {
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("observation set: dimensions must be positive");
  if (indices.size() != values.size()) {
    throw InvalidInput("observation set: indices and values differ in length");
  }
  if (indices.empty()) throw InvalidInput("observation set is empty");
  for (const auto& c : indices) {
    if (c.row < 0 || c.row >= d1 || c.col < 0 || c.col >= d2) {
      throw InvalidInput("observation index out of range: (" + std::to_string(c.row) + "," +
                         std::to_string(c.col) + ")");
    }
  }
  for (double y : values)
    if (!std::isfinite(y)) throw InvalidInput("observation set: non-finite value");
}

ObservationSet observe(const DenseMatrix& m0, const std::vector<Cell>& indices,
                       const NoiseModel& noise, std::uint64_t seed) {
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
    throw InvalidInput("noise sigma must be nonnegative");
  }
  ObservationSet obs;
  obs.d1 = m0.rows();
  obs.d2 = m0.cols();
  obs.indices = indices;
  obs.values.reserve(indices.size());
  Rng rng(seed, kNoiseStream);
  for (const auto& c : indices) {
    if (c.row < 0 || c.row >= obs.d1 || c.col < 0 || c.col >= obs.d2) {
      throw InvalidInput("observation index out of range: (" + std::to_string(c.row) + "," +
                         std::to_string(c.col) + ")");
    }
    double xi = 0.0;
    switch (noise.kind) {
      case NoiseKind::kNone: break;
      case NoiseKind::kGaussian: xi = rng.normal(); break;
      case NoiseKind::kLaplace: xi = rng.laplace_unit(); break;
    }
    obs.values.push_back(m0(c.row, c.col) + noise.sigma * xi);
  }
  return obs;
}

void write_observations(std::ostream& out, const ObservationSet& obs) {
  out << obs.d1 << ',' << obs.d2 << ',' << obs.size() << '\n';
  for (std::size_t t = 0; t < obs.size(); ++t) {
    out << obs.indices[t].row << ',' << obs.indices[t].col << ','
        << text::format_double(obs.values[t]) << '\n';
  }
}

ObservationSet read_observations(std::istream& in) {
  std::string line;
  if (!text::next_content_line(in, line)) throw InvalidInput("observations: missing header");
  const auto header = text::split(line, ',');
  if (header.size() != 3) throw InvalidInput("observations: header must be 'd1,d2,n'");
  ObservationSet obs;
  obs.d1 = text::parse_int(header[0]);
  obs.d2 = text::parse_int(header[1]);
  const auto n = text::parse_int(header[2]);
  if (n <= 0) throw InvalidInput("observations: n must be positive");
  obs.indices.reserve(static_cast<std::size_t>(n));
  obs.values.reserve(static_cast<std::size_t>(n));
  for (long long t = 0; t < n; ++t) {
    if (!text::next_content_line(in, line)) throw InvalidInput("observations: fewer than n rows");
    const auto f = text::split(line, ',');
    if (f.size() != 3) throw InvalidInput("observations: rows must be 'i,j,y'");
    obs.indices.push_back({text::parse_int(f[0]), text::parse_int(f[1])});
    obs.values.push_back(text::parse_double(f[2]));
  }
  obs.validate();
  return obs;
}

void save_observations(const std::string& path, const ObservationSet& obs) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  write_observations(out, obs);
}

ObservationSet load_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path);
  return read_observations(in);
}

void write_distribution(std::ostream& out, const SamplingDistribution& pi) {
  out << pi.d1() << ',' << pi.d2() << '\n';
  auto write_row = [&](auto&& vec) {
    for (Eigen::Index i = 0; i < vec.size(); ++i) {
      if (i) out << ',';
      out << text::format_double(vec(i));
    }
    out << '\n';
  };
  switch (pi.kind()) {
    case DistributionKind::kUniform:
      out << "uniform\n";
      break;
    case DistributionKind::kProduct:
      out << "product\n";
      write_row(pi.row_marginals());
      write_row(pi.col_marginals());
      break;
    case DistributionKind::kExplicit:
      out << "explicit\n";
      for (Eigen::Index k = 0; k < pi.d1(); ++k) write_row(pi.probs().row(k));
      break;
  }
}

SamplingDistribution read_distribution(std::istream& in, bool require_positive) {
  std::string line;
  if (!text::next_content_line(in, line)) throw InvalidInput("distribution: missing header");
  const auto header = text::split(line, ',');
  if (header.size() != 2) throw InvalidInput("distribution: header must be 'd1,d2'");
  const auto d1 = text::parse_int(header[0]);
  const auto d2 = text::parse_int(header[1]);
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("distribution: dimensions must be positive");
  if (!text::next_content_line(in, line)) throw InvalidInput("distribution: missing kind");
  const std::string kind(text::trim(line));

  auto read_vec = [&](long long len) {
    if (!text::next_content_line(in, line)) throw InvalidInput("distribution: missing row");
    const auto v = text::parse_double_row(line, static_cast<std::size_t>(len));
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), len));
  };

  DistributionSpec spec;
  spec.require_positive = require_positive;
  if (kind == "uniform") {
    spec.kind = DistributionKind::kUniform;
  } else if (kind == "product") {
    spec.kind = DistributionKind::kProduct;
    spec.row_weights = read_vec(d1);
    spec.col_weights = read_vec(d2);
  } else if (kind == "explicit") {
    spec.kind = DistributionKind::kExplicit;
    spec.weights.resize(d1, d2);
    for (long long k = 0; k < d1; ++k) spec.weights.row(k) = read_vec(d2).transpose();
  } else {
    throw InvalidInput("distribution: unknown kind '" + kind + "'");
  }
  return make_distribution(spec, d1, d2);
}

SamplingDistribution load_distribution(const std::string& path, bool require_positive) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path);
  return read_distribution(in, require_positive);
}

}  // namespace maxnorm
