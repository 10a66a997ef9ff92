#include "maxnorm/core.hpp"

#include "maxnorm/errors.hpp"
#include "maxnorm/sampling.hpp"
#include "maxnorm/text_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace maxnorm {

bool all_finite(const Eigen::MatrixXd& a) { return a.allFinite(); }

DenseMatrix::DenseMatrix(Eigen::Index d1, Eigen::Index d2) {
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("matrix dimensions must be positive");
  values_ = Eigen::MatrixXd::Zero(d1, d2);
}

DenseMatrix::DenseMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() <= 0 || values_.cols() <= 0) {
    throw InvalidInput("matrix dimensions must be positive");
  }
  if (!values_.allFinite()) throw InvalidInput("matrix has a non-finite entry");
}

DenseMatrix DenseMatrix::from_row_major(Eigen::Index d1, Eigen::Index d2,
                                        const std::vector<double>& entries) {
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("matrix dimensions must be positive");
  if (static_cast<Eigen::Index>(entries.size()) != d1 * d2) {
    throw InvalidInput("entry count does not match d1*d2");
  }
  Eigen::MatrixXd m(d1, d2);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d2; ++j) m(i, j) = entries[static_cast<std::size_t>(i * d2 + j)];
  return DenseMatrix(std::move(m));
}

Factorization::Factorization(Eigen::MatrixXd u, Eigen::MatrixXd v)
    : u_(std::move(u)), v_(std::move(v)) {
  if (u_.rows() <= 0 || v_.rows() <= 0 || u_.cols() <= 0) {
    throw InvalidInput("factors must be non-empty");
  }
  if (u_.cols() != v_.cols()) throw InvalidInput("factors U and V differ in column count");
  if (u_.cols() > u_.rows() + v_.rows()) throw InvalidInput("factor width exceeds d1 + d2");
  if (!u_.allFinite() || !v_.allFinite()) throw InvalidInput("factor has a non-finite entry");
}

ConstraintSet::ConstraintSet(double a, double r) : alpha(a), radius(r) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("radius must be positive");
  if (radius < alpha) throw InvalidInput("radius must be at least alpha (K(alpha,R) is empty)");
}

NormReport matrix_norms(const DenseMatrix& m, double rank_tolerance) {
  if (!(rank_tolerance > 0.0)) throw InvalidInput("rank_tolerance must be positive");
  const auto& a = m.values();
  if (!a.allFinite()) throw InvalidInput("matrix has a non-finite entry");

  NormReport r;
  r.frobenius = a.norm();
  r.linf = a.cwiseAbs().maxCoeff();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  r.trace = s.sum();
  const double cutoff = rank_tolerance * (s.size() > 0 ? s(0) : 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) ++r.rank_numeric;
  }
  return r;
}

double two_inf_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.rowwise().norm().maxCoeff();
}

FactorNorms factor_norms(const Factorization& f) {
  FactorNorms n;
  n.two_inf_u = two_inf_norm(f.u());
  n.two_inf_v = two_inf_norm(f.v());
  n.max_norm_upper = n.two_inf_u * n.two_inf_v;
  return n;
}

double pi_weighted_sq_norm(const DenseMatrix& m, const SamplingDistribution& pi) {
  if (pi.d1() != m.rows() || pi.d2() != m.cols()) {
    throw InvalidInput("sampling distribution dimensions do not match the matrix");
  }
  return (pi.probs().array() * m.values().array().square()).sum();
}

void write_dense(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << text::format_double(m(i, j));
    }
    out << '\n';
  }
}

DenseMatrix read_dense(std::istream& in) {
  std::string line;
  if (!text::next_content_line(in, line)) throw InvalidInput("dense matrix: missing header");
  const auto header = text::split(line, ',');
  if (header.size() != 2) throw InvalidInput("dense matrix: header must be 'd1,d2'");
  const auto d1 = text::parse_int(header[0]);
  const auto d2 = text::parse_int(header[1]);
  if (d1 <= 0 || d2 <= 0) throw InvalidInput("dense matrix: dimensions must be positive");

  Eigen::MatrixXd m(d1, d2);
  for (long long i = 0; i < d1; ++i) {
    if (!text::next_content_line(in, line)) throw InvalidInput("dense matrix: too few rows");
    const auto row = text::parse_double_row(line, static_cast<std::size_t>(d2));
    for (long long j = 0; j < d2; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return DenseMatrix(std::move(m));
}

void save_dense(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  write_dense(out, m);
}

DenseMatrix load_dense(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path);
  return read_dense(in);
}

}  // namespace maxnorm
