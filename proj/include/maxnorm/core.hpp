#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace maxnorm {

class SamplingDistribution;

/// Grothendieck's constant is only known to lie in this interval; the upper
/// end is used wherever a bound is needed.
inline constexpr double kGrothendieckLower = 1.67;
inline constexpr double kGrothendieckUpper = 1.79;

inline constexpr double kDefaultRankTolerance = 1e-10;

/// A real d1 x d2 matrix with finite entries.
class DenseMatrix {
 public:
  DenseMatrix(Eigen::Index d1, Eigen::Index d2);  // zero-filled
  explicit DenseMatrix(Eigen::MatrixXd values);

  static DenseMatrix from_row_major(Eigen::Index d1, Eigen::Index d2,
                                    const std::vector<double>& entries);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const Eigen::MatrixXd& values() const { return values_; }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

 private:
  Eigen::MatrixXd values_;
};

/// Factor pair with M = U * V^T. U is d1 x k and V is d2 x k.
class Factorization {
 public:
  Factorization(Eigen::MatrixXd u, Eigen::MatrixXd v);

  const Eigen::MatrixXd& u() const { return u_; }
  const Eigen::MatrixXd& v() const { return v_; }
  Eigen::Index width() const { return u_.cols(); }
  Eigen::Index d1() const { return u_.rows(); }
  Eigen::Index d2() const { return v_.rows(); }

  Eigen::MatrixXd product() const { return u_ * v_.transpose(); }
  double entry(Eigen::Index i, Eigen::Index j) const { return u_.row(i).dot(v_.row(j)); }

 private:
  Eigen::MatrixXd u_;
  Eigen::MatrixXd v_;
};

/// The feasible set K(alpha, R): |M_kl| <= alpha and max-norm <= R.
struct ConstraintSet {
  double alpha;
  double radius;

  ConstraintSet(double alpha, double radius);
};

struct NormReport {
  double frobenius = 0.0;
  double linf = 0.0;
  double trace = 0.0;
  std::size_t rank_numeric = 0;
};

struct FactorNorms {
  double two_inf_u = 0.0;  // max row l2 norm of U
  double two_inf_v = 0.0;
  double max_norm_upper = 0.0;  // two_inf_u * two_inf_v >= ||U V^T||_max
};

/// Frobenius, elementwise l-infinity and trace norms plus numeric rank.
/// Singular values below rank_tolerance * sigma_max count as zero.
NormReport matrix_norms(const DenseMatrix& m, double rank_tolerance = kDefaultRankTolerance);

FactorNorms factor_norms(const Factorization& f);

/// Largest row l2 norm, ||A||_{2,inf}.
double two_inf_norm(const Eigen::MatrixXd& a);

/// sum_kl pi_kl * M_kl^2.
double pi_weighted_sq_norm(const DenseMatrix& m, const SamplingDistribution& pi);

bool all_finite(const Eigen::MatrixXd& a);

// Dense matrix text format: "d1,d2" then d1 lines of d2 comma-separated
// values written with 17 significant digits.
void write_dense(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_dense(std::istream& in);
void save_dense(const std::string& path, const DenseMatrix& m);
DenseMatrix load_dense(const std::string& path);

}  // namespace maxnorm
