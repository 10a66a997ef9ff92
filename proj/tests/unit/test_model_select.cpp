#include "maxnorm/errors.hpp"
#include "maxnorm/model_select.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

using namespace maxnorm;
using maxnorm::testing::random_matrix;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

namespace {

// O(d^2) DFT straight from the definition.
Eigen::MatrixXd naive_dft_magnitude(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  Eigen::MatrixXd out(n, m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      std::complex<double> s = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) {
        s += m(t, j) * std::polar(1.0, -2.0 * std::numbers::pi * double(k * t) / double(n));
      }
      out(k, j) = std::abs(s);
    }
  return out;
}

ObservationSet fully_observed(const Eigen::MatrixXd& m) {
  ObservationSet obs{m.rows(), m.cols(), {}, {}};
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      obs.indices.push_back({i, j});
      obs.values.push_back(m(i, j));
    }
  return obs;
}

}  // namespace

TEST_CASE("column_mean_init fills missing cells") {
  Eigen::MatrixXd values(3, 3);
  values << 2, 1, 0, 4, 5, 0, 0, 0, 0;
  Mask mask(3, 3);
  mask << true, true, false, true, true, false, false, true, false;
  // Column 0 observed {2, 4}; column 1 fully observed {1, 5, 0}; column 2 empty.
  const auto filled = column_mean_init(PartialMatrix(values, mask));
  CHECK(filled(2, 0) == 3.0);
  CHECK(filled(0, 0) == 2.0);
  CHECK(filled(1, 1) == 5.0);
  CHECK(filled(2, 1) == 0.0);
  const double global = (2 + 4 + 1 + 5 + 0) / 5.0;
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(filled(i, 2) == doctest::Approx(global));

  Rng rng(4);
  const Eigen::MatrixXd full = random_matrix(rng, 5, 4);
  CHECK(column_mean_init(PartialMatrix(full, Mask::Constant(5, 4, true))).values() == full);
}

TEST_CASE("column_mean_init leaves observed entries bit-identical") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd v = random_matrix(rng, 7, 6, 3.0);
    Mask mask(7, 6);
    for (Eigen::Index i = 0; i < 7; ++i)
      for (Eigen::Index j = 0; j < 6; ++j) mask(i, j) = rng.uniform() < 0.5;
    mask(0, 0) = true;
    Eigen::MatrixXd masked = v;
    for (Eigen::Index i = 0; i < 7; ++i)
      for (Eigen::Index j = 0; j < 6; ++j)
        if (!mask(i, j)) masked(i, j) = 0.0;
    const auto filled = column_mean_init(PartialMatrix(masked, mask));
    for (Eigen::Index i = 0; i < 7; ++i)
      for (Eigen::Index j = 0; j < 6; ++j)
        if (mask(i, j)) REQUIRE(filled(i, j) == v(i, j));
  }
}

TEST_CASE("partial matrix from observations averages repeats") {
  const ObservationSet obs{2, 2, {{0, 1}, {0, 1}, {1, 0}}, {1.0, 2.0, -1.0}};
  const auto p = PartialMatrix::from_observations(obs);
  CHECK(p.observed(0, 1));
  CHECK(!p.observed(0, 0));
  CHECK(p.value(0, 1) == 1.5);
  CHECK(p.observed_count() == 2);
  CHECK(p.max_abs_observed() == 1.5);
  CHECK(p.to_observations().size() == 2);
}

TEST_CASE("spectral_magnitude: constant and zero columns") {
  const auto c = spectral_magnitude(DenseMatrix(Eigen::MatrixXd::Constant(8, 2, -1.5)));
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(c(0, j) == doctest::Approx(12.0));
    for (Eigen::Index k = 1; k < 8; ++k) CHECK(std::abs(c(k, j)) < 1e-12);
  }
  CHECK(spectral_magnitude(DenseMatrix(4, 3)).values() == Eigen::MatrixXd::Zero(4, 3));
}

TEST_CASE("spectral_magnitude matches a naive DFT and satisfies Parseval") {
  Rng rng(99);
  for (Eigen::Index d1 : {1, 2, 3, 7, 8, 16, 31}) {
    const Eigen::MatrixXd m = random_matrix(rng, d1, 5, 2.0);
    const Eigen::MatrixXd f = spectral_magnitude(DenseMatrix(m)).values();
    REQUIRE(f.rows() == d1);
    CHECK((f - naive_dft_magnitude(m)).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index j = 0; j < 5; ++j) {
      const double lhs = f.col(j).squaredNorm();
      const double rhs = double(d1) * m.col(j).squaredNorm();
      CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
    }
  }
}

TEST_CASE("spectral_magnitude is invariant to a cyclic shift of rows") {
  Rng rng(3);
  const Eigen::MatrixXd m = random_matrix(rng, 12, 4);
  Eigen::MatrixXd shifted(12, 4);
  for (Eigen::Index i = 0; i < 12; ++i) shifted.row((i + 5) % 12) = m.row(i);
  const auto a = spectral_magnitude(DenseMatrix(m)).values();
  const auto b = spectral_magnitude(DenseMatrix(shifted)).values();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("estimate_rank reproduces a fully observed rank-1 matrix") {
  Eigen::VectorXd u(8), v(6);
  u << 0.9, -0.4, 0.3, 0.7, -0.8, 0.2, 0.5, -0.6;
  v << 0.5, 0.8, -0.3, 0.6, -0.9, 0.4;
  const Eigen::MatrixXd m0 = u * v.transpose();
  RankSearchConfig cfg;
  cfg.r_max = 4;
  cfg.solver.tol = 1e-14;
  cfg.solver.max_iters = 20000;
  cfg.keep_profiles = true;
  const auto est = estimate_rank(fully_observed(m0), cfg);
  CHECK(est.alpha0 == doctest::Approx(m0.cwiseAbs().maxCoeff()));
  CHECK((est.chosen.values() - m0).norm() / m0.norm() < 1e-3);
  REQUIRE(est.errors.size() == 3);
  REQUIRE(est.profiles.size() == 3);
  for (std::size_t i = 0; i < est.errors.size(); ++i) {
    CHECK(est.errors[i].r == int(i) + 2);
    CHECK(est.errors[i].radius == doctest::Approx(est.alpha0 * std::sqrt(double(i + 2))));
    CHECK(est.errors[i].error >= 0.0);
    const double again = (est.profile_init.values() - est.profiles[i].values()).norm();
    CHECK(std::abs(again - est.errors[i].error) <= 1e-12);
    CHECK(est.errors[i].error >= est.errors[std::size_t(est.r_star - 2)].error);
  }
}

TEST_CASE("estimate_rank with r_max = 2 has a single candidate") {
  Rng rng(6);
  const Eigen::MatrixXd m = random_matrix(rng, 6, 6);
  RankSearchConfig cfg;
  cfg.r_max = 2;
  const auto est = estimate_rank(fully_observed(m), cfg);
  CHECK(est.r_star == 2);
  CHECK(est.errors.size() == 1);
}

TEST_CASE("estimate_rank radius mode sweeps R") {
  Rng rng(60);
  const Eigen::MatrixXd m = random_matrix(rng, 6, 5);
  RankSearchConfig cfg;
  cfg.mode = SearchMode::kRadius;
  cfg.radius_steps = 3;
  cfg.alpha0 = 1.0;
  cfg.solver.k = 3;
  const auto est = estimate_rank(fully_observed(m), cfg);
  REQUIRE(est.errors.size() == 3);
  CHECK(est.errors[0].radius == doctest::Approx(std::sqrt(2.0)));
  CHECK(est.errors[2].radius == doctest::Approx(std::sqrt(2.0) + 2 * (std::sqrt(2.0) - 1.0)));
}

TEST_CASE("estimate_rank errors") {
  const ObservationSet obs{4, 4, {{0, 0}, {1, 2}, {3, 3}}, {1e6, -1e6, 1e6}};
  RankSearchConfig cfg;
  cfg.r_max = 3;
  cfg.solver.tau = 1e308;
  cfg.solver.max_tau = 1e308;
  cfg.solver.max_halvings = 0;
  CHECK_THROWS_AS(estimate_rank(obs, cfg), Divergence);

  RankSearchConfig bad;
  bad.r_max = 1;
  CHECK_THROWS_AS(estimate_rank(obs, bad), InvalidInput);
  bad.r_max = 5;
  CHECK_THROWS_AS(estimate_rank(obs, bad), InvalidInput);
  const ObservationSet zeros{3, 3, {{0, 0}}, {0.0}};
  CHECK_THROWS_AS(estimate_rank(zeros, RankSearchConfig{}), InvalidInput);
}

TEST_CASE("rank report format") {
  Eigen::MatrixXd m(1, 2);
  m << 1.5, -2;
  const RankEstimate est{
      3, 1.2, 1.0,
      {{2, 1.0, 0.5}, {3, 1.2, 0.25}, {4, 1.4, std::numeric_limits<double>::infinity()}},
      DenseMatrix(m), DenseMatrix(m), {}};
  std::ostringstream out;
  write_rank_report(out, est);
  CHECK(out.str() == "2,0.5\n3,0.25\n4,inf\n3\n1,2\n1.5,-2\n");
}
