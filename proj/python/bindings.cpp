#include "maxnorm/core.hpp"
#include "maxnorm/errors.hpp"
#include "maxnorm/experiment.hpp"
#include "maxnorm/model_select.hpp"
#include "maxnorm/sampling.hpp"
#include "maxnorm/solver.hpp"
#include "maxnorm/theory.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace maxnorm;

namespace {

ObservationSet make_observations(Eigen::Index d1, Eigen::Index d2, const std::vector<Eigen::Index>& rows,
                                 const std::vector<Eigen::Index>& cols,
                                 const std::vector<double>& values) {
  if (rows.size() != cols.size() || rows.size() != values.size()) {
    throw InvalidInput("rows, cols and values must have the same length");
  }
  ObservationSet obs{d1, d2, {}, values};
  for (std::size_t t = 0; t < rows.size(); ++t) obs.indices.push_back({rows[t], cols[t]});
  obs.validate();
  return obs;
}

py::dict observations_dict(const ObservationSet& obs) {
  std::vector<Eigen::Index> rows, cols;
  for (const auto& c : obs.indices) {
    rows.push_back(c.row);
    cols.push_back(c.col);
  }
  py::dict d;
  d["d1"] = obs.d1;
  d["d2"] = obs.d2;
  d["rows"] = rows;
  d["cols"] = cols;
  d["values"] = obs.values;
  return d;
}

py::dict key_values_dict(const KeyValues& kv) {
  py::dict d;
  for (const auto& [k, v] : kv) d[py::str(k)] = v;
  return d;
}

}  // namespace

PYBIND11_MODULE(_maxnorm, m) {
  m.doc() = "Max-norm constrained matrix completion";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<Divergence>(m, "Divergence", PyExc_RuntimeError);

  m.def(
      "matrix_norms",
      [](const Eigen::MatrixXd& a) {
        const auto n = matrix_norms(DenseMatrix(a));
        py::dict d;
        d["frobenius"] = n.frobenius;
        d["linf"] = n.linf;
        d["trace"] = n.trace;
        d["rank"] = n.rank_numeric;
        return d;
      },
      py::arg("matrix"));

  m.def(
      "make_ground_truth",
      [](Eigen::Index d1, Eigen::Index d2, Eigen::Index rank, double alpha, std::uint64_t seed) {
        return Eigen::MatrixXd(make_ground_truth(d1, d2, rank, alpha, seed).matrix.values());
      },
      py::arg("d1"), py::arg("d2"), py::arg("rank"), py::arg("alpha") = 1.0, py::arg("seed") = 0);

  m.def(
      "simulate",
      [](const Eigen::MatrixXd& truth, std::size_t n, std::uint64_t seed, const std::string& noise,
         double sigma) {
        const DenseMatrix m0(truth);
        const auto idx = sample_indices(SamplingDistribution::uniform(m0.rows(), m0.cols()), n, seed);
        return observations_dict(observe(m0, idx, {parse_noise_kind(noise), sigma}, seed));
      },
      py::arg("truth"), py::arg("n"), py::arg("seed") = 0, py::arg("noise") = "gaussian",
      py::arg("sigma") = 0.0,
      "Uniformly sample n cells of `truth` and add noise. Returns a dict with d1, d2, rows, "
      "cols and values.");

  m.def(
      "fit",
      [](Eigen::Index d1, Eigen::Index d2, const std::vector<Eigen::Index>& rows,
         const std::vector<Eigen::Index>& cols, const std::vector<double>& values, double alpha,
         double radius, long k, double tau, long max_iters, double tol, std::uint64_t seed,
         const std::string& solver, long epochs) {
        const auto obs = make_observations(d1, d2, rows, cols, values);
        SolverConfig cfg;
        cfg.k = k;
        cfg.tau = tau;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        cfg.seed = seed;
        cfg.algorithm = parse_algorithm(solver);
        cfg.epochs = epochs;
        const auto res = fit(obs, ConstraintSet(alpha, radius), cfg);
        py::dict d;
        d["completed"] = Eigen::MatrixXd(res.completed.values());
        d["u"] = Eigen::MatrixXd(res.factorization.u());
        d["v"] = Eigen::MatrixXd(res.factorization.v());
        d["objective_trace"] = res.objective_trace;
        d["iterations"] = res.iterations_run;
        d["feasible_rows"] = res.feasible_rows;
        d["feasible_linf"] = res.feasible_linf;
        return d;
      },
      py::arg("d1"), py::arg("d2"), py::arg("rows"), py::arg("cols"), py::arg("values"),
      py::arg("alpha"), py::arg("radius"), py::arg("k") = 0, py::arg("tau") = 0.1,
      py::arg("max_iters") = 5000, py::arg("tol") = 1e-7, py::arg("seed") = 0,
      py::arg("solver") = "pgd", py::arg("epochs") = 200);

  m.def(
      "estimate_rank",
      [](Eigen::Index d1, Eigen::Index d2, const std::vector<Eigen::Index>& rows,
         const std::vector<Eigen::Index>& cols, const std::vector<double>& values,
         std::optional<double> alpha0, int r_max, std::uint64_t seed) {
        RankSearchConfig cfg;
        cfg.alpha0 = alpha0;
        cfg.r_max = r_max;
        cfg.solver.seed = seed;
        const auto est = estimate_rank(make_observations(d1, d2, rows, cols, values), cfg);
        py::dict errors;
        for (const auto& p : est.errors) errors[py::int_(p.r)] = p.error;
        py::dict d;
        d["r_star"] = est.r_star;
        d["alpha0"] = est.alpha0;
        d["errors"] = errors;
        d["completed"] = Eigen::MatrixXd(est.chosen.values());
        return d;
      },
      py::arg("d1"), py::arg("d2"), py::arg("rows"), py::arg("cols"), py::arg("values"),
      py::arg("alpha0") = py::none(), py::arg("r_max") = 6, py::arg("seed") = 0);

  m.def(
      "spectral_magnitude",
      [](const Eigen::MatrixXd& a) {
        return Eigen::MatrixXd(spectral_magnitude(DenseMatrix(a)).values());
      },
      py::arg("matrix"));

  m.def(
      "rate_bounds",
      [](double alpha, double sigma, double radius, double d1, double d2, double n, double mu,
         double big_l) {
        return key_values_dict(
            rate_bounds(RateParams{alpha, sigma, radius, d1, d2, n, mu, big_l}).to_key_values());
      },
      py::arg("alpha"), py::arg("sigma"), py::arg("radius"), py::arg("d1"), py::arg("d2"),
      py::arg("n"), py::arg("mu") = 1.0, py::arg("L") = 1.0);

  m.def(
      "rademacher_sign_sup",
      [](Eigen::Index d1, Eigen::Index d2, const std::vector<Eigen::Index>& rows,
         const std::vector<Eigen::Index>& cols, std::size_t draws, std::uint64_t seed) {
        if (rows.size() != cols.size()) throw InvalidInput("rows and cols differ in length");
        std::vector<Cell> idx;
        for (std::size_t t = 0; t < rows.size(); ++t) idx.push_back({rows[t], cols[t]});
        return key_values_dict(rademacher_sign_sup(d1, d2, idx, draws, seed).to_key_values());
      },
      py::arg("d1"), py::arg("d2"), py::arg("rows"), py::arg("cols"), py::arg("draws") = 1000,
      py::arg("seed") = 0);

  m.def(
      "packing_generate",
      [](Eigen::Index d1, Eigen::Index d2, double alpha, double gamma, double r,
         std::size_t count, std::uint64_t seed) {
        std::vector<Eigen::MatrixXd> out;
        for (const auto& mat : packing_generate(PackingConfig{d1, d2, alpha, gamma, r, count}, seed)) {
          out.push_back(mat.values());
        }
        return out;
      },
      py::arg("d1"), py::arg("d2"), py::arg("alpha") = 1.0, py::arg("gamma") = 1.0,
      py::arg("r") = 1.0, py::arg("count") = 100, py::arg("seed") = 0);
}
