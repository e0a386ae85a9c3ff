#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matchbench/cli.hpp"
#include "matchbench/config.hpp"
#include "matchbench/errors.hpp"
#include "matchbench/estimators.hpp"
#include "matchbench/market.hpp"
#include "matchbench/oracle.hpp"
#include "matchbench/saliency.hpp"

namespace py = pybind11;
using namespace matchbench;

namespace {

// Python <-> nlohmann through the json module; specs and reports are small.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

MarketSpec market_arg(const py::object& o) { return market_from_json(from_py(o)); }

MatchedSample sample_arg(const MatrixXd& xs, const MatrixXd& ys) {
  if (xs.rows() != ys.rows()) throw ConfigError("xs and ys must have the same number of rows");
  return {xs, ys};
}

py::dict result_dict(const EstimatorResult& r) {
  py::dict d;
  d["method"] = to_string(r.method);
  d["alpha"] = r.alpha;
  d["beta"] = r.beta;
  d["objective"] = r.objective;
  d["diagnostics"] = to_py(r.diagnostics);
  return d;
}

py::object report_dict(const CounterexampleReport& r) {
  cli::CounterexampleRun run;
  run.closed_form = run.quadrature = run.monte_carlo = r;
  return to_py(cli::counterexample_to_json(run)["closed_form"]);
}

py::dict assignment_dict(const Assignment& a) {
  py::dict d;
  d["permutation"] = a.permutation;
  d["value"] = a.value;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "matchbench core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("counterexample_spec", [] { return to_py(market_to_json(counterexample_spec())); });
  m.def("gaussian_comparison_spec", [] { return to_py(market_to_json(gaussian_comparison_spec())); });

  m.def(
      "simulate_market",
      [](const py::object& market, std::size_t n, std::uint64_t seed) {
        const MatchedSample s = simulate_market(market_arg(market), n, seed);
        return py::make_tuple(s.xs, s.ys);
      },
      py::arg("market"), py::arg("n"), py::arg("seed") = 0,
      "Comonotone matched sample; market is a spec dict or a preset name. Returns (xs, ys).");

  m.def(
      "cca", [](const MatrixXd& xs, const MatrixXd& ys) { return result_dict(cca(compute_moments(sample_arg(xs, ys)))); },
      py::arg("xs"), py::arg("ys"));
  m.def(
      "ols_index", [](const MatrixXd& xs, const MatrixXd& ys) { return result_dict(ols_index(sample_arg(xs, ys))); },
      py::arg("xs"), py::arg("ys"));
  m.def(
      "spearman_objective",
      [](const MatrixXd& xs, const MatrixXd& ys, const VectorXd& alpha, const VectorXd& beta) {
        return spearman_objective(sample_arg(xs, ys), alpha, beta);
      },
      py::arg("xs"), py::arg("ys"), py::arg("alpha"), py::arg("beta"));
  m.def(
      "spearman_estimate",
      [](const MatrixXd& xs, const MatrixXd& ys, int restarts, std::uint64_t seed, bool angular_grid) {
        SpearmanOptions opt;
        opt.restarts = restarts;
        opt.seed = seed;
        opt.angular_grid = angular_grid;
        const MatchedSample sample = sample_arg(xs, ys);
        EstimatorResult r;
        {
          py::gil_scoped_release release;
          r = spearman_estimate(sample, opt);
        }
        return result_dict(r);
      },
      py::arg("xs"), py::arg("ys"), py::arg("restarts") = 32, py::arg("seed") = 0, py::arg("angular_grid") = true);
  m.def(
      "mrs_estimate",
      [](const MatrixXd& xs, const MatrixXd& ys, Eigen::Index k, std::size_t eval_points) {
        const MrsResult r = mrs_estimate(sample_arg(xs, ys), k, eval_points);
        py::dict d = result_dict(r.result);
        d["ratios"] = r.ratios;
        d["unstable"] = MatrixXd(r.unstable.cast<double>());
        d["gradients"] = r.gradients;
        return d;
      },
      py::arg("xs"), py::arg("ys"), py::arg("k") = 0, py::arg("eval_points") = 100);

  m.def(
      "svd_decompose",
      [](const MatrixXd& a, double rank_tol) {
        const AffinityDecomposition d = svd_decompose(a, rank_tol);
        py::dict out;
        out["U"] = d.u;
        out["V"] = d.v;
        out["lambdas"] = d.lambdas;
        out["shares"] = d.shares;
        out["rank"] = d.numerical_rank;
        return out;
      },
      py::arg("a"), py::arg("rank_tol") = kDefaultRankTol);
  m.def(
      "rank1_weights",
      [](const MatrixXd& a, double rank_tol) { return rank1_weights(svd_decompose(a, rank_tol)); }, py::arg("a"),
      py::arg("rank_tol") = kDefaultRankTol, "Normalized (alpha, beta) of a rank-1 affinity matrix.");

  m.def("closed_form_counterexample", [] { return report_dict(closed_form_counterexample()); });
  m.def(
      "quadrature_counterexample", [](double tol) { return report_dict(quadrature_counterexample(tol)); },
      py::arg("tol") = 1e-9);
  m.def(
      "monte_carlo_counterexample",
      [](const py::object& market, std::size_t n, std::uint64_t seed) {
        return report_dict(monte_carlo_counterexample(market_arg(market), n, seed));
      },
      py::arg("market") = "counterexample", py::arg("n") = 1000000, py::arg("seed") = 0);
  m.def(
      "consistency_condition",
      [](const py::object& market, double tol) {
        const ConsistencyCheck c = consistency_condition(market_arg(market), tol);
        py::dict d;
        d["lhs"] = c.lhs;
        d["rhs"] = c.rhs;
        d["holds"] = c.holds;
        d["cov1"] = c.cov1;
        d["cov2"] = c.cov2;
        return d;
      },
      py::arg("market"), py::arg("tol") = 1e-9);

  m.def(
      "assignment_oracle",
      [](const MatrixXd& xs, const MatrixXd& ys, const py::object& market) {
        return assignment_dict(assignment_oracle(xs, ys, market_arg(market)));
      },
      py::arg("xs"), py::arg("ys"), py::arg("market"));
  m.def(
      "rank_sorted_matching",
      [](const MatrixXd& xs, const MatrixXd& ys, const py::object& market) {
        return assignment_dict(rank_sorted_matching(xs, ys, market_arg(market)));
      },
      py::arg("xs"), py::arg("ys"), py::arg("market"));

  m.def(
      "run_benchmark",
      [](const py::object& config) {
        const cli::BenchmarkTable t = cli::run_benchmark(config_from_json(from_py(config)));
        py::list rows;
        for (const auto& r : t.rows) {
          py::dict d;
          d["method"] = r.method;
          d["n"] = r.n;
          d["replications"] = r.replications;
          d["mean_angular_error"] = r.mean_angular_error;
          d["sd_angular_error"] = r.sd_angular_error;
          d["mean_ratio"] = r.mean_ratio;
          d["sd_ratio"] = r.sd_ratio;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config"), "Config dict in the CLI's JSON format; one row per (method, n).");
}
