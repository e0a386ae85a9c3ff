#include "matchbench/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <sstream>

#include <CLI11.hpp>

#include "matchbench/errors.hpp"
#include "matchbench/io.hpp"
#include "matchbench/parallel.hpp"

namespace matchbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::size_t tie_count(const VectorXd& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  const auto distinct = static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
  return s.size() - distinct;
}

double variance(const VectorXd& v) { return (v.array() - v.mean()).square().mean(); }

json number(double v) {
  if (!std::isfinite(v)) return json(format_double(v));
  return json{{"value", v}, {"decimal", format_double(v)}};
}

std::string csv_number(double v) { return std::isnan(v) ? "NaN" : format_double(v); }

}  // namespace

json cmd_simulate(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  const MatchedSample sample = simulate_market(config.market, config.n, config.seed);
  ensure_dir(out_dir);
  write_sample_csv(out_dir / "sample.csv", sample);
  const VectorXd u = sample.xs * config.market.alpha;
  const VectorXd v = sample.ys * config.market.beta;
  json summary{{"n", config.n},
               {"seed", config.seed},
               {"dx", sample.dx()},
               {"dy", sample.dy()},
               {"index_variance_x", variance(u)},
               {"index_variance_y", variance(v)},
               {"ties_x", tie_count(u)},
               {"ties_y", tie_count(v)},
               {"sample", "sample.csv"}};
  write_json(out_dir / "simulate_summary.json", summary);
  return summary;
}

EstimatorResult run_method(Method method, const MatchedSample& sample, const ExperimentConfig& config) {
  switch (method) {
    case Method::cca: return cca(compute_moments(sample));
    case Method::ols: return ols_index(sample);
    case Method::spearman: {
      SpearmanOptions opt;
      opt.seed = config.seed;
      opt.restarts = config.spearman_restarts;
      opt.grid_resolution = config.spearman_grid_resolution;
      return spearman_estimate(sample, opt);
    }
    case Method::mrs: return mrs_estimate(sample, config.mrs_response).result;
    case Method::saliency: {
      if (!config.affinity) throw ConfigError("config field 'affinity': required by the saliency method");
      const AffinityDecomposition d = svd_decompose(*config.affinity, config.rank_tol);
      const auto [alpha, beta] = rank1_weights(d);
      EstimatorResult r;
      r.method = Method::saliency;
      r.alpha = alpha;
      r.beta = beta;
      r.objective = d.lambdas(0);
      r.diagnostics["lambdas"] = std::vector<double>(d.lambdas.data(), d.lambdas.data() + d.lambdas.size());
      r.diagnostics["shares"] = std::vector<double>(d.shares.data(), d.shares.data() + d.shares.size());
      r.diagnostics["numerical_rank"] = d.numerical_rank;
      r.diagnostics["rank_tol"] = d.rank_tol;
      return r;
    }
  }
  throw ConfigError("unsupported method");
}

json cmd_estimate(const ExperimentConfig& config, const MatchedSample& sample, const fs::path& out_dir, bool timing) {
  config.validate();
  if (sample.dx() != config.market.dx() || sample.dy() != config.market.dy()) {
    throw ConfigError("sample has dx = " + std::to_string(sample.dx()) + ", dy = " + std::to_string(sample.dy()) +
                      " but the config's market has dx = " + std::to_string(config.market.dx()) +
                      ", dy = " + std::to_string(config.market.dy()));
  }
  json results = json::array();
  for (Method m : config.methods) {
    const auto start = std::chrono::steady_clock::now();
    EstimatorResult r = run_method(m, sample, config);
    if (timing) {
      r.diagnostics["wall_time_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    json j = to_json(r);
    if (r.alpha.size() >= 2) j["ratio_alpha2_alpha1"] = r.alpha(1) / r.alpha(0);
    j["angular_error_alpha"] = angular_error(r.alpha, config.market.alpha);
    results.push_back(j);
  }
  ensure_dir(out_dir);
  write_json(out_dir / "estimates.json", results);
  return results;
}

CounterexampleRun run_counterexample(double tol, bool gaussian, std::size_t mc_n, std::uint64_t seed) {
  if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
  CounterexampleRun run;
  run.tolerance = tol;
  run.gaussian = gaussian;
  if (gaussian) {
    const MarketSpec spec = gaussian_comparison_spec();
    run.closed_form = closed_form_linear(spec);
    run.quadrature = numeric_counterexample(spec, tol);
    run.monte_carlo = monte_carlo_counterexample(spec, mc_n, seed);
  } else {
    run.closed_form = closed_form_counterexample();
    run.quadrature = quadrature_counterexample(tol);
    run.monte_carlo = monte_carlo_counterexample(counterexample_spec(), mc_n, seed);
  }
  run.consistent = std::abs(run.quadrature.ratio_cca - run.quadrature.ratio_true) <= std::max(10.0 * tol, 1e-6);
  return run;
}

namespace {

struct Row {
  std::string name;
  double closed;
  double quad;
  double mc;
  double mc_se;
};

std::vector<Row> counterexample_rows(const CounterexampleRun& run) {
  const auto& c = run.closed_form;
  const auto& q = run.quadrature;
  const auto& m = run.monte_carlo;
  std::vector<Row> rows{{"cov1", c.cov1, q.cov1, m.cov1, m.cov1_se.value_or(kNaN)},
                        {"cov2", c.cov2, q.cov2, m.cov2, m.cov2_se.value_or(kNaN)},
                        {"ratio_cca", c.ratio_cca, q.ratio_cca, m.ratio_cca, kNaN}};
  for (const auto& [name, value] : c.expectation_terms) {
    auto find = [&](const TermMap& t) {
      const auto it = t.find(name);
      return it == t.end() ? kNaN : it->second;
    };
    const auto se = m.term_se.find(name);
    rows.push_back({name, value, find(q.expectation_terms), find(m.expectation_terms),
                    se == m.term_se.end() ? kNaN : se->second});
  }
  return rows;
}

bool quad_agrees(const Row& r, double tol) { return std::abs(r.closed - r.quad) <= 10.0 * tol; }

// Ratios have no plain standard error; delta method on cov2/cov1 would do,
// but a 1% band is what the Monte Carlo column is used for here.
bool mc_agrees(const Row& r) {
  if (std::isnan(r.mc)) return true;
  if (std::isnan(r.mc_se)) return std::abs(r.closed - r.mc) <= 0.01 * std::abs(r.closed);
  return std::abs(r.closed - r.mc) <= 3.0 * r.mc_se;
}

json report_json(const CounterexampleReport& r) {
  json j{{"method", to_string(r.method)},
         {"cov1", number(r.cov1)},
         {"cov2", number(r.cov2)},
         {"ratio_cca", number(r.ratio_cca)},
         {"ratio_true", number(r.ratio_true)}};
  json terms = json::object();
  for (const auto& [k, v] : r.expectation_terms) terms[k] = number(v);
  j["expectation_terms"] = terms;
  if (r.tolerance) j["tolerance"] = *r.tolerance;
  if (r.n) j["n"] = *r.n;
  if (r.cov1_se) j["cov1_se"] = *r.cov1_se;
  if (r.cov2_se) j["cov2_se"] = *r.cov2_se;
  if (!r.term_se.empty()) j["expectation_term_se"] = r.term_se;
  return j;
}

}  // namespace

json counterexample_to_json(const CounterexampleRun& run) {
  json agreement = json::object();
  for (const Row& r : counterexample_rows(run)) {
    agreement[r.name] = {{"quadrature", quad_agrees(r, run.tolerance)}, {"monte_carlo", mc_agrees(r)}};
  }
  json j{{"market", run.gaussian ? "gaussian" : "counterexample"},
         {"tolerance", run.tolerance},
         {"closed_form", report_json(run.closed_form)},
         {"quadrature", report_json(run.quadrature)},
         {"monte_carlo", report_json(run.monte_carlo)},
         {"agreement", agreement},
         {"verdict", run.consistent ? "CONSISTENT" : "INCONSISTENT"}};
  if (!run.gaussian) j["symbols"] = counterexample_symbols();
  return j;
}

std::string counterexample_table(const CounterexampleRun& run) {
  std::ostringstream os;
  os << (run.gaussian ? "Gaussian comparison market" : "Rademacher + exponential market") << ", quadrature tol "
     << run.tolerance << ", Monte Carlo n = " << run.monte_carlo.n.value_or(0) << "\n\n";
  os << std::left << std::setw(16) << "quantity" << std::right << std::setw(20) << "closed_form" << std::setw(20)
     << "quadrature" << std::setw(20) << "monte_carlo" << std::setw(14) << "mc_se" << "  agree\n";
  os << std::setprecision(12);
  for (const Row& r : counterexample_rows(run)) {
    const bool ok = quad_agrees(r, run.tolerance) && mc_agrees(r);
    os << std::left << std::setw(16) << r.name << std::right << std::setw(20) << r.closed << std::setw(20) << r.quad
       << std::setw(20) << r.mc << std::setw(14) << std::setprecision(3) << r.mc_se << std::setprecision(12) << "  "
       << (ok ? "yes" : "NO") << '\n';
  }
  os << std::setprecision(7) << "\nratio_cca = alpha2^c/alpha1^c = " << run.quadrature.ratio_cca
     << " vs ratio_true = " << run.quadrature.ratio_true << "  =>  " << (run.consistent ? "CONSISTENT" : "INCONSISTENT")
     << '\n';
  return os.str();
}

BenchmarkTable run_benchmark(const ExperimentConfig& config) {
  config.validate();
  const std::vector<std::size_t> sizes = config.sweep.empty() ? std::vector<std::size_t>{config.n} : config.sweep;
  const std::size_t reps = config.replications;
  const std::size_t tasks = sizes.size() * reps;
  std::vector<std::vector<BenchmarkSample>> per_task(tasks);
  const CounterStream seeds(config.seed);

  parallel_for(tasks, [&](std::size_t t) {
    const std::size_t n = sizes[t / reps];
    const std::size_t rep = t % reps;
    const std::uint64_t seed = seeds.split(n).bits(rep);
    const MatchedSample sample = simulate_market(config.market, n, seed);
    ExperimentConfig local = config;
    local.seed = seed;
    for (Method m : config.methods) {
      const EstimatorResult r = run_method(m, sample, local);
      per_task[t].push_back({to_string(m), n, rep, angular_error(r.alpha, config.market.alpha),
                             r.alpha.size() >= 2 ? r.alpha(1) / r.alpha(0) : kNaN});
    }
  });

  BenchmarkTable table;
  for (auto& v : per_task) table.samples.insert(table.samples.end(), v.begin(), v.end());
  std::sort(table.samples.begin(), table.samples.end(), [](const BenchmarkSample& a, const BenchmarkSample& b) {
    return std::tie(a.method, a.n, a.replication) < std::tie(b.method, b.n, b.replication);
  });

  auto mean_sd = [](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) return std::pair{mean, kNaN};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
  };
  for (std::size_t i = 0; i < table.samples.size();) {
    std::size_t j = i;
    std::vector<double> err, ratio;
    while (j < table.samples.size() && table.samples[j].method == table.samples[i].method &&
           table.samples[j].n == table.samples[i].n) {
      err.push_back(table.samples[j].angular_error);
      ratio.push_back(table.samples[j].ratio);
      ++j;
    }
    const auto [em, es] = mean_sd(err);
    const auto [rm, rs] = mean_sd(ratio);
    table.rows.push_back({table.samples[i].method, table.samples[i].n, err.size(), em, es, rm, rs});
    i = j;
  }
  return table;
}

std::string benchmark_csv(const BenchmarkTable& table) {
  std::ostringstream os;
  os << "method,n,replications,mean_angular_error,sd_angular_error,mean_ratio,sd_ratio\n";
  for (const auto& r : table.rows) {
    os << r.method << ',' << r.n << ',' << r.replications << ',' << csv_number(r.mean_angular_error) << ','
       << csv_number(r.sd_angular_error) << ',' << csv_number(r.mean_ratio) << ',' << csv_number(r.sd_ratio) << '\n';
  }
  return os.str();
}

std::string benchmark_long_csv(const BenchmarkTable& table) {
  std::ostringstream os;
  os << "method,n,replication,angular_error,ratio\n";
  for (const auto& s : table.samples) {
    os << s.method << ',' << s.n << ',' << s.replication << ',' << csv_number(s.angular_error) << ','
       << csv_number(s.ratio) << '\n';
  }
  return os.str();
}

BenchmarkTable cmd_benchmark(const ExperimentConfig& config, const fs::path& out_dir) {
  BenchmarkTable table = run_benchmark(config);
  ensure_dir(out_dir);
  write_text(out_dir / "benchmark.csv", benchmark_csv(table));
  write_text(out_dir / "benchmark_long.csv", benchmark_long_csv(table));
  return table;
}

json decomposition_to_json(const AffinityDecomposition& d) {
  return {{"lambdas", std::vector<double>(d.lambdas.data(), d.lambdas.data() + d.lambdas.size())},
          {"shares", std::vector<double>(d.shares.data(), d.shares.data() + d.shares.size())},
          {"rank", d.numerical_rank},
          {"rank_tol", d.rank_tol},
          {"U", matrix_to_json(d.u)},
          {"V", matrix_to_json(d.v)}};
}

json cmd_saliency(const MatrixXd& a, double rank_tol, const std::optional<fs::path>& out_dir) {
  const AffinityDecomposition d = svd_decompose(a, rank_tol);
  json j = decomposition_to_json(d);
  if (d.numerical_rank == 1) {
    const auto [alpha, beta] = rank1_weights(d);
    j["alpha"] = std::vector<double>(alpha.data(), alpha.data() + alpha.size());
    j["beta"] = std::vector<double>(beta.data(), beta.data() + beta.size());
  }
  if (out_dir) {
    ensure_dir(*out_dir);
    write_json(*out_dir / "saliency.json", j);
  }
  return j;
}

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::string methods;
  std::string out;
  std::string sample;
  std::string matrix;
  std::optional<double> rank_tol;
  std::optional<std::size_t> replications;
  double tol = 1e-9;
  bool gaussian = false;
  bool timing = false;
};

ExperimentConfig resolve_config(const CommonFlags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
  } else {
    c.market = counterexample_spec();
  }
  if (f.n) c.n = *f.n;
  if (f.seed) c.seed = *f.seed;
  if (f.replications) c.replications = *f.replications;
  if (f.rank_tol) c.rank_tol = *f.rank_tol;
  if (!f.out.empty()) c.out = f.out;
  if (!f.methods.empty()) {
    c.methods.clear();
    std::stringstream ss(f.methods);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) c.methods.push_back(method_from_string(item));
    }
  }
  c.validate();
  return c;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"matchbench: single-index assortative matching markets and index-weight estimators"};
  app.require_subcommand(1);
  CommonFlags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "Experiment config (JSON)");
    sub->add_option("--n", f.n, "Sample size");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--out", f.out, "Output directory");
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate a matched sample (CSV)");
  add_common(simulate);

  auto* estimate = app.add_subcommand("estimate", "Run estimators on a sample");
  add_common(estimate);
  estimate->add_option("--sample", f.sample, "Sample CSV (default: <out>/sample.csv)");
  estimate->add_option("--methods", f.methods, "Comma-separated: cca,ols,spearman,mrs,saliency");
  estimate->add_flag("--timing", f.timing, "Record wall time per method in diagnostics");

  auto* counter = app.add_subcommand("counterexample", "Closed form vs quadrature vs Monte Carlo");
  counter->add_option("--tol", f.tol, "Quadrature tolerance")->capture_default_str();
  counter->add_flag("--gaussian", f.gaussian, "Run the Gaussian comparison market instead");
  counter->add_option("--n", f.n, "Monte Carlo sample size (default 1000000)");
  counter->add_option("--seed", f.seed, "Monte Carlo seed");
  counter->add_option("--out", f.out, "Write counterexample.json here");

  auto* bench = app.add_subcommand("benchmark", "Estimator error vs sample size");
  add_common(bench);
  bench->add_option("--methods", f.methods, "Comma-separated method list");
  bench->add_option("--replications", f.replications, "Replications per sample size");

  auto* sal = app.add_subcommand("saliency", "SVD saliency analysis of an affinity matrix");
  sal->add_option("--config", f.config, "Config with an 'affinity' matrix");
  sal->add_option("--matrix", f.matrix, "Affinity matrix CSV (dense, row-major)");
  sal->add_option("--rank-tol", f.rank_tol, "Relative singular value threshold");
  sal->add_option("--out", f.out, "Write saliency.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (simulate->parsed()) {
      const ExperimentConfig c = resolve_config(f);
      out << cmd_simulate(c, c.out).dump(2) << '\n';
    } else if (estimate->parsed()) {
      const ExperimentConfig c = resolve_config(f);
      const fs::path sample_path = f.sample.empty() ? fs::path(c.out) / "sample.csv" : fs::path(f.sample);
      out << cmd_estimate(c, read_sample_csv(sample_path), c.out, f.timing).dump(2) << '\n';
    } else if (counter->parsed()) {
      const CounterexampleRun r = run_counterexample(f.tol, f.gaussian, f.n.value_or(1000000), f.seed.value_or(0));
      out << counterexample_table(r);
      if (!f.out.empty()) {
        ensure_dir(f.out);
        write_json(fs::path(f.out) / "counterexample.json", counterexample_to_json(r));
      }
    } else if (bench->parsed()) {
      const ExperimentConfig c = resolve_config(f);
      out << benchmark_csv(cmd_benchmark(c, c.out));
    } else if (sal->parsed()) {
      MatrixXd a;
      double tol = kDefaultRankTol;
      if (!f.matrix.empty()) {
        a = read_matrix_csv(f.matrix);
      } else if (!f.config.empty()) {
        const ExperimentConfig c = load_config(f.config);
        if (!c.affinity) throw ConfigError("config field 'affinity': required by the saliency command");
        a = *c.affinity;
        tol = c.rank_tol;
      } else {
        throw ConfigError("saliency needs --matrix or --config");
      }
      if (f.rank_tol) tol = *f.rank_tol;
      const std::optional<fs::path> dir = f.out.empty() ? std::nullopt : std::optional<fs::path>(f.out);
      out << cmd_saliency(a, tol, dir).dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kSuccess;
}

}  // namespace matchbench::cli
