#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/config.hpp"
#include "matchbench/estimators.hpp"
#include "matchbench/oracle.hpp"
#include "matchbench/saliency.hpp"

namespace matchbench::cli {

enum ExitCode : int { kSuccess = 0, kIoFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

// simulate: sample.csv and simulate_summary.json under out_dir.
nlohmann::json cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// Runs one estimator on a sample; saliency uses config.affinity.
EstimatorResult run_method(Method method, const MatchedSample& sample, const ExperimentConfig& config);

// estimate: one result object per configured method, written to
// estimates.json. Wall times are added to diagnostics only when `timing`.
nlohmann::json cmd_estimate(const ExperimentConfig& config, const MatchedSample& sample,
                            const std::filesystem::path& out_dir, bool timing = false);

struct CounterexampleRun {
  CounterexampleReport closed_form;
  CounterexampleReport quadrature;
  CounterexampleReport monte_carlo;
  bool consistent = false;
  double tolerance = 1e-9;
  bool gaussian = false;
};

CounterexampleRun run_counterexample(double tol, bool gaussian, std::size_t mc_n, std::uint64_t seed);
nlohmann::json counterexample_to_json(const CounterexampleRun& run);
std::string counterexample_table(const CounterexampleRun& run);

struct BenchmarkRow {
  std::string method;
  std::size_t n = 0;
  std::size_t replications = 0;
  double mean_angular_error = 0.0;
  double sd_angular_error = 0.0;  // NaN when replications == 1
  double mean_ratio = 0.0;        // alpha2/alpha1, NaN when dx < 2
  double sd_ratio = 0.0;
};

struct BenchmarkSample {
  std::string method;
  std::size_t n = 0;
  std::size_t replication = 0;
  double angular_error = 0.0;
  double ratio = 0.0;
};

struct BenchmarkTable {
  std::vector<BenchmarkRow> rows;        // one per (method, n)
  std::vector<BenchmarkSample> samples;  // long format, sorted by (method, n, replication)
};

BenchmarkTable run_benchmark(const ExperimentConfig& config);
std::string benchmark_csv(const BenchmarkTable& table);
std::string benchmark_long_csv(const BenchmarkTable& table);
// benchmark.csv and benchmark_long.csv under out_dir.
BenchmarkTable cmd_benchmark(const ExperimentConfig& config, const std::filesystem::path& out_dir);

nlohmann::json decomposition_to_json(const AffinityDecomposition& d);
nlohmann::json cmd_saliency(const MatrixXd& a, double rank_tol, const std::optional<std::filesystem::path>& out_dir);

// Entry point for the executable; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace matchbench::cli
