#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/estimators.hpp"
#include "matchbench/market.hpp"

namespace matchbench {

/// Everything a CLI run needs. JSON form:
///
///   {
///     "market": {
///       "men":   {"components": [{"kind": "rademacher"}, {"kind": "exponential", "param": 1}]},
///       "women": {"gaussian_cov": [[1, 0.2], [0.2, 1]]},
///       "alpha": [0.7071, 0.7071], "beta": [1, 0], "phi": "product"
///     },
///     "n": 1000, "seed": 7, "methods": ["cca", "spearman"],
///     "sweep": [1000, 10000], "replications": 20,
///     "affinity": [[...]], "rank_tol": 1e-8, "mrs_response": 0,
///     "spearman": {"restarts": 32, "grid_resolution": 0.001},
///     "out": "results"
///   }
///
/// "market" may also be the string "counterexample" or "gaussian".
struct ExperimentConfig {
  MarketSpec market;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::vector<Method> methods{Method::cca};
  std::vector<std::size_t> sweep;
  std::size_t replications = 1;
  std::optional<MatrixXd> affinity;
  double rank_tol = 1e-8;
  Eigen::Index mrs_response = 0;
  int spearman_restarts = 32;
  double spearman_grid_resolution = 1e-3;
  std::string out = "out";

  void validate() const;
};

nlohmann::json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j, const std::string& field);

nlohmann::json market_to_json(const MarketSpec& spec);
MarketSpec market_from_json(const nlohmann::json& j, const std::string& field = "market");

nlohmann::json config_to_json(const ExperimentConfig& c);
// Throws ConfigError naming the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

bool operator==(const MarketSpec& a, const MarketSpec& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace matchbench
