#include "matchbench/config.hpp"

#include <fstream>
#include <limits>
#include <set>

#include "matchbench/errors.hpp"
#include "matchbench/io.hpp"

namespace matchbench {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

std::vector<double> vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) field_error(field, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) field_error(field + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

VectorXd eigen_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> std_vector(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

template <typename T>
T get_count(const json& j, const std::string& field, T min_value) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) field_error(field, "expected an integer");
  // read through unsigned so seeds above 2^63 survive
  if (!j.is_number_unsigned() && j.get<long long>() < 0) {
    field_error(field, "must be at least " + std::to_string(min_value));
  }
  const auto v = j.get<unsigned long long>();
  if (v < static_cast<unsigned long long>(min_value)) {
    field_error(field, "must be at least " + std::to_string(min_value));
  }
  if (v > static_cast<unsigned long long>(std::numeric_limits<T>::max())) field_error(field, "too large");
  return static_cast<T>(v);
}

void check_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) field_error(field.empty() ? key : field + "." + key, "unknown key");
  }
}

MarginalSpec marginal_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object with 'components' or 'gaussian_cov'");
  check_keys(j, field, {"components", "gaussian_cov"});
  const bool has_comp = j.contains("components");
  const bool has_cov = j.contains("gaussian_cov");
  if (has_comp == has_cov) field_error(field, "give exactly one of 'components' or 'gaussian_cov'");
  MarginalSpec m;
  if (has_comp) {
    const json& c = j["components"];
    if (!c.is_array() || c.empty()) field_error(field + ".components", "expected a non-empty array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      m.components.push_back(distribution_from_json(c[i], field + ".components[" + std::to_string(i) + "]"));
    }
  } else {
    m.gaussian_cov = matrix_from_json(j["gaussian_cov"], field + ".gaussian_cov");
  }
  try {
    m.validate(field);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config field '") + field + "': " + e.what());
  }
  return m;
}

json marginal_to_json(const MarginalSpec& m) {
  if (m.gaussian_cov) return {{"gaussian_cov", matrix_to_json(*m.gaussian_cov)}};
  json comps = json::array();
  for (const auto& d : m.components) comps.push_back(distribution_to_json(d));
  return {{"components", comps}};
}

}  // namespace

json distribution_to_json(const Distribution& d) {
  json j{{"kind", to_string(d.kind())}};
  if (d.has_param()) j["param"] = d.param();
  return j;
}

Distribution distribution_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    field_error(field, "expected {\"kind\": \"...\", \"param\": ...}");
  }
  check_keys(j, field, {"kind", "param"});
  DistKind kind;
  try {
    kind = dist_kind_from_string(j["kind"].get<std::string>());
  } catch (const ConfigError& e) {
    field_error(field + ".kind", e.what());
  }
  double param = 1.0;
  if (j.contains("param")) {
    if (!j["param"].is_number()) field_error(field + ".param", "expected a number");
    param = j["param"].get<double>();
  }
  try {
    switch (kind) {
      case DistKind::gaussian: return Distribution::gaussian(param);
      case DistKind::exponential: return Distribution::exponential(param);
      case DistKind::rademacher: return Distribution::rademacher();
      case DistKind::uniform01: return Distribution::uniform01();
    }
  } catch (const ConfigError& e) {
    field_error(field + ".param", e.what());
  }
  field_error(field, "unsupported distribution");
}

json market_to_json(const MarketSpec& spec) {
  return {{"men", marginal_to_json(spec.men)},
          {"women", marginal_to_json(spec.women)},
          {"alpha", std_vector(spec.alpha)},
          {"beta", std_vector(spec.beta)},
          {"phi", spec.phi.name()}};
}

MarketSpec market_from_json(const json& j, const std::string& field) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "counterexample") return counterexample_spec();
    if (name == "gaussian") return gaussian_comparison_spec();
    field_error(field, "unknown preset '" + name + "' (expected counterexample or gaussian)");
  }
  if (!j.is_object()) field_error(field, "expected an object or a preset name");
  check_keys(j, field, {"men", "women", "alpha", "beta", "phi"});
  for (const char* key : {"men", "women", "alpha", "beta"}) {
    if (!j.contains(key)) field_error(field + "." + key, "missing");
  }
  MarketSpec spec;
  spec.men = marginal_from_json(j["men"], field + ".men");
  spec.women = marginal_from_json(j["women"], field + ".women");
  spec.alpha = eigen_vector(vector_from_json(j["alpha"], field + ".alpha"));
  spec.beta = eigen_vector(vector_from_json(j["beta"], field + ".beta"));
  if (j.contains("phi")) {
    if (!j["phi"].is_string()) field_error(field + ".phi", "expected a surplus shape name");
    try {
      spec.phi = SurplusShape::named(j["phi"].get<std::string>());
    } catch (const ConfigError& e) {
      field_error(field + ".phi", e.what());
    }
  }
  if (spec.alpha.isZero(0.0)) field_error(field + ".alpha", "alpha must not be the zero vector");
  if (spec.beta.isZero(0.0)) field_error(field + ".beta", "beta must not be the zero vector");
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("config field '" + field + "': " + e.what());
  }
  return spec;
}

void ExperimentConfig::validate() const {
  market.validate();
  if (methods.empty()) throw ConfigError("config field 'methods': must list at least one method");
  if (replications < 1) throw ConfigError("config field 'replications': must be at least 1");
  if (n < 2) throw ConfigError("config field 'n': must be at least 2");
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (sweep[i] < 2) throw ConfigError("config field 'sweep[" + std::to_string(i) + "]': must be at least 2");
  }
  if (affinity && (affinity->rows() != market.dx() || affinity->cols() != market.dy())) {
    throw ConfigError("config field 'affinity': expected a " + std::to_string(market.dx()) + " x " +
                      std::to_string(market.dy()) + " matrix");
  }
  if (mrs_response < 0 || mrs_response >= market.dy()) {
    throw ConfigError("config field 'mrs_response': out of range for dy = " + std::to_string(market.dy()));
  }
  if (!(rank_tol > 0.0)) throw ConfigError("config field 'rank_tol': must be positive");
  if (spearman_restarts < 1) throw ConfigError("config field 'spearman.restarts': must be at least 1");
  if (!(spearman_grid_resolution > 0.0)) throw ConfigError("config field 'spearman.grid_resolution': must be positive");
}

json config_to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  json j{{"market", market_to_json(c.market)},
         {"n", c.n},
         {"seed", c.seed},
         {"methods", methods},
         {"sweep", c.sweep},
         {"replications", c.replications},
         {"rank_tol", c.rank_tol},
         {"mrs_response", c.mrs_response},
         {"spearman", {{"restarts", c.spearman_restarts}, {"grid_resolution", c.spearman_grid_resolution}}},
         {"out", c.out}};
  if (c.affinity) j["affinity"] = matrix_to_json(*c.affinity);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  check_keys(j, "", {"market", "n", "seed", "methods", "sweep", "replications", "affinity", "rank_tol",
                     "mrs_response", "spearman", "out"});
  ExperimentConfig c;
  if (!j.contains("market")) field_error("market", "missing");
  c.market = market_from_json(j["market"]);
  if (j.contains("n")) c.n = get_count<std::size_t>(j["n"], "n", 2);
  if (j.contains("seed")) c.seed = get_count<std::uint64_t>(j["seed"], "seed", 0);
  if (j.contains("methods")) {
    const json& m = j["methods"];
    if (!m.is_array() || m.empty()) field_error("methods", "expected a non-empty array of method names");
    c.methods.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i].is_string()) field_error("methods[" + std::to_string(i) + "]", "expected a string");
      try {
        c.methods.push_back(method_from_string(m[i].get<std::string>()));
      } catch (const ConfigError& e) {
        field_error("methods[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (!s.is_array()) field_error("sweep", "expected an array of sample sizes");
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.sweep.push_back(get_count<std::size_t>(s[i], "sweep[" + std::to_string(i) + "]", 2));
    }
  }
  if (j.contains("replications")) c.replications = get_count<std::size_t>(j["replications"], "replications", 1);
  if (j.contains("affinity")) c.affinity = matrix_from_json(j["affinity"], "affinity");
  if (j.contains("rank_tol")) {
    if (!j["rank_tol"].is_number()) field_error("rank_tol", "expected a number");
    c.rank_tol = j["rank_tol"].get<double>();
  }
  if (j.contains("mrs_response")) c.mrs_response = get_count<Eigen::Index>(j["mrs_response"], "mrs_response", 0);
  if (j.contains("spearman")) {
    const json& s = j["spearman"];
    if (!s.is_object()) field_error("spearman", "expected an object");
    check_keys(s, "spearman", {"restarts", "grid_resolution"});
    if (s.contains("restarts")) c.spearman_restarts = get_count<int>(s["restarts"], "spearman.restarts", 1);
    if (s.contains("grid_resolution")) {
      if (!s["grid_resolution"].is_number()) field_error("spearman.grid_resolution", "expected a number");
      c.spearman_grid_resolution = s["grid_resolution"].get<double>();
    }
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) field_error("out", "expected a directory path");
    c.out = j["out"].get<std::string>();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

bool operator==(const MarketSpec& a, const MarketSpec& b) {
  return a.men == b.men && a.women == b.women && a.alpha.size() == b.alpha.size() && a.alpha == b.alpha &&
         a.beta.size() == b.beta.size() && a.beta == b.beta && a.phi.name() == b.phi.name();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const bool same_affinity =
      a.affinity.has_value() == b.affinity.has_value() &&
      (!a.affinity || (a.affinity->rows() == b.affinity->rows() && a.affinity->cols() == b.affinity->cols() &&
                       *a.affinity == *b.affinity));
  return a.market == b.market && a.n == b.n && a.seed == b.seed && a.methods == b.methods && a.sweep == b.sweep &&
         a.replications == b.replications && same_affinity && a.rank_tol == b.rank_tol &&
         a.mrs_response == b.mrs_response && a.spearman_restarts == b.spearman_restarts &&
         a.spearman_grid_resolution == b.spearman_grid_resolution && a.out == b.out;
}

}  // namespace matchbench
