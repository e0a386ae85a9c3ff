#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "matchbench/config.hpp"
#include "matchbench/errors.hpp"
#include "matchbench/io.hpp"
#include "matchbench/market.hpp"

using namespace matchbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("matchbench_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig full_config() {
  ExperimentConfig c;
  MatrixXd sx(2, 2);
  sx << 1.0, 0.3, 0.3, 1.0;
  c.market.men = MarginalSpec::gaussian(sx);
  c.market.women = MarginalSpec::independent({Distribution::exponential(0.5), Distribution::rademacher()});
  c.market.alpha = (VectorXd(2) << 0.1, -2.0 / 3.0).finished();
  c.market.beta = (VectorXd(2) << 3.0, 1e-300).finished();
  c.market.phi = SurplusShape::named("min");
  c.n = 12345;
  c.seed = 18446744073709551615ULL;
  c.methods = {Method::cca, Method::ols, Method::spearman, Method::mrs, Method::saliency};
  c.sweep = {100, 1000};
  c.replications = 3;
  c.affinity = (MatrixXd(2, 2) << 1.0, 0.5, 0.25, 1.0 / 3.0).finished();
  c.rank_tol = 1e-6;
  c.mrs_response = 1;
  c.spearman_restarts = 4;
  c.spearman_grid_resolution = 0.01;
  c.out = "results/x";
  return c;
}

}  // namespace

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(std::stod(format_double(-2.5e-300)), -2.5e-300);
}

TEST(SampleCsv, RoundTrip) {
  const auto s = simulate_market(counterexample_spec(), 500, 3);
  std::stringstream ss;
  write_sample_csv(ss, s);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "x1,x2,y1");
  const auto back = read_sample_csv(ss);
  EXPECT_EQ(back.xs, s.xs);
  EXPECT_EQ(back.ys, s.ys);

  const auto dir = scratch_dir("csv");
  write_sample_csv(dir / "s.csv", s);
  const auto file_back = read_sample_csv(dir / "s.csv");
  EXPECT_EQ(file_back.xs, s.xs);
}

TEST(SampleCsv, Errors) {
  std::stringstream bad_header("a,b\n1,2\n");
  EXPECT_THROW(read_sample_csv(bad_header), ConfigError);
  std::stringstream ragged("x1,y1\n1,2\n3\n");
  try {
    read_sample_csv(ragged);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::stringstream nan("x1,y1\n1,abc\n");
  EXPECT_THROW(read_sample_csv(nan), ConfigError);
  EXPECT_THROW(read_sample_csv(fs::path("/nonexistent/file.csv")), IoError);
}

TEST(MatrixCsv, HeaderSkipped) {
  const auto dir = scratch_dir("matrix");
  std::ofstream(dir / "a.csv") << "c1,c2\n1,2\n3,4.5\n";
  const MatrixXd a = read_matrix_csv(dir / "a.csv");
  EXPECT_EQ(a, (MatrixXd(2, 2) << 1, 2, 3, 4.5).finished());
  std::ofstream(dir / "b.csv") << "1,2\n3\n";
  EXPECT_THROW(read_matrix_csv(dir / "b.csv"), ConfigError);
}

TEST(Config, RoundTrip) {
  const auto c = full_config();
  const auto j = config_to_json(c);
  const auto back = config_from_json(j);
  EXPECT_TRUE(back == c);
  EXPECT_EQ(config_to_json(back).dump(), j.dump());
  // through text
  const auto again = config_from_json(nlohmann::json::parse(j.dump(2)));
  EXPECT_TRUE(again == c);
}

TEST(Config, RoundTripPresets) {
  for (const auto& m : {counterexample_spec(), gaussian_comparison_spec()}) {
    ExperimentConfig c;
    c.market = m;
    EXPECT_TRUE(config_from_json(config_to_json(c)) == c);
  }
  const auto preset = config_from_json(nlohmann::json{{"market", "counterexample"}});
  EXPECT_TRUE(preset.market == counterexample_spec());
  EXPECT_EQ(preset.n, 1000u);
}

TEST(Config, FieldDiagnostics) {
  auto expect_field = [](const nlohmann::json& j, const std::string& field) {
    try {
      config_from_json(j);
      FAIL() << "accepted " << j.dump();
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  auto base = config_to_json(full_config());
  auto j = base;
  j["market"]["alpha"] = {0.0, 0.0};
  expect_field(j, "alpha");
  j = base;
  j["market"]["men"]["gaussian_cov"] = {{1.0, 2.0}, {2.0, 1.0}};
  expect_field(j, "gaussian_cov");
  j = base;
  j["methods"] = {"cca", "lasso"};
  expect_field(j, "methods");
  j = base;
  j["replications"] = 0;
  expect_field(j, "replications");
  j = base;
  j["bogus"] = 1;
  expect_field(j, "bogus");
  j = base;
  j["market"]["women"]["components"][0]["kind"] = "cauchy";
  expect_field(j, "market.women.components[0]");
  j = base;
  j["market"]["women"]["components"][0]["param"] = -1.0;
  expect_field(j, "market.women.components[0]");
  j = base;
  j["n"] = "many";
  expect_field(j, "'n'");
  j = base;
  j["affinity"] = {{1.0, 2.0, 3.0}};
  expect_field(j, "affinity");
  j = base;
  j["market"]["phi"] = "max";
  expect_field(j, "phi");
}

TEST(Config, LoadFromFile) {
  const auto dir = scratch_dir("config");
  std::ofstream(dir / "ok.json") << config_to_json(full_config()).dump(2);
  EXPECT_TRUE(load_config(dir / "ok.json") == full_config());
  std::ofstream(dir / "bad.json") << "{\n  \"market\": \"counterexample\",\n  \"n\": ,\n}\n";
  try {
    load_config(dir / "bad.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config(dir / "missing.json"), IoError);
}

TEST(Json, MatrixRoundTrip) {
  const MatrixXd m = (MatrixXd(2, 3) << 1, 2, 3, 4, 5, 6.25).finished();
  EXPECT_EQ(matrix_from_json(matrix_to_json(m), "m"), m);
  EXPECT_THROW(matrix_from_json(nlohmann::json::array({{1, 2}, {3}}), "m"), ConfigError);
}
