#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kExe = MATCHBENCH_EXE;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::current_path() / ("cli_it_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int sh(const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + kExe + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Cli, SimulateWritesThousandRows) {
  const auto dir = scratch_dir("rows");
  ASSERT_EQ(sh("simulate --n 1000 --seed 4 --out " + dir.string(), dir / "log"), 0) << slurp(dir / "log");
  std::ifstream in(dir / "sample.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x1,x2,y1");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 1000);
  EXPECT_TRUE(fs::exists(dir / "simulate_summary.json"));
}

TEST(Cli, ByteReproducible) {
  const auto a = scratch_dir("rep_a"), b = scratch_dir("rep_b");
  for (const auto& d : {a, b}) {
    ASSERT_EQ(sh("simulate --n 2000 --seed 17 --out " + d.string(), d / "log1"), 0);
    ASSERT_EQ(sh("estimate --methods cca,ols,spearman,mrs --seed 17 --out " + d.string(), d / "log2"), 0)
        << slurp(d / "log2");
  }
  for (const char* f : {"sample.csv", "simulate_summary.json", "estimates.json", "log2"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("codes");
  std::ofstream(dir / "zero_alpha.json") << R"({"market": {"men": {"components": [{"kind": "gaussian", "param": 1}]},
    "women": {"components": [{"kind": "uniform01"}]}, "alpha": [0], "beta": [1], "phi": "product"}})";
  std::ofstream(dir / "bad_cov.json") << R"({"market": {"men": {"gaussian_cov": [[1, 2], [2, 1]]},
    "women": {"components": [{"kind": "uniform01"}]}, "alpha": [1, 1], "beta": [1], "phi": "product"}})";
  std::ofstream(dir / "zero_affinity.json") << R"({"market": "counterexample", "affinity": [[0], [0]]})";

  EXPECT_EQ(sh("simulate --config " + (dir / "zero_alpha.json").string() + " --out " + dir.string(), dir / "l1"), 2);
  EXPECT_NE(slurp(dir / "l1").find("alpha"), std::string::npos) << slurp(dir / "l1");
  EXPECT_EQ(sh("simulate --config " + (dir / "bad_cov.json").string() + " --out " + dir.string(), dir / "l2"), 2);
  EXPECT_NE(slurp(dir / "l2").find("gaussian_cov"), std::string::npos) << slurp(dir / "l2");
  EXPECT_EQ(sh("simulate --no-such-flag", dir / "l3"), 2);
  EXPECT_EQ(sh("estimate --sample " + (dir / "missing.csv").string() + " --out " + dir.string(), dir / "l4"), 1);

  ASSERT_EQ(sh("simulate --n 100 --out " + dir.string(), dir / "l5"), 0);
  EXPECT_EQ(sh("estimate --methods saliency --config " + (dir / "zero_affinity.json").string() + " --out " + dir.string(),
               dir / "l6"),
            3);
  EXPECT_NE(slurp(dir / "l6").find("numerical failure"), std::string::npos);
  EXPECT_EQ(sh("--help", dir / "l7"), 0);
}

TEST(Cli, CounterexampleAndSaliency) {
  const auto dir = scratch_dir("cx");
  ASSERT_EQ(sh("counterexample --n 100000 --out " + dir.string(), dir / "log"), 0);
  EXPECT_NE(slurp(dir / "log").find("INCONSISTENT"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "counterexample.json"));
  ASSERT_EQ(sh("counterexample --gaussian --n 100000", dir / "glog"), 0);
  EXPECT_NE(slurp(dir / "glog").find("=>  CONSISTENT"), std::string::npos);

  std::ofstream(dir / "a.csv") << "2,1\n4,2\n";
  ASSERT_EQ(sh("saliency --matrix " + (dir / "a.csv").string() + " --out " + dir.string(), dir / "slog"), 0);
  EXPECT_TRUE(fs::exists(dir / "saliency.json"));
}

TEST(Cli, Benchmark) {
  const auto dir = scratch_dir("bench");
  std::ofstream(dir / "cfg.json") << R"({"market": "counterexample", "methods": ["cca", "ols"],
    "sweep": [200, 400], "replications": 2, "seed": 3})";
  ASSERT_EQ(sh("benchmark --config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir / "log"), 0)
      << slurp(dir / "log");
  std::ifstream in(dir / "benchmark.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(fs::exists(dir / "benchmark_long.csv"));
}
