#include <gtest/gtest.h>

#include <cmath>

#include "matchbench/errors.hpp"
#include "matchbench/estimators.hpp"
#include "matchbench/market.hpp"

using namespace matchbench;

namespace {

MatchedSample linear_sample(std::size_t n, std::uint64_t seed) {
  MarketSpec g = gaussian_comparison_spec();
  g.alpha << 1.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0);
  auto s = simulate_market(g, n, seed);
  s.ys = s.xs * g.alpha;
  return s;
}

}  // namespace

TEST(Bandwidth, Silverman) {
  MatrixXd xs(4, 2);
  xs << -1, 0, 1, 0, -1, 2, 1, 2;
  const VectorXd h = silverman_bandwidths(xs);
  EXPECT_NEAR(h(0), 1.06 * 1.0 * std::pow(4.0, -0.2), 1e-15);
  EXPECT_NEAR(h(1), 1.06 * 1.0 * std::pow(4.0, -0.2), 1e-15);
}

TEST(KernelRegressionTest, ConstantResponse) {
  const auto s = linear_sample(500, 1);
  const KernelRegression reg(s.xs, VectorXd::Constant(500, 2.5), silverman_bandwidths(s.xs));
  const VectorXd x = VectorXd::Constant(2, 0.3);
  EXPECT_NEAR(reg(x), 2.5, 1e-12);
  EXPECT_LT(reg.gradient(x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KernelRegressionTest, AnalyticMatchesFiniteDifference) {
  const auto s = linear_sample(2000, 2);
  const KernelRegression reg(s.xs, s.ys.col(0), silverman_bandwidths(s.xs));
  for (const auto& x : {VectorXd::Zero(2).eval(), (VectorXd(2) << 0.5, -0.7).finished(),
                        (VectorXd(2) << -1.2, 1.1).finished()}) {
    const VectorXd g = reg.gradient(x);
    const VectorXd fd = reg.gradient_fd(x, 1e-4);
    EXPECT_LT((g - fd).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(KernelRegressionTest, DifferencingMatchesShiftedRefit) {
  // moving the data by d and evaluating at x + d gives the same fit
  const auto s = linear_sample(1000, 3);
  const VectorXd h = silverman_bandwidths(s.xs);
  const KernelRegression reg(s.xs, s.ys.col(0), h);
  const VectorXd x = (VectorXd(2) << 0.2, 0.1).finished();
  for (Eigen::Index j = 0; j < 2; ++j) {
    const double step = 0.5 * h(j);
    MatrixXd up = s.xs, down = s.xs;
    up.col(j).array() -= step;
    down.col(j).array() += step;
    const KernelRegression ru(up, s.ys.col(0), h), rd(down, s.ys.col(0), h);
    const double refit = (ru(x) - rd(x)) / (2.0 * step);
    EXPECT_NEAR(reg.gradient_fd(x, 0.5)(j), refit, 1e-6);
  }
}

TEST(KernelRegressionTest, Errors) {
  const MatrixXd xs = MatrixXd::Ones(3, 2);
  EXPECT_THROW(KernelRegression(xs, VectorXd::Ones(2), VectorXd::Ones(2)), ConfigError);
  EXPECT_THROW(KernelRegression(xs, VectorXd::Ones(3), VectorXd::Ones(3)), ConfigError);
  EXPECT_THROW(KernelRegression(xs, VectorXd::Ones(3), VectorXd::Zero(2)), NumericalError);
}

TEST(Mrs, LinearIndexRatio) {
  const auto r = mrs_estimate(linear_sample(10000, 3), 0);
  EXPECT_NEAR(r.ratios(0, 1), 0.5, 0.1);
  EXPECT_NEAR(r.ratios(1, 0), 2.0, 0.4);
  EXPECT_FALSE(r.unstable(0, 1));
  EXPECT_EQ(r.eval_points.rows(), 100);
  EXPECT_EQ(r.ratios(0, 0), 1.0);
  EXPECT_EQ(r.result.method, Method::mrs);
  EXPECT_NEAR(r.result.alpha(1) / r.result.alpha(0), 2.0, 0.4);
  EXPECT_EQ(r.result.diagnostics["eval_points"].get<int>(), 100);
}

TEST(Mrs, IndependentResponseFlagged) {
  auto s = linear_sample(5000, 4);
  s.ys.col(0) = VectorXd(Eigen::Map<const VectorXd>(Distribution::uniform01().sample(5000, 99).data(), 5000));
  const auto r = mrs_estimate(s, 0);
  EXPECT_TRUE(r.unstable(0, 1));
  EXPECT_TRUE(r.unstable(1, 0));
}

TEST(Mrs, AtomicAttributeFlagged) {
  // X1 is two-point: the regression is flat in x1 at the data, so alpha2/alpha1 cannot be formed
  const auto r = mrs_estimate(simulate_market(counterexample_spec(), 10000, 7), 0);
  EXPECT_TRUE(r.unstable(1, 0));
  EXPECT_FALSE(r.unstable(0, 1));
}

TEST(Mrs, ExplicitEvalPointsAndHull) {
  const auto s = linear_sample(3000, 5);
  MatrixXd pts(2, 2);
  pts << 0.0, 0.0, 50.0, 0.0;
  MrsOptions opt;
  const auto r = mrs_estimate(s, 0, opt, &pts);
  ASSERT_EQ(r.outside_hull.size(), 2u);
  EXPECT_FALSE(r.outside_hull[0]);
  EXPECT_TRUE(r.outside_hull[1]);
  const MatrixXd bad = MatrixXd::Zero(1, 3);
  EXPECT_THROW(mrs_estimate(s, 0, opt, &bad), ConfigError);
  EXPECT_THROW(mrs_estimate(s, 1), ConfigError);
}

TEST(Mrs, Deterministic) {
  const auto s = linear_sample(3000, 6);
  EXPECT_EQ(mrs_estimate(s, 0).gradients, mrs_estimate(s, 0).gradients);
}

TEST(KernelRegressionTest, NoiseIsCoefficientNorm) {
  // gradient_fd is linear in ys: summing squared responses to unit ys gives the noise norm
  const auto s = linear_sample(30, 8);
  const VectorXd h = silverman_bandwidths(s.xs);
  const VectorXd x = (VectorXd(2) << 0.1, -0.2).finished();
  VectorXd acc = VectorXd::Zero(2);
  for (Eigen::Index i = 0; i < 30; ++i) {
    const KernelRegression unit(s.xs, VectorXd::Unit(30, i), h);
    acc += unit.gradient_fd(x, 0.5).array().square().matrix();
  }
  const KernelRegression reg(s.xs, s.ys.col(0), h);
  EXPECT_LT((reg.gradient_fd_noise(x, 0.5) - acc.cwiseSqrt()).cwiseAbs().maxCoeff(), 1e-10);
}
