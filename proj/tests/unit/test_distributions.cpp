#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "matchbench/distributions.hpp"
#include "matchbench/errors.hpp"
#include "matchbench/rng.hpp"

using namespace matchbench;

namespace {

const double kE2 = std::exp(-2.0);

std::vector<Distribution> all_kinds() {
  return {Distribution::gaussian(1.0), Distribution::gaussian(2.5), Distribution::rademacher(),
          Distribution::exponential(1.0), Distribution::exponential(0.5), Distribution::uniform01()};
}

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(Sample, RademacherSupport) {
  const auto v = Distribution::rademacher().sample(4, 11);
  ASSERT_EQ(v.size(), 4u);
  for (double x : v) EXPECT_TRUE(x == 1.0 || x == -1.0);
}

TEST(Sample, ExponentialMean) {
  const auto v = Distribution::exponential(1.0).sample(1000000, 3);
  EXPECT_NEAR(sample_mean(v), 1.0, 0.005);
}

TEST(Sample, UniformVariance) {
  const auto v = Distribution::uniform01().sample(1000000, 5);
  EXPECT_NEAR(sample_variance(v), 1.0 / 12.0, 0.001);
}

TEST(Sample, Deterministic) {
  for (const auto& d : all_kinds()) {
    EXPECT_EQ(d.sample(257, 42), d.sample(257, 42));
    EXPECT_NE(d.sample(257, 42), d.sample(257, 43));
  }
}

TEST(Sample, StreamPrefixStable) {
  // draw i depends only on (stream, i)
  const auto d = Distribution::gaussian(1.0);
  const auto a = d.sample(10, 9);
  const auto b = d.sample(100, 9);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
}

TEST(Sample, MomentsMatch) {
  for (const auto& d : all_kinds()) {
    const auto v = d.sample(200000, 17);
    const double se = std::sqrt(d.variance() / static_cast<double>(v.size()));
    EXPECT_NEAR(sample_mean(v), d.mean(), 5.0 * se) << to_string(d.kind());
    EXPECT_NEAR(sample_variance(v) / d.variance(), 1.0, 0.02) << to_string(d.kind());
  }
}

TEST(Cdf, ExponentialExamples) {
  const auto g = Distribution::exponential(1.0);
  EXPECT_EQ(g.cdf(0.0), 0.0);
  EXPECT_NEAR(g.cdf(2.0), 1.0 - kE2, 1e-15);
  EXPECT_NEAR(g.cdf(2.0), 0.8646647, 1e-7);
  EXPECT_EQ(g.cdf(-1.0), 0.0);
}

TEST(Cdf, RademacherRightContinuous) {
  const auto r = Distribution::rademacher();
  EXPECT_EQ(r.cdf(-1.0), 0.5);
  EXPECT_EQ(r.cdf_left(-1.0), 0.0);
  EXPECT_EQ(r.cdf(0.0), 0.5);
  EXPECT_EQ(r.cdf(1.0), 1.0);
  EXPECT_EQ(r.cdf_left(1.0), 0.5);
}

TEST(Cdf, Limits) {
  for (const auto& d : all_kinds()) {
    EXPECT_NEAR(d.cdf(-1e6), 0.0, 1e-15);
    EXPECT_NEAR(d.cdf(1e6), 1.0, 1e-15);
  }
}

TEST(Quantile, Examples) {
  EXPECT_EQ(Distribution::uniform01().quantile(0.5), 0.5);
  EXPECT_NEAR(Distribution::exponential(1.0).quantile(1.0 - kE2), 2.0, 1e-12);
  EXPECT_EQ(Distribution::rademacher().quantile(0.25), -1.0);
  EXPECT_EQ(Distribution::rademacher().quantile(0.5), -1.0);
  EXPECT_EQ(Distribution::rademacher().quantile(0.75), 1.0);
  EXPECT_NEAR(Distribution::gaussian(2.0).quantile(0.975), 2.0 * 1.959963984540054, 1e-12);
}

TEST(Quantile, OutOfRange) {
  for (const auto& d : all_kinds()) {
    EXPECT_THROW(d.quantile(0.0), ConfigError);
    EXPECT_THROW(d.quantile(1.0), ConfigError);
    EXPECT_THROW(d.quantile(-0.1), ConfigError);
    EXPECT_THROW(d.quantile(std::nan("")), ConfigError);
  }
}

TEST(Quantile, UpperTail) {
  const auto g = Distribution::gaussian(1.0);
  EXPECT_NEAR(g.quantile_upper(1e-20), -g.quantile(1e-20), 1e-12);
  EXPECT_NEAR(g.survival(9.0), g.cdf(-9.0), 1e-30);
  const auto e = Distribution::exponential(2.0);
  EXPECT_NEAR(e.quantile_upper(std::exp(-30.0)), 15.0, 1e-12);
  for (const auto& d : all_kinds()) {
    for (double z : {-2.0, -0.3, 0.0, 0.4, 1.0, 3.0}) EXPECT_NEAR(d.survival(z), 1.0 - d.cdf(z), 1e-15);
    if (d.kind() != DistKind::rademacher) {
      for (double q : {0.01, 0.3, 0.5, 0.9}) EXPECT_NEAR(d.quantile_upper(q), d.quantile(1.0 - q), 1e-12);
    }
  }
}

TEST(Property, CdfMonotoneAndQuantileInverts) {
  const CounterStream s(2024);
  for (const auto& d : all_kinds()) {
    std::vector<double> z(10000);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = -8.0 + 16.0 * s.uniform(i);
    std::sort(z.begin(), z.end());
    for (std::size_t i = 1; i < z.size(); ++i) ASSERT_LE(d.cdf(z[i - 1]), d.cdf(z[i]));
    for (double v : z) {
      const double p = d.cdf(v);
      ASSERT_GE(p, 0.0);
      ASSERT_LE(p, 1.0);
    }
    if (!d.is_continuous()) continue;
    // continuous interiors: where the density is not vanishingly small
    for (double v : z) {
      const double p = d.cdf(v);
      if (!(p > 1e-6 && p < 1.0 - 1e-6)) continue;
      ASSERT_NEAR(d.quantile(p), v, 1e-10) << to_string(d.kind()) << " at " << v;
    }
  }
}

TEST(Ecdf, Examples) {
  const std::vector<double> a{3, 1, 2};
  EXPECT_DOUBLE_EQ(empirical_cdf(a)(2.0), 0.5);
  const std::vector<double> b{1, 1, 2};
  EXPECT_DOUBLE_EQ(empirical_cdf(b)(1.0), 0.375);
  const std::vector<double> c{5};
  EXPECT_DOUBLE_EQ(empirical_cdf(c)(5.0), 0.5);
}

TEST(Ecdf, EmptyThrows) {
  const std::vector<double> none;
  EXPECT_THROW(empirical_cdf(none), ConfigError);
}

TEST(Ecdf, OrderStatistics) {
  const auto v = Distribution::gaussian(1.0).sample(501, 8);
  const auto F = empirical_cdf(v);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    ASSERT_DOUBLE_EQ(F(sorted[k]), static_cast<double>(k + 1) / 502.0);
  }
  double prev = 0.0;
  for (double q = -5.0; q <= 5.0; q += 0.01) {
    const double f = F(q);
    ASSERT_GT(f, 0.0);
    ASSERT_LT(f, 1.0);
    ASSERT_GE(f, prev);
    prev = f;
  }
}

TEST(Ecdf, MeanIsHalf) {
  for (std::size_t n : {1u, 2u, 7u, 1000u}) {
    const auto v = Distribution::exponential(1.0).sample(n, n);
    const auto F = empirical_cdf(v);
    double s = 0.0;
    for (double x : v) s += F(x);
    EXPECT_NEAR(s / static_cast<double>(n), 0.5, 1e-14);
  }
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v{2.0, 1.0, 2.0, 3.0, 2.0};
  const auto r = average_ranks(v);
  EXPECT_EQ(r, (std::vector<double>{3.0, 1.0, 3.0, 5.0, 3.0}));
}

TEST(Mixture, Examples) {
  EXPECT_NEAR(mixture_cdf_xhat(-1.0 / std::numbers::sqrt2), 0.0, 1e-15);
  EXPECT_NEAR(mixture_cdf_xhat(1.0 / std::numbers::sqrt2), 0.5 * (1.0 - kE2), 1e-15);
  EXPECT_NEAR(mixture_cdf_xhat(1.0 / std::numbers::sqrt2), 0.4323324, 1e-7);
  EXPECT_NEAR(mixture_cdf_xhat(1e3), 1.0, 1e-15);
  EXPECT_EQ(mixture_cdf_xhat(-10.0), 0.0);
}

TEST(Mixture, MatchesMonteCarlo) {
  const std::size_t n = 1000000;
  const CounterStream root(77);
  const auto x1 = Distribution::rademacher().sample(n, root.split(0));
  const auto x2 = Distribution::exponential(1.0).sample(n, root.split(1));
  std::vector<double> xhat(n);
  for (std::size_t i = 0; i < n; ++i) xhat[i] = (x1[i] + x2[i]) / std::numbers::sqrt2;
  std::sort(xhat.begin(), xhat.end());
  for (double x : {-0.5, 0.0, 0.5, 1.0, 1.5, 2.5, 4.0}) {
    const double p = mixture_cdf_xhat(x);
    const auto below = std::upper_bound(xhat.begin(), xhat.end(), x) - xhat.begin();
    const double phat = static_cast<double>(below) / static_cast<double>(n);
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(n));
    EXPECT_NEAR(phat, p, 3.0 * se) << "x = " << x;
  }
}

TEST(Parse, KindNames) {
  for (const auto& d : all_kinds()) EXPECT_EQ(dist_kind_from_string(to_string(d.kind())), d.kind());
  EXPECT_THROW(dist_kind_from_string("cauchy"), ConfigError);
}

TEST(Construct, InvalidParams) {
  EXPECT_THROW(Distribution::gaussian(0.0), ConfigError);
  EXPECT_THROW(Distribution::gaussian(-1.0), ConfigError);
  EXPECT_THROW(Distribution::exponential(0.0), ConfigError);
}
