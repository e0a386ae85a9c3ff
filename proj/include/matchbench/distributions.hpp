#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "matchbench/rng.hpp"

namespace matchbench {

enum class DistKind { gaussian, rademacher, exponential, uniform01 };

std::string to_string(DistKind kind);
DistKind dist_kind_from_string(const std::string& name);

/// Univariate marginal used for one attribute column.
///
/// gaussian(sd) is centered; rademacher is +-1 with probability 1/2 each;
/// exponential(rate) lives on [0, inf) and its CDF is extended by 0 on the
/// negative axis; uniform01 lives on [0, 1].
class Distribution {
 public:
  static Distribution gaussian(double sd = 1.0);
  static Distribution rademacher();
  static Distribution exponential(double rate = 1.0);
  static Distribution uniform01();

  DistKind kind() const { return kind_; }
  // sd for gaussian, rate for exponential, 0 otherwise.
  double param() const { return param_; }
  bool has_param() const { return kind_ == DistKind::gaussian || kind_ == DistKind::exponential; }
  bool is_continuous() const { return kind_ != DistKind::rademacher; }

  double mean() const;
  double variance() const;

  double cdf(double z) const;
  // P(Z < z); differs from cdf only at atoms.
  double cdf_left(double z) const;
  // Smallest z with cdf(z) >= p. Throws ConfigError unless 0 < p < 1.
  double quantile(double p) const;
  // P(Z > z), accurate in the upper tail
  double survival(double z) const;
  // quantile(1 - q) without the cancellation
  double quantile_upper(double q) const;

  // Draw number `index` of the stream; a pure function of (stream, index).
  double draw(const CounterStream& stream, std::uint64_t index) const;
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;
  std::vector<double> sample(std::size_t n, const CounterStream& stream) const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  Distribution(DistKind kind, double param) : kind_(kind), param_(param) {}

  DistKind kind_;
  double param_;
};

// CDF of (X1 + X2)/sqrt(2) for X1 rademacher and X2 exponential(1):
// 0.5 * (G(x sqrt2 + 1) + G(x sqrt2 - 1)) with G the exponential(1) CDF.
double mixture_cdf_xhat(double x);

/// Empirical CDF with the r/(n+1) convention; tied values share the average
/// rank of their block. Queries between sample points return
/// (count below + 1/2)/(n+1), which keeps the map nondecreasing and inside
/// (0, 1).
class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(std::span<const double> values);

  double operator()(double z) const;
  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_values() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCDF empirical_cdf(std::span<const double> values);

// Average ranks (1-based) of values; ties get the mean rank of their block.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace matchbench
