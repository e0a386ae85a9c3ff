#include "matchbench/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/erf.hpp>

#include "matchbench/errors.hpp"

namespace matchbench {

std::string to_string(DistKind kind) {
  switch (kind) {
    case DistKind::gaussian: return "gaussian";
    case DistKind::rademacher: return "rademacher";
    case DistKind::exponential: return "exponential";
    case DistKind::uniform01: return "uniform01";
  }
  return "unknown";
}

DistKind dist_kind_from_string(const std::string& name) {
  if (name == "gaussian") return DistKind::gaussian;
  if (name == "rademacher") return DistKind::rademacher;
  if (name == "exponential") return DistKind::exponential;
  if (name == "uniform01") return DistKind::uniform01;
  throw ConfigError("unknown distribution kind '" + name +
                    "' (expected gaussian, rademacher, exponential or uniform01)");
}

Distribution Distribution::gaussian(double sd) {
  if (!(sd > 0.0) || !std::isfinite(sd)) throw ConfigError("gaussian sd must be positive");
  return {DistKind::gaussian, sd};
}

Distribution Distribution::rademacher() { return {DistKind::rademacher, 0.0}; }

Distribution Distribution::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("exponential rate must be positive");
  return {DistKind::exponential, rate};
}

Distribution Distribution::uniform01() { return {DistKind::uniform01, 0.0}; }

double Distribution::mean() const {
  switch (kind_) {
    case DistKind::gaussian:
    case DistKind::rademacher: return 0.0;
    case DistKind::exponential: return 1.0 / param_;
    case DistKind::uniform01: return 0.5;
  }
  return 0.0;
}

double Distribution::variance() const {
  switch (kind_) {
    case DistKind::gaussian: return param_ * param_;
    case DistKind::rademacher: return 1.0;
    case DistKind::exponential: return 1.0 / (param_ * param_);
    case DistKind::uniform01: return 1.0 / 12.0;
  }
  return 0.0;
}

double Distribution::cdf(double z) const {
  switch (kind_) {
    case DistKind::gaussian:
      return 0.5 * std::erfc(-z / (param_ * std::numbers::sqrt2));
    case DistKind::rademacher:
      if (z < -1.0) return 0.0;
      return z < 1.0 ? 0.5 : 1.0;
    case DistKind::exponential:
      return z <= 0.0 ? 0.0 : -std::expm1(-param_ * z);
    case DistKind::uniform01:
      return std::clamp(z, 0.0, 1.0);
  }
  return 0.0;
}

double Distribution::cdf_left(double z) const {
  if (kind_ != DistKind::rademacher) return cdf(z);
  if (z <= -1.0) return 0.0;
  return z <= 1.0 ? 0.5 : 1.0;
}

double Distribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile probability must lie in (0, 1)");
  switch (kind_) {
    case DistKind::gaussian:
      return -param_ * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    case DistKind::rademacher:
      return p <= 0.5 ? -1.0 : 1.0;
    case DistKind::exponential:
      return -std::log1p(-p) / param_;
    case DistKind::uniform01:
      return p;
  }
  return 0.0;
}

double Distribution::survival(double z) const {
  switch (kind_) {
    case DistKind::gaussian:
      return 0.5 * std::erfc(z / (param_ * std::numbers::sqrt2));
    case DistKind::rademacher:
      return 1.0 - cdf(z);
    case DistKind::exponential:
      return z <= 0.0 ? 1.0 : std::exp(-param_ * z);
    case DistKind::uniform01:
      return 1.0 - std::clamp(z, 0.0, 1.0);
  }
  return 0.0;
}

double Distribution::quantile_upper(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile probability must lie in (0, 1)");
  switch (kind_) {
    case DistKind::gaussian:
      return param_ * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
    case DistKind::rademacher:
      return q < 0.5 ? 1.0 : -1.0;
    case DistKind::exponential:
      return -std::log(q) / param_;
    case DistKind::uniform01:
      return 1.0 - q;
  }
  return 0.0;
}

double Distribution::draw(const CounterStream& stream, std::uint64_t index) const {
  if (kind_ == DistKind::rademacher) return (stream.bits(index) >> 63) ? 1.0 : -1.0;
  return quantile(stream.uniform(index));
}

std::vector<double> Distribution::sample(std::size_t n, const CounterStream& stream) const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = draw(stream, i);
  return out;
}

std::vector<double> Distribution::sample(std::size_t n, std::uint64_t seed) const {
  return sample(n, CounterStream(seed));
}

double mixture_cdf_xhat(double x) {
  const auto g = Distribution::exponential(1.0);
  const double s = x * std::numbers::sqrt2;
  return 0.5 * (g.cdf(s + 1.0) + g.cdf(s - 1.0));
}

EmpiricalCDF::EmpiricalCDF(std::span<const double> values) : sorted_(values.begin(), values.end()) {
  if (sorted_.empty()) throw ConfigError("empirical CDF needs at least one value");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCDF::operator()(double z) const {
  const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), z);
  const auto hi = std::upper_bound(lo, sorted_.end(), z);
  const double below = static_cast<double>(lo - sorted_.begin());
  const double equal = static_cast<double>(hi - lo);
  const double rank = equal > 0 ? below + 0.5 * (equal + 1.0) : below + 0.5;
  return rank / static_cast<double>(sorted_.size() + 1);
}

EmpiricalCDF empirical_cdf(std::span<const double> values) { return EmpiricalCDF(values); }

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

}  // namespace matchbench
