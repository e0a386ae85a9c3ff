#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "matchbench/distributions.hpp"
#include "matchbench/rng.hpp"

namespace matchbench {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Attribute distribution for one side of the market: either independent
/// univariate components or a single centered Gaussian with covariance.
struct MarginalSpec {
  std::vector<Distribution> components;
  std::optional<MatrixXd> gaussian_cov;

  static MarginalSpec independent(std::vector<Distribution> comps);
  static MarginalSpec gaussian(MatrixXd cov);

  Eigen::Index dim() const;
  VectorXd means() const;
  MatrixXd covariance() const;
  bool is_gaussian() const;

  // n x dim draws; column j uses stream.split(j).
  MatrixXd sample(std::size_t n, const CounterStream& stream) const;

  // Throws ConfigError naming `side` when the description is unusable.
  void validate(const std::string& side) const;

};

/// phi(s, t) applied to the two indices. `product` is s * t; custom shapes
/// carry a name (for serialization) and a callable.
class SurplusShape {
 public:
  enum class Kind { product, custom };

  static SurplusShape product();
  static SurplusShape custom(std::string name, std::function<double(double, double)> fn);
  // Named shapes understood by the config reader: "product", "min".
  static SurplusShape named(const std::string& name);

  double operator()(double s, double t) const;
  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  Kind kind_ = Kind::product;
  std::string name_ = "product";
  std::function<double(double, double)> fn_;
};

struct MarketSpec {
  MarginalSpec men;
  MarginalSpec women;
  VectorXd alpha;
  VectorXd beta;
  SurplusShape phi = SurplusShape::product();

  Eigen::Index dx() const { return men.dim(); }
  Eigen::Index dy() const { return women.dim(); }

  void validate() const;
};

/// n couples; row i of xs is matched with row i of ys.
struct MatchedSample {
  MatrixXd xs;
  MatrixXd ys;

  Eigen::Index n() const { return xs.rows(); }
  Eigen::Index dx() const { return xs.cols(); }
  Eigen::Index dy() const { return ys.cols(); }
};

// Rademacher(X1) and exponential(1)(X2) men, uniform[0,1] women,
// alpha = (1, 1)/sqrt(2), beta = 1.
MarketSpec counterexample_spec();

// Independent standard normal X1, X2 and Y with alpha = (1, 1)/sqrt(2),
// beta = 1: the transfer map is the identity.
MarketSpec gaussian_comparison_spec();

/// Draws X ~ P and Y ~ Q independently and pairs them by index rank: man i
/// (kept in draw order) gets the woman whose beta'y has the same rank as his
/// alpha'x. Ties are broken by draw order on both sides.
bool operator==(const MarginalSpec& a, const MarginalSpec& b);

MatchedSample simulate_market(const MarketSpec& spec, std::size_t n, std::uint64_t seed);

/// Monotone piecewise-linear map through (quantile of alpha'X, quantile of
/// beta'Y) at probabilities k/1000, k = 0..1000. Flat outside the knots.
class TransferMap {
 public:
  static constexpr int kGridIntervals = 1000;

  TransferMap(std::vector<double> probabilities, std::vector<double> x_knots, std::vector<double> y_knots);

  // Population version from two quantile functions; probabilities 0 and 1
  // are clamped to [1e-9, 1 - 1e-9].
  static TransferMap from_quantiles(const std::function<double(double)>& x_quantile,
                                    const std::function<double(double)>& y_quantile);

  double operator()(double z) const;

  const std::vector<double>& probabilities() const { return probabilities_; }
  const std::vector<double>& x_knots() const { return x_knots_; }
  const std::vector<double>& y_knots() const { return y_knots_; }

 private:
  std::vector<double> probabilities_;
  std::vector<double> x_knots_;
  std::vector<double> y_knots_;
};

TransferMap transfer_map(const MatchedSample& sample, const VectorXd& alpha, const VectorXd& beta);

double surplus(const MarketSpec& spec, const VectorXd& x, const VectorXd& y);

struct Assignment {
  std::vector<std::size_t> permutation;  // man i is paired with woman permutation[i]
  double value = 0.0;
};

inline constexpr std::size_t kMaxOracleSize = 10;

/// Exhaustive search over all n! pairings of the rows of xs with the rows of
/// ys; returns the lexicographically smallest permutation attaining the
/// maximal total surplus.
Assignment assignment_oracle(const MatrixXd& xs, const MatrixXd& ys, const MarketSpec& spec);

// Positive assortative pairing by index rank (stable on ties).
Assignment rank_sorted_matching(const MatrixXd& xs, const MatrixXd& ys, const MarketSpec& spec);

/// True iff every discrete mixed second difference of phi on the grid is
/// >= -1e-12. Grids must be strictly increasing with at least two points.

bool check_supermodularity(const SurplusShape& phi, std::span<const double> s_grid,
                           std::span<const double> t_grid);

// Permutation that stably sorts the values ascending.
std::vector<std::size_t> stable_order(std::span<const double> values);

}  // namespace matchbench
