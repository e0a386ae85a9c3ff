#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matchbench/linalg.hpp"
#include "matchbench/market.hpp"

namespace matchbench {

/// Centered second moments of a matched sample, divisor n.
struct MomentSet {
  MatrixXd sxx;
  MatrixXd syy;
  MatrixXd sxy;
};

enum class Method { cca, ols, spearman, mrs, saliency };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// Recovered index weights. alpha/beta are in normalized form (unit norm,
/// first nonzero coordinate positive); method-specific raw values and
/// bookkeeping live in diagnostics.
struct EstimatorResult {
  Method method = Method::cca;
  VectorXd alpha;
  VectorXd beta;
  double objective = 0.0;
  nlohmann::json diagnostics = nlohmann::json::object();
};

MomentSet compute_moments(const MatchedSample& sample);

// Population moments of a spec whose two indices are perfectly linearly
// related: beta'Y = sqrt(beta'Syy beta / alpha'Sxx alpha) alpha'X, the
// optimal coupling of two Gaussians. Sxy = Sxx alpha beta' Syy / sqrt(...).
MomentSet linear_coupling_moments(const MatrixXd& sxx, const MatrixXd& syy, const VectorXd& alpha,
                                  const VectorXd& beta);

/// Canonical correlation through whitening and SVD: the top singular triple
/// of Sxx^-1/2 Sxy Syy^-1/2 mapped back through the whitening transforms.
/// diagnostics.alpha_raw / beta_raw satisfy alpha'Sxx alpha = beta'Syy beta = 1
/// (unless eigenvalues had to be clipped, reported in diagnostics).
EstimatorResult cca(const MomentSet& moments);

// alpha1^c / alpha2^c for dx = 2, dy = 1, from Sxx^-1 Sxy; with Sxx = I this
// is cov(X1, Y) / cov(X2, Y). Throws NumericalError on a zero denominator.
double cca_ratio_dy1(const MomentSet& moments);

/// OLS of Y1 on X and Y_-1 (with intercept): Y1 = alpha'X - beta_-1'Y_-1 + e,
/// beta = (1, beta_-1). diagnostics carry A = alpha'Sxx alpha,
/// B = beta'Syy beta and the residual variance.
EstimatorResult ols_index(const MatchedSample& sample);

/// (1/n) sum_i F_u(u_i) F_v(v_i) with u = X alpha, v = Y beta and empirical
/// CDFs in the r/(n+1) average-rank convention.
double spearman_objective(const MatchedSample& sample, const VectorXd& alpha, const VectorXd& beta);

inline constexpr std::size_t kMaxPrFormSize = 2000;

/// The same objective written as a dominance probability:
/// (1/n^3) sum_{i,j,k} 1[u_k >= u_i and v_k >= v_j].
double spearman_objective_pr_form(const MatchedSample& sample, const VectorXd& alpha, const VectorXd& beta);

struct SpearmanOptions {
  int restarts = 32;
  std::uint64_t seed = 0;
  double grid_resolution = 1e-3;  // radians, dx = 2 and dy = 1 only
  double simplex_tolerance = 1e-6;
  int max_evaluations = 2000;  // per restart
  bool angular_grid = true;
};

/// Multistart Nelder-Mead over spherical angles of (alpha, beta), plus an
/// exhaustive angular grid when dx = 2 and dy = 1. Reports the best point
/// found and every distinct local optimum in diagnostics.local_optima.
EstimatorResult spearman_estimate(const MatchedSample& sample, const SpearmanOptions& options = {});

// Unit vector from d - 1 hyperspherical angles.
VectorXd sphere_point(const std::vector<double>& angles, Eigen::Index dim);

/// Nadaraya-Watson regression of one response column on X with a product
/// Gaussian kernel.
class KernelRegression {
 public:
  KernelRegression(MatrixXd xs, VectorXd ys, VectorXd bandwidths);

  double operator()(const VectorXd& x) const;
  // Closed-form gradient of the fitted regression at x.
  VectorXd gradient(const VectorXd& x) const;
  // Central differences with step h_j * step_factor per coordinate.
  VectorXd gradient_fd(const VectorXd& x, double step_factor) const;
  // gradient_fd is linear in ys; this is the l2 norm of its coefficients per
  // coordinate, i.e. its standard error per unit of residual sd.
  VectorXd gradient_fd_noise(const VectorXd& x, double step_factor) const;

  const VectorXd& bandwidths() const { return h_; }

 private:
  MatrixXd xs_;
  VectorXd ys_;
  VectorXd h_;
};

// Silverman's rule, 1.06 sd n^-1/5, per column.
VectorXd silverman_bandwidths(const MatrixXd& xs);

struct MrsOptions {
  std::size_t eval_points = 100;
  double step_factor = 0.5;
  // A ratio is unstable when the median |denominator derivative| times
  // sd(X_j) falls below this fraction of sd(Y_k).
  double signal_floor = 0.05;
  // Also unstable when the median denominator derivative is within this
  // many standard errors of zero.
  double noise_multiple = 3.0;
};

/// Marginal-rate-of-substitution estimate of alpha_i / alpha_j from the
/// gradient of E[Y_k | X = x] at the eval points nearest the centroid.
struct MrsResult {
  MatrixXd ratios;                // median over eval points of d_i / d_j
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> unstable;
  MatrixXd eval_points;           // rows
  MatrixXd gradients;             // one row per eval point
  std::vector<bool> outside_hull; // per eval point: outside the data's bounding box
  VectorXd bandwidths;
  EstimatorResult result;         // alpha from the median gradient direction
};

MrsResult mrs_estimate(const MatchedSample& sample, Eigen::Index k, std::size_t eval_points = 100);
MrsResult mrs_estimate(const MatchedSample& sample, Eigen::Index k, const MrsOptions& options,
                       const MatrixXd* eval_points);

struct ConsistencyCheck {
  double lhs = 0.0;  // alpha1 / alpha2
  double rhs = 0.0;  // alpha1^c / alpha2^c implied by the covariances
  bool holds = false;
  double cov1 = 0.0;
  double cov2 = 0.0;
};

/// Whether CCA recovers the weights of a dx = 2, dy = 1 market: compares
/// alpha1/alpha2 with the ratio implied by cov(X_i, T(alpha'X)) computed by
/// quadrature. holds when the two agree within 10 * tol (compared in
/// cross-multiplied form when a ratio is infinite).
ConsistencyCheck consistency_condition(const MarketSpec& spec, double tol);

nlohmann::json to_json(const EstimatorResult& r);

}  // namespace matchbench
