#pragma once

#include <utility>

#include "matchbench/errors.hpp"
#include "matchbench/linalg.hpp"
#include "matchbench/market.hpp"

namespace matchbench {

/// A = U' diag(lambdas) V for an affinity matrix A (dx x dy). Row i of U and
/// V holds the loadings of the i-th pair of indices of mutual
/// attractiveness; shares are lambda_i / sum(lambda).
struct AffinityDecomposition {
  MatrixXd a;
  MatrixXd u;  // dx x dx, orthogonal
  MatrixXd v;  // dy x dy, orthogonal
  VectorXd lambdas;  // min(dx, dy), nonincreasing
  VectorXd shares;
  Eigen::Index numerical_rank = 0;
  double rank_tol = 1e-8;
};

inline constexpr double kDefaultRankTol = 1e-8;

struct NormalizedSample {
  MatchedSample sample;
  VectorXd x_scale;  // standard deviations divided out of each column
  VectorXd y_scale;
  VectorXd x_mean;
  VectorXd y_mean;
};

// Centers every column and divides by its standard deviation (divisor n).
NormalizedSample normalize_attributes(const MatchedSample& sample);

// numerical_rank counts lambda_i > rank_tol * lambda_1.
AffinityDecomposition svd_decompose(const MatrixXd& a, double rank_tol = kDefaultRankTol);

// Rows x~ = U x and y~ = V y.
std::pair<MatrixXd, MatrixXd> mutual_indices(const AffinityDecomposition& d, const MatchedSample& sample);

// max over rows of |x'Ay - sum_k lambda_k x~_k y~_k|.
double verify_surplus_identity(const MatrixXd& a, const AffinityDecomposition& d, const MatchedSample& sample);

/// Thrown by rank1_weights when A does not have exactly one nonzero
/// singular value, i.e. sorting runs on more (or fewer) than one index.
class RankRejected : public NumericalError {
 public:
  RankRejected(Eigen::Index rank, VectorXd lambdas);
  Eigen::Index rank() const { return rank_; }
  const VectorXd& lambdas() const { return lambdas_; }

 private:
  Eigen::Index rank_;
  VectorXd lambdas_;
};

// Normalized first rows of U and V when numerical_rank == 1.
std::pair<VectorXd, VectorXd> rank1_weights(const AffinityDecomposition& d);

}  // namespace matchbench
