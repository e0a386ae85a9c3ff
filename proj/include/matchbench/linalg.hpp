#pragma once

#include <Eigen/Dense>

namespace matchbench {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Full SVD written as A = U' diag(lambda) V with U (rows x rows) and
/// V (cols x cols) orthogonal and lambda nonincreasing. Rows of U and V are
/// the singular vectors. Signs are fixed so each row of U has its first
/// nonzero entry positive; the matching row of V is flipped along with it.
struct SortedSvd {
  MatrixXd u;
  VectorXd lambdas;
  MatrixXd v;
};

SortedSvd sorted_svd(const MatrixXd& a);

/// Inverse square root of a symmetric PSD matrix. Eigenvalues below
/// clip_ratio * (largest) are raised to that floor. Throws NumericalError
/// when the matrix is zero or has an eigenvalue below 1e-14 * (largest),
/// which no amount of clipping turns into a usable whitening transform.
struct Whitening {
  MatrixXd inv_sqrt;
  Eigen::Index clipped = 0;
};

Whitening whitening_transform(const MatrixXd& sym, double clip_ratio = 1e-10, const char* name = "matrix");

// Unit Euclidean norm, first nonzero coordinate positive. A zero vector is
// returned unchanged.
VectorXd normalize_weights(const VectorXd& w);

// arccos |cos(a, b)|, in radians; 0 means equal up to scale and sign.
double angular_error(const VectorXd& a, const VectorXd& b);

// Covariance with divisor n after centering each column.
MatrixXd centered_cross_moment(const MatrixXd& a, const MatrixXd& b);

}  // namespace matchbench
