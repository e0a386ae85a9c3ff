#include "matchbench/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matchbench/errors.hpp"

namespace matchbench {

namespace {

Eigen::Index first_nonzero(const VectorXd& row) {
  const double scale = row.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (std::abs(row(i)) > 1e-12 * scale) return i;
  }
  return -1;
}

}  // namespace

SortedSvd sorted_svd(const MatrixXd& a) {
  const Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SortedSvd out;
  out.u = svd.matrixU().transpose();
  out.v = svd.matrixV().transpose();
  out.lambdas = svd.singularValues();

  const Eigen::Index d = out.lambdas.size();
  for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
    const Eigen::Index k = first_nonzero(out.u.row(i).transpose());
    if (k >= 0 && out.u(i, k) < 0.0) {
      out.u.row(i) *= -1.0;
      if (i < d) out.v.row(i) *= -1.0;
    }
  }
  for (Eigen::Index i = d; i < out.v.rows(); ++i) {
    const Eigen::Index k = first_nonzero(out.v.row(i).transpose());
    if (k >= 0 && out.v(i, k) < 0.0) out.v.row(i) *= -1.0;
  }
  return out;
}

Whitening whitening_transform(const MatrixXd& sym, double clip_ratio, const char* name) {
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError(std::string("eigendecomposition of ") + name + " failed");
  }
  VectorXd values = eig.eigenvalues();
  const double largest = values.maxCoeff();
  if (!(largest > 0.0)) throw NumericalError(std::string(name) + " is zero; indices have no variance");
  if (values.minCoeff() < 1e-14 * largest) {
    throw NumericalError(std::string(name) + " is rank deficient (smallest/largest eigenvalue " +
                         std::to_string(values.minCoeff() / largest) + ")");
  }
  Whitening w;
  const double floor = clip_ratio * largest;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < floor) {
      values(i) = floor;
      ++w.clipped;
    }
  }
  const VectorXd inv_root = values.cwiseSqrt().cwiseInverse();
  w.inv_sqrt = eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().transpose();
  return w;
}

VectorXd normalize_weights(const VectorXd& w) {
  const double norm = w.norm();
  if (!(norm > 0.0)) return w;
  VectorXd out = w / norm;
  const Eigen::Index k = first_nonzero(out);
  if (k >= 0 && out(k) < 0.0) out = -out;
  return out;
}

double angular_error(const VectorXd& a, const VectorXd& b) {
  const double denom = a.norm() * b.norm();
  if (!(denom > 0.0)) return std::acos(0.0);
  const double c = std::min(1.0, std::abs(a.dot(b)) / denom);
  return std::acos(c);
}

MatrixXd centered_cross_moment(const MatrixXd& a, const MatrixXd& b) {
  const double n = static_cast<double>(a.rows());
  const MatrixXd ac = a.rowwise() - a.colwise().mean();
  const MatrixXd bc = b.rowwise() - b.colwise().mean();
  return (ac.transpose() * bc) / n;
}

}  // namespace matchbench
