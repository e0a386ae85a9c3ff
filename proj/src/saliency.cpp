#include "matchbench/saliency.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace matchbench {

NormalizedSample normalize_attributes(const MatchedSample& sample) {
  if (sample.n() < 1) throw ConfigError("normalize_attributes needs a non-empty sample");
  const double n = static_cast<double>(sample.n());
  NormalizedSample out;
  auto standardize = [n](const MatrixXd& m, VectorXd& mean, VectorXd& scale, const char* side) {
    mean = m.colwise().mean().transpose();
    const MatrixXd centered = m.rowwise() - mean.transpose();
    scale = (centered.colwise().squaredNorm() / n).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
      if (!(scale(j) > 0.0)) {
        throw ConfigError(std::string(side) + " column " + std::to_string(j + 1) + " has zero variance");
      }
    }
    return MatrixXd(centered.array().rowwise() / scale.transpose().array());
  };
  out.sample.xs = standardize(sample.xs, out.x_mean, out.x_scale, "x");
  out.sample.ys = standardize(sample.ys, out.y_mean, out.y_scale, "y");
  return out;
}

AffinityDecomposition svd_decompose(const MatrixXd& a, double rank_tol) {
  if (!a.allFinite()) throw ConfigError("affinity matrix has non-finite entries");
  if (a.rows() == 0 || a.cols() == 0) throw ConfigError("affinity matrix is empty");
  const SortedSvd svd = sorted_svd(a);
  AffinityDecomposition d;
  d.a = a;
  d.u = svd.u;
  d.v = svd.v;
  d.lambdas = svd.lambdas;
  d.rank_tol = rank_tol;
  const double total = d.lambdas.sum();
  d.shares = total > 0.0 ? VectorXd(d.lambdas / total) : VectorXd::Zero(d.lambdas.size());
  const double top = d.lambdas.size() > 0 ? d.lambdas(0) : 0.0;
  d.numerical_rank = 0;
  if (top > 0.0) {
    for (Eigen::Index i = 0; i < d.lambdas.size(); ++i) d.numerical_rank += d.lambdas(i) > rank_tol * top ? 1 : 0;
  }
  return d;
}

std::pair<MatrixXd, MatrixXd> mutual_indices(const AffinityDecomposition& d, const MatchedSample& sample) {
  if (sample.dx() != d.u.cols() || sample.dy() != d.v.cols()) {
    throw ConfigError("mutual_indices: sample dimensions do not match the decomposition");
  }
  return {sample.xs * d.u.transpose(), sample.ys * d.v.transpose()};
}

double verify_surplus_identity(const MatrixXd& a, const AffinityDecomposition& d, const MatchedSample& sample) {
  const auto [xt, yt] = mutual_indices(d, sample);
  const Eigen::Index k = d.lambdas.size();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sample.n(); ++i) {
    const double direct = sample.xs.row(i) * a * sample.ys.row(i).transpose();
    double diagonal = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) diagonal += d.lambdas(c) * xt(i, c) * yt(i, c);
    worst = std::max(worst, std::abs(direct - diagonal));
  }
  return worst;
}

namespace {

std::string describe(Eigen::Index rank, const VectorXd& lambdas) {
  std::ostringstream os;
  os << "affinity matrix has numerical rank " << rank << ", not 1; singular values (";
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) os << (i ? ", " : "") << lambdas(i);
  os << ")";
  return os.str();
}

}  // namespace

RankRejected::RankRejected(Eigen::Index rank, VectorXd lambdas)
    : NumericalError(describe(rank, lambdas)), rank_(rank), lambdas_(std::move(lambdas)) {}

std::pair<VectorXd, VectorXd> rank1_weights(const AffinityDecomposition& d) {
  if (d.numerical_rank != 1) throw RankRejected(d.numerical_rank, d.lambdas);
  return {normalize_weights(d.u.row(0).transpose()), normalize_weights(d.v.row(0).transpose())};
}

}  // namespace matchbench
