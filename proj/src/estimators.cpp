#include "matchbench/estimators.hpp"

#include <cmath>
#include <limits>

#include "matchbench/errors.hpp"
#include "matchbench/oracle.hpp"

namespace matchbench {

std::string to_string(Method method) {
  switch (method) {
    case Method::cca: return "cca";
    case Method::ols: return "ols";
    case Method::spearman: return "spearman";
    case Method::mrs: return "mrs";
    case Method::saliency: return "saliency";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "cca") return Method::cca;
  if (name == "ols") return Method::ols;
  if (name == "spearman") return Method::spearman;
  if (name == "mrs") return Method::mrs;
  if (name == "saliency") return Method::saliency;
  throw ConfigError("unknown method '" + name + "' (expected cca, ols, spearman, mrs or saliency)");
}

namespace {

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

MomentSet compute_moments(const MatchedSample& sample) {
  if (sample.n() < 2) throw ConfigError("compute_moments needs at least two couples");
  if (sample.ys.rows() != sample.n()) throw ConfigError("compute_moments: xs and ys row counts differ");
  return {centered_cross_moment(sample.xs, sample.xs), centered_cross_moment(sample.ys, sample.ys),
          centered_cross_moment(sample.xs, sample.ys)};
}

MomentSet linear_coupling_moments(const MatrixXd& sxx, const MatrixXd& syy, const VectorXd& alpha,
                                  const VectorXd& beta) {
  const double va = alpha.dot(sxx * alpha);
  const double vb = beta.dot(syy * beta);
  if (!(va > 0.0) || !(vb > 0.0)) throw NumericalError("linear coupling needs nondegenerate indices");
  return {sxx, syy, (sxx * alpha) * (syy * beta).transpose() / std::sqrt(va * vb)};
}

EstimatorResult cca(const MomentSet& m) {
  if (m.sxy.rows() != m.sxx.rows() || m.sxy.cols() != m.syy.rows()) {
    throw ConfigError("cca: moment matrix dimensions are inconsistent");
  }
  const Whitening wx = whitening_transform(m.sxx, 1e-10, "Sigma_X");
  const Whitening wy = whitening_transform(m.syy, 1e-10, "Sigma_Y");
  const SortedSvd svd = sorted_svd(wx.inv_sqrt * m.sxy * wy.inv_sqrt);

  const VectorXd alpha_raw = wx.inv_sqrt * svd.u.row(0).transpose();
  const VectorXd beta_raw = wy.inv_sqrt * svd.v.row(0).transpose();

  EstimatorResult r;
  r.method = Method::cca;
  r.alpha = normalize_weights(alpha_raw);
  r.beta = normalize_weights(beta_raw);
  r.objective = svd.lambdas(0);
  r.diagnostics["alpha_raw"] = to_std(alpha_raw);
  r.diagnostics["beta_raw"] = to_std(beta_raw);
  r.diagnostics["canonical_correlations"] = to_std(svd.lambdas);
  r.diagnostics["clipped_eigenvalues_x"] = wx.clipped;
  r.diagnostics["clipped_eigenvalues_y"] = wy.clipped;
  return r;
}

double cca_ratio_dy1(const MomentSet& m) {
  if (m.sxx.rows() != 2 || m.syy.rows() != 1 || m.sxy.rows() != 2 || m.sxy.cols() != 1) {
    throw ConfigError("cca_ratio_dy1 needs dx = 2 and dy = 1");
  }
  const VectorXd w = m.sxx.ldlt().solve(m.sxy.col(0));
  if (std::abs(w(1)) <= 1e-14 * std::max(std::abs(w(0)), std::numeric_limits<double>::min())) {
    throw NumericalError("cca_ratio_dy1: cov(X2, Y) is zero after whitening; the ratio is infinite");
  }
  return w(0) / w(1);
}

EstimatorResult ols_index(const MatchedSample& sample) {
  const Eigen::Index n = sample.n(), dx = sample.dx(), dy = sample.dy();
  if (dy < 1) throw ConfigError("ols_index needs at least one female attribute");
  if (n < dx + dy) throw NumericalError("ols_index: fewer couples than regressors");

  MatrixXd design(n, dx + dy - 1);
  design.leftCols(dx) = sample.xs;
  if (dy > 1) design.rightCols(dy - 1) = sample.ys.rightCols(dy - 1);
  design = design.rowwise() - design.colwise().mean();
  const VectorXd target = sample.ys.col(0).array() - sample.ys.col(0).mean();

  Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols()) {
    throw NumericalError("ols_index: regressors are collinear (rank " + std::to_string(qr.rank()) + " of " +
                         std::to_string(design.cols()) + ")");
  }
  const VectorXd coef = qr.solve(target);
  const VectorXd alpha = coef.head(dx);
  VectorXd beta(dy);
  beta(0) = 1.0;
  if (dy > 1) beta.tail(dy - 1) = -coef.tail(dy - 1);

  const MomentSet m = compute_moments(sample);
  const VectorXd resid = target - design * coef;

  EstimatorResult r;
  r.method = Method::ols;
  r.alpha = normalize_weights(alpha);
  r.beta = normalize_weights(beta);
  r.objective = alpha.dot(m.sxy * beta);
  r.diagnostics["alpha_raw"] = to_std(alpha);
  r.diagnostics["beta_raw"] = to_std(beta);
  r.diagnostics["A"] = alpha.dot(m.sxx * alpha);
  r.diagnostics["B"] = beta.dot(m.syy * beta);
  r.diagnostics["residual_variance"] = resid.squaredNorm() / static_cast<double>(n);
  return r;
}

ConsistencyCheck consistency_condition(const MarketSpec& spec, double tol) {
  const CounterexampleReport rep = numeric_counterexample(spec, tol);
  const double v1 = spec.men.components[0].variance();
  const double v2 = spec.men.components[1].variance();
  const double c1 = rep.cov1 / v1, c2 = rep.cov2 / v2;
  const double a1 = spec.alpha(0), a2 = spec.alpha(1);

  ConsistencyCheck out;
  out.cov1 = rep.cov1;
  out.cov2 = rep.cov2;
  const double inf = std::numeric_limits<double>::infinity();
  out.lhs = a2 != 0.0 ? a1 / a2 : std::copysign(inf, a1);
  out.rhs = c2 != 0.0 ? c1 / c2 : std::copysign(inf, c1);
  if (std::isfinite(out.lhs) && std::isfinite(out.rhs)) {
    out.holds = std::abs(out.lhs - out.rhs) <= 10.0 * tol;
  } else {
    const double cross = (a1 * c2 - a2 * c1) / (std::hypot(a1, a2) * std::hypot(c1, c2));
    out.holds = std::abs(cross) <= 10.0 * tol;
  }
  return out;
}

nlohmann::json to_json(const EstimatorResult& r) {
  nlohmann::json j;
  j["method"] = to_string(r.method);
  j["alpha"] = to_std(r.alpha);
  j["beta"] = to_std(r.beta);
  j["objective"] = r.objective;
  j["diagnostics"] = r.diagnostics;
  return j;
}

}  // namespace matchbench
