#include <algorithm>
#include <cmath>
#include <numeric>

#include "matchbench/errors.hpp"
#include "matchbench/estimators.hpp"

namespace matchbench {

KernelRegression::KernelRegression(MatrixXd xs, VectorXd ys, VectorXd bandwidths)
    : xs_(std::move(xs)), ys_(std::move(ys)), h_(std::move(bandwidths)) {
  if (xs_.rows() != ys_.size() || xs_.rows() == 0) throw ConfigError("kernel regression: xs and ys sizes differ");
  if (h_.size() != xs_.cols()) throw ConfigError("kernel regression: one bandwidth per column required");
  if (!(h_.minCoeff() > 0.0) || !h_.allFinite()) throw NumericalError("kernel regression: degenerate bandwidth");
}

namespace {

// Log kernel weights, shifted so the largest is 0.
VectorXd log_weights(const MatrixXd& xs, const VectorXd& h, const VectorXd& x) {
  VectorXd lw(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    lw(i) = -0.5 * ((x.transpose() - xs.row(i)).array() / h.transpose().array()).square().sum();
  }
  return lw.array() - lw.maxCoeff();
}

}  // namespace

double KernelRegression::operator()(const VectorXd& x) const {
  const VectorXd w = log_weights(xs_, h_, x).array().exp();
  return w.dot(ys_) / w.sum();
}

VectorXd KernelRegression::gradient(const VectorXd& x) const {
  const VectorXd w = log_weights(xs_, h_, x).array().exp();
  const double total = w.sum();
  const double m = w.dot(ys_) / total;
  VectorXd g = VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i < xs_.rows(); ++i) {
    const double resid = ys_(i) - m;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      g(j) -= w(i) * (x(j) - xs_(i, j)) / (h_(j) * h_(j)) * resid;
    }
  }
  return g / total;
}

VectorXd KernelRegression::gradient_fd(const VectorXd& x, double step_factor) const {
  VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = step_factor * h_(j);
    VectorXd hi = x, lo = x;
    hi(j) += step;
    lo(j) -= step;
    g(j) = ((*this)(hi) - (*this)(lo)) / (2.0 * step);
  }
  return g;
}

VectorXd KernelRegression::gradient_fd_noise(const VectorXd& x, double step_factor) const {
  VectorXd out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = step_factor * h_(j);
    VectorXd hi = x, lo = x;
    hi(j) += step;
    lo(j) -= step;
    const VectorXd wh = log_weights(xs_, h_, hi).array().exp();
    const VectorXd wl = log_weights(xs_, h_, lo).array().exp();
    out(j) = (wh / wh.sum() - wl / wl.sum()).norm() / (2.0 * step);
  }
  return out;
}

VectorXd silverman_bandwidths(const MatrixXd& xs) {
  const double n = static_cast<double>(xs.rows());
  const MatrixXd centered = xs.rowwise() - xs.colwise().mean();
  const VectorXd sd = (centered.colwise().squaredNorm() / n).cwiseSqrt().transpose();
  return 1.06 * sd * std::pow(n, -0.2);
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace

MrsResult mrs_estimate(const MatchedSample& sample, Eigen::Index k, std::size_t eval_points) {
  MrsOptions opt;
  opt.eval_points = eval_points;
  return mrs_estimate(sample, k, opt, nullptr);
}

MrsResult mrs_estimate(const MatchedSample& sample, Eigen::Index k, const MrsOptions& opt,
                       const MatrixXd* eval_points) {
  if (k < 0 || k >= sample.dy()) throw ConfigError("mrs_estimate: response column out of range");
  if (sample.n() < 2) throw ConfigError("mrs_estimate needs at least two couples");
  const Eigen::Index dx = sample.dx();
  const double n = static_cast<double>(sample.n());

  const VectorXd h = silverman_bandwidths(sample.xs);
  const KernelRegression reg(sample.xs, sample.ys.col(k), h);

  const VectorXd mean = sample.xs.colwise().mean().transpose();
  const VectorXd sd = ((sample.xs.rowwise() - mean.transpose()).colwise().squaredNorm() / n).cwiseSqrt().transpose();
  const double y_sd = std::sqrt((sample.ys.col(k).array() - sample.ys.col(k).mean()).square().sum() / n);

  MrsResult out;
  out.bandwidths = h;
  if (eval_points != nullptr) {
    if (eval_points->cols() != dx) throw ConfigError("mrs_estimate: eval points have the wrong dimension");
    out.eval_points = *eval_points;
  } else {
    // sample points nearest the centroid in standardized coordinates
    std::vector<double> dist(static_cast<std::size_t>(sample.n()));
    for (Eigen::Index i = 0; i < sample.n(); ++i) {
      dist[static_cast<std::size_t>(i)] =
          ((sample.xs.row(i).transpose() - mean).array() / sd.array()).square().sum();
    }
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(opt.eval_points, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
    out.eval_points.resize(static_cast<Eigen::Index>(take), dx);
    for (std::size_t r = 0; r < take; ++r) {
      out.eval_points.row(static_cast<Eigen::Index>(r)) = sample.xs.row(static_cast<Eigen::Index>(order[r]));
    }
  }

  const VectorXd lo = sample.xs.colwise().minCoeff().transpose();
  const VectorXd hi = sample.xs.colwise().maxCoeff().transpose();
  const Eigen::Index points = out.eval_points.rows();
  out.gradients.resize(points, dx);
  out.outside_hull.resize(static_cast<std::size_t>(points));
  for (Eigen::Index p = 0; p < points; ++p) {
    const VectorXd x = out.eval_points.row(p).transpose();
    out.outside_hull[static_cast<std::size_t>(p)] = (x.array() < lo.array()).any() || (x.array() > hi.array()).any();
    out.gradients.row(p) = reg.gradient_fd(x, opt.step_factor).transpose();
  }

  // residual sd of the fit on an evenly spaced subset of the data
  const Eigen::Index stride = std::max<Eigen::Index>(1, sample.n() / 200);
  double rss = 0.0;
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i < sample.n(); i += stride, ++used) {
    const double r = sample.ys(i, k) - reg(sample.xs.row(i).transpose());
    rss += r * r;
  }
  const double resid_sd = std::sqrt(rss / static_cast<double>(used));
  MatrixXd noise(points, dx);
  for (Eigen::Index p = 0; p < points; ++p) {
    noise.row(p) = reg.gradient_fd_noise(out.eval_points.row(p).transpose(), opt.step_factor).transpose();
  }

  out.ratios = MatrixXd::Constant(dx, dx, std::numeric_limits<double>::quiet_NaN());
  out.unstable.setConstant(dx, dx, false);
  VectorXd median_grad(dx);
  for (Eigen::Index j = 0; j < dx; ++j) {
    std::vector<double> mags, comps, ses;
    for (Eigen::Index p = 0; p < points; ++p) {
      if (out.outside_hull[static_cast<std::size_t>(p)]) continue;
      mags.push_back(std::abs(out.gradients(p, j)));
      ses.push_back(resid_sd * noise(p, j));
      comps.push_back(out.gradients(p, j));
    }
    median_grad(j) = median(comps);
    const double signal = median(mags) * sd(j);
    const bool weak = !(signal >= opt.signal_floor * y_sd) || !(y_sd > 0.0) ||
                      !(std::abs(median_grad(j)) > opt.noise_multiple * median(ses));
    for (Eigen::Index i = 0; i < dx; ++i) {
      std::vector<double> r;
      for (Eigen::Index p = 0; p < points; ++p) {
        if (out.outside_hull[static_cast<std::size_t>(p)] || out.gradients(p, j) == 0.0) continue;
        r.push_back(out.gradients(p, i) / out.gradients(p, j));
      }
      out.ratios(i, j) = median(r);
      out.unstable(i, j) = weak || r.empty();
    }
  }

  out.result.method = Method::mrs;
  out.result.alpha = normalize_weights(median_grad);
  out.result.beta = VectorXd::Unit(sample.dy(), k);
  out.result.objective = median_grad.norm();
  auto& d = out.result.diagnostics;
  d["response_column"] = k;
  d["bandwidths"] = std::vector<double>(h.data(), h.data() + h.size());
  d["step_factor"] = opt.step_factor;
  d["residual_sd"] = resid_sd;
  d["eval_points"] = points;
  d["outside_hull"] = std::count(out.outside_hull.begin(), out.outside_hull.end(), true);
  nlohmann::json ratios = nlohmann::json::array();
  nlohmann::json flags = nlohmann::json::array();
  for (Eigen::Index i = 0; i < dx; ++i) {
    nlohmann::json row = nlohmann::json::array(), frow = nlohmann::json::array();
    for (Eigen::Index j = 0; j < dx; ++j) {
      row.push_back(std::isfinite(out.ratios(i, j)) ? nlohmann::json(out.ratios(i, j)) : nlohmann::json(nullptr));
      frow.push_back(static_cast<bool>(out.unstable(i, j)));
    }
    ratios.push_back(row);
    flags.push_back(frow);
  }
  d["ratios"] = ratios;
  d["unstable"] = flags;
  d["beta_note"] = "beta is not identified by this method; reported as the unit vector of the response column";
  return out;
}

}  // namespace matchbench
