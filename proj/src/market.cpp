#include "matchbench/market.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "matchbench/errors.hpp"
#include "matchbench/parallel.hpp"

namespace matchbench {

MarginalSpec MarginalSpec::independent(std::vector<Distribution> comps) {
  MarginalSpec m;
  m.components = std::move(comps);
  return m;
}

MarginalSpec MarginalSpec::gaussian(MatrixXd cov) {
  MarginalSpec m;
  m.gaussian_cov = std::move(cov);
  return m;
}

Eigen::Index MarginalSpec::dim() const {
  return gaussian_cov ? gaussian_cov->rows() : static_cast<Eigen::Index>(components.size());
}

bool MarginalSpec::is_gaussian() const { return gaussian_cov.has_value(); }

VectorXd MarginalSpec::means() const {
  VectorXd mu = VectorXd::Zero(dim());
  if (!gaussian_cov) {
    for (std::size_t j = 0; j < components.size(); ++j) mu(static_cast<Eigen::Index>(j)) = components[j].mean();
  }
  return mu;
}

MatrixXd MarginalSpec::covariance() const {
  if (gaussian_cov) return *gaussian_cov;
  MatrixXd cov = MatrixXd::Zero(dim(), dim());
  for (std::size_t j = 0; j < components.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    cov(k, k) = components[j].variance();
  }
  return cov;
}

MatrixXd MarginalSpec::sample(std::size_t n, const CounterStream& stream) const {
  const Eigen::Index d = dim();
  MatrixXd out(static_cast<Eigen::Index>(n), d);
  const auto standard = Distribution::gaussian(1.0);
  parallel_for(static_cast<std::size_t>(d), [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    const CounterStream s = stream.split(j);
    const Distribution& dist = gaussian_cov ? standard : components[j];
    for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i), col) = dist.draw(s, i);
  });
  if (gaussian_cov) {
    const Eigen::LLT<MatrixXd> llt(*gaussian_cov);
    out = out * llt.matrixL().transpose();
  }
  return out;
}

void MarginalSpec::validate(const std::string& side) const {
  if (gaussian_cov) {
    if (!components.empty()) {
      throw ConfigError(side + ": give either components or gaussian_cov, not both");
    }
    const MatrixXd& c = *gaussian_cov;
    if (c.rows() == 0 || c.rows() != c.cols()) throw ConfigError(side + ".gaussian_cov must be a non-empty square matrix");
    if (!c.allFinite()) throw ConfigError(side + ".gaussian_cov has non-finite entries");
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff())) {
      throw ConfigError(side + ".gaussian_cov is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 1e-12)) {
      throw ConfigError(side + ".gaussian_cov is not positive definite (min eigenvalue " +
                        std::to_string(eig.eigenvalues().minCoeff()) + ")");
    }
  } else if (components.empty()) {
    throw ConfigError(side + ": needs at least one component");
  }
}

bool operator==(const MarginalSpec& a, const MarginalSpec& b) {
  if (a.components != b.components) return false;
  if (a.gaussian_cov.has_value() != b.gaussian_cov.has_value()) return false;
  if (!a.gaussian_cov) return true;
  return a.gaussian_cov->rows() == b.gaussian_cov->rows() && a.gaussian_cov->cols() == b.gaussian_cov->cols() &&
         *a.gaussian_cov == *b.gaussian_cov;
}

SurplusShape SurplusShape::product() { return SurplusShape{}; }

SurplusShape SurplusShape::custom(std::string name, std::function<double(double, double)> fn) {
  SurplusShape s;
  s.kind_ = Kind::custom;
  s.name_ = std::move(name);
  s.fn_ = std::move(fn);
  return s;
}

SurplusShape SurplusShape::named(const std::string& name) {
  if (name == "product") return product();
  if (name == "min") return custom("min", [](double s, double t) { return std::min(s, t); });
  throw ConfigError("unknown surplus shape '" + name + "' (expected product or min)");
}

double SurplusShape::operator()(double s, double t) const {
  return kind_ == Kind::product ? s * t : fn_(s, t);
}

void MarketSpec::validate() const {
  men.validate("men");
  women.validate("women");
  if (alpha.size() != dx()) {
    throw ConfigError("alpha has " + std::to_string(alpha.size()) + " entries but men have " +
                      std::to_string(dx()) + " attributes");
  }
  if (beta.size() != dy()) {
    throw ConfigError("beta has " + std::to_string(beta.size()) + " entries but women have " +
                      std::to_string(dy()) + " attributes");
  }
  if (!alpha.allFinite() || alpha.isZero(0.0)) throw ConfigError("alpha must be a finite nonzero vector");
  if (!beta.allFinite() || beta.isZero(0.0)) throw ConfigError("beta must be a finite nonzero vector");
  std::vector<double> grid(13);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = -3.0 + 0.5 * static_cast<double>(k);
  if (!check_supermodularity(phi, grid, grid)) {
    throw ConfigError("surplus shape '" + phi.name() + "' is not supermodular");
  }
}

MarketSpec counterexample_spec() {
  MarketSpec spec;
  spec.men = MarginalSpec::independent({Distribution::rademacher(), Distribution::exponential(1.0)});
  spec.women = MarginalSpec::independent({Distribution::uniform01()});
  spec.alpha = VectorXd::Constant(2, 1.0 / std::numbers::sqrt2);
  spec.beta = VectorXd::Ones(1);
  return spec;
}

MarketSpec gaussian_comparison_spec() {
  MarketSpec spec;
  spec.men = MarginalSpec::independent({Distribution::gaussian(1.0), Distribution::gaussian(1.0)});
  spec.women = MarginalSpec::independent({Distribution::gaussian(1.0)});
  spec.alpha = VectorXd::Constant(2, 1.0 / std::numbers::sqrt2);
  spec.beta = VectorXd::Ones(1);
  return spec;
}

std::vector<std::size_t> stable_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

namespace {

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

bool degenerate(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return !(*hi > *lo);
}

}  // namespace

MatchedSample simulate_market(const MarketSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("simulate_market needs n >= 2");
  spec.validate();
  const CounterStream root(seed);
  const MatrixXd x = spec.men.sample(n, root.split(0));
  const MatrixXd y = spec.women.sample(n, root.split(1));

  const std::vector<double> u = to_std(x * spec.alpha);
  const std::vector<double> v = to_std(y * spec.beta);
  if (degenerate(u)) throw NumericalError("men's index alpha'X has zero variance in the sample");
  if (degenerate(v)) throw NumericalError("women's index beta'Y has zero variance in the sample");

  const auto men_order = stable_order(u);
  const auto women_order = stable_order(v);

  MatchedSample out;
  out.xs = x;
  out.ys.resize(static_cast<Eigen::Index>(n), y.cols());
  for (std::size_t r = 0; r < n; ++r) {
    out.ys.row(static_cast<Eigen::Index>(men_order[r])) = y.row(static_cast<Eigen::Index>(women_order[r]));
  }
  return out;
}

TransferMap::TransferMap(std::vector<double> probabilities, std::vector<double> x_knots, std::vector<double> y_knots)
    : probabilities_(std::move(probabilities)), x_knots_(std::move(x_knots)), y_knots_(std::move(y_knots)) {
  if (x_knots_.empty() || x_knots_.size() != y_knots_.size()) {
    throw ConfigError("transfer map needs matching, non-empty knot vectors");
  }
}

TransferMap TransferMap::from_quantiles(const std::function<double(double)>& x_quantile,
                                        const std::function<double(double)>& y_quantile) {
  std::vector<double> p(kGridIntervals + 1), xk(p.size()), yk(p.size());
  for (int k = 0; k <= kGridIntervals; ++k) {
    p[k] = static_cast<double>(k) / kGridIntervals;
    const double pc = std::clamp(p[k], 1e-9, 1.0 - 1e-9);
    xk[k] = x_quantile(pc);
    yk[k] = y_quantile(pc);
  }
  return {std::move(p), std::move(xk), std::move(yk)};
}

double TransferMap::operator()(double z) const {
  if (z <= x_knots_.front()) return y_knots_.front();
  if (z >= x_knots_.back()) return y_knots_.back();
  const auto it = std::upper_bound(x_knots_.begin(), x_knots_.end(), z);
  const std::size_t hi = static_cast<std::size_t>(it - x_knots_.begin());
  const std::size_t lo = hi - 1;
  const double w = (z - x_knots_[lo]) / (x_knots_[hi] - x_knots_[lo]);
  return y_knots_[lo] + w * (y_knots_[hi] - y_knots_[lo]);
}

TransferMap transfer_map(const MatchedSample& sample, const VectorXd& alpha, const VectorXd& beta) {
  if (sample.n() == 0) throw ConfigError("transfer_map needs a non-empty sample");
  if (alpha.size() != sample.dx() || beta.size() != sample.dy()) {
    throw ConfigError("transfer_map: weight dimensions do not match the sample");
  }
  std::vector<double> u = to_std(sample.xs * alpha);
  std::vector<double> v = to_std(sample.ys * beta);
  std::sort(u.begin(), u.end());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(u.size());
  auto empirical_quantile = [n](const std::vector<double>& sorted, double p) {
    // inverse of the step ECDF: smallest order statistic with k/n >= p
    const double k = std::ceil(p * n - 1e-9);
    const auto idx = static_cast<std::size_t>(std::clamp(k, 1.0, n)) - 1;
    return sorted[idx];
  };
  std::vector<double> p(TransferMap::kGridIntervals + 1), xk(p.size()), yk(p.size());
  for (int k = 0; k <= TransferMap::kGridIntervals; ++k) {
    p[k] = static_cast<double>(k) / TransferMap::kGridIntervals;
    xk[k] = empirical_quantile(u, p[k]);
    yk[k] = empirical_quantile(v, p[k]);
  }
  return {std::move(p), std::move(xk), std::move(yk)};
}

double surplus(const MarketSpec& spec, const VectorXd& x, const VectorXd& y) {
  if (x.size() != spec.alpha.size() || y.size() != spec.beta.size()) {
    throw ConfigError("surplus: attribute vector dimensions do not match alpha/beta");
  }
  return spec.phi(spec.alpha.dot(x), spec.beta.dot(y));
}

namespace {

MatrixXd surplus_table(const MatrixXd& xs, const MatrixXd& ys, const MarketSpec& spec) {
  if (xs.rows() != ys.rows()) throw ConfigError("assignment needs the same number of men and women");
  if (xs.cols() != spec.alpha.size() || ys.cols() != spec.beta.size()) {
    throw ConfigError("assignment: attribute dimensions do not match alpha/beta");
  }
  const VectorXd u = xs * spec.alpha;
  const VectorXd v = ys * spec.beta;
  MatrixXd table(xs.rows(), ys.rows());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = 0; j < v.size(); ++j) table(i, j) = spec.phi(u(i), v(j));
  return table;
}

double assignment_value(const MatrixXd& table, const std::vector<std::size_t>& perm) {
  double value = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    value += table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
  return value;
}

}  // namespace

Assignment assignment_oracle(const MatrixXd& xs, const MatrixXd& ys, const MarketSpec& spec) {
  const auto n = static_cast<std::size_t>(xs.rows());
  if (n == 0) throw ConfigError("assignment_oracle needs at least one couple");
  if (n > kMaxOracleSize) {
    throw ConfigError("assignment_oracle enumerates n! pairings; n = " + std::to_string(n) + " exceeds " +
                      std::to_string(kMaxOracleSize));
  }
  const MatrixXd table = surplus_table(xs, ys, spec);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Assignment best{perm, assignment_value(table, perm)};
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double value = assignment_value(table, perm);
    if (value > best.value) best = {perm, value};
  }
  return best;
}

Assignment rank_sorted_matching(const MatrixXd& xs, const MatrixXd& ys, const MarketSpec& spec) {
  const MatrixXd table = surplus_table(xs, ys, spec);
  const std::vector<double> u = to_std(xs * spec.alpha);
  const std::vector<double> v = to_std(ys * spec.beta);
  const auto men = stable_order(u);
  const auto women = stable_order(v);
  Assignment a;
  a.permutation.resize(u.size());
  for (std::size_t r = 0; r < u.size(); ++r) a.permutation[men[r]] = women[r];
  a.value = assignment_value(table, a.permutation);
  return a;
}

bool check_supermodularity(const SurplusShape& phi, std::span<const double> s_grid, std::span<const double> t_grid) {
  auto check_grid = [](std::span<const double> g, const char* name) {
    if (g.size() < 2) throw ConfigError(std::string(name) + " grid needs at least two points");
    for (std::size_t k = 1; k < g.size(); ++k) {
      if (!(g[k] > g[k - 1])) throw ConfigError(std::string(name) + " grid must be strictly increasing");
    }
  };
  check_grid(s_grid, "s");
  check_grid(t_grid, "t");
  MatrixXd values(static_cast<Eigen::Index>(s_grid.size()), static_cast<Eigen::Index>(t_grid.size()));
  for (std::size_t a = 0; a < s_grid.size(); ++a)
    for (std::size_t b = 0; b < t_grid.size(); ++b)
      values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = phi(s_grid[a], t_grid[b]);
  const Eigen::Index ns = values.rows(), nt = values.cols();
  for (Eigen::Index s1 = 0; s1 < ns; ++s1)
    for (Eigen::Index s2 = s1 + 1; s2 < ns; ++s2)
      for (Eigen::Index t1 = 0; t1 < nt; ++t1)
        for (Eigen::Index t2 = t1 + 1; t2 < nt; ++t2) {
          const double d = values(s2, t2) - values(s2, t1) - values(s1, t2) + values(s1, t1);
          if (d < -1e-12) return false;
        }
  return true;
}

}  // namespace matchbench
