#include "matchbench/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "matchbench/errors.hpp"
#include "matchbench/linalg.hpp"
#include "matchbench/quadrature.hpp"

namespace matchbench {

std::string to_string(OracleMethod method) {
  switch (method) {
    case OracleMethod::closed_form: return "closed_form";
    case OracleMethod::quadrature: return "quadrature";
    case OracleMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

namespace {

const Distribution kUnitExponential = Distribution::exponential(1.0);

double G(double z) { return kUnitExponential.cdf(z); }

void fill_ratio(CounterexampleReport& r, double var1, double var2) {
  r.ratio_cca = (r.cov2 / var2) / (r.cov1 / var1);
}

}  // namespace

TermMap expectation_terms() {
  const double em2 = std::exp(-2.0);
  return {
      {kTermGPlus2, 1.0 - em2 / 2.0},
      {kTermGMinus2, em2 / 2.0},
      {kTermX2GMinus2, 7.0 * em2 / 4.0},
      {kTermX2GPlus2, 1.0 - em2 / 4.0},
      {kTermX2G, 0.75},
      {kTermX2Yhat, (3.0 * em2 + 5.0) / 8.0},
  };
}

CounterexampleReport closed_form_counterexample() {
  const double em2 = std::exp(-2.0);
  const double e2 = std::exp(2.0);
  CounterexampleReport r;
  r.method = OracleMethod::closed_form;
  r.cov1 = (1.0 - em2) / 4.0;
  r.cov2 = (3.0 * em2 + 1.0) / 8.0;
  r.ratio_cca = (3.0 + e2) / (2.0 * e2 - 2.0);
  r.ratio_true = 1.0;
  r.expectation_terms = expectation_terms();
  return r;
}

std::map<std::string, std::string> counterexample_symbols() {
  return {{"cov1", "(1-e^-2)/4"}, {"cov2", "(3e^-2+1)/8"}, {"ratio_cca", "(3+e^2)/(2e^2-2)"}, {"ratio_true", "1"}};
}

double yhat(double x1, double x2) {
  if (x1 == -1.0) return 0.5 * (G(x2) + G(x2 - 2.0));
  if (x1 == 1.0) return 0.5 * (G(x2 + 2.0) + G(x2));
  throw ConfigError("yhat: x1 must be -1 or +1");
}

TermMap quadrature_expectation_terms(double tol) {
  const auto& w = kUnitExponential;
  TermMap t;
  t[kTermGPlus2] = quad_integrate([](double z) { return G(z + 2.0); }, w, tol);
  t[kTermGMinus2] = quad_integrate([](double z) { return G(z - 2.0); }, w, tol);
  t[kTermX2GMinus2] = quad_integrate([](double z) { return z * G(z - 2.0); }, w, tol);
  t[kTermX2GPlus2] = quad_integrate([](double z) { return z * G(z + 2.0); }, w, tol);
  t[kTermX2G] = quad_integrate([](double z) { return z * G(z); }, w, tol);
  t[kTermX2Yhat] = quad_integrate(
      [](double z) { return z * 0.5 * (yhat(-1.0, z) + yhat(1.0, z)); }, w, tol);
  return t;
}

namespace {

// P(a X <= t) and P(a X < t).
double scaled_cdf(const Distribution& d, double a, double t) {
  if (a > 0.0) return d.cdf(t / a);
  if (a < 0.0) return 1.0 - d.cdf_left(t / a);
  return t >= 0.0 ? 1.0 : 0.0;
}

double scaled_cdf_left(const Distribution& d, double a, double t) {
  if (a > 0.0) return d.cdf_left(t / a);
  if (a < 0.0) return 1.0 - d.cdf(t / a);
  return t > 0.0 ? 1.0 : 0.0;
}

double scaled_survival(const Distribution& d, double a, double t) {
  if (a > 0.0) return d.survival(t / a);
  if (a < 0.0) return d.cdf_left(t / a);
  return t < 0.0 ? 1.0 : 0.0;
}

// CDF of S = a1 X1 + a2 X2 for independent X1, X2.
class IndexDistribution {
 public:
  IndexDistribution(Distribution x1, Distribution x2, double a1, double a2, double tol)
      : x1_(x1), x2_(x2), a1_(a1), a2_(a2), tol_(tol) {}

  double cdf(double s) const { return eval(s, false); }
  double cdf_left(double s) const { return eval(s, true); }

  // P(S > s); only called where S has no atom at s
  double survival(double s) const {
    if (a2_ == 0.0) return scaled_survival(x1_, a1_, s);
    if (a1_ == 0.0) return scaled_survival(x2_, a2_, s);
    if (x1_.kind() == DistKind::rademacher) {
      return 0.5 * (scaled_survival(x2_, a2_, s + a1_) + scaled_survival(x2_, a2_, s - a1_));
    }
    if (x2_.kind() == DistKind::rademacher) {
      return 0.5 * (scaled_survival(x1_, a1_, s + a2_) + scaled_survival(x1_, a1_, s - a2_));
    }
    if (x1_.kind() == DistKind::gaussian && x2_.kind() == DistKind::gaussian) {
      const double sd = std::hypot(a1_ * x1_.param(), a2_ * x2_.param());
      return Distribution::gaussian(sd).survival(s);
    }
    return quad_integrate([&](double x) { return scaled_survival(x2_, a2_, s - a1_ * x); }, x1_, tol_);
  }

 private:
  double eval(double s, bool left) const {
    auto part = [&](const Distribution& d, double a, double t) {
      return left ? scaled_cdf_left(d, a, t) : scaled_cdf(d, a, t);
    };
    if (a2_ == 0.0) return part(x1_, a1_, s);
    if (a1_ == 0.0) return part(x2_, a2_, s);
    if (x1_.kind() == DistKind::rademacher) {
      return 0.5 * (part(x2_, a2_, s + a1_) + part(x2_, a2_, s - a1_));
    }
    if (x2_.kind() == DistKind::rademacher) {
      return 0.5 * (part(x1_, a1_, s + a2_) + part(x1_, a1_, s - a2_));
    }
    if (x1_.kind() == DistKind::gaussian && x2_.kind() == DistKind::gaussian) {
      const double sd = std::hypot(a1_ * x1_.param(), a2_ * x2_.param());
      return Distribution::gaussian(sd).cdf(s);
    }
    // both continuous: S has no atoms, integrate out X1
    return quad_integrate([&](double x) { return scaled_cdf(x2_, a2_, s - a1_ * x); }, x1_, tol_);
  }

  Distribution x1_, x2_;
  double a1_, a2_;
  double tol_;
};

void require_two_by_one(const MarketSpec& spec, const char* what) {
  if (spec.dx() != 2 || spec.dy() != 1 || spec.men.is_gaussian() || spec.women.is_gaussian()) {
    throw ConfigError(std::string(what) + " needs dx = 2, dy = 1 and independent components on both sides");
  }
}

}  // namespace

CounterexampleReport numeric_counterexample(const MarketSpec& spec, double tol) {
  if (!(tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
  spec.validate();
  require_two_by_one(spec, "numeric_counterexample");
  const Distribution x1 = spec.men.components[0];
  const Distribution x2 = spec.men.components[1];
  const Distribution y = spec.women.components[0];
  const double a1 = spec.alpha(0), a2 = spec.alpha(1), b = spec.beta(0);

  // F_S only needs to be accurate well below the covariance tolerance.
  const IndexDistribution index(x1, x2, a1, a2, 1e-3 * tol);
  auto female_quantile = [&](double p) {
    constexpr double kEdge = 1e-16;
    return y.quantile(std::clamp(p, kEdge, 1.0 - kEdge));
  };

  // E[Y | S = s] under the comonotone coupling.
  auto matched = [&](double s) {
    double lo = index.cdf_left(s), hi = index.cdf(s);
    if (b < 0.0) {
      const double t = lo;
      lo = 1.0 - hi;
      hi = 1.0 - t;
    }
    if (hi - lo > 1e-14) {
      return integrate_interval(female_quantile, lo, hi, 1e-3 * tol * (hi - lo)).value / (hi - lo);
    }
    // no atom: pick the tail that keeps full relative precision
    const double up = b < 0.0 ? index.cdf(s) : index.survival(s);
    if (up < 0.5 && up > 0.0) return y.quantile_upper(std::max(up, 1e-300));
    const double down = b < 0.0 ? index.survival(s) : hi;
    if (down < 0.5 && down > 0.0) return y.quantile(std::max(down, 1e-300));
    return female_quantile(hi);
  };

  const double inner_tol = 1e-3 * tol;
  const double outer_tol = 0.25 * tol;
  auto e_x1_y = [&](double u) {
    return u * quad_integrate([&](double v) { return matched(a1 * u + a2 * v); }, x2, inner_tol);
  };
  auto e_x2_y = [&](double u) {
    return quad_integrate([&](double v) { return v * matched(a1 * u + a2 * v); }, x2, inner_tol);
  };

  CounterexampleReport r;
  r.method = OracleMethod::quadrature;
  r.tolerance = tol;
  const double ey = y.mean();
  r.cov1 = quad_integrate(e_x1_y, x1, outer_tol) - x1.mean() * ey;
  r.cov2 = quad_integrate(e_x2_y, x1, outer_tol) - x2.mean() * ey;
  fill_ratio(r, x1.variance(), x2.variance());
  r.ratio_true = a2 / a1;
  return r;
}

CounterexampleReport quadrature_counterexample(double tol) {
  CounterexampleReport r = numeric_counterexample(counterexample_spec(), tol);
  r.expectation_terms = quadrature_expectation_terms(tol);
  return r;
}

CounterexampleReport closed_form_linear(const MarketSpec& spec) {
  spec.validate();
  require_two_by_one(spec, "closed_form_linear");
  for (const auto& c : spec.men.components) {
    if (c.kind() != DistKind::gaussian) throw ConfigError("closed_form_linear needs Gaussian male components");
  }
  if (spec.women.components[0].kind() != DistKind::gaussian) {
    throw ConfigError("closed_form_linear needs a Gaussian female component");
  }
  const double v1 = spec.men.components[0].variance();
  const double v2 = spec.men.components[1].variance();
  const double a1 = spec.alpha(0), a2 = spec.alpha(1);
  const double sd_s = std::sqrt(a1 * a1 * v1 + a2 * a2 * v2);
  const double slope = std::copysign(spec.women.components[0].param() / sd_s, spec.beta(0));
  CounterexampleReport r;
  r.method = OracleMethod::closed_form;
  r.cov1 = slope * a1 * v1;
  r.cov2 = slope * a2 * v2;
  fill_ratio(r, v1, v2);
  r.ratio_true = a2 / a1;
  return r;
}

CounterexampleReport monte_carlo_counterexample(const MarketSpec& spec, std::size_t n, std::uint64_t seed) {
  require_two_by_one(spec, "monte_carlo_counterexample");
  const MatchedSample sample = simulate_market(spec, n, seed);
  const double nn = static_cast<double>(n);

  auto mean_and_se = [nn](const VectorXd& v) {
    const double m = v.mean();
    const double var = (v.array() - m).square().sum() / nn;
    return std::pair{m, std::sqrt(var / nn)};
  };
  const VectorXd yc = sample.ys.col(0).array() - sample.ys.col(0).mean();
  auto cov_with_y = [&](Eigen::Index j) {
    const VectorXd xc = sample.xs.col(j).array() - sample.xs.col(j).mean();
    return mean_and_se(xc.cwiseProduct(yc));
  };

  CounterexampleReport r;
  r.method = OracleMethod::monte_carlo;
  r.n = n;
  const auto [c1, s1] = cov_with_y(0);
  const auto [c2, s2] = cov_with_y(1);
  r.cov1 = c1;
  r.cov2 = c2;
  r.cov1_se = s1;
  r.cov2_se = s2;
  const MatrixXd sxx = centered_cross_moment(sample.xs, sample.xs);
  const VectorXd implied = sxx.ldlt().solve(VectorXd((VectorXd(2) << c1, c2).finished()));
  r.ratio_cca = implied(1) / implied(0);
  r.ratio_true = spec.alpha(1) / spec.alpha(0);

  const bool paper_market = spec.men.components == counterexample_spec().men.components &&
                            spec.women.components == counterexample_spec().women.components;
  if (paper_market) {
    const VectorXd x2 = sample.xs.col(1);
    auto term = [&](const char* name, auto fn) {
      VectorXd v(x2.size());
      for (Eigen::Index i = 0; i < x2.size(); ++i) v(i) = fn(i);
      const auto [m, se] = mean_and_se(v);
      r.expectation_terms[name] = m;
      r.term_se[name] = se;
    };
    term(kTermGPlus2, [&](Eigen::Index i) { return G(x2(i) + 2.0); });
    term(kTermGMinus2, [&](Eigen::Index i) { return G(x2(i) - 2.0); });
    term(kTermX2GMinus2, [&](Eigen::Index i) { return x2(i) * G(x2(i) - 2.0); });
    term(kTermX2GPlus2, [&](Eigen::Index i) { return x2(i) * G(x2(i) + 2.0); });
    term(kTermX2G, [&](Eigen::Index i) { return x2(i) * G(x2(i)); });
    term(kTermX2Yhat, [&](Eigen::Index i) { return x2(i) * sample.ys(i, 0); });
  }
  return r;
}

}  // namespace matchbench
