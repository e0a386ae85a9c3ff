#include "matchbench/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "matchbench/errors.hpp"

namespace matchbench {

namespace {

// Kronrod nodes on [0, 1] (symmetric); odd indices are the Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double kronrod;
  double gauss;
};

Panel gk15(const RealFunction& f, double a, double b, std::size_t& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double k = fc * kKronrodWeights[7];
  double g = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    k += kKronrodWeights[i] * pair;
    if (i % 2 == 1) g += kGaussWeights[i / 2] * pair;
  }
  evals += 15;
  if (!std::isfinite(k)) throw NumericalError("integrand is not finite on the integration range");
  return {k * half, g * half};
}

void adapt(const RealFunction& f, double a, double b, double tol, int depth, QuadratureResult& acc) {
  const Panel p = gk15(f, a, b, acc.evaluations);
  const double err = std::abs(p.kronrod - p.gauss);
  acc.max_depth = std::max(acc.max_depth, depth);
  if (err <= tol || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
    acc.value += p.kronrod;
    acc.error += err;
    return;
  }
  if (depth >= kMaxQuadratureDepth) {
    throw NumericalError("quadrature did not converge after " + std::to_string(kMaxQuadratureDepth) +
                         " bisections near [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, 0.5 * tol, depth + 1, acc);
  adapt(f, mid, b, 0.5 * tol, depth + 1, acc);
}

}  // namespace

QuadratureResult integrate_interval(const RealFunction& f, double a, double b, double tol) {
  if (!(tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
  QuadratureResult acc;
  if (a == b) return acc;
  adapt(f, a, b, tol, 0, acc);
  return acc;
}

QuadratureResult expectation(const RealFunction& f, const Distribution& weight, double tol) {
  if (!(tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
  switch (weight.kind()) {
    case DistKind::rademacher: {
      QuadratureResult r;
      r.value = 0.5 * (f(-1.0) + f(1.0));
      r.evaluations = 2;
      return r;
    }
    case DistKind::uniform01:
      return integrate_interval(f, 0.0, 1.0, tol);
    case DistKind::exponential: {
      const double rate = weight.param();
      const double tail = std::min(0.1 * tol, 0.5);
      const double cut = weight.quantile(1.0 - tail);
      auto g = [&](double z) { return f(z) * rate * std::exp(-rate * z); };
      QuadratureResult r = integrate_interval(g, 0.0, cut, 0.5 * tol);
      // memoryless tail: E[Z | Z > cut] = cut + 1/rate
      r.value += f(cut + 1.0 / rate) * (1.0 - weight.cdf(cut));
      r.evaluations += 1;
      return r;
    }
    case DistKind::gaussian: {
      const double tail = std::min(0.05 * tol, 0.25);
      const double lo = weight.quantile(tail);
      const double hi = weight.quantile(1.0 - tail);
      const double sd = weight.param();
      const double norm = 1.0 / (sd * std::sqrt(2.0 * M_PI));
      auto g = [&](double z) { return f(z) * norm * std::exp(-0.5 * (z / sd) * (z / sd)); };
      QuadratureResult r = integrate_interval(g, lo, hi, 0.5 * tol);
      // each tail evaluated at its conditional mean (inverse Mills ratio)
      const double mills = sd * norm * sd * std::exp(-0.5 * (hi / sd) * (hi / sd)) / (1.0 - weight.cdf(hi));
      r.value += f(-mills) * weight.cdf(lo) + f(mills) * (1.0 - weight.cdf(hi));
      r.evaluations += 2;
      return r;
    }
  }
  return {};
}

double quad_integrate(const RealFunction& f, const Distribution& weight, double tol) {
  return expectation(f, weight, tol).value;
}

}  // namespace matchbench
