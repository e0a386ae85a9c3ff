#pragma once

#include <cstddef>
#include <functional>

#include "matchbench/distributions.hpp"

namespace matchbench {

using RealFunction = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of accepted panel error estimates
  std::size_t evaluations = 0;
  int max_depth = 0;
};

inline constexpr int kMaxQuadratureDepth = 64;

/// Adaptive Gauss-Kronrod (7/15) on [a, b] with absolute tolerance `tol`.
/// A panel is accepted when |K15 - G7| is below its share of the tolerance,
/// otherwise it is bisected and each half gets half the budget. Panels are
/// visited depth first, left to right, so the result is reproducible bit
/// for bit. Throws NumericalError past kMaxQuadratureDepth bisections.
QuadratureResult integrate_interval(const RealFunction& f, double a, double b, double tol);

/// E[f(Z)] for Z ~ weight, with estimated error <= tol.
///
/// exponential: integrates up to the (1 - tol/10) quantile and adds
/// f(E[Z | Z > cut]) * P(Z > cut) for the tail. gaussian: same with both tails cut at
/// tol/20. uniform01: [0, 1]. rademacher: exact two-point sum.
QuadratureResult expectation(const RealFunction& f, const Distribution& weight, double tol);

double quad_integrate(const RealFunction& f, const Distribution& weight, double tol);

}  // namespace matchbench
