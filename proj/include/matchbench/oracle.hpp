#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "matchbench/market.hpp"

namespace matchbench {

enum class OracleMethod { closed_form, quadrature, monte_carlo };

std::string to_string(OracleMethod method);

using TermMap = std::map<std::string, double>;

/// Covariances of the two male attributes with the matched female outcome
/// and the CCA weight ratio they imply.
///
/// ratio_cca is alpha2^c / alpha1^c = (cov2 / Var X2) / (cov1 / Var X1); the
/// counterexample has unit variances so this is cov2 / cov1. ratio_true is
/// alpha2 / alpha1.
struct CounterexampleReport {
  double cov1 = 0.0;
  double cov2 = 0.0;
  double ratio_cca = 0.0;
  double ratio_true = 1.0;
  TermMap expectation_terms;
  OracleMethod method = OracleMethod::closed_form;

  // quadrature: requested tolerance. monte_carlo: standard errors.
  std::optional<double> tolerance;
  std::optional<double> cov1_se;
  std::optional<double> cov2_se;
  TermMap term_se;
  std::optional<std::size_t> n;
};

// Term names, in the order they are derived.
inline constexpr const char* kTermGPlus2 = "E[G(X2+2)]";
inline constexpr const char* kTermGMinus2 = "E[G(X2-2)]";
inline constexpr const char* kTermX2GMinus2 = "E[X2*G(X2-2)]";
inline constexpr const char* kTermX2GPlus2 = "E[X2*G(X2+2)]";
inline constexpr const char* kTermX2G = "E[X2*G(X2)]";
inline constexpr const char* kTermX2Yhat = "E[X2*Yhat]";

// Exact values of the expectation identities behind the counterexample.
TermMap expectation_terms();

// cov1 = (1 - e^-2)/4, cov2 = (3e^-2 + 1)/8, ratio = (3 + e^2)/(2e^2 - 2).
CounterexampleReport closed_form_counterexample();

// Symbolic forms of the three headline numbers, for reports.
std::map<std::string, std::string> counterexample_symbols();

/// Matched female outcome for a man with x1 in {-1, +1} and x2 >= 0:
/// 0.5 (G(x2) + G(x2 - 2)) when x1 = -1, 0.5 (G(x2 + 2) + G(x2)) when x1 = +1.
double yhat(double x1, double x2);

// Quadrature counterparts of expectation_terms().
TermMap quadrature_expectation_terms(double tol);

/// Covariances cov(X_i, Y) for a dx = 2, dy = 1 market with independent
/// components, where Y = F_Y^-1(F_S(S)) for S = alpha'X (beta > 0; mirrored
/// for beta < 0). Atoms of S are matched to the average female quantile over
/// the atom's probability mass. Computed by nested adaptive quadrature with
/// overall tolerance `tol`.
CounterexampleReport numeric_counterexample(const MarketSpec& spec, double tol);

// numeric_counterexample(counterexample_spec()) plus quadrature_expectation_terms.
CounterexampleReport quadrature_counterexample(double tol);

// Closed form for all-Gaussian independent components, where the transfer
// map is linear: cov_i = sign(beta) * alpha_i * var_i * sd_Y / sd_S.
CounterexampleReport closed_form_linear(const MarketSpec& spec);

/// Simulates the market and reports sample covariances (divisor n) with
/// standard errors from the sample variance of the centered products. For
/// the counterexample market the expectation terms are filled in as sample
/// means too.
CounterexampleReport monte_carlo_counterexample(const MarketSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace matchbench
