"""Single-index assortative matching markets and index-weight estimators."""

from ._core import (
    ConfigError,
    NumericalError,
    assignment_oracle,
    cca,
    closed_form_counterexample,
    consistency_condition,
    counterexample_spec,
    gaussian_comparison_spec,
    monte_carlo_counterexample,
    mrs_estimate,
    ols_index,
    quadrature_counterexample,
    rank1_weights,
    rank_sorted_matching,
    run_benchmark,
    simulate_market,
    spearman_estimate,
    spearman_objective,
    svd_decompose,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "assignment_oracle",
    "cca",
    "closed_form_counterexample",
    "consistency_condition",
    "counterexample_spec",
    "gaussian_comparison_spec",
    "monte_carlo_counterexample",
    "mrs_estimate",
    "ols_index",
    "quadrature_counterexample",
    "rank1_weights",
    "rank_sorted_matching",
    "run_benchmark",
    "simulate_market",
    "spearman_estimate",
    "spearman_objective",
    "svd_decompose",
]
