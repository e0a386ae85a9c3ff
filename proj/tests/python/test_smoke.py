import math

import numpy as np
import pytest

import matchbench as mb

RATIO = (3 + math.e**2) / (2 * math.e**2 - 2)


def test_counterexample_closed_form_and_quadrature():
    c = mb.closed_form_counterexample()
    q = mb.quadrature_counterexample(1e-9)
    assert c["ratio_cca"]["value"] == pytest.approx(RATIO, abs=1e-12)
    assert q["cov1"]["value"] == pytest.approx((1 - math.exp(-2)) / 4, abs=1e-9)
    assert "E[X2*Yhat]" in c["expectation_terms"]


def test_simulate_and_cca_inconsistent():
    xs, ys = mb.simulate_market("counterexample", 200000, seed=3)
    assert xs.shape == (200000, 2) and ys.shape == (200000, 1)
    r = mb.cca(xs, ys)
    assert r["alpha"][1] / r["alpha"][0] == pytest.approx(RATIO, abs=0.02)
    o = mb.ols_index(xs, ys)
    np.testing.assert_allclose(o["alpha"], r["alpha"], atol=1e-8)


def test_simulate_is_deterministic():
    a = mb.simulate_market(mb.gaussian_comparison_spec(), 1000, seed=5)
    b = mb.simulate_market(mb.gaussian_comparison_spec(), 1000, seed=5)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_spearman():
    xs, ys = mb.simulate_market("counterexample", 5000, seed=1)
    r = mb.spearman_estimate(xs, ys, restarts=8)
    assert r["alpha"][1] / r["alpha"][0] == pytest.approx(1.0, abs=0.1)
    n = 1000
    x = np.arange(n, dtype=float).reshape(-1, 1)
    assert mb.spearman_objective(x, np.exp(x / n), [1.0], [1.0]) == (2 * n + 1) / (6 * (n + 1))


def test_mrs_linear():
    xs, _ = mb.simulate_market("gaussian", 10000, seed=3)
    ys = xs @ np.array([[1.0], [2.0]])
    r = mb.mrs_estimate(xs, ys)
    assert r["ratios"][0, 1] == pytest.approx(0.5, abs=0.1)


def test_saliency():
    a = np.outer([1.0, 2.0, 2.0], [3.0, 4.0])
    d = mb.svd_decompose(a)
    assert d["rank"] == 1
    alpha, beta = mb.rank1_weights(a)
    np.testing.assert_allclose(alpha, [1 / 3, 2 / 3, 2 / 3], atol=1e-12)
    np.testing.assert_allclose(beta, [0.6, 0.8], atol=1e-12)
    with pytest.raises(mb.NumericalError):
        mb.rank1_weights(np.eye(2))


def test_matching_oracle():
    rng = np.random.default_rng(0)
    xs, ys = rng.normal(size=(6, 2)), rng.normal(size=(6, 1))
    spec = mb.gaussian_comparison_spec()
    assert mb.assignment_oracle(xs, ys, spec)["value"] == mb.rank_sorted_matching(xs, ys, spec)["value"]


def test_config_errors():
    spec = mb.counterexample_spec()
    spec["alpha"] = [0.0, 0.0]
    with pytest.raises(mb.ConfigError, match="alpha"):
        mb.simulate_market(spec, 10)
    with pytest.raises(ValueError):
        mb.cca(np.zeros((3, 2)), np.zeros((4, 1)))


def test_benchmark_rows():
    rows = mb.run_benchmark({"market": "counterexample", "methods": ["cca"], "sweep": [200, 400]})
    assert [r["n"] for r in rows] == [200, 400]
    assert math.isnan(rows[0]["sd_angular_error"])
