"""Least-squares fitting against oracles that do not share its code path.

The main oracle is plain gradient descent on the squared error: whatever
it reaches, the closed-form fit must match or beat.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from privcore import (
    ConstantTargetError,
    LeastSquaresRegressor,
    LinearModel,
    UnderdeterminedError,
    fit_least_squares,
    r_squared,
    score_model,
)


def sse(model, X, y):
    r = y - model.predict(X)
    return float(r @ r)


def gd_sse(X, y, steps=4000, lr=None):
    """Gradient descent on mean squared error, from zero weights."""
    n, d = X.shape
    aug = np.hstack([X, np.ones((n, 1))])
    # Safe step size: 1 / largest eigenvalue of the quadratic term.
    lr = lr or 1.0 / np.linalg.eigvalsh(aug.T @ aug / n).max()
    w = np.zeros(d + 1)
    for _ in range(steps):
        grad = 2.0 * aug.T @ (aug @ w - y) / n
        w = w - lr * grad
    r = y - aug @ w
    return float(r @ r)


def test_two_points_give_exact_line():
    X = np.array([[0.0], [1.0]])
    y = np.array([1.0, 3.0])
    model = fit_least_squares(X, y)
    assert model.weights == pytest.approx([2.0])
    assert model.intercept == pytest.approx(1.0)
    assert not model.ridge_used


def test_noiseless_plane_recovered():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((30, 2))
    y = 3.0 * X[:, 0] - 2.0 * X[:, 1] + 1.0
    model = fit_least_squares(X, y)
    assert np.allclose(model.weights, [3.0, -2.0], atol=1e-9)
    assert model.intercept == pytest.approx(1.0, abs=1e-9)
    assert r_squared(y, model.predict(X)) == pytest.approx(1.0)


def test_matches_gradient_descent_oracle(rng):
    for _ in range(5):
        n = int(rng.integers(10, 50))
        d = int(rng.integers(1, 5))
        X = rng.standard_normal((n, d))
        y = rng.standard_normal(n)
        model = fit_least_squares(X, y)
        assert sse(model, X, y) <= gd_sse(X, y) + 1e-6


def test_residual_orthogonal_to_columns(rng):
    X = rng.standard_normal((40, 3))
    y = rng.standard_normal(40)
    model = fit_least_squares(X, y)
    resid = y - model.predict(X)
    aug = np.hstack([X, np.ones((40, 1))])
    # The defining property of the least-squares solution.
    assert np.all(np.abs(aug.T @ resid) <= 1e-8 * np.linalg.norm(y))


def test_r_squared_reference_points():
    y = np.array([1.0, 2.0, 3.0, 4.0])
    assert r_squared(y, y) == pytest.approx(1.0)
    assert r_squared(y, np.full(4, y.mean())) == pytest.approx(0.0)
    assert r_squared(y, -y) < 0


def test_r_squared_rejects_constant_truth():
    with pytest.raises(ConstantTargetError):
        r_squared(np.ones(5), np.arange(5.0))


def test_fit_maximizes_r_squared(rng):
    X = rng.standard_normal((60, 2))
    y = X @ [1.0, -1.0] + 0.3 * rng.standard_normal(60)
    model = fit_least_squares(X, y)
    best = score_model(model, X, y)
    for _ in range(20):
        bumped = LinearModel(
            weights=model.weights + 0.05 * rng.standard_normal(2),
            intercept=model.intercept + 0.05 * rng.standard_normal(),
        )
        assert score_model(bumped, X, y) <= best + 1e-12


def test_underdetermined_raises():
    X = np.eye(3)
    y = np.arange(3.0)
    with pytest.raises(UnderdeterminedError):
        fit_least_squares(X, y)  # n == d: no residual degrees of freedom


def test_collinear_columns_take_ridge_path(rng):
    base = rng.standard_normal(20)
    X = np.column_stack([base, base])  # exactly singular normal equations
    y = base + 0.1 * rng.standard_normal(20)
    model = fit_least_squares(X, y)
    assert model.ridge_used
    assert np.all(np.isfinite(model.weights))
    assert r_squared(y, model.predict(X)) > 0.5


def test_model_dict_round_trip(rng):
    model = fit_least_squares(rng.standard_normal((10, 2)), rng.standard_normal(10))
    back = LinearModel.from_dict(model.to_dict())
    assert np.array_equal(back.weights, model.weights)
    assert back.intercept == model.intercept
    assert back.ridge_used == model.ridge_used


def test_score_model_is_r_squared_of_predictions(rng):
    X = rng.standard_normal((25, 3))
    y = rng.standard_normal(25)
    model = fit_least_squares(X, y)
    assert score_model(model, X, y) == pytest.approx(r_squared(y, model.predict(X)))


def test_estimator_wrapper_matches_function(rng):
    X = rng.standard_normal((40, 3))
    y = X @ [1.0, 2.0, -0.5] + rng.standard_normal(40)
    est = LeastSquaresRegressor().fit(X, y)
    direct = fit_least_squares(X, y)
    assert np.allclose(est.predict(X), direct.predict(X))
    assert est.score(X, y) == pytest.approx(score_model(direct, X, y))
    # get_params/set_params round trip keeps it cloneable.
    assert isinstance(clone(est), LeastSquaresRegressor)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_orthogonality_holds_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 30))
    d = int(rng.integers(1, min(4, n - 1) + 1))
    X = rng.standard_normal((n, d))
    y = rng.standard_normal(n)
    model = fit_least_squares(X, y)
    resid = y - model.predict(X)
    aug = np.hstack([X, np.ones((n, 1))])
    scale = max(np.linalg.norm(y), 1.0)
    assert np.all(np.abs(aug.T @ resid) <= 1e-7 * scale)
