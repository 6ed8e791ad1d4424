"""Ordinary least squares with an sklearn-style estimator face.

The solver uses the normal equations on the intercept-augmented design
matrix. When the Gram matrix is singular or its condition estimate exceeds
``COND_LIMIT`` a small ridge term is added and recorded on the result, so the
caller can tell a regularized fit from a plain one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_is_fitted, check_matrix, check_vector
from .errors import ConstantTargetError, UnderdeterminedError

COND_LIMIT = 1e12
RIDGE_SCALE = 1e-8


@dataclass(frozen=True)
class LinearModel:
    """An affine predictor: ``predict(x) = weights @ x + intercept``."""

    weights: np.ndarray
    intercept: float
    ridge_used: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if not np.all(np.isfinite(w)) or not np.isfinite(self.intercept):
            raise ValueError("LinearModel requires finite weights and intercept")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "intercept", float(self.intercept))

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def predict(self, X) -> np.ndarray:
        X = check_matrix(X, "X")
        if X.shape[1] != self.dim:
            raise ValueError(f"X has {X.shape[1]} features, model expects {self.dim}")
        return X @ self.weights + self.intercept

    def to_dict(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "intercept": float(self.intercept),
            "ridge_used": bool(self.ridge_used),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearModel":
        return cls(
            weights=np.asarray(data["weights"], dtype=np.float64),
            intercept=float(data["intercept"]),
            ridge_used=bool(data.get("ridge_used", False)),
        )


def fit_least_squares(X, y) -> LinearModel:
    """Fit an affine model minimizing the sum of squared residuals.

    Requires ``n >= d + 1`` rows for the d weights plus intercept. Falls back
    to ridge (lambda = 1e-8 * trace/size of the Gram matrix) when the normal
    equations are singular or ill-conditioned.
    """
    X = check_matrix(X, "X")
    y = check_vector(y, n=X.shape[0], name="y")
    n, d = X.shape
    if n <= d:
        raise UnderdeterminedError(
            f"need at least {d + 1} rows to fit {d} weights plus an intercept, got {n}"
        )
    augmented = np.hstack([X, np.ones((n, 1))])
    gram = augmented.T @ augmented
    rhs = augmented.T @ y
    ridge_used = False
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        ridge_used = True
        lam = RIDGE_SCALE * np.trace(gram) / gram.shape[0]
        gram = gram + lam * np.eye(gram.shape[0])
    try:
        theta = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        ridge_used = True
        lam = RIDGE_SCALE * np.trace(gram) / gram.shape[0]
        theta = np.linalg.solve(gram + lam * np.eye(gram.shape[0]), rhs)
    return LinearModel(weights=theta[:-1], intercept=float(theta[-1]), ridge_used=ridge_used)


def r_squared(y_true, y_pred) -> float:
    """Coefficient of determination, centered on the evaluation set's own mean.

    Negative when the predictions do worse than the mean predictor. Raises
    :class:`ConstantTargetError` when the target has no variance.
    """
    y_true = check_vector(y_true, name="y_true")
    y_pred = check_vector(y_pred, n=y_true.shape[0], name="y_pred")
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        raise ConstantTargetError("r_squared is undefined for a constant target")
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - ss_res / ss_tot


def score_model(model: LinearModel, X, y) -> float:
    return r_squared(y, model.predict(X))


class LeastSquaresRegressor(BaseEstimator):
    """sklearn-compatible wrapper around :func:`fit_least_squares`.

    Fitted attributes: ``coef_``, ``intercept_``, ``ridge_used_``, ``model_``.
    ``score`` returns r-squared on the given evaluation set.
    """

    def __init__(self):
        pass

    def fit(self, X, y):
        self.model_ = fit_least_squares(X, y)
        self.coef_ = self.model_.weights
        self.intercept_ = self.model_.intercept
        self.ridge_used_ = self.model_.ridge_used
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        return self.model_.predict(X)

    def score(self, X, y) -> float:
        check_is_fitted(self, "model_")
        return score_model(self.model_, X, y)
