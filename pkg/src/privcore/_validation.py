"""Input validation helpers used by the estimators and functional ops."""

from __future__ import annotations

import numpy as np

from .errors import EmptyClassError


def check_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a finite 2-D float64 array with at least one row and column."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_vector(y, n: int | None = None, name: str = "y", finite: bool = True) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if n is not None and y.shape[0] != n:
        raise ValueError(f"{name} has length {y.shape[0]}, expected {n}")
    if finite and not np.all(np.isfinite(y)):
        raise ValueError(f"{name} contains non-finite values")
    return y


def check_labels(labels, n: int | None = None, name: str = "labels") -> np.ndarray:
    """Coerce to nonnegative integer class labels."""
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {n}")
    if arr.size and not np.all(np.isfinite(arr.astype(np.float64))):
        raise ValueError(f"{name} contains non-finite values")
    as_int = arr.astype(np.int64)
    if arr.size and np.any(as_int.astype(np.float64) != arr.astype(np.float64)):
        raise ValueError(f"{name} must contain integers")
    if arr.size and as_int.min() < 0:
        raise ValueError(f"{name} must be nonnegative class indices")
    return as_int


def infer_num_classes(labels: np.ndarray, name: str = "labels") -> int:
    """Number of classes as max label + 1, requiring every class populated."""
    if labels.size == 0:
        raise ValueError(f"{name} is empty")
    num_classes = int(labels.max()) + 1
    present = np.bincount(labels, minlength=num_classes) > 0
    if not present.all():
        missing = np.flatnonzero(~present)
        raise EmptyClassError(
            f"{name}: classes {missing.tolist()} have no examples", missing_classes=missing.tolist()
        )
    return num_classes


def check_is_fitted(estimator, attribute: str) -> None:
    if getattr(estimator, attribute, None) is None:
        raise ValueError(
            f"{type(estimator).__name__} is not fitted yet; call fit() before this method"
        )
