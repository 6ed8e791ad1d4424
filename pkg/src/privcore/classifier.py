"""Softmax linear classifier with per-example gradient-norm tracing.

The classifier is a single weight matrix of shape (C, d+1), the last column
acting as the bias. Training is seeded mini-batch gradient descent on the
cross-entropy loss; at the end of every epoch the per-example gradient norm
is computed over the whole training set in evaluation mode and accumulated.
The resulting average over epochs is the example's difficulty score: for
this model the per-example gradient has the closed form

    ||grad_i||_F = ||softmax(W x_i~) - onehot(c_i)||_2 * ||x_i~||_2

where ``x~`` is the feature vector with an appended 1. Sampling norms at
epoch ends in evaluation mode keeps the trace independent of how mini-batches
happened to be partitioned.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._io import atomic_write_text
from ._validation import (
    check_is_fitted,
    check_labels,
    check_matrix,
    infer_num_classes,
)
from .dataset import Dataset
from .rng import stream

TASK_COARSE = "coarse"
TASK_FINE = "fine"
TASKS = (TASK_COARSE, TASK_FINE)


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run."""

    epochs: int = 15
    learning_rate: float = 0.1
    batch_size: int = 32
    seed: int = 0
    l2: float = 0.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {self.l2}")

    def to_dict(self) -> dict:
        return {
            "epochs": int(self.epochs),
            "learning_rate": float(self.learning_rate),
            "batch_size": int(self.batch_size),
            "seed": int(self.seed),
            "l2": float(self.l2),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        return cls(
            epochs=int(data["epochs"]),
            learning_rate=float(data["learning_rate"]),
            batch_size=int(data["batch_size"]),
            seed=int(data["seed"]),
            l2=float(data.get("l2", 0.0)),
        )


@dataclass(frozen=True)
class GradientTrace:
    """Average per-example gradient norm over a training run, for one task."""

    per_example_avg_norm: np.ndarray
    task: str
    epochs_recorded: int
    config: TrainConfig

    def __post_init__(self):
        norms = np.asarray(self.per_example_avg_norm, dtype=np.float64)
        if norms.ndim != 1:
            raise ValueError("per_example_avg_norm must be 1-D")
        if not np.all(np.isfinite(norms)) or np.any(norms < 0):
            raise ValueError("per_example_avg_norm entries must be finite and >= 0")
        norms = np.ascontiguousarray(norms)
        norms.setflags(write=False)
        object.__setattr__(self, "per_example_avg_norm", norms)

    @property
    def n(self) -> int:
        return self.per_example_avg_norm.shape[0]

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "epochs_recorded": int(self.epochs_recorded),
            "config": self.config.to_dict(),
            "per_example_avg_norm": [float(v) for v in self.per_example_avg_norm],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GradientTrace":
        return cls(
            per_example_avg_norm=np.asarray(data["per_example_avg_norm"], dtype=np.float64),
            task=data["task"],
            epochs_recorded=int(data["epochs_recorded"]),
            config=TrainConfig.from_dict(data["config"]),
        )

    def write_csv(self, path) -> None:
        lines = ["index,avg_norm"]
        lines.extend(
            f"{i},{'%.17g' % v}" for i, v in enumerate(self.per_example_avg_norm)
        )
        atomic_write_text(path, "\n".join(lines) + "\n")


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def example_gradient_norms(
    weights: np.ndarray, X: np.ndarray, labels: np.ndarray, jobs: int = 1
) -> np.ndarray:
    """Closed-form per-example cross-entropy gradient norms (evaluation mode)."""
    X = check_matrix(X, "X")
    labels = check_labels(labels, n=X.shape[0])
    num_classes = weights.shape[0]
    if X.shape[1] + 1 != weights.shape[1]:
        raise ValueError(
            f"X has {X.shape[1]} features, weights expect {weights.shape[1] - 1}"
        )
    if labels.size and labels.max() >= num_classes:
        raise ValueError(f"label {labels.max()} out of range for {num_classes} classes")

    def compute(lo: int, hi: int) -> np.ndarray:
        aug = _augment(X[lo:hi])
        probs = _softmax(aug @ weights.T)
        rows = np.arange(hi - lo)
        residual_sq = (
            np.sum(probs**2, axis=1) - 2.0 * probs[rows, labels[lo:hi]] + 1.0
        )
        return np.sqrt(np.maximum(residual_sq, 0.0)) * np.linalg.norm(aug, axis=1)

    if jobs <= 1 or X.shape[0] < 2 * jobs:
        return compute(0, X.shape[0])
    bounds = np.linspace(0, X.shape[0], jobs + 1, dtype=int)
    out = np.empty(X.shape[0])
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [
            (lo, hi, pool.submit(compute, lo, hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for lo, hi, fut in futures:
            out[lo:hi] = fut.result()
    return out


class SoftmaxClassifier(BaseEstimator):
    """Multinomial logistic regression trained by mini-batch gradient descent.

    Deterministic given its parameters: weights start at zero and the only
    randomness is the seeded per-epoch shuffle. Set ``num_classes`` explicitly
    to train over a fixed label universe even when some classes are absent
    from the training rows (class-starved core-sets); left as None, every
    class in [0, max] must be present.

    Fitted attributes: ``weights_`` (C, d+1), ``trace_`` (average per-example
    gradient norm over epochs), ``loss_curve_`` (mean cross-entropy at epoch
    ends, starting with the pre-training loss).
    """

    def __init__(
        self,
        epochs: int = 15,
        learning_rate: float = 0.1,
        batch_size: int = 32,
        seed: int = 0,
        l2: float = 0.0,
        num_classes: int | None = None,
    ):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.seed = seed
        self.l2 = l2
        self.num_classes = num_classes

    def _config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            seed=self.seed,
            l2=self.l2,
        )

    def fit(self, X, y):
        config = self._config()
        X = check_matrix(X, "X")
        labels = check_labels(y, n=X.shape[0])
        if self.num_classes is None:
            num_classes = infer_num_classes(labels)
        else:
            num_classes = int(self.num_classes)
            if num_classes < 1:
                raise ValueError(f"num_classes must be >= 1, got {num_classes}")
            if labels.max() >= num_classes:
                raise ValueError(
                    f"label {labels.max()} out of range for num_classes={num_classes}"
                )
        n, d = X.shape
        aug = _augment(X)
        weights = np.zeros((num_classes, d + 1))
        onehot_rows = np.arange(n)
        rng = stream(config.seed, "train-shuffle")
        norm_total = np.zeros(n)
        losses = [self._mean_loss(weights, aug, labels)]
        for _ in range(config.epochs):
            perm = rng.permutation(n)
            for start in range(0, n, config.batch_size):
                batch = perm[start : start + config.batch_size]
                xb = aug[batch]
                probs = _softmax(xb @ weights.T)
                probs[np.arange(batch.size), labels[batch]] -= 1.0
                grad = probs.T @ xb / batch.size
                if config.l2 > 0:
                    grad[:, :-1] += config.l2 * weights[:, :-1]
                weights -= config.learning_rate * grad
            probs = _softmax(aug @ weights.T)
            residual_sq = np.sum(probs**2, axis=1) - 2.0 * probs[onehot_rows, labels] + 1.0
            norm_total += np.sqrt(np.maximum(residual_sq, 0.0)) * np.linalg.norm(aug, axis=1)
            losses.append(float(-np.mean(np.log(np.maximum(probs[onehot_rows, labels], 1e-300)))))
        self.weights_ = weights
        self.trace_ = norm_total / config.epochs
        self.loss_curve_ = losses
        self.num_classes_ = num_classes
        self.n_features_in_ = d
        return self

    @staticmethod
    def _mean_loss(weights: np.ndarray, aug: np.ndarray, labels: np.ndarray) -> float:
        logits = aug @ weights.T
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        return float(-np.mean(log_probs[np.arange(aug.shape[0]), labels]))

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "weights_")
        X = check_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return _augment(X) @ self.weights_.T

    def predict_proba(self, X) -> np.ndarray:
        return _softmax(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        # np.argmax resolves ties toward the lower class index
        return np.argmax(self.decision_function(X), axis=1)

    def score(self, X, y) -> float:
        labels = check_labels(y)
        return float(np.mean(self.predict(X) == labels))


def train_tracer(
    dataset: Dataset, task: str, config: TrainConfig, num_classes: int | None = None
):
    """Train a classifier for the given categorical role and return it with
    its gradient trace."""
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}, got {task!r}")
    labels = dataset.target(task)
    clf = SoftmaxClassifier(
        epochs=config.epochs,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
        seed=config.seed,
        l2=config.l2,
        num_classes=num_classes,
    )
    clf.fit(dataset.features, labels)
    trace = GradientTrace(
        per_example_avg_norm=clf.trace_,
        task=task,
        epochs_recorded=config.epochs,
        config=config,
    )
    return clf, trace


def accuracy(classifier: SoftmaxClassifier, dataset: Dataset, task: str) -> float:
    """Fraction of rows whose argmax prediction matches the task label."""
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}, got {task!r}")
    return classifier.score(dataset.features, dataset.target(task))
