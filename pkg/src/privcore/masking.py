"""Score constructions over gradient traces and class-balanced selection.

A score vector assigns every training example a number; selection always
keeps the lowest-scoring examples, so a construction expresses a preference
by making its preferred rows score low. The quotient constructions divide
one task's average gradient norm by the other's: keeping rows whose
coarse-task norm is small relative to their fine-task norm preserves what a
coarse classifier learns from them while starving the fine task, and vice
versa. Selection is balanced over fine classes so no class disappears from
the core-set outright.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_is_fitted, check_labels, check_matrix, infer_num_classes
from .classifier import (
    TASK_COARSE,
    TASK_FINE,
    GradientTrace,
    SoftmaxClassifier,
    TrainConfig,
    train_tracer,
)
from .dataset import ROLE_COARSE, ROLE_FINE, Dataset
from .errors import InfeasibleSelectionError
from .rng import stream
from .selection import CoreSet

CONSTRUCTION_RANDOM = "random"
CONSTRUCTION_MIN_NORM_COARSE = "min-norm-coarse"
CONSTRUCTION_MIN_NORM_FINE = "min-norm-fine"
CONSTRUCTION_FINE_MASKING = "fine-masking"
CONSTRUCTION_COARSE_MASKING = "coarse-masking"
CONSTRUCTIONS = (
    CONSTRUCTION_RANDOM,
    CONSTRUCTION_MIN_NORM_COARSE,
    CONSTRUCTION_MIN_NORM_FINE,
    CONSTRUCTION_FINE_MASKING,
    CONSTRUCTION_COARSE_MASKING,
)

EPSILON = 1e-12


@dataclass(frozen=True)
class ScoreVector:
    """Per-example selection scores; lower means preferred."""

    scores: np.ndarray
    construction: str
    epsilon: float = EPSILON

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1:
            raise ValueError("scores must be 1-D")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        scores = np.ascontiguousarray(scores)
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    @property
    def n(self) -> int:
        return self.scores.shape[0]


def make_scores(
    trace_coarse: GradientTrace,
    trace_fine: GradientTrace,
    construction: str,
    seed: int = 0,
) -> ScoreVector:
    """Build selection scores from a pair of task traces.

    ``random`` ignores the traces (seeded uniforms), ``min-norm-*`` prefers
    the smallest norms of one task, and the masking quotients prefer rows
    whose kept-task norm is small relative to the starved-task norm:
    fine-masking scores by (coarse + eps) / (fine + eps), coarse-masking by
    the reciprocal. The two quotient constructions therefore multiply to 1
    on every row.
    """
    if construction not in CONSTRUCTIONS:
        raise ValueError(
            f"construction must be one of {CONSTRUCTIONS}, got {construction!r}"
        )
    if trace_coarse.task != TASK_COARSE:
        raise ValueError(f"first trace must be task {TASK_COARSE!r}, got {trace_coarse.task!r}")
    if trace_fine.task != TASK_FINE:
        raise ValueError(f"second trace must be task {TASK_FINE!r}, got {trace_fine.task!r}")
    if trace_coarse.n != trace_fine.n:
        raise ValueError(
            f"trace lengths differ: {trace_coarse.n} vs {trace_fine.n}"
        )
    coarse = trace_coarse.per_example_avg_norm
    fine = trace_fine.per_example_avg_norm
    if construction == CONSTRUCTION_RANDOM:
        scores = stream(seed, "mask-random").random(trace_coarse.n)
    elif construction == CONSTRUCTION_MIN_NORM_COARSE:
        scores = coarse.copy()
    elif construction == CONSTRUCTION_MIN_NORM_FINE:
        scores = fine.copy()
    elif construction == CONSTRUCTION_FINE_MASKING:
        scores = (coarse + EPSILON) / (fine + EPSILON)
    else:
        scores = (fine + EPSILON) / (coarse + EPSILON)
    return ScoreVector(scores=scores, construction=construction)


def class_balanced_select(
    scores: ScoreVector | np.ndarray,
    fine_labels: np.ndarray,
    k: int,
    parent_fingerprint: str = "",
) -> CoreSet:
    """Pick k lowest-scoring examples with per-fine-class quotas.

    Every class contributes its floor(k / C) lowest-scoring members; the
    k mod C leftover slots go to the best remaining examples in global
    (score, index) order, at most one extra per class. Ties break toward
    the smaller row index throughout.
    """
    values = scores.scores if isinstance(scores, ScoreVector) else np.asarray(scores, dtype=np.float64)
    labels = check_labels(fine_labels, n=values.shape[0])
    n = values.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    num_classes = infer_num_classes(labels)
    base, extra_slots = divmod(k, num_classes)
    chosen = np.zeros(n, dtype=bool)
    for c in range(num_classes):
        members = np.flatnonzero(labels == c)
        if members.size < base:
            raise InfeasibleSelectionError(
                f"class {c} has {members.size} examples, needs {base} for k={k} "
                f"over {num_classes} classes"
            )
        ranked = members[np.lexsort((members, values[members]))]
        chosen[ranked[:base]] = True
    if extra_slots:
        has_extra = np.zeros(num_classes, dtype=bool)
        taken = 0
        for i in np.lexsort((np.arange(n), values)):
            if chosen[i] or has_extra[labels[i]]:
                continue
            chosen[i] = True
            has_extra[labels[i]] = True
            taken += 1
            if taken == extra_slots:
                break
        if taken < extra_slots:
            raise InfeasibleSelectionError(
                f"only {taken} of {extra_slots} leftover slots could be filled "
                f"with at most one extra per class"
            )
    return CoreSet(
        parent_fingerprint=parent_fingerprint,
        indices=np.flatnonzero(chosen),
    )


@dataclass(frozen=True)
class TaskPairReport:
    """Test accuracy of classifiers trained on one core-set, both tasks."""

    construction: str
    k: int
    coarse_accuracy: float
    fine_accuracy: float
    config: TrainConfig
    warnings: tuple = field(default_factory=tuple)

    @property
    def gap(self) -> float:
        return self.coarse_accuracy - self.fine_accuracy

    def to_dict(self) -> dict:
        return {
            "construction": self.construction,
            "k": int(self.k),
            "coarse_accuracy": float(self.coarse_accuracy),
            "fine_accuracy": float(self.fine_accuracy),
            "gap": float(self.gap),
            "config": self.config.to_dict(),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TaskPairReport":
        return cls(
            construction=data["construction"],
            k=int(data["k"]),
            coarse_accuracy=float(data["coarse_accuracy"]),
            fine_accuracy=float(data["fine_accuracy"]),
            config=TrainConfig.from_dict(data["config"]),
            warnings=tuple(data.get("warnings", ())),
        )


def evaluate_coreset(
    train_dataset: Dataset,
    coreset: CoreSet,
    test_dataset: Dataset,
    config: TrainConfig,
    construction: str = "",
) -> TaskPairReport:
    """Train fresh classifiers on the core-set rows and score them on held-out
    data, one classifier per task.

    The label universe is taken from the full training dataset, so a core-set
    missing some class still trains (the gap is recorded as a warning rather
    than an error).
    """
    coreset.validate_parent(train_dataset)
    sub = train_dataset.subset(coreset.indices)
    warnings = []
    accuracies = {}
    for task in (TASK_COARSE, TASK_FINE):
        num_classes = train_dataset.num_classes(task)
        present = np.unique(sub.target(task))
        if present.size < num_classes:
            missing = sorted(set(range(num_classes)) - set(int(c) for c in present))
            warnings.append(
                f"{task} task: classes {missing} have no examples in the core-set"
            )
        clf, _ = train_tracer(sub, task, config, num_classes=num_classes)
        accuracies[task] = clf.score(test_dataset.features, test_dataset.target(task))
    return TaskPairReport(
        construction=construction,
        k=coreset.k,
        coarse_accuracy=accuracies[TASK_COARSE],
        fine_accuracy=accuracies[TASK_FINE],
        config=config,
        warnings=tuple(warnings),
    )


class MaskingCoreSetSelector(BaseEstimator):
    """Selects a class-balanced core-set from gradient-norm scores.

    Trains one tracer per task on (X, coarse, fine), combines the two traces
    under the chosen construction, and keeps the k lowest-scoring rows with
    per-fine-class quotas. ``transform`` returns the selected feature rows.
    """

    def __init__(
        self,
        k: int = 200,
        construction: str = CONSTRUCTION_FINE_MASKING,
        epochs: int = 15,
        learning_rate: float = 0.1,
        batch_size: int = 32,
        seed: int = 0,
        l2: float = 0.0,
    ):
        self.k = k
        self.construction = construction
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.seed = seed
        self.l2 = l2

    def fit(self, X, y, fine=None):
        """Fit on features X with coarse labels y and fine labels ``fine``."""
        if fine is None:
            raise ValueError("fine labels are required (pass fine=...)")
        X = check_matrix(X, "X")
        coarse = check_labels(y, n=X.shape[0])
        fine = check_labels(fine, n=X.shape[0])
        dataset = Dataset(features=X, targets={ROLE_COARSE: coarse, ROLE_FINE: fine})
        config = TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            seed=self.seed,
            l2=self.l2,
        )
        _, trace_coarse = train_tracer(dataset, TASK_COARSE, config)
        _, trace_fine = train_tracer(dataset, TASK_FINE, config)
        self.trace_coarse_ = trace_coarse
        self.trace_fine_ = trace_fine
        self.scores_ = make_scores(trace_coarse, trace_fine, self.construction, self.seed)
        self.coreset_ = class_balanced_select(
            self.scores_, fine, self.k, dataset.fingerprint()
        )
        self.indices_ = np.asarray(self.coreset_.indices, dtype=np.int64)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "indices_")
        X = check_matrix(X, "X")
        if X.shape[0] <= int(self.indices_.max()):
            raise ValueError(
                f"X has {X.shape[0]} rows, selection references index {int(self.indices_.max())}"
            )
        return X[self.indices_]

    def fit_transform(self, X, y=None, fine=None):
        return self.fit(X, y, fine=fine).transform(X)
