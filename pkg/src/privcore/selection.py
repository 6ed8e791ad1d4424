"""Core-set selection for the regression setting.

Each point gets a loss combining a fidelity term (squared residual against
the public model fit on the full data) and a hide term steering the subset
away from information about the secret target:

* ``none``        fidelity only,
* ``hide-value``  squared deviation of the secret value from a central value,
  flattening the secret signal in the published subset,
* ``plant``       squared residual against a random planted model, so that a
  learner fitting the secret target on the subset recovers the plant instead
  of the truth.

The core-set is the bottom-k of these per-point losses. A separate toy
selector preserves a scalar sample's mean while inflating its dispersion.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_is_fitted, check_matrix, check_vector
from .dataset import ROLE_PUBLIC, ROLE_SECRET, Dataset
from .errors import InfeasibleSelectionError
from .linear import LinearModel, fit_least_squares
from .rng import stream

HIDE_NONE = "none"
HIDE_VALUE = "hide-value"
HIDE_PLANT = "plant"
HIDE_MODES = (HIDE_NONE, HIDE_VALUE, HIDE_PLANT)

PLANT_AGAINST_SECRET = "secret"
PLANT_AGAINST_PUBLIC = "literal-public"
PLANT_LABELS = (PLANT_AGAINST_SECRET, PLANT_AGAINST_PUBLIC)


@dataclass(frozen=True)
class HideConfig:
    """Configuration of the hide term added to the fidelity loss."""

    mode: str = HIDE_NONE
    alpha: float = 1.0
    plant_model: LinearModel | None = None
    plant_label: str = PLANT_AGAINST_SECRET
    z_center: float | None = None

    def __post_init__(self):
        if self.mode not in HIDE_MODES:
            raise ValueError(f"mode must be one of {HIDE_MODES}, got {self.mode!r}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.plant_label not in PLANT_LABELS:
            raise ValueError(f"plant_label must be one of {PLANT_LABELS}, got {self.plant_label!r}")


@dataclass(frozen=True)
class CoreSet:
    """A size-k subset of a parent dataset, as sorted row indices."""

    parent_fingerprint: str
    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) == 0:
            raise ValueError("a core-set must contain at least one index")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if idx[0] < 0:
            raise ValueError("indices must be nonnegative")
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return len(self.indices)

    def validate_parent(self, dataset: Dataset) -> None:
        if self.parent_fingerprint != dataset.fingerprint():
            raise ValueError("core-set does not belong to this dataset (fingerprint mismatch)")
        if self.indices[-1] >= dataset.n:
            raise ValueError(f"core-set index {self.indices[-1]} out of range for n={dataset.n}")

    def to_dict(self) -> dict:
        return {
            "parent_fingerprint": self.parent_fingerprint,
            "k": self.k,
            "indices": list(self.indices),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoreSet":
        coreset = cls(parent_fingerprint=data["parent_fingerprint"], indices=tuple(data["indices"]))
        if "k" in data and int(data["k"]) != coreset.k:
            raise ValueError(f"k={data['k']} does not match {coreset.k} indices")
        return coreset


def _chunked_rows(n: int, jobs: int, compute) -> np.ndarray:
    """Evaluate a row-range function in parallel chunks; identical to the
    sequential result because each row is computed independently."""
    if jobs <= 1 or n < 2 * jobs:
        return compute(0, n)
    bounds = np.linspace(0, n, jobs + 1, dtype=int)
    out = np.empty(n)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [
            (lo, hi, pool.submit(compute, lo, hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for lo, hi, fut in futures:
            out[lo:hi] = fut.result()
    return out


def point_losses(
    dataset: Dataset, public_model: LinearModel, hide: HideConfig, jobs: int = 1
) -> np.ndarray:
    """Per-point selection loss: public-model residual^2 + alpha * hide term."""
    if hide.mode == HIDE_PLANT and hide.plant_model is None:
        raise ValueError("plant mode requires a plant model (see make_plant)")
    y = dataset.target(ROLE_PUBLIC)
    X = dataset.features
    z = dataset.target(ROLE_SECRET) if hide.mode != HIDE_NONE else None

    if hide.mode == HIDE_VALUE:
        z_center = float(np.mean(z)) if hide.z_center is None else float(hide.z_center)
    else:
        z_center = None

    def compute(lo: int, hi: int) -> np.ndarray:
        fidelity = (y[lo:hi] - public_model.predict(X[lo:hi])) ** 2
        if hide.mode == HIDE_NONE:
            return fidelity
        if hide.mode == HIDE_VALUE:
            return fidelity + hide.alpha * (z[lo:hi] - z_center) ** 2
        label = z[lo:hi] if hide.plant_label == PLANT_AGAINST_SECRET else y[lo:hi]
        residual = label - hide.plant_model.predict(X[lo:hi])
        return fidelity + hide.alpha * residual**2

    losses = _chunked_rows(dataset.n, jobs, compute)
    if not np.all(np.isfinite(losses)):
        raise ValueError("point losses are not finite")
    return losses


def select_bottom_k(losses, k: int, parent_fingerprint: str = "") -> CoreSet:
    """Indices of the k smallest losses; ties broken toward the smaller index."""
    losses = check_vector(losses, name="losses")
    n = losses.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    order = np.argsort(losses, kind="stable")
    chosen = np.sort(order[:k])
    return CoreSet(parent_fingerprint=parent_fingerprint, indices=tuple(int(i) for i in chosen))


def make_plant(seed: int, d: int) -> LinearModel:
    """Random affine model with i.i.d. N(0, 1) weights and intercept."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    rng = stream(seed, "plant")
    weights = rng.standard_normal(d)
    intercept = float(rng.standard_normal())
    return LinearModel(weights=weights, intercept=intercept)


def _subset_mean_gap(deviations: np.ndarray, chosen: np.ndarray) -> float:
    return abs(float(deviations[chosen].sum())) / chosen.size


def select_moment_coreset(
    samples, k: int, mean_tolerance: float, parent_fingerprint: str = ""
) -> CoreSet:
    """Size-k subset preserving the sample mean while inflating dispersion.

    Greedy pass: repeatedly take the most extreme remaining point on the side
    of the full mean that pulls the running subset mean back toward it.
    Repair pass: swap boundary points (least-extreme selected for interior
    unselected) until the subset mean is within ``mean_tolerance`` of the full
    mean, preferring swaps that keep the subset spread maximal.

    Raises :class:`InfeasibleSelectionError` with the best achieved gap when
    the tolerance cannot be met.
    """
    x = check_vector(samples, name="samples")
    n = x.shape[0]
    if not 2 <= k <= n:
        raise ValueError(f"k must be in [2, {n}], got {k}")
    if mean_tolerance <= 0:
        raise ValueError(f"mean_tolerance must be > 0, got {mean_tolerance}")

    dev = x - x.mean()
    # positive side sorted most-extreme-first; ties toward the smaller index
    pos = sorted(np.flatnonzero(dev >= 0), key=lambda i: (-dev[i], i))
    neg = sorted(np.flatnonzero(dev < 0), key=lambda i: (dev[i], i))
    pos_at = 0
    neg_at = 0
    chosen: list[int] = []
    running = 0.0
    for _ in range(k):
        take_neg = running > 0
        if take_neg and neg_at >= len(neg):
            take_neg = False
        if not take_neg and pos_at >= len(pos):
            take_neg = True
        if take_neg:
            i = neg[neg_at]
            neg_at += 1
        else:
            i = pos[pos_at]
            pos_at += 1
        chosen.append(int(i))
        running += dev[i]

    selected = np.zeros(n, dtype=bool)
    selected[chosen] = True
    target = mean_tolerance * k  # tolerance on the deviation sum

    max_swaps = max(n, 16)
    for _ in range(max_swaps):
        if abs(running) <= target:
            break
        inside = np.flatnonzero(selected)
        outside = np.flatnonzero(~selected)
        if outside.size == 0:
            break
        # candidate swaps: for each selected i, the outside j minimizing the
        # resulting |sum|; among tolerance-achieving swaps keep the one that
        # sacrifices the least squared deviation
        out_dev = dev[outside]
        out_order = np.argsort(out_dev, kind="stable")
        out_sorted = out_dev[out_order]
        best = None
        for i in inside:
            want = dev[i] - running  # out-deviation that would zero the sum
            # candidates: endpoints of the tolerance-feasible interval (spread
            # is convex in dev_j, so its max over the interval sits there)
            # plus the nearest points to the exact zero for gap reduction
            cands = set()
            lo_pos = int(np.searchsorted(out_sorted, want - target, side="left"))
            hi_pos = int(np.searchsorted(out_sorted, want + target, side="right")) - 1
            if lo_pos <= hi_pos:
                cands.add(lo_pos)
                cands.add(hi_pos)
            zero_pos = int(np.searchsorted(out_sorted, want))
            for cand in (zero_pos - 1, zero_pos):
                if 0 <= cand < out_sorted.size:
                    cands.add(cand)
            for cand in sorted(cands):
                if not 0 <= cand < out_sorted.size:
                    continue
                j = outside[out_order[cand]]
                new_sum = running - dev[i] + dev[j]
                achieves = abs(new_sum) <= target
                spread_change = dev[j] ** 2 - dev[i] ** 2
                key = (not achieves, -spread_change if achieves else abs(new_sum), int(i), int(j))
                if best is None or key < best[0]:
                    best = (key, int(i), int(j), new_sum)
        if best is None:
            break
        _, i, j, new_sum = best
        if abs(new_sum) >= abs(running):
            break
        selected[i] = False
        selected[j] = True
        running = new_sum

    final = np.flatnonzero(selected)
    gap = _subset_mean_gap(dev, final)
    if gap > mean_tolerance:
        raise InfeasibleSelectionError(
            f"could not meet mean tolerance {mean_tolerance}; best achieved gap {gap:.6g}",
            best_gap=gap,
        )
    return CoreSet(parent_fingerprint=parent_fingerprint, indices=tuple(int(i) for i in final))


class PrivacyCoreSetSelector(BaseEstimator):
    """Estimator face over the loss-based core-set construction.

    ``fit(X, y, secret=...)`` fits the public model on the full data, scores
    every point, and selects the bottom-k core-set; ``transform(X)`` returns
    the selected rows. The plant model, when requested and not supplied, is
    drawn from ``seed``.
    """

    def __init__(
        self,
        k: int = 50,
        mode: str = HIDE_NONE,
        alpha: float = 1.0,
        plant_label: str = PLANT_AGAINST_SECRET,
        z_center: float | None = None,
        plant_model: LinearModel | None = None,
        seed: int = 0,
    ):
        self.k = k
        self.mode = mode
        self.alpha = alpha
        self.plant_label = plant_label
        self.z_center = z_center
        self.plant_model = plant_model
        self.seed = seed

    def fit(self, X, y, secret=None):
        X = check_matrix(X, "X")
        y = check_vector(y, n=X.shape[0], name="y")
        targets = {ROLE_PUBLIC: y}
        if secret is not None:
            targets[ROLE_SECRET] = check_vector(secret, n=X.shape[0], name="secret")
        elif self.mode != HIDE_NONE:
            raise ValueError(f"mode {self.mode!r} requires the secret column")
        dataset = Dataset(features=X, targets=targets)
        plant = self.plant_model
        if self.mode == HIDE_PLANT and plant is None:
            plant = make_plant(self.seed, X.shape[1])
        hide = HideConfig(
            mode=self.mode,
            alpha=self.alpha,
            plant_model=plant,
            plant_label=self.plant_label,
            z_center=self.z_center,
        )
        self.public_model_ = fit_least_squares(X, y)
        self.losses_ = point_losses(dataset, self.public_model_, hide)
        self.coreset_ = select_bottom_k(self.losses_, self.k, dataset.fingerprint())
        self.indices_ = np.asarray(self.coreset_.indices, dtype=np.int64)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "indices_")
        X = check_matrix(X, "X")
        if X.shape[0] <= int(self.indices_.max()):
            raise ValueError("X has fewer rows than the fitted core-set expects")
        return X[self.indices_]

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).transform(X)
