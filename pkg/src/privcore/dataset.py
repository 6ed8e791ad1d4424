"""Dataset container, seeded synthetic generators, and CSV/manifest I/O.

A :class:`Dataset` is an immutable feature matrix plus named target columns.
Target columns are identified by role:

* ``"y"``      public continuous target (the task a published subset should
  still support),
* ``"z"``      secret continuous target (the task it should degrade),
* ``"coarse"`` / ``"fine"`` categorical labels at two granularities.

Generated datasets carry a :class:`GeneratorManifest` that fully determines
their content: regenerating from the manifest reproduces the same bytes.

The interchange format is CSV (UTF-8, header row, ``.`` decimal) with a JSON
manifest sidecar. Role columns use the role name as column name; all other
columns are features.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import atomic_write_text
from .errors import CsvParseError
from .linear import LinearModel
from .rng import stream

ROLE_PUBLIC = "y"
ROLE_SECRET = "z"
ROLE_COARSE = "coarse"
ROLE_FINE = "fine"
ROLES = (ROLE_PUBLIC, ROLE_SECRET, ROLE_COARSE, ROLE_FINE)
CATEGORICAL_ROLES = (ROLE_COARSE, ROLE_FINE)

KIND_LINEAR = "linear-synthetic"
KIND_HIERARCHICAL = "hierarchical-synthetic"
KIND_NORMAL = "normal-scalar"
KIND_EXTERNAL = "external"

# default hierarchical-synthetic configuration: 5 coarse x 4 fine x 100 each
DEFAULT_HIERARCHY = {
    "num_coarse": 5,
    "fine_per_coarse": 4,
    "per_fine_count": 100,
    "d": 16,
    "coarse_sep": 4.0,
    "fine_sep": 2.5,
    "within_sd": 1.25,
}


@dataclass(frozen=True)
class HierarchySpec:
    num_coarse: int
    fine_per_coarse: int
    per_fine_count: int
    coarse_sep: float
    fine_sep: float
    within_sd: float

    def to_dict(self) -> dict:
        return {
            "num_coarse": int(self.num_coarse),
            "fine_per_coarse": int(self.fine_per_coarse),
            "per_fine_count": int(self.per_fine_count),
            "coarse_sep": float(self.coarse_sep),
            "fine_sep": float(self.fine_sep),
            "within_sd": float(self.within_sd),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HierarchySpec":
        return cls(
            num_coarse=int(data["num_coarse"]),
            fine_per_coarse=int(data["fine_per_coarse"]),
            per_fine_count=int(data["per_fine_count"]),
            coarse_sep=float(data["coarse_sep"]),
            fine_sep=float(data["fine_sep"]),
            within_sd=float(data["within_sd"]),
        )


@dataclass(frozen=True)
class GeneratorManifest:
    """Provenance record sufficient to regenerate a synthetic dataset."""

    kind: str
    seed: int
    n: int
    d: int
    noise_sd: float | None = None
    true_y_model: LinearModel | None = None
    true_z_model: LinearModel | None = None
    hierarchy: HierarchySpec | None = None
    mu: float | None = None
    sigma: float | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": int(self.seed),
            "n": int(self.n),
            "d": int(self.d),
            "noise_sd": None if self.noise_sd is None else float(self.noise_sd),
            "true_y_model": None if self.true_y_model is None else self.true_y_model.to_dict(),
            "true_z_model": None if self.true_z_model is None else self.true_z_model.to_dict(),
            "hierarchy": None if self.hierarchy is None else self.hierarchy.to_dict(),
            "mu": None if self.mu is None else float(self.mu),
            "sigma": None if self.sigma is None else float(self.sigma),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorManifest":
        return cls(
            kind=data["kind"],
            seed=int(data["seed"]),
            n=int(data["n"]),
            d=int(data["d"]),
            noise_sd=None if data.get("noise_sd") is None else float(data["noise_sd"]),
            true_y_model=(
                None
                if data.get("true_y_model") is None
                else LinearModel.from_dict(data["true_y_model"])
            ),
            true_z_model=(
                None
                if data.get("true_z_model") is None
                else LinearModel.from_dict(data["true_z_model"])
            ),
            hierarchy=(
                None if data.get("hierarchy") is None else HierarchySpec.from_dict(data["hierarchy"])
            ),
            mu=None if data.get("mu") is None else float(data["mu"]),
            sigma=None if data.get("sigma") is None else float(data["sigma"]),
        )


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix plus role-named target columns."""

    features: np.ndarray
    targets: dict = field(default_factory=dict)
    manifest: GeneratorManifest | str = KIND_EXTERNAL
    feature_names: tuple | None = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"features must be a nonempty 2-D matrix, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain non-finite values")
        n = X.shape[0]
        clean = {}
        for role, column in dict(self.targets).items():
            if role not in ROLES:
                raise ValueError(f"unknown target role {role!r}; expected one of {ROLES}")
            col = np.asarray(column)
            if col.ndim != 1 or col.shape[0] != n:
                raise ValueError(f"target {role!r} must be a length-{n} column")
            if role in CATEGORICAL_ROLES:
                if not np.all(np.isfinite(col.astype(np.float64))):
                    raise ValueError(f"target {role!r} contains non-finite values")
                as_int = col.astype(np.int64)
                if np.any(as_int.astype(np.float64) != col.astype(np.float64)):
                    raise ValueError(f"target {role!r} must contain integer class labels")
                if as_int.min() < 0:
                    raise ValueError(f"target {role!r} contains negative class labels")
                clean[role] = _freeze(as_int)
            else:
                col = col.astype(np.float64)
                if not np.all(np.isfinite(col)):
                    raise ValueError(f"target {role!r} contains non-finite values")
                clean[role] = _freeze(col)
        names = self.feature_names
        if names is not None:
            names = tuple(str(c) for c in names)
            if len(names) != X.shape[1]:
                raise ValueError("feature_names length must match feature count")
        object.__setattr__(self, "features", _freeze(X))
        object.__setattr__(self, "targets", clean)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def has_role(self, role: str) -> bool:
        return role in self.targets

    def target(self, role: str) -> np.ndarray:
        if role not in self.targets:
            raise ValueError(f"dataset has no {role!r} column; present roles: {sorted(self.targets)}")
        return self.targets[role]

    def num_classes(self, role: str) -> int:
        labels = self.target(role)
        return int(labels.max()) + 1

    def column_names(self) -> list:
        names = list(self.feature_names) if self.feature_names else [f"x{j}" for j in range(self.d)]
        names.extend(role for role in ROLES if role in self.targets)
        return names

    def fingerprint(self) -> str:
        """Content hash over features and targets (names and manifest excluded)."""
        h = hashlib.sha256()
        h.update(b"privcore-dataset-v1")
        h.update(np.asarray([self.n, self.d], dtype=np.int64).tobytes())
        h.update(self.features.tobytes())
        for role in ROLES:
            if role in self.targets:
                h.update(role.encode("ascii"))
                h.update(self.targets[role].tobytes())
        return h.hexdigest()

    def subset(self, indices) -> "Dataset":
        """Row subset in the given order; provenance becomes external."""
        idx = np.asarray(indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("indices must be a nonempty 1-D sequence")
        if idx.min() < 0 or idx.max() >= self.n:
            raise ValueError(f"indices out of range for dataset with {self.n} rows")
        return Dataset(
            features=self.features[idx],
            targets={role: col[idx] for role, col in self.targets.items()},
            manifest=KIND_EXTERNAL,
            feature_names=self.feature_names,
        )


def gen_linear(seed: int, n: int, d: int = 3, noise_sd: float = 0.5) -> Dataset:
    """Synthetic regression data with a public and a secret continuous target.

    Feature column j is drawn from one of three marginals cycling with
    ``j % 3``: standard normal, Uniform(-1, 1), Exponential(rate 1). Both
    targets are affine in the features, with coefficients and intercepts
    drawn i.i.d. N(0, 1) from the seed, plus N(0, noise_sd^2) observation
    noise. ``noise_sd = 0`` is allowed as the exactly-identifiable limit.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if noise_sd < 0:
        raise ValueError(f"noise_sd must be >= 0, got {noise_sd}")
    model_rng = stream(seed, "linear", "true-models")
    w = model_rng.standard_normal(d)
    w0 = float(model_rng.standard_normal())
    v = model_rng.standard_normal(d)
    v0 = float(model_rng.standard_normal())
    feat_rng = stream(seed, "linear", "features")
    columns = []
    for j in range(d):
        marginal = j % 3
        if marginal == 0:
            columns.append(feat_rng.standard_normal(n))
        elif marginal == 1:
            columns.append(feat_rng.uniform(-1.0, 1.0, n))
        else:
            columns.append(feat_rng.exponential(1.0, n))
    X = np.column_stack(columns)
    noise_y = stream(seed, "linear", "noise-y").standard_normal(n) * noise_sd
    noise_z = stream(seed, "linear", "noise-z").standard_normal(n) * noise_sd
    true_y = LinearModel(weights=w, intercept=w0)
    true_z = LinearModel(weights=v, intercept=v0)
    manifest = GeneratorManifest(
        kind=KIND_LINEAR,
        seed=seed,
        n=n,
        d=d,
        noise_sd=float(noise_sd),
        true_y_model=true_y,
        true_z_model=true_z,
    )
    return Dataset(
        features=X,
        targets={
            ROLE_PUBLIC: true_y.predict(X) + noise_y,
            ROLE_SECRET: true_z.predict(X) + noise_z,
        },
        manifest=manifest,
    )


def _orthonormal_columns(rng: np.random.Generator, d: int, count: int, complement_of=None):
    """Random orthonormal d-vectors, optionally inside the orthogonal
    complement of the given column space. Sign-canonicalized for determinism."""
    g = rng.standard_normal((d, count))
    if complement_of is not None:
        g = g - complement_of @ (complement_of.T @ g)
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def gen_hierarchical(
    seed: int,
    num_coarse: int = DEFAULT_HIERARCHY["num_coarse"],
    fine_per_coarse: int = DEFAULT_HIERARCHY["fine_per_coarse"],
    per_fine_count: int = DEFAULT_HIERARCHY["per_fine_count"],
    d: int = DEFAULT_HIERARCHY["d"],
    coarse_sep: float = DEFAULT_HIERARCHY["coarse_sep"],
    fine_sep: float = DEFAULT_HIERARCHY["fine_sep"],
    within_sd: float = DEFAULT_HIERARCHY["within_sd"],
) -> Dataset:
    """Gaussian-blob data with coarse and fine labels at two granularities.

    Coarse centers sit on mutually orthogonal random directions scaled so
    every pair of coarse centers is exactly ``coarse_sep`` apart. Each coarse
    class splits into ``fine_per_coarse`` fine classes whose offsets live in
    the orthogonal complement of the coarse span, pairwise exactly
    ``fine_sep`` apart, so the fine distinction is strictly harder than the
    coarse one. Classes are exactly balanced at ``per_fine_count`` examples;
    rows are emitted class-major (coarse, then fine, then replicate).

    Requires ``d >= num_coarse + fine_per_coarse`` (or ``d >= num_coarse``
    when ``fine_per_coarse == 1``, where fine and coarse coincide).
    """
    for name, value in (
        ("num_coarse", num_coarse),
        ("fine_per_coarse", fine_per_coarse),
        ("per_fine_count", per_fine_count),
        ("d", d),
    ):
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")
    if not coarse_sep > fine_sep > 0:
        raise ValueError(
            f"separations must satisfy coarse_sep > fine_sep > 0, got {coarse_sep}, {fine_sep}"
        )
    if within_sd <= 0:
        raise ValueError(f"within_sd must be > 0, got {within_sd}")
    needed = num_coarse + (fine_per_coarse if fine_per_coarse > 1 else 0)
    if d < needed:
        raise ValueError(
            f"d={d} too small to place {num_coarse} coarse centers"
            + (f" plus {fine_per_coarse} fine offsets" if fine_per_coarse > 1 else "")
            + f"; need d >= {needed}"
        )

    coarse_dirs = _orthonormal_columns(stream(seed, "hier", "centers"), d, num_coarse)
    centers = coarse_dirs * (coarse_sep / np.sqrt(2.0))

    offset_rng = stream(seed, "hier", "offsets")
    offsets = np.zeros((num_coarse, fine_per_coarse, d))
    if fine_per_coarse > 1:
        for c in range(num_coarse):
            dirs = _orthonormal_columns(offset_rng, d, fine_per_coarse, complement_of=coarse_dirs)
            offsets[c] = (dirs * (fine_sep / np.sqrt(2.0))).T

    n = num_coarse * fine_per_coarse * per_fine_count
    noise = stream(seed, "hier", "noise").standard_normal((n, d)) * within_sd
    X = np.empty((n, d))
    coarse_labels = np.empty(n, dtype=np.int64)
    fine_labels = np.empty(n, dtype=np.int64)
    row = 0
    for c in range(num_coarse):
        for f in range(fine_per_coarse):
            block = slice(row, row + per_fine_count)
            X[block] = centers[:, c] + offsets[c, f] + noise[block]
            coarse_labels[block] = c
            fine_labels[block] = c * fine_per_coarse + f
            row += per_fine_count
    manifest = GeneratorManifest(
        kind=KIND_HIERARCHICAL,
        seed=seed,
        n=n,
        d=d,
        hierarchy=HierarchySpec(
            num_coarse=num_coarse,
            fine_per_coarse=fine_per_coarse,
            per_fine_count=per_fine_count,
            coarse_sep=float(coarse_sep),
            fine_sep=float(fine_sep),
            within_sd=float(within_sd),
        ),
    )
    return Dataset(
        features=X,
        targets={ROLE_COARSE: coarse_labels, ROLE_FINE: fine_labels},
        manifest=manifest,
    )


def gen_normal_scalar(seed: int, n: int, mu: float = 0.0, sigma: float = 1.0) -> Dataset:
    """i.i.d. samples from N(mu, sigma^2) as a single feature column."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    samples = mu + stream(seed, "normal", "samples").standard_normal(n) * sigma
    manifest = GeneratorManifest(
        kind=KIND_NORMAL, seed=seed, n=n, d=1, mu=float(mu), sigma=float(sigma)
    )
    return Dataset(features=samples.reshape(-1, 1), targets={}, manifest=manifest)


def stratified_split(dataset: Dataset, test_fraction: float, seed: int, by: str = ROLE_FINE):
    """Seeded train/test row split, stratified by a categorical role.

    Returns ``(train_indices, test_indices)``, both sorted ascending and
    disjoint. Each class contributes ``round(test_fraction * class_count)``
    test rows, capped so at least one row per class stays in training.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    labels = dataset.target(by)
    rng = stream(seed, "split", by)
    test_parts = []
    for cls in range(int(labels.max()) + 1):
        members = np.flatnonzero(labels == cls)
        if members.size == 0:
            continue
        perm = rng.permutation(members.size)
        n_test = min(int(round(test_fraction * members.size)), members.size - 1)
        test_parts.append(members[perm[:n_test]])
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.empty(0, dtype=np.int64)
    mask = np.ones(dataset.n, dtype=bool)
    mask[test_idx] = False
    return np.flatnonzero(mask), test_idx


# ---------------------------------------------------------------------------
# CSV + manifest I/O


def default_manifest_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".manifest.json")


def write_manifest(manifest: GeneratorManifest | str, path) -> None:
    if isinstance(manifest, str):
        payload = {"kind": manifest}
    else:
        payload = manifest.to_dict()
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def read_manifest(path) -> GeneratorManifest | str:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("kind") == KIND_EXTERNAL or "seed" not in data:
        return KIND_EXTERNAL
    return GeneratorManifest.from_dict(data)


def _format_value(value: float) -> str:
    return "%.17g" % value


def write_csv(dataset: Dataset, path, manifest_path=None) -> None:
    """Write the dataset as CSV plus a JSON manifest sidecar.

    Continuous values are written with 17 significant digits, so a read of
    the written file reproduces them bit-exactly.
    """
    path = Path(path)
    names = dataset.column_names()
    lines = [",".join(names)]
    columns = [dataset.features[:, j] for j in range(dataset.d)]
    formats = ["f"] * dataset.d
    for role in ROLES:
        if role in dataset.targets:
            columns.append(dataset.targets[role])
            formats.append("i" if role in CATEGORICAL_ROLES else "f")
    for i in range(dataset.n):
        cells = [
            ("%d" % col[i]) if fmt == "i" else _format_value(col[i])
            for col, fmt in zip(columns, formats)
        ]
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")
    if manifest_path is None:
        manifest_path = default_manifest_path(path)
    write_manifest(dataset.manifest, manifest_path)


def read_csv(path, manifest_path=None) -> Dataset:
    """Read a CSV dataset; roles come from column names (y, z, coarse, fine).

    A manifest sidecar is loaded when present (default: ``<stem>.manifest.json``
    next to the CSV). The sidecar may carry a ``"roles"`` mapping of column
    name to role for files that do not follow the naming convention.
    Malformed input raises :class:`CsvParseError` naming the row/column.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip() != ""]
    if not lines:
        raise CsvParseError(f"{path}: empty file")
    header = [cell.strip() for cell in lines[0].split(",")]
    if len(set(header)) != len(header):
        raise CsvParseError(f"{path}: duplicate column names in header")

    manifest: GeneratorManifest | str = KIND_EXTERNAL
    role_map: dict = {}
    if manifest_path is None:
        candidate = default_manifest_path(path)
        manifest_path = candidate if candidate.exists() else None
    if manifest_path is not None:
        raw = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
        declared = raw.get("roles", {})
        for column, role in declared.items():
            if role not in ROLES:
                raise CsvParseError(
                    f"{path}: unknown role {role!r} declared for column {column!r}",
                    column=column,
                )
            if column not in header:
                raise CsvParseError(
                    f"{path}: role declared for unknown column {column!r}", column=column
                )
            role_map[column] = role
        if raw.get("kind") != KIND_EXTERNAL and "seed" in raw:
            manifest = GeneratorManifest.from_dict(raw)
    for name in header:
        if name in ROLES and name not in role_map:
            role_map[name] = name

    n_cols = len(header)
    rows = []
    for row_number, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != n_cols:
            raise CsvParseError(
                f"{path}: row {row_number} has {len(cells)} cells, expected {n_cols}",
                row=row_number,
            )
        values = []
        for name, cell in zip(header, cells):
            try:
                value = float(cell.strip())
            except ValueError:
                raise CsvParseError(
                    f"{path}: row {row_number}, column {name!r}: non-numeric cell {cell.strip()!r}",
                    row=row_number,
                    column=name,
                ) from None
            if not np.isfinite(value):
                raise CsvParseError(
                    f"{path}: row {row_number}, column {name!r}: non-finite value {cell.strip()!r}",
                    row=row_number,
                    column=name,
                )
            values.append(value)
        rows.append(values)
    if not rows:
        raise CsvParseError(f"{path}: no data rows")
    table = np.asarray(rows, dtype=np.float64)

    feature_names = []
    feature_cols = []
    targets: dict = {}
    for j, name in enumerate(header):
        role = role_map.get(name)
        if role is None:
            feature_names.append(name)
            feature_cols.append(table[:, j])
        else:
            if role in CATEGORICAL_ROLES:
                col = table[:, j]
                as_int = col.astype(np.int64)
                if np.any(as_int.astype(np.float64) != col):
                    bad = int(np.flatnonzero(as_int.astype(np.float64) != col)[0])
                    raise CsvParseError(
                        f"{path}: row {bad + 2}, column {name!r}: "
                        f"categorical value {col[bad]!r} is not an integer",
                        row=bad + 2,
                        column=name,
                    )
                targets[role] = as_int
            else:
                targets[role] = table[:, j]
    if not feature_cols:
        raise CsvParseError(f"{path}: no feature columns")
    return Dataset(
        features=np.column_stack(feature_cols),
        targets=targets,
        manifest=manifest,
        feature_names=tuple(feature_names),
    )
