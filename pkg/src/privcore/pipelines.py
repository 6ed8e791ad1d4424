"""End-to-end experiment pipelines and their report objects.

Three pipelines:

* linear: generate regression data with a public and a secret target, fit
  the public model, select a loss-based core-set, refit both targets on the
  core-set, and report r-squared values plus hide diagnostics;
* mask: generate hierarchical classification data, trace per-example
  gradient norms for both label granularities, build each score
  construction, select class-balanced core-sets, and evaluate them on a
  held-out split;
* bucket sweep: partition training rows into norm-sorted buckets and train
  one classifier per bucket, recording the accuracy-versus-norm series.

Reports serialize to JSON (stable field order, schema_version 1) and render
to plain-text tables. Reruns with identical inputs produce byte-identical
JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .classifier import (
    TASK_COARSE,
    TASK_FINE,
    TASKS,
    SoftmaxClassifier,
    TrainConfig,
    train_tracer,
)
from .dataset import (
    DEFAULT_HIERARCHY,
    ROLE_FINE,
    ROLE_PUBLIC,
    ROLE_SECRET,
    Dataset,
    HierarchySpec,
    gen_hierarchical,
    gen_linear,
    stratified_split,
)
from .linear import LinearModel, fit_least_squares, score_model
from .masking import (
    CONSTRUCTIONS,
    TaskPairReport,
    class_balanced_select,
    evaluate_coreset,
    make_scores,
)
from .rng import stream
from .selection import (
    HIDE_PLANT,
    CoreSet,
    HideConfig,
    make_plant,
    point_losses,
    select_bottom_k,
)

SCHEMA_VERSION = 1

KIND_LINEAR_PIPELINE = "linear-pipeline"
KIND_MASK_PIPELINE = "mask-pipeline"
KIND_BUCKET_SWEEP = "bucket-sweep"

TARGET_ROLES = (ROLE_PUBLIC, ROLE_SECRET)


def cosine_similarity(a: LinearModel, b: LinearModel) -> float:
    """Cosine of the angle between two affine models, intercept included."""
    va = np.append(a.weights, a.intercept)
    vb = np.append(b.weights, b.intercept)
    denom = float(np.linalg.norm(va) * np.linalg.norm(vb))
    if denom == 0.0:
        raise ValueError("cosine similarity is undefined for a zero model")
    return float(va @ vb / denom)


def canonical_json(payload: dict) -> str:
    """Serialize a report payload with stable formatting (two-space indent,
    insertion field order, no NaN/Infinity)."""
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# linear pipeline


@dataclass(frozen=True)
class LinearPipelineReport:
    """Models, core-set, and evaluation numbers from one linear run."""

    seed: int
    n: int
    k: int
    hide: HideConfig
    true_models: dict
    full_models: dict
    coreset_models: dict
    coreset: CoreSet
    r2: dict
    z_variance: dict
    cosine_coreset_z_vs_plant: float | None = None
    holdout_fraction: float | None = None

    def to_dict(self) -> dict:
        hide = self.hide
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": KIND_LINEAR_PIPELINE,
            "config": {
                "seed": int(self.seed),
                "n": int(self.n),
                "k": int(self.k),
                "mode": hide.mode,
                "alpha": float(hide.alpha),
                "plant_label": hide.plant_label,
                "z_center": None if hide.z_center is None else float(hide.z_center),
                "holdout_fraction": (
                    None if self.holdout_fraction is None else float(self.holdout_fraction)
                ),
            },
            "true_models": {t: self.true_models[t].to_dict() for t in TARGET_ROLES},
            "full_models": {t: self.full_models[t].to_dict() for t in TARGET_ROLES},
            "coreset_models": {t: self.coreset_models[t].to_dict() for t in TARGET_ROLES},
            "plant_model": None if hide.plant_model is None else hide.plant_model.to_dict(),
            "coreset": self.coreset.to_dict(),
            "r2": {
                name: {t: float(values[t]) for t in TARGET_ROLES}
                for name, values in self.r2.items()
            },
            "z_variance": {name: float(v) for name, v in self.z_variance.items()},
            "cosine_coreset_z_vs_plant": (
                None
                if self.cosine_coreset_z_vs_plant is None
                else float(self.cosine_coreset_z_vs_plant)
            ),
        }


def run_linear_pipeline(
    seed: int,
    n: int = 1000,
    k: int = 50,
    hide: HideConfig = HideConfig(),
    d: int = 3,
    noise_sd: float = 0.5,
    holdout_fraction: float | None = None,
    jobs: int = 1,
) -> LinearPipelineReport:
    """Generate, fit, select, refit, evaluate; deterministic per seed.

    Evaluation r-squared values are computed on the selection pool itself
    (the generated dataset, or its non-holdout part when ``holdout_fraction``
    is set, in which case holdout r-squared values are reported as well).
    Plant mode with no explicit plant model derives one from the seed.
    """
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    dataset = gen_linear(seed, n, d=d, noise_sd=noise_sd)
    holdout: Dataset | None = None
    pool = dataset
    if holdout_fraction is not None:
        if not 0.0 < holdout_fraction < 1.0:
            raise ValueError(f"holdout_fraction must be in (0, 1), got {holdout_fraction}")
        n_hold = int(round(holdout_fraction * n))
        if not 1 <= n_hold <= n - 2:
            raise ValueError(f"holdout_fraction {holdout_fraction} leaves no usable split")
        perm = stream(seed, "holdout").permutation(n)
        holdout = dataset.subset(np.sort(perm[:n_hold]))
        pool = dataset.subset(np.sort(perm[n_hold:]))
        if not k <= pool.n:
            raise ValueError(f"k={k} too large for the non-holdout pool of {pool.n} rows")

    if hide.mode == HIDE_PLANT and hide.plant_model is None:
        hide = replace(hide, plant_model=make_plant(seed, pool.d))

    X = pool.features
    y = pool.target(ROLE_PUBLIC)
    z = pool.target(ROLE_SECRET)
    full_models = {
        ROLE_PUBLIC: fit_least_squares(X, y),
        ROLE_SECRET: fit_least_squares(X, z),
    }
    losses = point_losses(pool, full_models[ROLE_PUBLIC], hide, jobs=jobs)
    coreset = select_bottom_k(losses, k, pool.fingerprint())
    sub = pool.subset(coreset.indices)
    coreset_models = {
        ROLE_PUBLIC: fit_least_squares(sub.features, sub.target(ROLE_PUBLIC)),
        ROLE_SECRET: fit_least_squares(sub.features, sub.target(ROLE_SECRET)),
    }

    pool_targets = {ROLE_PUBLIC: y, ROLE_SECRET: z}
    r2 = {
        "full_on_full": {
            t: score_model(full_models[t], X, pool_targets[t]) for t in TARGET_ROLES
        },
        "coreset_on_coreset": {
            t: score_model(coreset_models[t], sub.features, sub.target(t))
            for t in TARGET_ROLES
        },
        "coreset_model_on_full": {
            t: score_model(coreset_models[t], X, pool_targets[t]) for t in TARGET_ROLES
        },
    }
    if holdout is not None:
        r2["full_on_holdout"] = {
            t: score_model(full_models[t], holdout.features, holdout.target(t))
            for t in TARGET_ROLES
        }
        r2["coreset_model_on_holdout"] = {
            t: score_model(coreset_models[t], holdout.features, holdout.target(t))
            for t in TARGET_ROLES
        }

    cosine = None
    if hide.mode == HIDE_PLANT:
        cosine = cosine_similarity(coreset_models[ROLE_SECRET], hide.plant_model)

    manifest = dataset.manifest
    return LinearPipelineReport(
        seed=seed,
        n=n,
        k=k,
        hide=hide,
        true_models={
            ROLE_PUBLIC: manifest.true_y_model,
            ROLE_SECRET: manifest.true_z_model,
        },
        full_models=full_models,
        coreset_models=coreset_models,
        coreset=coreset,
        r2=r2,
        z_variance={
            "full": float(np.var(z, ddof=1)),
            "coreset": float(np.var(sub.target(ROLE_SECRET), ddof=1)),
        },
        cosine_coreset_z_vs_plant=cosine,
        holdout_fraction=holdout_fraction,
    )


def run_linear_seeds(
    root_seed: int,
    num_seeds: int,
    n: int = 1000,
    k: int = 50,
    hide: HideConfig = HideConfig(),
    d: int = 3,
    noise_sd: float = 0.5,
    holdout_fraction: float | None = None,
    jobs: int = 1,
):
    """Run the linear pipeline on seeds root, root+1, ... and summarize."""
    if num_seeds < 1:
        raise ValueError(f"num_seeds must be >= 1, got {num_seeds}")
    reports = [
        run_linear_pipeline(
            root_seed + i,
            n=n,
            k=k,
            hide=hide,
            d=d,
            noise_sd=noise_sd,
            holdout_fraction=holdout_fraction,
            jobs=jobs,
        )
        for i in range(num_seeds)
    ]
    return reports, summarize_linear_runs(reports)


def _quartiles(values) -> dict:
    arr = np.asarray(values, dtype=np.float64)
    return {
        "median": float(np.median(arr)),
        "q1": float(np.quantile(arr, 0.25)),
        "q3": float(np.quantile(arr, 0.75)),
    }


def linear_metrics(report: LinearPipelineReport) -> dict:
    """Flat headline numbers of one linear run, for aggregation."""
    out = {}
    for name, values in report.r2.items():
        for t in TARGET_ROLES:
            out[f"r2_{name}_{t}"] = float(values[t])
    out["z_variance_full"] = report.z_variance["full"]
    out["z_variance_coreset"] = report.z_variance["coreset"]
    if report.cosine_coreset_z_vs_plant is not None:
        out["cosine_coreset_z_vs_plant"] = report.cosine_coreset_z_vs_plant
    return out


def summarize_linear_runs(reports) -> dict:
    """Median and quartiles of every headline metric across runs."""
    if not reports:
        raise ValueError("no reports to summarize")
    rows = [linear_metrics(r) for r in reports]
    common = [key for key in rows[0] if all(key in row for row in rows)]
    return {
        "num_runs": len(reports),
        "seeds": [int(r.seed) for r in reports],
        "metrics": {key: _quartiles([row[key] for row in rows]) for key in common},
    }


# ---------------------------------------------------------------------------
# mask pipeline


@dataclass(frozen=True)
class MaskPipelineReport:
    """Per-construction core-set evaluations on one hierarchical dataset."""

    seed: int
    k: int
    d: int
    hierarchy: HierarchySpec
    train_config: TrainConfig
    test_fraction: float
    constructions: tuple
    reports: tuple
    coresets: dict = field(default_factory=dict)
    notes: tuple = ()

    def report_for(self, construction: str) -> TaskPairReport:
        for report in self.reports:
            if report.construction == construction:
                return report
        raise KeyError(f"no report for construction {construction!r}")

    @property
    def ranking(self) -> tuple:
        """Constructions ordered by accuracy gap (coarse minus fine), widest
        first; ties alphabetically."""
        return tuple(
            report.construction
            for report in sorted(self.reports, key=lambda r: (-r.gap, r.construction))
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": KIND_MASK_PIPELINE,
            "config": {
                "seed": int(self.seed),
                "k": int(self.k),
                "d": int(self.d),
                "hierarchy": self.hierarchy.to_dict(),
                "train": self.train_config.to_dict(),
                "test_fraction": float(self.test_fraction),
                "constructions": list(self.constructions),
            },
            "notes": list(self.notes),
            "reports": [report.to_dict() for report in self.reports],
            "coresets": {
                construction: coreset.to_dict()
                for construction, coreset in self.coresets.items()
            },
            "ranking": list(self.ranking),
        }


def run_mask_pipeline(
    seed: int,
    k: int = 200,
    constructions=CONSTRUCTIONS,
    num_coarse: int = DEFAULT_HIERARCHY["num_coarse"],
    fine_per_coarse: int = DEFAULT_HIERARCHY["fine_per_coarse"],
    per_fine_count: int = DEFAULT_HIERARCHY["per_fine_count"],
    d: int = DEFAULT_HIERARCHY["d"],
    coarse_sep: float = DEFAULT_HIERARCHY["coarse_sep"],
    fine_sep: float = DEFAULT_HIERARCHY["fine_sep"],
    within_sd: float = DEFAULT_HIERARCHY["within_sd"],
    train_config: TrainConfig | None = None,
    test_fraction: float = 0.2,
) -> MaskPipelineReport:
    """Trace both tasks once, then select and evaluate every construction.

    The dataset is split 80/20 (stratified by fine label, seeded) before any
    training; traces and core-sets live on the training part, accuracies are
    measured on the held-out part.
    """
    constructions = tuple(constructions)
    unknown = [c for c in constructions if c not in CONSTRUCTIONS]
    if unknown:
        raise ValueError(f"unknown constructions {unknown}; expected subset of {CONSTRUCTIONS}")
    dataset = gen_hierarchical(
        seed,
        num_coarse=num_coarse,
        fine_per_coarse=fine_per_coarse,
        per_fine_count=per_fine_count,
        d=d,
        coarse_sep=coarse_sep,
        fine_sep=fine_sep,
        within_sd=within_sd,
    )
    if train_config is None:
        train_config = TrainConfig(seed=seed)
    train_idx, test_idx = stratified_split(dataset, test_fraction, seed, by=ROLE_FINE)
    train_ds = dataset.subset(train_idx)
    test_ds = dataset.subset(test_idx)
    _, trace_coarse = train_tracer(train_ds, TASK_COARSE, train_config)
    _, trace_fine = train_tracer(train_ds, TASK_FINE, train_config)
    fingerprint = train_ds.fingerprint()
    fine_labels = train_ds.target(ROLE_FINE)
    reports = []
    coresets = {}
    for construction in constructions:
        scores = make_scores(trace_coarse, trace_fine, construction, seed)
        coreset = class_balanced_select(scores, fine_labels, k, fingerprint)
        coresets[construction] = coreset
        reports.append(
            evaluate_coreset(train_ds, coreset, test_ds, train_config, construction)
        )
    return MaskPipelineReport(
        seed=seed,
        k=k,
        d=d,
        hierarchy=dataset.manifest.hierarchy,
        train_config=train_config,
        test_fraction=test_fraction,
        constructions=constructions,
        reports=tuple(reports),
        coresets=coresets,
        notes=("every construction, including random, is class-balanced over fine labels",),
    )


def run_mask_seeds(root_seed: int, num_seeds: int, **kwargs):
    """Run the mask pipeline on seeds root, root+1, ... and summarize."""
    if num_seeds < 1:
        raise ValueError(f"num_seeds must be >= 1, got {num_seeds}")
    runs = [run_mask_pipeline(root_seed + i, **kwargs) for i in range(num_seeds)]
    return runs, summarize_mask_runs(runs)


def summarize_mask_runs(runs) -> dict:
    """Median and quartiles of both accuracies and the gap, per construction."""
    if not runs:
        raise ValueError("no runs to summarize")
    constructions = runs[0].constructions
    per_construction = {}
    for construction in constructions:
        picked = [run.report_for(construction) for run in runs]
        per_construction[construction] = {
            "coarse_accuracy": _quartiles([r.coarse_accuracy for r in picked]),
            "fine_accuracy": _quartiles([r.fine_accuracy for r in picked]),
            "gap": _quartiles([r.gap for r in picked]),
        }
    return {
        "num_runs": len(runs),
        "seeds": [int(run.seed) for run in runs],
        "per_construction": per_construction,
    }


# ---------------------------------------------------------------------------
# bucket sweep


@dataclass(frozen=True)
class BucketResult:
    bucket: int
    size: int
    mean_norm: float
    accuracy: float

    def to_dict(self) -> dict:
        return {
            "bucket": int(self.bucket),
            "size": int(self.size),
            "mean_norm": float(self.mean_norm),
            "accuracy": float(self.accuracy),
        }


@dataclass(frozen=True)
class BucketSweepReport:
    """Accuracy of classifiers trained on norm-sorted example buckets."""

    seed: int
    task: str
    num_buckets: int
    d: int
    hierarchy: HierarchySpec
    train_config: TrainConfig
    test_fraction: float
    buckets: tuple

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": KIND_BUCKET_SWEEP,
            "config": {
                "seed": int(self.seed),
                "task": self.task,
                "num_buckets": int(self.num_buckets),
                "d": int(self.d),
                "hierarchy": self.hierarchy.to_dict(),
                "train": self.train_config.to_dict(),
                "test_fraction": float(self.test_fraction),
            },
            "buckets": [bucket.to_dict() for bucket in self.buckets],
        }

    def series_csv(self) -> str:
        lines = ["bucket,size,mean_norm,accuracy"]
        lines.extend(
            f"{b.bucket},{b.size},{'%.17g' % b.mean_norm},{'%.17g' % b.accuracy}"
            for b in self.buckets
        )
        return "\n".join(lines) + "\n"


def run_bucket_sweep(
    seed: int,
    task: str = TASK_FINE,
    num_buckets: int = 5,
    num_coarse: int = DEFAULT_HIERARCHY["num_coarse"],
    fine_per_coarse: int = DEFAULT_HIERARCHY["fine_per_coarse"],
    per_fine_count: int = DEFAULT_HIERARCHY["per_fine_count"],
    d: int = DEFAULT_HIERARCHY["d"],
    coarse_sep: float = DEFAULT_HIERARCHY["coarse_sep"],
    fine_sep: float = DEFAULT_HIERARCHY["fine_sep"],
    within_sd: float = DEFAULT_HIERARCHY["within_sd"],
    train_config: TrainConfig | None = None,
    test_fraction: float = 0.2,
) -> BucketSweepReport:
    """Split training rows into norm-sorted buckets and train one classifier
    per bucket.

    Buckets are built per fine class (each class's members are sorted by
    trace norm and dealt into ``num_buckets`` contiguous runs), so every
    bucket is class-balanced and bucket means increase with the bucket index.
    """
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}, got {task!r}")
    if num_buckets < 2:
        raise ValueError(f"num_buckets must be >= 2, got {num_buckets}")
    dataset = gen_hierarchical(
        seed,
        num_coarse=num_coarse,
        fine_per_coarse=fine_per_coarse,
        per_fine_count=per_fine_count,
        d=d,
        coarse_sep=coarse_sep,
        fine_sep=fine_sep,
        within_sd=within_sd,
    )
    if train_config is None:
        train_config = TrainConfig(seed=seed)
    train_idx, test_idx = stratified_split(dataset, test_fraction, seed, by=ROLE_FINE)
    train_ds = dataset.subset(train_idx)
    test_ds = dataset.subset(test_idx)
    _, trace = train_tracer(train_ds, task, train_config)
    norms = trace.per_example_avg_norm
    fine_labels = train_ds.target(ROLE_FINE)

    members_per_bucket: list[list[int]] = [[] for _ in range(num_buckets)]
    for cls in range(int(fine_labels.max()) + 1):
        members = np.flatnonzero(fine_labels == cls)
        if members.size < num_buckets:
            raise ValueError(
                f"fine class {cls} has {members.size} training rows, "
                f"fewer than num_buckets={num_buckets}"
            )
        ranked = members[np.lexsort((members, norms[members]))]
        for b, chunk in enumerate(np.array_split(ranked, num_buckets)):
            members_per_bucket[b].extend(int(i) for i in chunk)

    num_classes = train_ds.num_classes(task)
    results = []
    for b, rows in enumerate(members_per_bucket):
        rows_arr = np.sort(np.asarray(rows, dtype=np.int64))
        sub = train_ds.subset(rows_arr)
        clf = SoftmaxClassifier(
            epochs=train_config.epochs,
            learning_rate=train_config.learning_rate,
            batch_size=train_config.batch_size,
            seed=train_config.seed,
            l2=train_config.l2,
            num_classes=num_classes,
        )
        clf.fit(sub.features, sub.target(task))
        results.append(
            BucketResult(
                bucket=b,
                size=int(rows_arr.size),
                mean_norm=float(np.mean(norms[rows_arr])),
                accuracy=float(clf.score(test_ds.features, test_ds.target(task))),
            )
        )
    return BucketSweepReport(
        seed=seed,
        task=task,
        num_buckets=num_buckets,
        d=d,
        hierarchy=dataset.manifest.hierarchy,
        train_config=train_config,
        test_fraction=test_fraction,
        buckets=tuple(results),
    )


def run_bucket_seeds(root_seed: int, num_seeds: int, **kwargs):
    """Run the bucket sweep on seeds root, root+1, ... and summarize."""
    if num_seeds < 1:
        raise ValueError(f"num_seeds must be >= 1, got {num_seeds}")
    runs = [run_bucket_sweep(root_seed + i, **kwargs) for i in range(num_seeds)]
    return runs, summarize_bucket_runs(runs)


def summarize_bucket_runs(runs) -> dict:
    """Median accuracy and mean norm per bucket index across runs."""
    if not runs:
        raise ValueError("no runs to summarize")
    num_buckets = runs[0].num_buckets
    buckets = []
    for b in range(num_buckets):
        accs = [run.buckets[b].accuracy for run in runs]
        norms = [run.buckets[b].mean_norm for run in runs]
        buckets.append(
            {
                "bucket": b,
                "median_accuracy": float(np.median(accs)),
                "median_mean_norm": float(np.median(norms)),
            }
        )
    return {
        "num_runs": len(runs),
        "seeds": [int(run.seed) for run in runs],
        "buckets": buckets,
    }


# ---------------------------------------------------------------------------
# rendering


def _model_row(label: str, model_dict: dict | None) -> str:
    if model_dict is None:
        return f"{label:<22}-"
    cells = [f"{model_dict['intercept']:>10.4f}"]
    cells.extend(f"{w:>10.4f}" for w in model_dict["weights"])
    return f"{label:<22}" + "".join(cells)


def _render_linear_text(payload: dict) -> str:
    config = payload["config"]
    d = len(payload["true_models"]["y"]["weights"])
    header = (
        f"linear core-set run (seed={config['seed']}, n={config['n']}, "
        f"k={config['k']}, mode={config['mode']}, alpha={config['alpha']:g})"
    )
    columns = f"{'model':<22}{'intercept':>10}" + "".join(
        f"{f'x{j}':>10}" for j in range(d)
    )
    rows = [
        _model_row("true y", payload["true_models"]["y"]),
        _model_row("full fit y", payload["full_models"]["y"]),
        _model_row("core-set fit y", payload["coreset_models"]["y"]),
        _model_row("true z", payload["true_models"]["z"]),
        _model_row("full fit z", payload["full_models"]["z"]),
        _model_row("core-set fit z", payload["coreset_models"]["z"]),
    ]
    if payload["plant_model"] is not None:
        rows.append(_model_row("plant", payload["plant_model"]))
    r2_lines = [f"{'r-squared':<28}{'y':>10}{'z':>10}"]
    for name, values in payload["r2"].items():
        label = name.replace("_", " ")
        r2_lines.append(f"{label:<28}{values['y']:>10.4f}{values['z']:>10.4f}")
    extras = [
        f"z variance: full {payload['z_variance']['full']:.4f}, "
        f"core-set {payload['z_variance']['coreset']:.4f}"
    ]
    if payload["cosine_coreset_z_vs_plant"] is not None:
        extras.append(
            f"cosine(core-set z fit, plant) = {payload['cosine_coreset_z_vs_plant']:.4f}"
        )
    return "\n".join(
        [header, "", columns, *rows, "", *r2_lines, "", *extras]
    ) + "\n"


def _render_mask_text(payload: dict) -> str:
    config = payload["config"]
    header = (
        f"masking core-set run (seed={config['seed']}, k={config['k']}, "
        f"test_fraction={config['test_fraction']:g})"
    )
    columns = f"{'construction':<18}{'coarse %':>10}{'fine %':>10}{'gap':>10}"
    rows = [
        f"{r['construction']:<18}"
        f"{100.0 * r['coarse_accuracy']:>10.2f}"
        f"{100.0 * r['fine_accuracy']:>10.2f}"
        f"{100.0 * r['gap']:>10.2f}"
        for r in payload["reports"]
    ]
    lines = [header, "", columns, *rows]
    warnings = [w for r in payload["reports"] for w in r.get("warnings", [])]
    if warnings:
        lines.append("")
        lines.extend(f"warning: {w}" for w in warnings)
    if payload["ranking"]:
        lines.extend(["", "ranking by gap: " + ", ".join(payload["ranking"])])
    for note in payload.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _render_bucket_text(payload: dict) -> str:
    config = payload["config"]
    header = (
        f"gradient-norm bucket sweep (seed={config['seed']}, task={config['task']}, "
        f"{config['num_buckets']} buckets)"
    )
    columns = f"{'bucket':<8}{'size':>8}{'mean norm':>12}{'accuracy %':>12}"
    rows = [
        f"{b['bucket']:<8}{b['size']:>8}{b['mean_norm']:>12.4f}{100.0 * b['accuracy']:>12.2f}"
        for b in payload["buckets"]
    ]
    return "\n".join([header, "", columns, *rows]) + "\n"


def _render_task_pair_text(payload: dict) -> str:
    lines = [
        f"core-set evaluation ({payload['construction'] or 'unnamed'}, k={payload['k']})",
        f"coarse accuracy: {100.0 * payload['coarse_accuracy']:.2f}%",
        f"fine accuracy:   {100.0 * payload['fine_accuracy']:.2f}%",
        f"gap:             {100.0 * payload['gap']:.2f}",
    ]
    lines.extend(f"warning: {w}" for w in payload.get("warnings", []))
    return "\n".join(lines) + "\n"


def render_text(payload: dict) -> str:
    """Plain-text table for a report payload (``to_dict()`` output or parsed
    report JSON)."""
    kind = payload.get("kind")
    if kind == KIND_LINEAR_PIPELINE:
        return _render_linear_text(payload)
    if kind == KIND_MASK_PIPELINE:
        return _render_mask_text(payload)
    if kind == KIND_BUCKET_SWEEP:
        return _render_bucket_text(payload)
    if "construction" in payload and "coarse_accuracy" in payload:
        return _render_task_pair_text(payload)
    raise ValueError(f"unrecognized report payload (kind={kind!r})")


def render(report) -> tuple:
    """(text table, canonical JSON) for any report object with ``to_dict``."""
    payload = report.to_dict()
    return render_text(payload), canonical_json(payload)
