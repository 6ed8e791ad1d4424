"""Command-line front door.

Every subcommand reads its parameters from flags, optionally merged over a
JSON config file (flags win), and echoes the fully-resolved configuration
into ``config.json`` in the output directory so any run can be replayed.
Outputs are written atomically; input files are never modified.

Exit codes: 0 success, 2 usage error (bad flag, bad config key, missing
required value), 1 runtime failure (bad input file, infeasible selection,
numerical failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._io import atomic_write_text
from .classifier import TASKS, GradientTrace, TrainConfig, train_tracer
from .dataset import (
    DEFAULT_HIERARCHY,
    ROLE_FINE,
    ROLE_PUBLIC,
    default_manifest_path,
    gen_hierarchical,
    gen_linear,
    gen_normal_scalar,
    read_csv,
    write_csv,
)
from .linear import LinearModel, fit_least_squares
from .masking import (
    CONSTRUCTIONS,
    class_balanced_select,
    evaluate_coreset,
    make_scores,
)
from .pipelines import (
    canonical_json,
    render_text,
    run_bucket_sweep,
    run_linear_pipeline,
    run_linear_seeds,
    run_mask_pipeline,
    run_mask_seeds,
)
from .selection import (
    CoreSet,
    HIDE_MODES,
    HIDE_PLANT,
    HideConfig,
    PLANT_AGAINST_SECRET,
    PLANT_LABELS,
    make_plant,
    point_losses,
    select_bottom_k,
    select_moment_coreset,
)


class UsageError(Exception):
    """Bad invocation detectable without touching any input data."""


# ---------------------------------------------------------------------------
# flag value parsers (argparse reports failures as usage errors, exit 2)


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def nonneg_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if value < 0 or not np.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number >= 0, got {text}")
    return value


def positive_float(text: str) -> float:
    value = nonneg_float(text)
    if value == 0:
        raise argparse.ArgumentTypeError("expected a number > 0, got 0")
    return value


def fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a fraction in (0, 1), got {text}")
    return value


def any_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not np.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return value


# ---------------------------------------------------------------------------
# config merging


def merge_config(args, defaults: dict, required=()) -> dict:
    """Resolve one subcommand's parameters: defaults < config file < flags."""
    file_values = {}
    if getattr(args, "config", None) is not None:
        config_path = Path(args.config)
        try:
            file_values = json.loads(config_path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise UsageError(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {config_path} is not valid JSON: {exc}") from None
        if not isinstance(file_values, dict):
            raise UsageError(f"config file {config_path} must hold a JSON object")
        unknown = sorted(set(file_values) - set(defaults))
        if unknown:
            raise UsageError(
                f"unknown config keys {unknown}; valid keys: {sorted(defaults)}"
            )
    merged = {}
    for key, fallback in defaults.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
        elif key in file_values and file_values[key] is not None:
            merged[key] = file_values[key]
        else:
            merged[key] = fallback
    for key in required:
        if merged[key] is None:
            raise UsageError(f"--{key.replace('_', '-')} is required")
    return merged


def write_config_echo(out_dir: Path, command: str, merged: dict) -> None:
    payload = {"command": command}
    for key, value in merged.items():
        payload[key] = str(value) if isinstance(value, Path) else value
    atomic_write_text(out_dir / "config.json", canonical_json(payload))


def out_dir_of(merged: dict) -> Path:
    out = Path(merged["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# input loading


def load_dataset(csv_path, manifest_path=None):
    csv_path = Path(csv_path)
    if not csv_path.exists():
        raise FileNotFoundError(f"dataset file not found: {csv_path}")
    if manifest_path is None:
        for candidate in (csv_path.parent / "manifest.json", default_manifest_path(csv_path)):
            if candidate.exists():
                manifest_path = candidate
                break
    return read_csv(csv_path, manifest_path)


def load_json(path, what: str) -> dict:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{what} file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{what} file {path} is not valid JSON: {exc}") from None


def load_losses_csv(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"losses file not found: {path}")
    lines = [l for l in path.read_text(encoding="utf-8").splitlines() if l.strip()]
    if len(lines) < 2:
        raise ValueError(f"losses file {path} has no data rows")
    values = []
    for row_number, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 2:
            raise ValueError(f"{path}: row {row_number} must be index,loss")
        try:
            values.append(float(cells[1]))
        except ValueError:
            raise ValueError(
                f"{path}: row {row_number}: non-numeric loss {cells[1].strip()!r}"
            ) from None
    return np.asarray(values)


def train_config_from(merged: dict) -> TrainConfig:
    return TrainConfig(
        epochs=merged["epochs"],
        learning_rate=merged["learning_rate"],
        batch_size=merged["batch_size"],
        seed=merged["train_seed"],
        l2=merged["l2"],
    )


TRAIN_DEFAULTS = {
    "epochs": TrainConfig().epochs,
    "learning_rate": TrainConfig().learning_rate,
    "batch_size": TrainConfig().batch_size,
    "train_seed": 0,
    "l2": 0.0,
}

HIER_DEFAULTS = {
    "num_coarse": DEFAULT_HIERARCHY["num_coarse"],
    "fine_per_coarse": DEFAULT_HIERARCHY["fine_per_coarse"],
    "per_fine_count": DEFAULT_HIERARCHY["per_fine_count"],
    "d": DEFAULT_HIERARCHY["d"],
    "coarse_sep": DEFAULT_HIERARCHY["coarse_sep"],
    "fine_sep": DEFAULT_HIERARCHY["fine_sep"],
    "within_sd": DEFAULT_HIERARCHY["within_sd"],
}


def add_train_flags(sub) -> None:
    sub.add_argument("--epochs", type=positive_int)
    sub.add_argument("--learning-rate", type=positive_float)
    sub.add_argument("--batch-size", type=positive_int)
    sub.add_argument("--train-seed", type=int)
    sub.add_argument("--l2", type=nonneg_float)


def add_hier_flags(sub) -> None:
    sub.add_argument("--num-coarse", type=positive_int)
    sub.add_argument("--fine-per-coarse", type=positive_int)
    sub.add_argument("--per-fine-count", type=positive_int)
    sub.add_argument("--d", type=positive_int)
    sub.add_argument("--coarse-sep", type=positive_float)
    sub.add_argument("--fine-sep", type=positive_float)
    sub.add_argument("--within-sd", type=positive_float)


def check_hierarchy_flags(merged: dict) -> None:
    if not merged["coarse_sep"] > merged["fine_sep"]:
        raise UsageError(
            f"--coarse-sep ({merged['coarse_sep']}) must exceed --fine-sep "
            f"({merged['fine_sep']})"
        )
    needed = merged["num_coarse"] + (
        merged["fine_per_coarse"] if merged["fine_per_coarse"] > 1 else 0
    )
    if merged["d"] < needed:
        raise UsageError(
            f"--d {merged['d']} too small for {merged['num_coarse']} coarse classes "
            f"with {merged['fine_per_coarse']} fine each; need at least {needed}"
        )


def hier_kwargs(merged: dict) -> dict:
    return {key: merged[key] for key in HIER_DEFAULTS}


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_linear(args) -> int:
    merged = merge_config(
        args,
        {"seed": None, "n": None, "d": 3, "noise_sd": 0.5, "out": None},
        required=("seed", "n", "out"),
    )
    dataset = gen_linear(merged["seed"], merged["n"], d=merged["d"], noise_sd=merged["noise_sd"])
    out = out_dir_of(merged)
    write_csv(dataset, out / "dataset.csv", manifest_path=out / "manifest.json")
    write_config_echo(out, "gen-linear", merged)
    return 0


def cmd_gen_hier(args) -> int:
    merged = merge_config(
        args, {"seed": None, **HIER_DEFAULTS, "out": None}, required=("seed", "out")
    )
    check_hierarchy_flags(merged)
    dataset = gen_hierarchical(merged["seed"], **hier_kwargs(merged))
    out = out_dir_of(merged)
    write_csv(dataset, out / "dataset.csv", manifest_path=out / "manifest.json")
    write_config_echo(out, "gen-hier", merged)
    return 0


def cmd_gen_normal(args) -> int:
    merged = merge_config(
        args,
        {"seed": None, "n": None, "mu": 0.0, "sigma": 1.0, "out": None},
        required=("seed", "n", "out"),
    )
    dataset = gen_normal_scalar(merged["seed"], merged["n"], mu=merged["mu"], sigma=merged["sigma"])
    out = out_dir_of(merged)
    write_csv(dataset, out / "dataset.csv", manifest_path=out / "manifest.json")
    write_config_echo(out, "gen-normal", merged)
    return 0


def cmd_fit(args) -> int:
    merged = merge_config(
        args,
        {"data": None, "manifest": None, "target": ROLE_PUBLIC, "out": None},
        required=("data", "out"),
    )
    dataset = load_dataset(merged["data"], merged["manifest"])
    model = fit_least_squares(dataset.features, dataset.target(merged["target"]))
    out = out_dir_of(merged)
    atomic_write_text(out / "model.json", canonical_json(model.to_dict()))
    write_config_echo(out, "fit", merged)
    return 0


def cmd_losses(args) -> int:
    merged = merge_config(
        args,
        {
            "data": None,
            "manifest": None,
            "model": None,
            "hide": "none",
            "alpha": 1.0,
            "plant_label": PLANT_AGAINST_SECRET,
            "z_center": None,
            "plant_model": None,
            "seed": None,
            "jobs": 1,
            "out": None,
        },
        required=("data", "out"),
    )
    dataset = load_dataset(merged["data"], merged["manifest"])
    if merged["model"] is not None:
        model = LinearModel.from_dict(load_json(merged["model"], "model"))
    else:
        model = fit_least_squares(dataset.features, dataset.target(ROLE_PUBLIC))
    plant = None
    if merged["plant_model"] is not None:
        plant = LinearModel.from_dict(load_json(merged["plant_model"], "plant model"))
    elif merged["hide"] == HIDE_PLANT:
        if merged["seed"] is None:
            raise UsageError("plant mode needs --plant-model or --seed to derive one")
        plant = make_plant(merged["seed"], dataset.d)
    hide = HideConfig(
        mode=merged["hide"],
        alpha=merged["alpha"],
        plant_model=plant,
        plant_label=merged["plant_label"],
        z_center=merged["z_center"],
    )
    losses = point_losses(dataset, model, hide, jobs=merged["jobs"])
    out = out_dir_of(merged)
    lines = ["index,loss"]
    lines.extend(f"{i},{'%.17g' % v}" for i, v in enumerate(losses))
    atomic_write_text(out / "series" / "losses.csv", "\n".join(lines) + "\n")
    write_config_echo(out, "losses", merged)
    return 0


def cmd_select(args) -> int:
    merged = merge_config(
        args,
        {"losses": None, "data": None, "manifest": None, "k": None, "out": None},
        required=("losses", "k", "out"),
    )
    losses = load_losses_csv(merged["losses"])
    fingerprint = ""
    if merged["data"] is not None:
        fingerprint = load_dataset(merged["data"], merged["manifest"]).fingerprint()
    coreset = select_bottom_k(losses, merged["k"], fingerprint)
    out = out_dir_of(merged)
    atomic_write_text(out / "coreset.json", canonical_json(coreset.to_dict()))
    write_config_echo(out, "select", merged)
    return 0


def cmd_select_moment(args) -> int:
    merged = merge_config(
        args,
        {"data": None, "manifest": None, "k": None, "tolerance": None, "out": None},
        required=("data", "k", "tolerance", "out"),
    )
    dataset = load_dataset(merged["data"], merged["manifest"])
    coreset = select_moment_coreset(
        dataset.features[:, 0], merged["k"], merged["tolerance"], dataset.fingerprint()
    )
    out = out_dir_of(merged)
    atomic_write_text(out / "coreset.json", canonical_json(coreset.to_dict()))
    write_config_echo(out, "select-moment", merged)
    return 0


def cmd_trace(args) -> int:
    merged = merge_config(
        args,
        {"data": None, "manifest": None, "task": None, **TRAIN_DEFAULTS, "out": None},
        required=("data", "task", "out"),
    )
    dataset = load_dataset(merged["data"], merged["manifest"])
    _, trace = train_tracer(dataset, merged["task"], train_config_from(merged))
    out = out_dir_of(merged)
    atomic_write_text(out / "trace.json", canonical_json(trace.to_dict()))
    trace.write_csv(out / "series" / "trace.csv")
    write_config_echo(out, "trace", merged)
    return 0


def cmd_scores(args) -> int:
    merged = merge_config(
        args,
        {
            "trace_coarse": None,
            "trace_fine": None,
            "construction": None,
            "seed": 0,
            "out": None,
        },
        required=("trace_coarse", "trace_fine", "construction", "out"),
    )
    trace_coarse = GradientTrace.from_dict(load_json(merged["trace_coarse"], "trace"))
    trace_fine = GradientTrace.from_dict(load_json(merged["trace_fine"], "trace"))
    scores = make_scores(trace_coarse, trace_fine, merged["construction"], merged["seed"])
    out = out_dir_of(merged)
    payload = {
        "construction": scores.construction,
        "epsilon": scores.epsilon,
        "seed": merged["seed"],
        "scores": [float(v) for v in scores.scores],
    }
    atomic_write_text(out / "scores.json", canonical_json(payload))
    write_config_echo(out, "scores", merged)
    return 0


def cmd_select_balanced(args) -> int:
    merged = merge_config(
        args,
        {"scores": None, "data": None, "manifest": None, "k": None, "out": None},
        required=("scores", "data", "k", "out"),
    )
    payload = load_json(merged["scores"], "scores")
    dataset = load_dataset(merged["data"], merged["manifest"])
    coreset = class_balanced_select(
        np.asarray(payload["scores"], dtype=np.float64),
        dataset.target(ROLE_FINE),
        merged["k"],
        dataset.fingerprint(),
    )
    out = out_dir_of(merged)
    atomic_write_text(out / "coreset.json", canonical_json(coreset.to_dict()))
    write_config_echo(out, "select-balanced", merged)
    return 0


def cmd_eval_coreset(args) -> int:
    merged = merge_config(
        args,
        {
            "train_data": None,
            "train_manifest": None,
            "test_data": None,
            "test_manifest": None,
            "coreset": None,
            "construction": "",
            **TRAIN_DEFAULTS,
            "out": None,
        },
        required=("train_data", "test_data", "coreset", "out"),
    )
    train_ds = load_dataset(merged["train_data"], merged["train_manifest"])
    test_ds = load_dataset(merged["test_data"], merged["test_manifest"])
    coreset = CoreSet.from_dict(load_json(merged["coreset"], "core-set"))
    report = evaluate_coreset(
        train_ds, coreset, test_ds, train_config_from(merged), merged["construction"]
    )
    out = out_dir_of(merged)
    payload = report.to_dict()
    atomic_write_text(out / "report.json", canonical_json(payload))
    atomic_write_text(out / "report.txt", render_text(payload))
    write_config_echo(out, "eval-coreset", merged)
    return 0


def cmd_pipeline_linear(args) -> int:
    merged = merge_config(
        args,
        {
            "seed": None,
            "n": 1000,
            "k": 50,
            "hide": "none",
            "alpha": 1.0,
            "plant_label": PLANT_AGAINST_SECRET,
            "z_center": None,
            "d": 3,
            "noise_sd": 0.5,
            "holdout": None,
            "seeds": 1,
            "jobs": 1,
            "out": None,
        },
        required=("seed", "out"),
    )
    if merged["k"] > merged["n"]:
        raise UsageError(f"--k ({merged['k']}) cannot exceed --n ({merged['n']})")
    hide = HideConfig(
        mode=merged["hide"],
        alpha=merged["alpha"],
        plant_label=merged["plant_label"],
        z_center=merged["z_center"],
    )
    out = out_dir_of(merged)
    common = dict(
        n=merged["n"],
        k=merged["k"],
        hide=hide,
        d=merged["d"],
        noise_sd=merged["noise_sd"],
        holdout_fraction=merged["holdout"],
        jobs=merged["jobs"],
    )
    if merged["seeds"] > 1:
        reports, summary = run_linear_seeds(merged["seed"], merged["seeds"], **common)
        for report in reports:
            atomic_write_text(
                out / "runs" / f"report-{report.seed}.json",
                canonical_json(report.to_dict()),
            )
        atomic_write_text(out / "summary.json", canonical_json(summary))
        report = reports[0]
    else:
        report = run_linear_pipeline(merged["seed"], **common)
    dataset = gen_linear(merged["seed"], merged["n"], d=merged["d"], noise_sd=merged["noise_sd"])
    write_csv(dataset, out / "dataset.csv", manifest_path=out / "manifest.json")
    atomic_write_text(out / "coreset.json", canonical_json(report.coreset.to_dict()))
    payload = report.to_dict()
    atomic_write_text(out / "report.json", canonical_json(payload))
    atomic_write_text(out / "report.txt", render_text(payload))
    write_config_echo(out, "pipeline-linear", merged)
    return 0


def cmd_pipeline_mask(args) -> int:
    merged = merge_config(
        args,
        {
            "seed": None,
            "k": 200,
            "constructions": ",".join(CONSTRUCTIONS),
            **HIER_DEFAULTS,
            **TRAIN_DEFAULTS,
            "test_fraction": 0.2,
            "buckets": 0,
            "seeds": 1,
            "out": None,
        },
        required=("seed", "out"),
    )
    check_hierarchy_flags(merged)
    raw = merged["constructions"]
    constructions = tuple(
        c.strip() for c in (raw.split(",") if isinstance(raw, str) else raw) if c.strip()
    )
    unknown = [c for c in constructions if c not in CONSTRUCTIONS]
    if unknown:
        raise UsageError(f"unknown constructions {unknown}; valid: {list(CONSTRUCTIONS)}")
    train_config = train_config_from(merged)
    common = dict(
        k=merged["k"],
        constructions=constructions,
        train_config=train_config,
        test_fraction=merged["test_fraction"],
        **hier_kwargs(merged),
    )
    out = out_dir_of(merged)
    if merged["seeds"] > 1:
        runs, summary = run_mask_seeds(merged["seed"], merged["seeds"], **common)
        for run in runs:
            atomic_write_text(
                out / "runs" / f"report-{run.seed}.json", canonical_json(run.to_dict())
            )
        atomic_write_text(out / "summary.json", canonical_json(summary))
        run = runs[0]
    else:
        run = run_mask_pipeline(merged["seed"], **common)
    dataset = gen_hierarchical(merged["seed"], **hier_kwargs(merged))
    write_csv(dataset, out / "dataset.csv", manifest_path=out / "manifest.json")
    for construction, coreset in run.coresets.items():
        atomic_write_text(
            out / f"coreset-{construction}.json", canonical_json(coreset.to_dict())
        )
    payload = run.to_dict()
    atomic_write_text(out / "report.json", canonical_json(payload))
    atomic_write_text(out / "report.txt", render_text(payload))
    if merged["buckets"] > 0:
        sweep = run_bucket_sweep(
            merged["seed"],
            num_buckets=merged["buckets"],
            train_config=train_config,
            test_fraction=merged["test_fraction"],
            **hier_kwargs(merged),
        )
        atomic_write_text(out / "bucket-report.json", canonical_json(sweep.to_dict()))
        atomic_write_text(out / "series" / "buckets.csv", sweep.series_csv())
    write_config_echo(out, "pipeline-mask", merged)
    return 0


def cmd_report(args) -> int:
    merged = merge_config(args, {"report": None, "out": None}, required=("report",))
    payload = load_json(merged["report"], "report")
    text = render_text(payload)
    if merged["out"] is None:
        sys.stdout.write(text)
    else:
        out = out_dir_of(merged)
        atomic_write_text(out / "report.txt", text)
        write_config_echo(out, "report", merged)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privcore",
        description=(
            "Core-set selection experiments: keep a public task working while "
            "hiding or misleading a secret one."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def sub(name: str, func, help_text: str):
        p = commands.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file of defaults; flags override")
        p.add_argument("--out", help="output directory")
        p.set_defaults(func=func)
        return p

    p = sub("gen-linear", cmd_gen_linear, "generate regression data with public and secret targets")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=positive_int)
    p.add_argument("--d", type=positive_int)
    p.add_argument("--noise-sd", type=nonneg_float)

    p = sub("gen-hier", cmd_gen_hier, "generate hierarchical classification data")
    p.add_argument("--seed", type=int)
    add_hier_flags(p)

    p = sub("gen-normal", cmd_gen_normal, "generate scalar normal samples")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=positive_int)
    p.add_argument("--mu", type=any_float)
    p.add_argument("--sigma", type=positive_float)

    p = sub("fit", cmd_fit, "fit a least-squares model to a dataset column")
    p.add_argument("--data")
    p.add_argument("--manifest")
    p.add_argument("--target", choices=["y", "z"])

    p = sub("losses", cmd_losses, "score every point: fidelity plus hide term")
    p.add_argument("--data")
    p.add_argument("--manifest")
    p.add_argument("--model", help="public model JSON; fitted from the data when omitted")
    p.add_argument("--hide", choices=list(HIDE_MODES))
    p.add_argument("--alpha", type=nonneg_float)
    p.add_argument("--plant-label", choices=list(PLANT_LABELS))
    p.add_argument("--z-center", type=any_float)
    p.add_argument("--plant-model", help="planted model JSON")
    p.add_argument("--seed", type=int, help="derives the planted model when none is given")
    p.add_argument("--jobs", type=positive_int)

    p = sub("select", cmd_select, "keep the k lowest-loss points")
    p.add_argument("--losses", help="losses CSV from the losses subcommand")
    p.add_argument("--data", help="dataset CSV, to stamp the core-set with its fingerprint")
    p.add_argument("--manifest")
    p.add_argument("--k", type=positive_int)

    p = sub("select-moment", cmd_select_moment, "mean-preserving, dispersion-inflating subset")
    p.add_argument("--data")
    p.add_argument("--manifest")
    p.add_argument("--k", type=positive_int)
    p.add_argument("--tolerance", type=positive_float)

    p = sub("trace", cmd_trace, "train a classifier and record per-example gradient norms")
    p.add_argument("--data")
    p.add_argument("--manifest")
    p.add_argument("--task", choices=list(TASKS))
    add_train_flags(p)

    p = sub("scores", cmd_scores, "combine two traces into selection scores")
    p.add_argument("--trace-coarse")
    p.add_argument("--trace-fine")
    p.add_argument("--construction", choices=list(CONSTRUCTIONS))
    p.add_argument("--seed", type=int)

    p = sub("select-balanced", cmd_select_balanced, "class-balanced bottom-k by score")
    p.add_argument("--scores")
    p.add_argument("--data")
    p.add_argument("--manifest")
    p.add_argument("--k", type=positive_int)

    p = sub("eval-coreset", cmd_eval_coreset, "train on a core-set, test on held-out data")
    p.add_argument("--train-data")
    p.add_argument("--train-manifest")
    p.add_argument("--test-data")
    p.add_argument("--test-manifest")
    p.add_argument("--coreset")
    p.add_argument("--construction")
    add_train_flags(p)

    p = sub("pipeline-linear", cmd_pipeline_linear, "full regression experiment")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=positive_int)
    p.add_argument("--k", type=positive_int)
    p.add_argument("--hide", choices=list(HIDE_MODES))
    p.add_argument("--alpha", type=nonneg_float)
    p.add_argument("--plant-label", choices=list(PLANT_LABELS))
    p.add_argument("--z-center", type=any_float)
    p.add_argument("--d", type=positive_int)
    p.add_argument("--noise-sd", type=nonneg_float)
    p.add_argument("--holdout", type=fraction, help="held-out fraction for extra r-squared rows")
    p.add_argument("--seeds", type=positive_int, help="run this many consecutive seeds")
    p.add_argument("--jobs", type=positive_int)

    p = sub("pipeline-mask", cmd_pipeline_mask, "full classification masking experiment")
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=positive_int)
    p.add_argument("--constructions", help="comma-separated subset of the constructions")
    add_hier_flags(p)
    add_train_flags(p)
    p.add_argument("--test-fraction", type=fraction)
    p.add_argument("--buckets", type=positive_int, help="also run a norm-bucket sweep")
    p.add_argument("--seeds", type=positive_int, help="run this many consecutive seeds")

    p = sub("report", cmd_report, "re-render a JSON report as a text table")
    p.add_argument("--report", help="report JSON produced by another subcommand")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
