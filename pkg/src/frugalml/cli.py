"""Command-line front end: ``fit``, ``predict`` and ``replay``.

fit runs the budgeted search (on a CSV or a surrogate landscape), writes
the JSONL trial log plus a rendered figure next to it, prints a JSON
summary of the best configuration, and optionally scores a test file.
predict rebuilds the summarized configuration on the training data (models
retrain deterministically) and writes predictions as CSV. replay runs the
surrogate ablation policies and writes per-policy anytime curves as CSV
with an overlay figure.

User errors exit nonzero with a one-line message, never a stack trace.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import controller, report, surrogate
from .dataset import DataError, load_csv
from .learners import LearnerError, get_learner, learner_names, predict as model_predict, train
from .metrics import MetricError, available_metrics, compute_error, default_metric
from .space import SpaceError
from .surrogate import POLICIES, LandscapeError, load_landscape

_USER_ERRORS = (
    DataError,
    MetricError,
    SpaceError,
    LearnerError,
    LandscapeError,
    controller.FitError,
    controller.LogFormatError,
    FileNotFoundError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frugalml",
        description="Budget-aware learner and hyperparameter search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="search for the best configuration under a budget")
    p_fit.add_argument("--train", help="training CSV (header row, numeric cells)")
    p_fit.add_argument("--task", choices=["binary", "multiclass", "regression"])
    p_fit.add_argument("--label", default=None,
                       help="label column name or index (default: last column)")
    p_fit.add_argument("--metric", default=None,
                       help=f"one of {available_metrics()} or a registered custom metric")
    p_fit.add_argument("--budget-secs", type=float, required=True)
    p_fit.add_argument("--learners", default=None,
                       help=f"comma-separated subset of {learner_names()}")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--log", default="trials.jsonl", help="trial log output path (JSONL)")
    p_fit.add_argument("--summary", default=None, help="also write the JSON summary here")
    p_fit.add_argument("--test", default=None, help="optional test CSV to score at the end")
    p_fit.add_argument("--resample", choices=["auto", "cv", "holdout"], default="auto")
    p_fit.add_argument("--min-sample", type=int, default=10_000)
    p_fit.add_argument("--sample-factor", type=float, default=2.0)
    p_fit.add_argument("--gap-factor", type=float, default=2.0)
    p_fit.add_argument("--max-trials", type=int, default=None)
    p_fit.add_argument("--space-config", default=None,
                       help="JSON file: learner -> dim -> {low, high, scale, init}")
    p_fit.add_argument("--surrogate", default=None,
                       help='search a synthetic landscape instead: "default" or a JSON file')
    p_fit.add_argument("--no-figure", action="store_true",
                       help="skip rendering the PNG next to the log")

    p_pred = sub.add_parser("predict", help="predict with a fitted configuration summary")
    p_pred.add_argument("--summary", required=True, help="summary JSON written by fit")
    p_pred.add_argument("--train", required=True, help="training CSV used by fit")
    p_pred.add_argument("--label", default=None)
    p_pred.add_argument("--features", required=True, help="CSV of feature rows to score")
    p_pred.add_argument("--out", required=True, help="predictions CSV output path")

    p_rep = sub.add_parser("replay", help="run surrogate ablation policies")
    p_rep.add_argument("--landscape", default="default", help='"default" or a JSON file')
    p_rep.add_argument("--policies", default="flaml,roundrobin,fulldata,cv",
                       help=f"comma-separated subset of {list(POLICIES)}")
    p_rep.add_argument("--budget", type=float, required=True, help="synthetic seconds")
    p_rep.add_argument("--seed", type=int, default=0)
    p_rep.add_argument("--out-dir", default=".", help="directory for curve CSVs and figure")
    p_rep.add_argument("--no-figure", action="store_true")
    return parser


def _parse_label(label: str | None) -> str | int | None:
    if label is None:
        return None
    return int(label) if label.lstrip("-").isdigit() else label


def _load_matrix(path: str | Path) -> np.ndarray:
    """Read a header-first CSV where every column is a numeric feature."""
    import csv as _csv

    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    with path.open(newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: no data rows")
    out = np.empty((len(rows), len(header)), dtype=float)
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{path}: row {r + 2} has {len(row)} cells, expected {len(header)}")
        for c, cell in enumerate(row):
            try:
                out[r, c] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {r + 2}, column {header[c].strip()!r}: "
                    f"cannot parse {cell!r} as a number"
                ) from None
    return out


def _cmd_fit(args) -> int:
    if args.surrogate:
        landscape = load_landscape(args.surrogate)
        result = controller.surrogate_fit(
            landscape,
            args.budget_secs,
            seed=args.seed,
            resample=args.resample,
            min_sample=args.min_sample,
            sample_factor=args.sample_factor,
            gap_factor=args.gap_factor,
            max_trials=args.max_trials,
        )
        data = None
    else:
        if not args.train or not args.task:
            raise controller.FitError("fit needs --train and --task (or --surrogate)")
        data = load_csv(args.train, args.task, _parse_label(args.label))
        overrides = None
        if args.space_config:
            overrides = json.loads(Path(args.space_config).read_text())
        result = controller.fit(
            data,
            args.budget_secs,
            metric=args.metric,
            learners=args.learners.split(",") if args.learners else None,
            seed=args.seed,
            resample=args.resample,
            min_sample=args.min_sample,
            sample_factor=args.sample_factor,
            gap_factor=args.gap_factor,
            max_trials=args.max_trials,
            space_overrides=overrides,
        )

    log_path = Path(args.log)
    controller.write_log(result.trials, log_path)
    if not args.no_figure:
        report.render_fit_figure(result.trials, log_path.with_suffix(".png"))

    summary = {
        "task": args.task,
        "metric": result.metric,
        "learner": result.best_config.learner,
        "config": result.best_config.h,
        "sample_size": result.best_config.s,
        "resample": result.plan.describe(),
        "best_validation_error": result.best_validation_error,
        "n_trials": len(result.trials),
        "budget_secs": args.budget_secs,
        "seed": args.seed,
        "label": args.label,
        "surrogate": args.surrogate,
    }
    if args.test and data is not None:
        test_data = load_csv(args.test, args.task, _parse_label(args.label))
        preds = controller.predict(result, test_data.features)
        summary["test_error"] = compute_error(result.metric, preds, test_data.labels)
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary))
    return 0


def _cmd_predict(args) -> int:
    summary = json.loads(Path(args.summary).read_text())
    if summary.get("surrogate"):
        raise controller.FitError("cannot predict from a surrogate-mode summary")
    task = summary["task"]
    label = _parse_label(args.label if args.label is not None else summary.get("label"))
    data = load_csv(args.train, task, label)
    spec = get_learner(summary["learner"])
    model = train(
        spec, summary["config"], data,
        seed=summary.get("seed", 0),
        space=spec.build_space(data.n_instances),
    )
    X = _load_matrix(args.features)
    if X.shape[1] != data.n_features:
        raise LearnerError(
            f"feature file has {X.shape[1]} columns, model expects {data.n_features}"
        )
    preds = model_predict(model, X)
    out = Path(args.out)
    with out.open("w") as fh:
        if task == "regression":
            fh.write("prediction\n")
            for v in preds:
                fh.write(f"{float(v)!r}\n")
        else:
            k = preds.shape[1]
            fh.write(",".join(["prediction"] + [f"p{i}" for i in range(k)]) + "\n")
            for row in preds:
                cls = int(np.argmax(row))
                fh.write(",".join([str(cls)] + [repr(float(p)) for p in row]) + "\n")
    print(json.dumps({"written": str(out), "rows": int(len(preds))}))
    return 0


def _cmd_replay(args) -> int:
    landscape = load_landscape(args.landscape)
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    for p in policies:
        if p not in POLICIES:
            raise LandscapeError(f"unknown policy {p!r}; known: {list(POLICIES)}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = {}
    for policy in policies:
        curve = surrogate.replay(policy, landscape, args.budget, seed=args.seed)
        curves[policy] = curve
        report.write_curve_csv(curve, out_dir / f"curve_{policy}.csv")
        final = curve[-1][1] if curve else float("nan")
        print(json.dumps({"policy": policy, "trials": len(curve), "final_best_error": final}))
    if not args.no_figure:
        report.render_replay_figure(curves, out_dir / "curves.png")
    return 0


def run(argv: list[str] | None = None) -> int:
    """Parse arguments and run one command; returns the exit status."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "predict":
            return _cmd_predict(args)
        return _cmd_replay(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
