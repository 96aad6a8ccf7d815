"""Command-line interface.

Exit codes: 0 on success, 1 for data or fitting errors, 2 for bad usage
(argparse errors and out-of-range arguments). Every file write is atomic:
a failed command leaves no partial artifact behind.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .crossval import make_folds, tune
from .data import Dataset, TaskKind, ingest_csv
from .export import (grid_json_text, grid_svg_text, network_csv_text,
                     network_dot_text, network_edges, partition_grid)
from .model import TrainConfig
from .modelio import atomic_write, load_model, save_model
from .predict import choose_threshold, expected_values, predict_classes
from .select import fit
from .synth import dataset_to_csv, step_function_regression, unbalanced_classification

TASKS = {"class": TaskKind.BINARY_CLASSIFICATION, "reg": TaskKind.REGRESSION}


def _add_data_args(p):
    p.add_argument("--data", required=True, help="input CSV with a header row")
    p.add_argument("--target", required=True, help="name of the target column")
    p.add_argument("--task", required=True, choices=sorted(TASKS), help="prediction task")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockfit",
                                     description="Block decomposition models: train, predict, tune and export")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model and write it as JSON")
    _add_data_args(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="per-split penalty controlling bin granularity")
    p.add_argument("--max-features", type=int, default=None)
    p.add_argument("--min-delta-r2", type=float, default=1e-12)
    p.add_argument("--out", required=True, help="model file to write")

    p = sub.add_parser("predict", help="write expected values and classes as CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, required=True, help="number of top features to use")
    p.add_argument("--threshold", default=None,
                   help="classification cutoff: a float or 'calibrated'")
    p.add_argument("--out", required=True)

    p = sub.add_parser("cv", help="nested cross-validation over a lambda grid")
    _add_data_args(p)
    p.add_argument("--grid", required=True, help="comma-separated lambda values")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--standardize", action="store_true",
                   help="center/scale features by training statistics")
    p.add_argument("--calibrate-threshold", action="store_true",
                   help="use the imbalance-aware threshold for class metrics")
    p.add_argument("--surface", default=None,
                   help="optional CSV of the per-(lambda, k) tuning surface")
    p.add_argument("--out", required=True, help="report JSON to write")

    p = sub.add_parser("export-network", help="feature redundancy network as CSV/DOT")
    p.add_argument("--model", required=True)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-dot", default=None)
    p.add_argument("--include-negative", action="store_true")

    p = sub.add_parser("export-grid", help="partition grid as JSON, optionally SVG")
    p.add_argument("--model", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--threshold", default=None,
                   help="class coloring cutoff: a float or 'calibrated'")
    p.add_argument("--out", required=True, help="grid JSON to write")
    p.add_argument("--svg", default=None, help="optional SVG heatmap path")

    p = sub.add_parser("gen-synthetic", help="write a bundled synthetic dataset")
    p.add_argument("--kind", required=True, choices=["step", "unbalanced"])
    p.add_argument("--rows", type=int, default=2000, help="rows (unbalanced kind)")
    p.add_argument("--reps", type=int, default=25, help="rows per block (step kind)")
    p.add_argument("--noise", type=float, default=0.0, help="target noise sd (step kind)")
    p.add_argument("--positive-rate", type=float, default=0.1)
    p.add_argument("--noise-features", type=int, default=3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    return parser


def _load_for_model(model, path: str) -> list[np.ndarray]:
    """Columns of a CSV aligned to the model's feature order."""
    import csv

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = [r for r in reader if r]
    missing = [n for n in model.feature_names if n not in header]
    if missing:
        raise ValueError(f"schema mismatch: data lacks model feature columns {missing}")
    arrays = []
    for name in model.feature_names:
        j = header.index(name)
        try:
            col = np.array([float(r[j]) for r in rows], dtype=np.float64)
        except (ValueError, IndexError):
            raise ValueError(f"non-numeric or missing cell in column {name!r}") from None
        if not np.isfinite(col).all():
            raise ValueError(f"column {name!r} contains NaN or infinite values")
        arrays.append(col)
    return arrays


def _resolve_threshold(raw, model, k: int, parser) -> float:
    if raw is None:
        return 0.5
    if raw == "calibrated":
        return choose_threshold(model, k)
    try:
        return float(raw)
    except ValueError:
        parser.error(f"--threshold must be a float or 'calibrated', got {raw!r}")


def cmd_train(args) -> int:
    dataset = ingest_csv(args.data, args.target, TASKS[args.task])
    config = TrainConfig(lam=args.lam, max_features=args.max_features,
                         min_delta_r2=args.min_delta_r2)
    model = fit(dataset, config)
    print(f"{'step':>4}  {'feature':<24}  {'delta_r2':>12}  {'cum_r2':>12}")
    for l, j in enumerate(model.selected):
        delta = model.step_scores[l][j]
        print(f"{l + 1:>4}  {model.feature_names[j]:<24}  {delta:>12.6f}  {model.r2_trajectory[l]:>12.6f}")
    if not model.selected:
        print("(no features selected)")
    save_model(model, args.out)
    print(f"model written to {args.out}")
    return 0


def cmd_predict(args, parser) -> int:
    model = load_model(args.model)
    if not 1 <= args.k <= model.n_selected:
        parser.error(f"k exceeds selected features (m={model.n_selected})")
    columns = _load_for_model(model, args.data)
    expected = expected_values(model, columns, args.k)
    is_class = model.task_kind is TaskKind.BINARY_CLASSIFICATION
    header = ["row_id", "expected_value", "block_key"]
    classes = None
    if is_class:
        theta = _resolve_threshold(args.threshold, model, args.k, parser)
        classes = predict_classes(model, columns, args.k, theta)
        header = ["row_id", "expected_value", "predicted_class", "block_key"]
    elif args.threshold is not None:
        parser.error("--threshold applies to classification models only")
    from .predict import block_keys

    keys = block_keys(model, columns, args.k)
    with atomic_write(args.out) as fh:
        fh.write(",".join(header) + "\n")
        for r in range(expected.shape[0]):
            key = ":".join(str(int(v)) for v in keys[r])
            if is_class:
                fh.write(f"{r},{float(expected[r])!r},{int(classes[r])},{key}\n")
            else:
                fh.write(f"{r},{float(expected[r])!r},{key}\n")
    print(f"predictions written to {args.out}")
    return 0


def cmd_cv(args) -> int:
    dataset = ingest_csv(args.data, args.target, TASKS[args.task])
    grid = [float(v) for v in args.grid.split(",") if v.strip()]
    folds = make_folds(dataset, args.seed)
    objective = "auc" if TASKS[args.task] is TaskKind.BINARY_CLASSIFICATION else "rmse"
    report = tune(dataset, grid, folds, objective,
                  calibrate_threshold=args.calibrate_threshold,
                  standardize=args.standardize)
    with atomic_write(args.out) as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
        fh.write("\n")
    if args.surface:
        with atomic_write(args.surface) as fh:
            fh.write("fold,lambda,k,objective_mean,train_r2_mean\n")
            for row in report.surface:
                fh.write(f"{row['fold']},{row['lambda']!r},{row['k']},"
                         f"{row['objective_mean']!r},{row['train_r2_mean']!r}\n")
    for f in report.folds:
        line = ", ".join(f"{k}={v:.4f}" for k, v in f.metrics.items())
        print(f"fold {f.fold}: lambda={f.lam:g} k={f.k} (m={f.m}) {line}")
    print(f"report written to {args.out}")
    return 0


def cmd_export_network(args, parser) -> int:
    if not args.out_csv and not args.out_dot:
        parser.error("give --out-csv and/or --out-dot")
    model = load_model(args.model)
    edges = network_edges(model, include_negative=args.include_negative)
    if args.out_csv:
        with atomic_write(args.out_csv) as fh:
            fh.write(network_csv_text(edges))
        print(f"edge list written to {args.out_csv}")
    if args.out_dot:
        with atomic_write(args.out_dot) as fh:
            fh.write(network_dot_text(model, edges))
        print(f"DOT graph written to {args.out_dot}")
    print(f"{len(edges)} edges exported")
    return 0


def cmd_export_grid(args, parser) -> int:
    model = load_model(args.model)
    if not 1 <= args.k <= model.n_selected:
        parser.error(f"k exceeds selected features (m={model.n_selected})")
    threshold = None
    if model.task_kind is TaskKind.BINARY_CLASSIFICATION:
        threshold = _resolve_threshold(args.threshold, model, args.k, parser)
    elif args.threshold is not None:
        parser.error("--threshold applies to classification models only")
    grid = partition_grid(model, args.k, threshold=threshold)
    if args.svg and args.k > 4:
        parser.error("SVG layout handles at most 4 features; use the JSON export for deeper grids")
    with atomic_write(args.out) as fh:
        fh.write(grid_json_text(grid))
    print(f"grid JSON written to {args.out}")
    if args.svg:
        with atomic_write(args.svg) as fh:
            fh.write(grid_svg_text(grid))
        print(f"grid SVG written to {args.svg}")
    return 0


def cmd_gen_synthetic(args) -> int:
    if args.kind == "step":
        dataset = step_function_regression(reps=args.reps, noise=args.noise, seed=args.seed,
                                           n_noise_features=args.noise_features)
    else:
        dataset = unbalanced_classification(n_rows=args.rows, positive_rate=args.positive_rate,
                                            seed=args.seed, n_noise_features=args.noise_features)
    with atomic_write(args.out) as fh:
        fh.write(dataset_to_csv(dataset))
    print(f"{dataset.n_rows} rows x {dataset.n_features} features written to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            return cmd_train(args)
        if args.command == "predict":
            return cmd_predict(args, parser)
        if args.command == "cv":
            return cmd_cv(args)
        if args.command == "export-network":
            return cmd_export_network(args, parser)
        if args.command == "export-grid":
            return cmd_export_grid(args, parser)
        if args.command == "gen-synthetic":
            return cmd_gen_synthetic(args)
        parser.error(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
