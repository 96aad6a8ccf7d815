"""Stratified fold plans, nested cross-validation and hyperparameter search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import Dataset, TaskKind
from .metrics import (metric_accuracy, metric_auc, metric_f1, metric_mae_mean,
                      metric_mae_median, metric_rmse)
from .model import TrainConfig
from .predict import choose_threshold, expected_values
from .select import fit

N_OUTER = 5
N_INNER = 4


@dataclass(frozen=True)
class FoldPlan:
    """5 outer folds, each paired with 4 inner folds over the rest."""

    seed: int
    outer_folds: list[np.ndarray]
    inner_folds: list[list[np.ndarray]]


@dataclass
class FoldResult:
    fold: int
    lam: float
    k: int
    m: int
    threshold: Optional[float]
    metrics: dict[str, float]


@dataclass
class CvReport:
    task: str
    objective: str
    seed: int
    lambda_grid: list[float]
    standardize: bool
    calibrate_threshold: bool
    folds: list[FoldResult]
    aggregate: dict[str, dict[str, float]]
    surface: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "format_version": 1,
            "task": self.task,
            "objective": self.objective,
            "seed": self.seed,
            "lambda_grid": self.lambda_grid,
            "standardize": self.standardize,
            "calibrate_threshold": self.calibrate_threshold,
            "folds": [
                {"fold": f.fold, "lambda": f.lam, "k": f.k, "m": f.m,
                 "threshold": f.threshold, "metrics": f.metrics}
                for f in self.folds
            ],
            "aggregate": self.aggregate,
        }


def _deal(sequence: np.ndarray, n_folds: int) -> list[np.ndarray]:
    """Round-robin dealing: fold sizes differ by at most one."""
    return [np.sort(sequence[i::n_folds]) for i in range(n_folds)]


def _dealing_sequence(indices: np.ndarray, dataset: Dataset, rng) -> np.ndarray:
    """Shuffled indices; for classification, class 0 rows first then class 1.

    Dealing a class-contiguous shuffled sequence round-robin keeps both the
    overall fold sizes and the per-class counts within one of each other.
    """
    perm = rng.permutation(indices)
    if dataset.task_kind is TaskKind.BINARY_CLASSIFICATION:
        labels = dataset.target[perm]
        perm = np.concatenate([perm[labels == 0.0], perm[labels == 1.0]])
    return perm


def make_folds(dataset: Dataset, seed: int) -> FoldPlan:
    """Deterministic 5-outer/4-inner fold plan, stratified for classification."""
    n = dataset.n_rows
    if n < N_OUTER:
        raise ValueError(f"need at least {N_OUTER} rows, got {n}")
    if dataset.task_kind is TaskKind.BINARY_CLASSIFICATION:
        for cls in (0.0, 1.0):
            count = int((dataset.target == cls).sum())
            if count < 10:
                raise ValueError(f"too few samples per class: class {int(cls)} has {count}, need >= 10")
    rng = np.random.default_rng(seed)
    outer = _deal(_dealing_sequence(np.arange(n), dataset, rng), N_OUTER)
    inner = []
    for t in range(N_OUTER):
        train = np.sort(np.concatenate([outer[u] for u in range(N_OUTER) if u != t]))
        rng_t = np.random.default_rng([seed, t])
        inner.append(_deal(_dealing_sequence(train, dataset, rng_t), N_INNER))
    return FoldPlan(seed=seed, outer_folds=outer, inner_folds=inner)


def _standardized(train: Dataset, other: Dataset) -> tuple[Dataset, Dataset]:
    """Center and scale features by training statistics (protocol parity only;
    the fitted structure is invariant under these affine maps)."""

    def apply(ds, mu, sd):
        cols = [(c - m) / s for c, m, s in zip(ds.columns, mu, sd)]
        return Dataset(list(ds.feature_names), cols, ds.target, ds.task_kind)

    mu = [float(c.mean()) for c in train.columns]
    sd = [float(c.std()) or 1.0 for c in train.columns]
    return apply(train, mu, sd), apply(other, mu, sd)


def _expected(model, dataset: Dataset, k: int) -> np.ndarray:
    if model.n_selected == 0 or k == 0:
        return np.full(dataset.n_rows, model.global_mean)
    return expected_values(model, dataset.columns, min(k, model.n_selected))


def _objective_score(objective: str, y_true, scores) -> float:
    if objective == "auc":
        return metric_auc(y_true, scores)
    return metric_rmse(y_true, scores)


def tune(dataset: Dataset, lambda_grid: list[float], folds: FoldPlan, objective: str,
         calibrate_threshold: bool = False, standardize: bool = False) -> CvReport:
    """Nested CV: inner 4-fold search over (lambda, k), outer 5-fold scoring.

    Per outer fold and per lambda, models fitted on each inner-train split
    are scored on their validation fold for every usable depth k; a fit that
    selects no features scores as the global-mean predictor. The averaged
    inner objective picks (lambda, k) (ties prefer the smaller lambda, then
    the smaller k); the winner is refitted on the full outer-train portion
    and evaluated on the held-out fold.
    """
    if not lambda_grid:
        raise ValueError("empty lambda grid")
    if any(l <= 0 for l in lambda_grid):
        raise ValueError("lambda grid values must be > 0")
    is_class = dataset.task_kind is TaskKind.BINARY_CLASSIFICATION
    if objective == "auc" and not is_class:
        raise ValueError("AUC objective requires a classification task")
    maximize = objective == "auc"

    fold_results = []
    surface = []
    for t in range(N_OUTER):
        test_idx = folds.outer_folds[t]
        train_idx = np.sort(np.concatenate(
            [folds.outer_folds[u] for u in range(N_OUTER) if u != t]))
        candidates = []  # (objective_mean, lam, k, train_r2_mean)
        for lam in lambda_grid:
            per_fold = []
            for val_idx in folds.inner_folds[t]:
                fit_idx = np.setdiff1d(train_idx, val_idx)
                sub = dataset.subset(fit_idx)
                val = dataset.subset(val_idx)
                if standardize:
                    sub, val = _standardized(sub, val)
                model = fit(sub, TrainConfig(lam=lam))
                per_fold.append((model, val))
            max_m = max(model.n_selected for model, _ in per_fold)
            for k in range(1, max(max_m, 1) + 1):
                scores = [
                    _objective_score(objective, val.target, _expected(model, val, k))
                    for model, val in per_fold
                ]
                r2s = [
                    model.r2_trajectory[min(k, model.n_selected) - 1]
                    if model.n_selected else 0.0
                    for model, _ in per_fold
                ]
                obj = float(np.mean(scores))
                candidates.append((obj, lam, k, float(np.mean(r2s))))
                surface.append({"fold": t, "lambda": lam, "k": k,
                                "objective_mean": obj, "train_r2_mean": float(np.mean(r2s))})
        sign = -1.0 if maximize else 1.0
        best_obj, best_lam, best_k, _ = min(candidates, key=lambda c: (sign * c[0], c[1], c[2]))

        train_sub = dataset.subset(train_idx)
        test_sub = dataset.subset(test_idx)
        if standardize:
            train_sub, test_sub = _standardized(train_sub, test_sub)
        refit = fit(train_sub, TrainConfig(lam=best_lam))
        k_eff = min(best_k, refit.n_selected)
        scores = _expected(refit, test_sub, k_eff)
        theta = None
        metrics: dict[str, float] = {}
        if is_class:
            theta = (choose_threshold(refit, k_eff, train_sub)
                     if calibrate_threshold else 0.5)
            pred = (scores >= theta).astype(np.float64)
            metrics["accuracy"] = metric_accuracy(test_sub.target, pred)
            metrics["f1"] = metric_f1(test_sub.target, pred)
            metrics["auc"] = metric_auc(test_sub.target, scores)
        else:
            metrics["rmse"] = metric_rmse(test_sub.target, scores)
            metrics["mae_mean"] = metric_mae_mean(test_sub.target, scores)
            metrics["mae_median"] = metric_mae_median(test_sub.target, scores)
        fold_results.append(FoldResult(fold=t, lam=best_lam, k=best_k,
                                       m=refit.n_selected, threshold=theta, metrics=metrics))

    names = list(fold_results[0].metrics)
    aggregate = {
        name: {
            "mean": float(np.mean([f.metrics[name] for f in fold_results])),
            "std": float(np.std([f.metrics[name] for f in fold_results])),
        }
        for name in names
    }
    return CvReport(
        task=dataset.task_kind.value,
        objective=objective,
        seed=folds.seed,
        lambda_grid=list(lambda_grid),
        standardize=standardize,
        calibrate_threshold=calibrate_threshold,
        folds=fold_results,
        aggregate=aggregate,
        surface=surface,
    )
