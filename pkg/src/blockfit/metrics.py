"""Classification and regression metrics."""

from __future__ import annotations

import numpy as np


def _paired(y_true, other):
    a = np.asarray(y_true, dtype=np.float64)
    b = np.asarray(other, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise ValueError("inputs must be equal-length non-empty vectors")
    return a, b


def metric_accuracy(y_true, y_pred) -> float:
    y, p = _paired(y_true, y_pred)
    return float((y == p).mean())


def metric_f1(y_true, y_pred) -> float:
    """Harmonic mean of precision and recall; 0 when both are undefined or 0."""
    y, p = _paired(y_true, y_pred)
    tp = float(((y == 1) & (p == 1)).sum())
    fp = float(((y == 0) & (p == 1)).sum())
    fn = float(((y == 1) & (p == 0)).sum())
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def metric_auc(y_true, y_score) -> float:
    """Rank-statistic AUC with average ranks for tied scores.

    Equals the Mann-Whitney U normalization: the fraction of
    (positive, negative) pairs ranked correctly, ties counted one half.
    """
    y, s = _paired(y_true, y_score)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    _, inverse, counts = np.unique(s, return_inverse=True, return_counts=True)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    group_rank = starts + (counts + 1) / 2.0  # average 1-based rank per tie group
    ranks = group_rank[inverse]
    u = float(ranks[y == 1].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def metric_rmse(y_true, y_pred) -> float:
    y, p = _paired(y_true, y_pred)
    return float(np.sqrt(np.mean((y - p) ** 2)))


def metric_mae_mean(y_true, y_pred) -> float:
    y, p = _paired(y_true, y_pred)
    return float(np.mean(np.abs(y - p)))


def metric_mae_median(y_true, y_pred) -> float:
    """Median absolute error, midpoint rule for even-length inputs."""
    y, p = _paired(y_true, y_pred)
    return float(np.median(np.abs(y - p)))
