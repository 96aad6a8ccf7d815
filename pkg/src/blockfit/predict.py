"""Block lookup, expected values and thresholded class predictions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .data import Dataset, TaskKind
from .model import BlockKey, BlockModel

SENTINEL_ABOVE_ONE = 1.0 + 1e-9  # threshold candidate above every block mean


@dataclass(frozen=True)
class PredictorView:
    """A model restricted to its top-k features, plus the class threshold.

    theta is required for classification (default 0.5) and must be absent
    for regression. Views are immutable; predictions are pure functions.
    """

    model: BlockModel
    k: int
    theta: Optional[float] = None

    def __post_init__(self):
        if not 1 <= self.k <= self.model.n_selected:
            raise ValueError(f"k={self.k} out of range 1..{self.model.n_selected}")
        if self.model.task_kind is TaskKind.BINARY_CLASSIFICATION:
            if self.theta is None:
                theta = self.model.threshold if self.model.threshold is not None else 0.5
                object.__setattr__(self, "theta", theta)
        elif self.theta is not None:
            raise ValueError("theta applies to classification only")


def _selected_values(view: PredictorView, row: Sequence[float]) -> list[float]:
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] != len(view.model.feature_names):
        raise ValueError(f"row must supply {len(view.model.feature_names)} feature values")
    values = []
    for i in range(view.k):
        v = row[view.model.selected[i]]
        if not np.isfinite(v):
            name = view.model.feature_names[view.model.selected[i]]
            raise ValueError(f"missing feature value for {name!r}")
        values.append(float(v))
    return values


def locate_block(view: PredictorView, row: Sequence[float]) -> BlockKey:
    """Level-k block key of a row; total on any finite input (bins clamp)."""
    values = _selected_values(view, row)
    return tuple(int(view.model.partitions[i].bin_index(values[i])) for i in range(view.k))


def expected_value(view: PredictorView, row: Sequence[float]) -> float:
    """Mean of the row's level-k block, walking up to ancestors when empty.

    A block with no training observations falls back to the deepest
    populated prefix block, and ultimately to the global training mean.
    """
    key = locate_block(view, row)
    return _mean_with_fallback(view.model, key)


def _mean_with_fallback(model: BlockModel, key: BlockKey) -> float:
    for depth in range(len(key), 0, -1):
        stats = model.levels[depth - 1].entries.get(key[:depth])
        if stats is not None and stats.count > 0:
            return stats.mean
    return model.global_mean


def predict_class(view: PredictorView, row: Sequence[float]) -> int:
    """1 iff the expected value reaches theta (>= convention)."""
    if view.model.task_kind is not TaskKind.BINARY_CLASSIFICATION:
        raise ValueError("class prediction requires a classification model")
    return int(expected_value(view, row) >= view.theta)


def choose_threshold(model: BlockModel, k: int, training: Optional[Dataset] = None) -> float:
    """Imbalance-aware discrimination threshold from the training blocks.

    Over the level-k block means (plus a sentinel above 1), returns the
    largest theta whose predicted-positive count (blocks with mean >= theta,
    weighted by size) still reaches the actual positive count. With zero
    positives the sentinel wins and nothing is predicted positive.
    """
    if model.task_kind is not TaskKind.BINARY_CLASSIFICATION:
        raise ValueError("threshold calibration requires a classification model")
    positives = float(training.target.sum()) if training is not None else model.global_sum
    if positives <= 0:
        return SENTINEL_ABOVE_ONE
    if model.n_selected == 0 or k == 0:
        return model.global_mean
    table = model.level(k)
    stats = [(st.mean, st.count) for st in table.entries.values() if st.count > 0]
    stats.sort(key=lambda ms: -ms[0])
    predicted = 0
    for mean, count in stats:
        predicted += count
        if predicted >= positives:
            return mean
    return SENTINEL_ABOVE_ONE  # unreachable: the blocks cover every training row


def block_keys(model: BlockModel, columns: Sequence[np.ndarray], k: int) -> np.ndarray:
    """Level-k keys for column-oriented rows; columns align with the model."""
    if not 1 <= k <= model.n_selected:
        raise ValueError(f"k={k} out of range 1..{model.n_selected}")
    cols = []
    for i in range(k):
        col = columns[model.selected[i]]
        if col is None:
            name = model.feature_names[model.selected[i]]
            raise ValueError(f"missing feature column {name!r}")
        cols.append(model.partitions[i].bin_index(col))
    return np.stack(cols, axis=1)


def expected_values(model: BlockModel, columns: Sequence[np.ndarray], k: int) -> np.ndarray:
    """Vectorized expected_value over column-oriented rows."""
    keys = block_keys(model, columns, k)
    means = {key: st.mean for key, st in model.level(k).entries.items() if st.count > 0}
    out = np.empty(keys.shape[0])
    for r in range(keys.shape[0]):
        key = tuple(int(v) for v in keys[r])
        m = means.get(key)
        out[r] = m if m is not None else _mean_with_fallback(model, key)
    return out


def predict_classes(model: BlockModel, columns: Sequence[np.ndarray], k: int, theta: float) -> np.ndarray:
    if model.task_kind is not TaskKind.BINARY_CLASSIFICATION:
        raise ValueError("class prediction requires a classification model")
    return (expected_values(model, columns, k) >= theta).astype(np.int64)
