"""Column-oriented datasets and the total sum of squares."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class TaskKind(Enum):
    BINARY_CLASSIFICATION = "class"
    REGRESSION = "reg"


@dataclass(frozen=True)
class Dataset:
    """Numeric feature columns plus a target vector.

    Columns and target are float64, equal length, free of NaN/inf. For
    binary classification the target holds only 0.0 and 1.0. Instances are
    immutable after construction (arrays are marked read-only) and safe to
    share across threads.
    """

    feature_names: list[str]
    columns: list[np.ndarray]
    target: np.ndarray
    task_kind: TaskKind
    n_rows: int = field(init=False)

    def __post_init__(self):
        if len(self.feature_names) != len(self.columns):
            raise ValueError("feature_names and columns length mismatch")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")
        target = np.ascontiguousarray(self.target, dtype=np.float64)
        n = target.shape[0]
        if n < 1:
            raise ValueError("empty data: need at least one row")
        cols = []
        for name, col in zip(self.feature_names, self.columns):
            arr = np.ascontiguousarray(col, dtype=np.float64)
            if arr.shape != (n,):
                raise ValueError(f"column {name!r} has length {arr.shape[0]}, expected {n}")
            if not np.isfinite(arr).all():
                raise ValueError(f"column {name!r} contains NaN or infinite values")
            arr.flags.writeable = False
            cols.append(arr)
        if not np.isfinite(target).all():
            raise ValueError("target contains NaN or infinite values")
        if self.task_kind is TaskKind.BINARY_CLASSIFICATION:
            bad = (target != 0.0) & (target != 1.0)
            if bad.any():
                row = int(np.argmax(bad))
                raise ValueError(f"non-binary target value {target[row]!r} at row {row + 1}")
        target.flags.writeable = False
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "n_rows", n)

    @property
    def n_features(self) -> int:
        return len(self.columns)

    def column(self, name: str) -> np.ndarray:
        return self.columns[self.feature_names.index(name)]

    def subset(self, rows: np.ndarray) -> "Dataset":
        """Row subset (e.g. a CV fold), preserving column order."""
        return Dataset(
            feature_names=list(self.feature_names),
            columns=[c[rows] for c in self.columns],
            target=self.target[rows],
            task_kind=self.task_kind,
        )


def _parse_cell(text: str, row: int, col_name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"non-numeric cell {text!r} at row {row}, column {col_name!r}") from None
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"NaN or infinite value at row {row}, column {col_name!r}")
    return value


def ingest_csv(path: str, target_name: str, task_kind: TaskKind) -> Dataset:
    """Load an RFC-4180-style CSV (header row, numeric cells) into a Dataset.

    The target column is removed from the features; row order is preserved.
    Raises ValueError for a missing target column, a non-numeric cell
    (named by row and column), NaN/inf values, or empty data.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"empty data: {path} has no header row") from None
        header = [h.strip() for h in header]
        if target_name not in header:
            raise ValueError(f"missing target column {target_name!r} (header: {header})")
        raw_rows = [row for row in reader if row]

    if not raw_rows:
        raise ValueError(f"empty data: {path} has a header but no rows")

    n_cols = len(header)
    parsed = [np.empty(len(raw_rows), dtype=np.float64) for _ in range(n_cols)]
    for i, row in enumerate(raw_rows):
        if len(row) != n_cols:
            raise ValueError(f"row {i + 1} has {len(row)} cells, expected {n_cols}")
        for j, cell in enumerate(row):
            parsed[j][i] = _parse_cell(cell.strip(), i + 1, header[j])

    t = header.index(target_name)
    names = [h for j, h in enumerate(header) if j != t]
    columns = [parsed[j] for j in range(n_cols) if j != t]
    return Dataset(feature_names=names, columns=columns, target=parsed[t], task_kind=task_kind)


def sst(dataset: Dataset) -> float:
    """Total sum of squares of the target, Σ(y - ȳ)².

    Exactly 0.0 for a constant target (including a single row).
    """
    return sst_of(dataset.target)


def sst_of(y: np.ndarray) -> float:
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        raise ValueError("empty target")
    if y.min() == y.max():
        return 0.0
    d = y - y.mean()
    return float(d @ d)
