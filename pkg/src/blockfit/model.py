"""Partitions, block tables and the trained model container."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import TaskKind

BlockKey = tuple[int, ...]


@dataclass(frozen=True)
class FeaturePartition:
    """Ordered thresholds s_1 < ... < s_n cutting one feature into n+1 bins.

    Bins are closed on the right and extended to +-infinity:
    bin 0 = (-inf, s_1], bin j = (s_j, s_{j+1}], bin n = (s_n, +inf), so
    every real value maps to exactly one bin and out-of-range inputs clamp
    into the first or last bin.
    """

    feature_index: int
    thresholds: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(self.thresholds, dtype=np.float64)
        if t.ndim != 1:
            raise ValueError("thresholds must be one-dimensional")
        if t.size > 1 and not (np.diff(t) > 0).all():
            raise ValueError("thresholds must be strictly increasing")
        t.flags.writeable = False
        object.__setattr__(self, "thresholds", t)

    @property
    def n_bins(self) -> int:
        return self.thresholds.size + 1

    def bin_index(self, values) -> np.ndarray:
        """Bin of each value: the count of thresholds strictly below it."""
        return np.searchsorted(self.thresholds, np.asarray(values, dtype=np.float64), side="left")

    def bin_edges(self, j: int, lo: float = -np.inf, hi: float = np.inf) -> tuple[float, float]:
        """(left, right] edges of bin j, with lo/hi substituted at the extremes."""
        t = self.thresholds
        left = lo if j == 0 else float(t[j - 1])
        right = hi if j == t.size else float(t[j])
        return left, right


@dataclass(frozen=True)
class BlockStats:
    """Count and target sum of one block; the mean is derived, never stored."""

    count: int
    target_sum: float

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("negative count")
        if self.count == 0 and self.target_sum != 0.0:
            raise ValueError("empty block must carry a zero target sum")

    @property
    def mean(self) -> float:
        if self.count == 0:
            raise ValueError("mean of an empty block is undefined")
        return self.target_sum / self.count


@dataclass(frozen=True)
class LevelTable:
    """Block statistics for one selection depth, keyed by bin-index tuples.

    Entries are stored in sorted key order. Counts sum to the training N,
    and aggregating a level's entries over their last index reproduces the
    previous level exactly.
    """

    level: int
    entries: dict[BlockKey, BlockStats]

    def __post_init__(self):
        for key in self.entries:
            if len(key) != self.level:
                raise ValueError(f"key {key} has length {len(key)}, expected level {self.level}")

    @classmethod
    def root(cls, count: int, target_sum: float) -> "LevelTable":
        """Level-0 table: the whole training set as a single block."""
        return cls(level=0, entries={(): BlockStats(count, target_sum)})

    @classmethod
    def from_arrays(cls, level: int, keys: np.ndarray, counts: np.ndarray, sums: np.ndarray) -> "LevelTable":
        entries = {}
        for key, n, s in zip(keys, counts, sums):
            entries[tuple(int(k) for k in key)] = BlockStats(int(n), float(s))
        return cls(level=level, entries=entries)

    @property
    def total_count(self) -> int:
        return sum(st.count for st in self.entries.values())

    @property
    def total_sum(self) -> float:
        return sum(st.target_sum for st in self.entries.values())

    def marginalize(self) -> "LevelTable":
        """Aggregate out the last index, producing the level-(l-1) table."""
        if self.level == 0:
            raise ValueError("cannot marginalize the root table")
        parents: dict[BlockKey, list[float]] = {}
        for key, st in self.entries.items():
            acc = parents.setdefault(key[:-1], [0, 0.0])
            acc[0] += st.count
            acc[1] += st.target_sum
        return LevelTable(
            level=self.level - 1,
            entries={k: BlockStats(int(n), s) for k, (n, s) in parents.items()},
        )

    def explained_ss(self, global_mean: float) -> float:
        """Between-block sum of squares, Σ N_p (ȳ_p - ȳ)²."""
        total = 0.0
        for st in self.entries.values():
            if st.count:
                d = st.mean - global_mean
                total += st.count * d * d
        return total


@dataclass(frozen=True)
class TrainConfig:
    """Fitting knobs: the per-split penalty and the stopping controls."""

    lam: float
    max_features: Optional[int] = None
    min_delta_r2: float = 1e-12

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be > 0")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be >= 1")
        if self.min_delta_r2 < 0:
            raise ValueError("min_delta_r2 must be >= 0")


@dataclass
class BlockModel:
    """A fitted block decomposition.

    Holds the ordered selected features with their partitions, the block
    tables for every prefix depth, the full per-step score ledger, the
    redundancy edges toward unselected features, and the training-set
    summary statistics needed for prediction and export.
    """

    task_kind: TaskKind
    feature_names: list[str]
    selected: list[int]
    partitions: list[FeaturePartition]
    levels: list[LevelTable]
    global_count: int
    global_sum: float
    sst: float
    r2_trajectory: list[float]
    step_scores: np.ndarray
    redundancy_edges: list[tuple[int, int, float]]
    lam: float
    threshold: Optional[float] = None
    feature_ranges: list[tuple[float, float]] = field(default_factory=list)

    @property
    def n_selected(self) -> int:
        return len(self.selected)

    @property
    def global_mean(self) -> float:
        return self.global_sum / self.global_count

    def level(self, k: int) -> LevelTable:
        """Block table using the first k selected features (k >= 1)."""
        if not 1 <= k <= self.n_selected:
            raise ValueError(f"k={k} out of range 1..{self.n_selected}")
        return self.levels[k - 1]

    def selected_names(self) -> list[str]:
        return [self.feature_names[i] for i in self.selected]

    def validate(self):
        """Check the structural invariants; raises ValueError on violation."""
        if len(set(self.selected)) != len(self.selected):
            raise ValueError("selected features must be distinct")
        prev = 0.0
        for r2 in self.r2_trajectory:
            if r2 < prev - 1e-12 or r2 > 1 + 1e-9:
                raise ValueError("r2_trajectory must be non-decreasing within [0, 1]")
            prev = r2
        for lvl, table in enumerate(self.levels, start=1):
            if table.level != lvl:
                raise ValueError("level tables out of order")
            if table.total_count != self.global_count:
                raise ValueError(f"level {lvl} counts do not sum to N")
