"""Learning the partition of one feature conditioned on existing blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import Dataset
from .kernel import fit_feature_partition as _kernel_fit
from .model import FeaturePartition, LevelTable


@dataclass(frozen=True)
class SplitScan:
    """Per-block cumulative statistics over one feature's unique values.

    cum_counts[b, t] and cum_sums[b, t] hold the row count and target sum of
    block b restricted to rows with feature value <= unique_values[t]; the
    final column equals each block's totals. The dense layout costs
    O(blocks x uniques) memory, which is fine for inspection and single-split
    scoring; the greedy search in fit_partition runs on the chunked kernel
    instead.
    """

    feature_index: int
    unique_values: np.ndarray
    cum_counts: np.ndarray
    cum_sums: np.ndarray

    @property
    def n_blocks(self) -> int:
        return self.cum_counts.shape[0]


@dataclass(frozen=True)
class PartitionResult:
    """A learned partition, its total R² gain, and the per-split history."""

    partition: FeaturePartition
    delta_r2: float
    split_sequence: list[tuple[float, float]]  # (threshold, gain) in selection order


def _block_ids(dataset: Dataset, blocks: Optional[LevelTable], assignment) -> tuple[np.ndarray, int]:
    n = dataset.n_rows
    if blocks is None or blocks.level == 0:
        return np.zeros(n, dtype=np.int64), 1
    if assignment is None:
        raise ValueError("assignment required when conditioning on blocks")
    g = np.ascontiguousarray(assignment, dtype=np.int64)
    n_blocks = len(blocks.entries)
    if g.shape != (n,):
        raise ValueError("assignment must give one block index per row")
    if g.size and (g.min() < 0 or g.max() >= n_blocks):
        raise ValueError("assignment refers to a block outside the table")
    return g, n_blocks


def build_scan(dataset: Dataset, feature: int, blocks: Optional[LevelTable] = None,
               assignment=None) -> SplitScan:
    """Cumulative (count, sum) arrays per block over a feature's sorted uniques.

    `assignment` indexes each row into `blocks` in the table's key order;
    pass None (with no blocks) to scan against the whole training set as a
    single block. One-time cost is the O(N log N) sort; rebuilding for a new
    block structure is O(N) plus the dense fill.
    """
    if not 0 <= feature < dataset.n_features:
        raise ValueError(f"feature index {feature} out of range")
    g, n_blocks = _block_ids(dataset, blocks, assignment)
    col = dataset.columns[feature]
    uniq, inv = np.unique(col, return_inverse=True)
    n_cands = uniq.size
    flat = g * n_cands + inv
    counts = np.bincount(flat, minlength=n_blocks * n_cands).reshape(n_blocks, n_cands)
    sums = np.bincount(flat, weights=dataset.target, minlength=n_blocks * n_cands)
    return SplitScan(
        feature_index=feature,
        unique_values=uniq,
        cum_counts=np.cumsum(counts, axis=1).astype(np.float64),
        cum_sums=np.cumsum(sums.reshape(n_blocks, n_cands), axis=1),
    )


def gain_at(scan: SplitScan, s: float, blocks: Optional[LevelTable], sst_total: float) -> float:
    """Un-normalized ΔR² of the single split `value <= s` given the blocks.

    `s` must be one of the scan's candidate values. Empty sides contribute
    zero, and negative float noise clamps to zero.
    """
    if sst_total <= 0:
        raise ValueError("sst_total must be > 0")
    t = int(np.searchsorted(scan.unique_values, s, side="left"))
    if t >= scan.unique_values.size or scan.unique_values[t] != s:
        raise ValueError(f"{s!r} is not a candidate value of feature {scan.feature_index}")
    ln = scan.cum_counts[:, t]
    ls = scan.cum_sums[:, t]
    tn = scan.cum_counts[:, -1]
    ts = scan.cum_sums[:, -1]
    rn = tn - ln
    rs = ts - ls
    lterm = np.divide(ls * ls, ln, out=np.zeros_like(ls), where=ln > 0)
    rterm = np.divide(rs * rs, rn, out=np.zeros_like(rs), where=rn > 0)
    tterm = np.divide(ts * ts, tn, out=np.zeros_like(ts), where=tn > 0)
    gain = float((lterm + rterm - tterm).sum()) / sst_total
    return gain if gain > 0.0 else 0.0


def fit_partition(dataset: Dataset, feature: int, blocks: Optional[LevelTable] = None,
                  assignment=None, *, lam: float, r2_so_far: float = 0.0,
                  sst_total: float) -> PartitionResult:
    """Greedy per-feature partition conditioned on the current decomposition.

    Splits are added while the best single-split gain, normalized by the
    remaining unexplained fraction 1 - r2_so_far, stays >= lam. Ties in gain
    break toward the smallest threshold. Deterministic; a feature with fewer
    than two unique values yields an empty partition with delta_r2 = 0.
    """
    if sst_total <= 0:
        raise ValueError("sst_total must be > 0")
    if not 0 <= r2_so_far < 1:
        raise ValueError("r2_so_far must lie in [0, 1)")
    if not lam > 0:
        raise ValueError("lam must be > 0")
    if not 0 <= feature < dataset.n_features:
        raise ValueError(f"feature index {feature} out of range")
    g, n_blocks = _block_ids(dataset, blocks, assignment)
    col = dataset.columns[feature]
    uniq, inv = np.unique(col, return_inverse=True)
    order = np.argsort(inv, kind="stable")
    thr_idx, gains = _kernel_fit(
        inv[order].astype(np.int64), g[order], dataset.target[order],
        uniq.size, n_blocks, sst_total, 1.0 - r2_so_far, lam,
    )
    values = uniq[thr_idx]
    return PartitionResult(
        partition=FeaturePartition(feature, np.sort(values)),
        delta_r2=float(sum(gains.tolist())),
        split_sequence=list(zip(values.tolist(), gains.tolist())),
    )
