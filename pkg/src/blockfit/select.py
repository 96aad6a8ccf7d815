"""Forward feature selection over per-feature partitions."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import Dataset, sst_of
from .kernel import fit_feature_partition as _kernel_fit
from .model import BlockModel, FeaturePartition, LevelTable, TrainConfig


@dataclass(frozen=True)
class StepRecord:
    """One selection step: every remaining feature's score and the winner."""

    step: int
    scores: np.ndarray
    chosen: int
    chosen_partition: FeaturePartition
    cumulative_r2: float


def _n_threads(explicit):
    if explicit is not None:
        return max(1, int(explicit))
    return max(1, int(os.environ.get("BLOCKFIT_THREADS", "1")))


def fit(dataset: Dataset, config: TrainConfig, n_threads=None) -> BlockModel:
    """Fit a block decomposition by greedy forward selection.

    At each step every remaining feature gets a fresh partition conditioned
    on the current blocks; the feature with the largest R² gain wins (ties
    break toward the smallest index). Selection stops when the best gain
    drops to config.min_delta_r2, when no splittable feature remains, or at
    config.max_features. The returned model keeps block tables for every
    prefix depth, the full per-step score matrix (selected features scored
    as zero), and the redundancy edges toward unselected features.

    Candidate features are scored in parallel when n_threads > 1 (or the
    BLOCKFIT_THREADS environment variable is set); the reduction is ordered,
    so results do not depend on scheduling.
    """
    n_features = dataset.n_features
    if n_features == 0:
        raise ValueError("empty feature set")
    y = dataset.target
    n = dataset.n_rows
    total_ss = sst_of(y)
    if total_ss <= 0:
        raise ValueError("no variance to explain: target is constant")

    # one-time per-feature sort; per-step scans then cost O(N) gathers
    uniqs, cands_sorted, orders, y_sorted = [], [], [], []
    for col in dataset.columns:
        uniq, inv = np.unique(col, return_inverse=True)
        order = np.argsort(inv, kind="stable")
        uniqs.append(uniq)
        cands_sorted.append(inv[order].astype(np.int64))
        orders.append(order)
        y_sorted.append(y[order])

    threads = _n_threads(n_threads)
    g = np.zeros(n, dtype=np.int64)
    n_blocks = 1
    block_keys = np.zeros((1, 0), dtype=np.int64)
    selected: list[int] = []
    partitions: list[FeaturePartition] = []
    r2 = 0.0
    r2_trajectory: list[float] = []
    score_rows: list[np.ndarray] = []
    split_results: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def score_one(j):
        if j in selected:
            return np.empty(0, np.int64), np.empty(0, np.float64)
        return _kernel_fit(cands_sorted[j], g[orders[j]], y_sorted[j],
                           uniqs[j].size, n_blocks, total_ss, 1.0 - r2, config.lam)

    def score_all():
        scores = np.zeros(n_features)
        split_results.clear()
        if 1.0 - r2 <= 0.0 or len(selected) == n_features:
            return scores
        todo = [j for j in range(n_features) if j not in selected]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                fitted = list(pool.map(score_one, todo))
        else:
            fitted = [score_one(j) for j in todo]
        for j, (thr, gains) in zip(todo, fitted):
            split_results[j] = (thr, gains)
            scores[j] = float(sum(gains.tolist()))
        return scores

    at_feature_cap = False
    while True:
        scores = score_all()
        score_rows.append(scores)
        if at_feature_cap:
            break
        best_j = int(np.argmax(scores))
        best = float(scores[best_j])
        if best <= config.min_delta_r2:
            break
        thr_idx, _ = split_results[best_j]
        part = FeaturePartition(best_j, np.sort(uniqs[best_j][thr_idx]))
        bins = part.bin_index(dataset.columns[best_j])
        raw = g * part.n_bins + bins
        uniq_raw, g = np.unique(raw, return_inverse=True)
        block_keys = np.hstack([block_keys[uniq_raw // part.n_bins],
                                (uniq_raw % part.n_bins)[:, None]])
        n_blocks = uniq_raw.size
        g = g.astype(np.int64)
        selected.append(best_j)
        partitions.append(part)
        r2 += best
        r2_trajectory.append(r2)
        if config.max_features is not None and len(selected) >= config.max_features:
            at_feature_cap = True  # one more scoring pass feeds the redundancy ledger

    step_scores = np.vstack(score_rows)
    levels = _level_tables(g, block_keys, y) if selected else []
    # the stored network covers features the model never selected
    edges = [(j, sel, w) for j, sel, w in redundancy_coefficients(step_scores, selected)
             if j not in selected]
    return BlockModel(
        task_kind=dataset.task_kind,
        feature_names=list(dataset.feature_names),
        selected=selected,
        partitions=partitions,
        levels=levels,
        global_count=n,
        global_sum=float(y.sum()),
        sst=total_ss,
        r2_trajectory=r2_trajectory,
        step_scores=step_scores,
        redundancy_edges=edges,
        lam=config.lam,
        threshold=None,
        feature_ranges=[(float(dataset.columns[j].min()), float(dataset.columns[j].max()))
                        for j in selected],
    )


def _level_tables(g: np.ndarray, block_keys: np.ndarray, y: np.ndarray) -> list[LevelTable]:
    """Deepest table from the rows, shallower ones by exact aggregation."""
    counts = np.bincount(g, minlength=block_keys.shape[0])
    sums = np.bincount(g, weights=y, minlength=block_keys.shape[0])
    deepest = LevelTable.from_arrays(block_keys.shape[1], block_keys, counts, sums)
    tables = [deepest]
    while tables[-1].level > 1:
        tables.append(tables[-1].marginalize())
    tables.reverse()
    return tables


def redundancy_coefficients(step_scores: np.ndarray, selected: list[int]) -> list[tuple[int, int, float]]:
    """Per-step score drops caused by each selection, as network edges.

    Edge (j, selected[l-1], w) carries w = scores[l-1][j] - scores[l][j] for
    every feature j not yet selected when step l committed: the share of j's
    gain absorbed by the l'th selection. Signs are kept; interaction effects
    can push a weight negative.
    """
    step_scores = np.asarray(step_scores, dtype=np.float64)
    m = len(selected)
    if step_scores.ndim != 2 or step_scores.shape[0] != m + 1:
        raise ValueError(f"step_scores must have {m + 1} rows, got shape {step_scores.shape}")
    if any(not 0 <= j < step_scores.shape[1] for j in selected):
        raise ValueError("selected feature index outside the score matrix")
    edges = []
    for l in range(1, m + 1):
        taken = set(selected[:l])
        for j in range(step_scores.shape[1]):
            if j not in taken:
                edges.append((j, selected[l - 1], float(step_scores[l - 1, j] - step_scores[l, j])))
    return edges


def assignments(model: BlockModel, dataset: Dataset, k: int) -> np.ndarray:
    """Dense level-k block index per row, in the level table's key order."""
    table = model.level(k)
    key_to_idx = {key: i for i, key in enumerate(table.entries)}
    keys = np.stack([model.partitions[i].bin_index(dataset.columns[model.selected[i]])
                     for i in range(k)], axis=1)
    out = np.empty(dataset.n_rows, dtype=np.int64)
    for r in range(dataset.n_rows):
        try:
            out[r] = key_to_idx[tuple(int(v) for v in keys[r])]
        except KeyError:
            raise ValueError(f"row {r} falls in a block absent from the level-{k} table") from None
    return out


def steps_from_model(model: BlockModel) -> list[StepRecord]:
    """Reconstruct the per-step records from a fitted model's ledger."""
    return [
        StepRecord(
            step=l + 1,
            scores=model.step_scores[l],
            chosen=model.selected[l],
            chosen_partition=model.partitions[l],
            cumulative_r2=model.r2_trajectory[l],
        )
        for l in range(model.n_selected)
    ]
