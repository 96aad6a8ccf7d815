"""Pure-Python split-scan kernel (numpy), the fallback for blockfit._scan.

Both kernels share one contract: rows arrive sorted by feature value, each
carrying its index into the sorted unique values (`cand`) and its current
block id (`block`). The greedy search repeatedly takes the best single
split over all current bins of the feature, conditioned on the block
decomposition, and stops when the normalized gain drops below the penalty.

Scoring one candidate sums, over the blocks present in the enclosing bin,
    left_sum²/left_n + right_sum²/right_n - total_sum²/total_n
with empty sides contributing zero; the bracket total is divided by the
total sum of squares once at the end. Dense (block x candidate) buffers are
processed in column chunks so memory stays bounded by _CHUNK_LIMIT.
"""

from __future__ import annotations

import numpy as np

# elements per dense cumulative buffer before switching to column chunks
_CHUNK_LIMIT = 1 << 21


def _sweep(cand, block, y, lo, hi, row_lo, row_hi):
    """Best split inside candidate interval [lo, hi): (bracket, threshold).

    The threshold is a global candidate index; ties break toward the
    smallest index. Returns (-1.0, -1) when the interval cannot be split.
    """
    width = hi - lo
    if width < 2:
        return -1.0, -1
    c = cand[row_lo:row_hi] - lo
    b = block[row_lo:row_hi]
    v = y[row_lo:row_hi]

    present, binv = np.unique(b, return_inverse=True)
    n_present = present.size
    tot_n = np.bincount(binv, minlength=n_present).astype(np.float64)
    tot_s = np.bincount(binv, weights=v, minlength=n_present)
    tot_term = tot_s * tot_s / tot_n

    chunk = width if n_present * width <= _CHUNK_LIMIT else max(1, _CHUNK_LIMIT // n_present)
    carry_n = np.zeros(n_present)
    carry_s = np.zeros(n_present)
    best_gain = -1.0
    best_t = -1
    for c0 in range(0, width, chunk):
        w = min(chunk, width - c0)
        r0 = int(np.searchsorted(c, c0, side="left"))
        r1 = int(np.searchsorted(c, c0 + w, side="left"))
        comp = binv[r0:r1] * w + (c[r0:r1] - c0)
        cells_n = np.bincount(comp, minlength=n_present * w).reshape(n_present, w)
        cells_s = np.bincount(comp, weights=v[r0:r1], minlength=n_present * w).reshape(n_present, w)
        ln = carry_n[:, None] + np.cumsum(cells_n, axis=1)
        ls = carry_s[:, None] + np.cumsum(cells_s, axis=1)
        rn = tot_n[:, None] - ln
        rs = tot_s[:, None] - ls
        lterm = np.divide(ls * ls, ln, out=np.zeros_like(ls), where=ln > 0)
        rterm = np.divide(rs * rs, rn, out=np.zeros_like(rs), where=rn > 0)
        bracket = (lterm + rterm - tot_term[:, None]).sum(axis=0)
        # the interval's last candidate leaves the right side empty: no split
        limit = w - 1 if c0 + w == width else w
        if limit > 0:
            col = int(np.argmax(bracket[:limit]))
            gain = float(bracket[col])
            if gain > best_gain:
                best_gain = gain
                best_t = lo + c0 + col
        carry_n = ln[:, -1]
        carry_s = ls[:, -1]
    return best_gain, best_t


def fit_feature_partition(cand, block, y, n_cands, n_blocks, sst, remaining, lam):
    """Greedy split sequence for one feature conditioned on current blocks.

    Returns (thresholds, gains): candidate indices in selection order and
    the un-normalized R² gain of each accepted split. A split is accepted
    while gain / (sst * remaining) >= lam; negative float noise clamps to
    zero. Ties break toward the smallest threshold.
    """
    cand = np.ascontiguousarray(cand, dtype=np.int64)
    block = np.ascontiguousarray(block, dtype=np.int64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = cand.shape[0]
    if sst <= 0:
        raise ValueError("sst must be > 0")
    if remaining <= 0:
        raise ValueError("remaining unexplained fraction must be > 0")
    thresholds: list[int] = []
    gains: list[float] = []
    if n_cands < 2 or n == 0:
        return np.array(thresholds, dtype=np.int64), np.array(gains)

    g, t = _sweep(cand, block, y, 0, n_cands, 0, n)
    intervals = [[0, n_cands, 0, n, g, t]]
    while True:
        best_i = -1
        best_gain = -1.0
        best_t = -1
        for i, (_, _, _, _, g, t) in enumerate(intervals):
            if t >= 0 and (g > best_gain or (g == best_gain and t < best_t)):
                best_i, best_gain, best_t = i, g, t
        if best_i < 0:
            break
        gain = best_gain / sst
        if gain < 0.0:
            gain = 0.0
        if gain / remaining < lam:
            break
        thresholds.append(best_t)
        gains.append(gain)
        lo, hi, row_lo, row_hi = intervals[best_i][:4]
        mid = best_t + 1
        row_mid = row_lo + int(np.searchsorted(cand[row_lo:row_hi], mid, side="left"))
        gl, tl = _sweep(cand, block, y, lo, mid, row_lo, row_mid)
        gr, tr = _sweep(cand, block, y, mid, hi, row_mid, row_hi)
        intervals[best_i] = [lo, mid, row_lo, row_mid, gl, tl]
        intervals.append([mid, hi, row_mid, row_hi, gr, tr])
    return np.array(thresholds, dtype=np.int64), np.array(gains)
