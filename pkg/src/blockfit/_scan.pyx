# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled split-scan kernel; contract documented in blockfit._scan_py.

The arithmetic mirrors the fallback operation for operation (same scatter
order, same cumulative grouping, same guards) so both backends agree
bitwise on integer-valued targets and to the last few ulps otherwise.
"""

import numpy as np

DEF CHUNK_LIMIT = 2097152  # elements per dense cumulative buffer


cdef _sweep(const long long[::1] cand, const long long[::1] block, const double[::1] y,
            Py_ssize_t lo, Py_ssize_t hi, Py_ssize_t row_lo, Py_ssize_t row_hi,
            long long[::1] stamp, long long[::1] pos, long long stamp_val):
    """Best split in candidate interval [lo, hi): returns (bracket, threshold)."""
    cdef Py_ssize_t width = hi - lo
    if width < 2:
        return -1.0, -1

    # present blocks, remapped to 0..n_present-1 in ascending id order
    cdef Py_ssize_t r, i, n_present = 0
    cdef long long bid
    ids_arr = np.empty(row_hi - row_lo, dtype=np.int64)
    cdef long long[::1] ids = ids_arr
    for r in range(row_lo, row_hi):
        bid = block[r]
        if stamp[bid] != stamp_val:
            stamp[bid] = stamp_val
            ids[n_present] = bid
            n_present += 1
    sorted_ids_arr = np.sort(ids_arr[:n_present])
    cdef long long[::1] sorted_ids = sorted_ids_arr
    for i in range(n_present):
        pos[sorted_ids[i]] = i

    tot_n_arr = np.zeros(n_present, dtype=np.float64)
    tot_s_arr = np.zeros(n_present, dtype=np.float64)
    tot_term_arr = np.empty(n_present, dtype=np.float64)
    cdef double[::1] tot_n = tot_n_arr
    cdef double[::1] tot_s = tot_s_arr
    cdef double[::1] tot_term = tot_term_arr
    for r in range(row_lo, row_hi):
        i = pos[block[r]]
        tot_n[i] += 1.0
        tot_s[i] += y[r]
    for i in range(n_present):
        tot_term[i] = tot_s[i] * tot_s[i] / tot_n[i]

    cdef Py_ssize_t chunk = width
    if n_present * width > CHUNK_LIMIT:
        chunk = CHUNK_LIMIT // n_present
        if chunk < 1:
            chunk = 1
    cells_n_arr = np.zeros(n_present * chunk, dtype=np.float64)
    cells_s_arr = np.zeros(n_present * chunk, dtype=np.float64)
    carry_n_arr = np.zeros(n_present, dtype=np.float64)
    carry_s_arr = np.zeros(n_present, dtype=np.float64)
    cdef double[::1] cells_n = cells_n_arr
    cdef double[::1] cells_s = cells_s_arr
    cdef double[::1] carry_n = carry_n_arr
    cdef double[::1] carry_s = carry_s_arr

    cdef double best_gain = -1.0
    cdef long long best_t = -1
    cdef Py_ssize_t c0 = 0, w, col, limit, base
    cdef double run_n, run_s, ln, ls, rn, rs, term, bracket
    r = row_lo
    while c0 < width:
        w = chunk if c0 + chunk <= width else width - c0
        for i in range(n_present * chunk):
            cells_n[i] = 0.0
            cells_s[i] = 0.0
        # scatter rows of this candidate range (row order, as np.bincount does)
        while r < row_hi and cand[r] - lo < c0 + w:
            i = pos[block[r]]
            col = cand[r] - lo - c0
            cells_n[i * chunk + col] += 1.0
            cells_s[i * chunk + col] += y[r]
            r += 1
        # in-place prefix sums per block row
        for i in range(n_present):
            base = i * chunk
            run_n = 0.0
            run_s = 0.0
            for col in range(w):
                run_n += cells_n[base + col]
                cells_n[base + col] = run_n
                run_s += cells_s[base + col]
                cells_s[base + col] = run_s
        limit = w - 1 if c0 + w == width else w
        for col in range(limit):
            bracket = 0.0
            for i in range(n_present):
                ln = carry_n[i] + cells_n[i * chunk + col]
                ls = carry_s[i] + cells_s[i * chunk + col]
                rn = tot_n[i] - ln
                rs = tot_s[i] - ls
                term = 0.0
                if ln > 0:
                    term = ls * ls / ln
                if rn > 0:
                    term = term + rs * rs / rn
                bracket += term - tot_term[i]
            if bracket > best_gain:
                best_gain = bracket
                best_t = lo + c0 + col
        for i in range(n_present):
            carry_n[i] = carry_n[i] + cells_n[i * chunk + w - 1]
            carry_s[i] = carry_s[i] + cells_s[i * chunk + w - 1]
        c0 += w
    return best_gain, best_t


def fit_feature_partition(cand_in, block_in, y_in, Py_ssize_t n_cands, Py_ssize_t n_blocks,
                          double sst, double remaining, double lam):
    """Greedy split sequence; see blockfit._scan_py.fit_feature_partition."""
    cand_arr = np.ascontiguousarray(cand_in, dtype=np.int64)
    block_arr = np.ascontiguousarray(block_in, dtype=np.int64)
    y_arr = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef const long long[::1] cand = cand_arr
    cdef const long long[::1] block = block_arr
    cdef const double[::1] y = y_arr
    cdef Py_ssize_t n = cand_arr.shape[0]
    if sst <= 0:
        raise ValueError("sst must be > 0")
    if remaining <= 0:
        raise ValueError("remaining unexplained fraction must be > 0")
    thresholds = []
    gains = []
    if n_cands < 2 or n == 0:
        return np.array(thresholds, dtype=np.int64), np.array(gains, dtype=np.float64)

    stamp_arr = np.zeros(n_blocks, dtype=np.int64)
    pos_arr = np.empty(n_blocks, dtype=np.int64)
    cdef long long[::1] stamp = stamp_arr
    cdef long long[::1] pos = pos_arr
    cdef long long stamp_val = 0

    stamp_val += 1
    g, t = _sweep(cand, block, y, 0, n_cands, 0, n, stamp, pos, stamp_val)
    intervals = [[0, n_cands, 0, n, g, t]]
    cdef double gain, best_gain
    cdef long long best_t
    cdef Py_ssize_t best_i, lo, hi, row_lo, row_hi, mid, row_mid
    while True:
        best_i = -1
        best_gain = -1.0
        best_t = -1
        for i, (_, _, _, _, g, t) in enumerate(intervals):
            if t >= 0 and (g > best_gain or (g == best_gain and t < best_t)):
                best_i = i
                best_gain = g
                best_t = t
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
        row_mid = row_lo + <Py_ssize_t> np.searchsorted(cand_arr[row_lo:row_hi], mid, side="left")
        stamp_val += 1
        gl, tl = _sweep(cand, block, y, lo, mid, row_lo, row_mid, stamp, pos, stamp_val)
        stamp_val += 1
        gr, tr = _sweep(cand, block, y, mid, hi, row_mid, row_hi, stamp, pos, stamp_val)
        intervals[best_i] = [lo, mid, row_lo, row_mid, gl, tl]
        intervals.append([mid, hi, row_mid, row_hi, gr, tr])
    return np.array(thresholds, dtype=np.int64), np.array(gains, dtype=np.float64)
