"""Bundled synthetic dataset generators."""

from __future__ import annotations

import numpy as np

from .data import Dataset, TaskKind

STEP_CUTS_1 = (1.0, 3.0)  # generating thresholds of the first feature
STEP_CUTS_2 = (1.0,)      # generating threshold of the second feature
_STEP_MEANS = np.array([[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]])


def step_function_regression(reps: int = 25, noise: float = 0.0, seed: int = 0,
                             n_noise_features: int = 0) -> Dataset:
    """Step-function regression over a balanced 3x2 block design.

    Feature x1 takes levels 0..5 (bins split after 1 and 3), feature x2
    levels 0..3 (split after 1); the target is the block mean plus optional
    Gaussian noise. The full-factorial layout keeps within-block margins
    exactly balanced, so with noise=0 the generating cuts are the unique
    optimal partition and the decomposition explains all variance.
    """
    levels1 = np.arange(6, dtype=np.float64)
    levels2 = np.arange(4, dtype=np.float64)
    x1 = np.repeat(levels1, levels2.size * reps)
    x2 = np.tile(np.repeat(levels2, reps), levels1.size)
    b1 = np.searchsorted(STEP_CUTS_1, x1, side="left")
    b2 = np.searchsorted(STEP_CUTS_2, x2, side="left")
    y = _STEP_MEANS[b1, b2].copy()
    rng = np.random.default_rng(seed)
    if noise > 0:
        y = y + rng.normal(0.0, noise, y.size)
    order = rng.permutation(y.size)
    names = ["x1", "x2"]
    columns = [x1[order], x2[order]]
    for i in range(n_noise_features):
        names.append(f"noise{i + 1}")
        columns.append(np.round(rng.uniform(0.0, 1.0, y.size), 3))
    return Dataset(names, columns, y[order], TaskKind.REGRESSION)


def unbalanced_classification(n_rows: int = 2000, positive_rate: float = 0.1,
                              seed: int = 0, n_noise_features: int = 3) -> Dataset:
    """Binary outcomes driven by step effects on two features plus noise.

    The positive probability rises sharply in the upper ranges of x1 and x2
    and is rescaled so its average matches positive_rate; extra continuous
    noise features invite overfitting at small penalties, which is what a
    tuning harness needs to exercise. Rates near zero yield the rare-event
    regime where threshold calibration matters.
    """
    if not 0 < positive_rate < 1:
        raise ValueError("positive_rate must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    # coarse signal features resist in-sample memorization; the continuous
    # noise features below are the overfitting bait for tuning harnesses
    x1 = rng.integers(0, 10, n_rows).astype(np.float64)
    x2 = rng.integers(0, 10, n_rows).astype(np.float64)
    weight = 0.1 + 1.5 * (x1 > 5.0) + 1.5 * (x2 > 5.0) + 3.0 * ((x1 > 5.0) & (x2 > 5.0))
    p = positive_rate * weight / weight.mean()
    p = np.clip(p, 0.0, 0.95)
    y = rng.binomial(1, p).astype(np.float64)
    # rare-event draws can come up empty; force one hit in the likeliest spot
    if y.sum() == 0:
        y[int(np.argmax(p))] = 1.0
    names = ["x1", "x2"]
    columns = [x1, x2]
    for i in range(n_noise_features):
        names.append(f"noise{i + 1}")
        columns.append(np.round(rng.normal(0.0, 1.0, n_rows), 3))
    return Dataset(names, columns, y, TaskKind.BINARY_CLASSIFICATION)


def dataset_to_csv(dataset: Dataset, target_name: str = "y") -> str:
    """Render a dataset as CSV text with the target as the last column."""
    header = ",".join([*dataset.feature_names, target_name])
    cols = [*dataset.columns, dataset.target]
    lines = [header]
    for i in range(dataset.n_rows):
        lines.append(",".join(repr(float(c[i])) for c in cols))
    return "\n".join(lines) + "\n"
