"""Interpretability exporters: feature network, partition grids, SVG."""

from __future__ import annotations

import itertools
import json

import numpy as np

from .data import TaskKind
from .model import BlockModel

MAX_SVG_FEATURES = 4


def network_edges(model: BlockModel, include_negative: bool = False) -> list[tuple[str, str, float]]:
    """Redundancy edges as (unselected feature, selected feature, weight).

    Positive-weight edges only by default; include_negative keeps the
    signed interaction effects as well.
    """
    names = model.feature_names
    edges = []
    for j, sel, w in model.redundancy_edges:
        if w > 0 or include_negative:
            edges.append((names[j], names[sel], w))
    return edges


def network_csv_text(edges: list[tuple[str, str, float]]) -> str:
    lines = ["source,target,weight"]
    for src, dst, w in edges:
        lines.append(f"{src},{dst},{w!r}")
    return "\n".join(lines) + "\n"


def network_dot_text(model: BlockModel, edges: list[tuple[str, str, float]]) -> str:
    """Directed graph with edge widths proportional to the weights."""
    selected = {model.feature_names[j] for j in model.selected}
    nodes = sorted({n for e in edges for n in e[:2]} | selected)
    max_w = max((abs(w) for _, _, w in edges), default=1.0) or 1.0
    out = ["digraph feature_network {", "  rankdir=LR;"]
    for name in nodes:
        shape = "box" if name in selected else "ellipse"
        out.append(f'  "{name}" [shape={shape}];')
    for src, dst, w in edges:
        width = 1.0 + 4.0 * abs(w) / max_w
        out.append(f'  "{src}" -> "{dst}" [penwidth={width:.3f}, label="{w:.6g}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def partition_grid(model: BlockModel, k_vis: int, threshold=None) -> dict:
    """Full block grid of the top k_vis features, empty cells included.

    Each cell reports its per-feature bin ranges (infinite edges rendered
    with the training min/max), count and mean; cells without observations
    carry no_observations instead of a mean. For classification a threshold
    adds the predicted class per populated cell.
    """
    if not 1 <= k_vis <= model.n_selected:
        raise ValueError(f"k_vis={k_vis} out of range 1..{model.n_selected}")
    table = model.level(k_vis)
    parts = model.partitions[:k_vis]
    ranges = model.feature_ranges[:k_vis]
    is_class = model.task_kind is TaskKind.BINARY_CLASSIFICATION
    blocks = []
    for key in itertools.product(*(range(p.n_bins) for p in parts)):
        cell: dict = {
            "key": list(key),
            "ranges": [list(p.bin_edges(b, lo, hi)) for p, b, (lo, hi) in zip(parts, key, ranges)],
        }
        stats = table.entries.get(key)
        if stats is None or stats.count == 0:
            cell["count"] = 0
            cell["no_observations"] = True
        else:
            cell["count"] = stats.count
            cell["mean"] = stats.mean
            if is_class and threshold is not None:
                cell["predicted_class"] = int(stats.mean >= threshold)
        blocks.append(cell)
    return {
        "format_version": 1,
        "k": k_vis,
        "feature_names": model.selected_names()[:k_vis],
        "n": model.global_count,
        "global_mean": model.global_mean,
        "sst": model.sst,
        "threshold": threshold,
        "blocks": blocks,
    }


def grid_json_text(grid: dict) -> str:
    return json.dumps(grid, indent=2) + "\n"


def _color(value: float) -> str:
    """White-to-blue ramp for a normalized value in [0, 1]."""
    v = min(max(value, 0.0), 1.0)
    r = int(round(255 - v * (255 - 31)))
    g = int(round(255 - v * (255 - 119)))
    b = int(round(255 - v * (255 - 180)))
    return f"#{r:02x}{g:02x}{b:02x}"


_EMPTY = "#c8c8c8"
_CELL = 26
_GAP = 10
_MARGIN = 60


def grid_svg_text(grid: dict) -> str:
    """Small-multiple heatmap of a partition grid with up to 4 features.

    Outer rows and columns follow the first and second features; panels vary
    by the third (vertical) and fourth (horizontal) features. Cell color
    encodes the block mean, gray marks blocks without observations. For
    classification grids with a threshold, a second sheet shows the
    predicted class per block (red = 1, green = 0).
    """
    k = grid["k"]
    if k > MAX_SVG_FEATURES:
        raise ValueError(
            f"SVG layout handles at most {MAX_SVG_FEATURES} features (got k={k}); use the JSON export")
    n_bins = [0, 0, 0, 0]
    for cell in grid["blocks"]:
        for d, b in enumerate(cell["key"]):
            n_bins[d] = max(n_bins[d], b + 1)
    for d in range(k, 4):
        n_bins[d] = 1
    means = [c["mean"] for c in grid["blocks"] if "mean" in c]
    lo = min(means) if means else 0.0
    hi = max(means) if means else 1.0
    span = (hi - lo) or 1.0
    threshold = grid.get("threshold")
    class_sheet = threshold is not None

    panel_w = n_bins[3] * _CELL
    panel_h = n_bins[2] * _CELL
    sheet_w = _MARGIN + n_bins[1] * (panel_w + _GAP)
    sheet_h = _MARGIN + n_bins[0] * (panel_h + _GAP)
    total_h = sheet_h * (2 if class_sheet else 1) + 30
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{sheet_w + 20}" height="{total_h}" '
        f'font-family="sans-serif" font-size="10">'
    ]

    def cell_rect(cell, sheet_y0, as_class):
        b = cell["key"] + [0] * (4 - k)
        x = _MARGIN + b[1] * (panel_w + _GAP) + b[3] * _CELL
        y = sheet_y0 + b[0] * (panel_h + _GAP) + b[2] * _CELL
        if "mean" not in cell:
            fill = _EMPTY
            tip = f"key={cell['key']} no observations"
        elif as_class:
            fill = "#d62728" if cell["mean"] >= threshold else "#2ca02c"
            tip = f"key={cell['key']} mean={cell['mean']:.4g} n={cell['count']}"
        else:
            fill = _color((cell["mean"] - lo) / span)
            tip = f"key={cell['key']} mean={cell['mean']:.4g} n={cell['count']}"
        return (f'<rect x="{x}" y="{y}" width="{_CELL - 1}" height="{_CELL - 1}" '
                f'fill="{fill}"><title>{tip}</title></rect>')

    def sheet(y0, title, as_class):
        parts.append(f'<text x="10" y="{y0 - 8}" font-weight="bold">{title}</text>')
        names = grid["feature_names"]
        axis = [f"rows: {names[0]}" if k >= 1 else ""]
        if k >= 2:
            axis.append(f"cols: {names[1]}")
        if k >= 3:
            axis.append(f"panel rows: {names[2]}")
        if k >= 4:
            axis.append(f"panel cols: {names[3]}")
        parts.append(f'<text x="10" y="{y0 + 6}" fill="#555">{"; ".join(a for a in axis if a)}</text>')
        for cell in grid["blocks"]:
            parts.append(cell_rect(cell, y0 + 16, as_class))

    sheet(30, f"block means (range {lo:.4g} to {hi:.4g}; gray = no observations)", False)
    if class_sheet:
        sheet(sheet_h + 40, f"predicted class at threshold {threshold:.6g} (red = 1, green = 0)", True)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
