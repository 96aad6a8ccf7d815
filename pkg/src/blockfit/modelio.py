"""Versioned JSON model files; loads reproduce predictions bit for bit."""

from __future__ import annotations

import json
import os
import tempfile
from contextlib import contextmanager

import numpy as np

from .data import TaskKind
from .model import BlockModel, BlockStats, FeaturePartition, LevelTable

FORMAT_VERSION = 1


@contextmanager
def atomic_write(path: str):
    """Write to a sibling temp file and rename in, or clean up on failure."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def model_to_dict(model: BlockModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "task": model.task_kind.value,
        "lambda": model.lam,
        "feature_names": model.feature_names,
        "selected": model.selected,
        "partitions": [p.thresholds.tolist() for p in model.partitions],
        "feature_ranges": [list(r) for r in model.feature_ranges],
        "global_count": model.global_count,
        "global_sum": model.global_sum,
        "sst": model.sst,
        "r2_trajectory": model.r2_trajectory,
        "step_scores": np.asarray(model.step_scores).tolist(),
        "redundancy_edges": [[j, sel, w] for j, sel, w in model.redundancy_edges],
        "threshold": model.threshold,
        "levels": [
            {
                "level": table.level,
                "keys": [list(key) for key in table.entries],
                "counts": [st.count for st in table.entries.values()],
                "sums": [st.target_sum for st in table.entries.values()],
            }
            for table in model.levels
        ],
    }


def model_from_dict(doc: dict) -> BlockModel:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    levels = []
    for entry in doc["levels"]:
        table = LevelTable(
            level=entry["level"],
            entries={
                tuple(key): BlockStats(int(n), float(s))
                for key, n, s in zip(entry["keys"], entry["counts"], entry["sums"])
            },
        )
        levels.append(table)
    return BlockModel(
        task_kind=TaskKind(doc["task"]),
        feature_names=list(doc["feature_names"]),
        selected=[int(j) for j in doc["selected"]],
        partitions=[
            FeaturePartition(j, np.asarray(t, dtype=np.float64))
            for j, t in zip(doc["selected"], doc["partitions"])
        ],
        levels=levels,
        global_count=int(doc["global_count"]),
        global_sum=float(doc["global_sum"]),
        sst=float(doc["sst"]),
        r2_trajectory=[float(v) for v in doc["r2_trajectory"]],
        step_scores=np.asarray(doc["step_scores"], dtype=np.float64),
        redundancy_edges=[(int(j), int(sel), float(w)) for j, sel, w in doc["redundancy_edges"]],
        lam=float(doc["lambda"]),
        threshold=doc["threshold"],
        feature_ranges=[(float(lo), float(hi)) for lo, hi in doc["feature_ranges"]],
    )


def save_model(model: BlockModel, path: str):
    with atomic_write(path) as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def load_model(path: str) -> BlockModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
