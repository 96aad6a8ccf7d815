"""blockfit: interpretable block decomposition models.

Greedy forward feature selection with per-feature binning; the selected
feature space is cut into blocks whose means drive prediction, feature
importance ledgers, redundancy networks and partition-grid visualizations.
The split search runs on a compiled kernel when available (see
blockfit.kernel.BACKEND) with a numpy fallback.
"""

from .data import Dataset, TaskKind, ingest_csv, sst
from .kernel import BACKEND
from .model import (BlockModel, BlockStats, FeaturePartition, LevelTable,
                    TrainConfig)
from .partition import PartitionResult, SplitScan, build_scan, fit_partition, gain_at
from .predict import (PredictorView, choose_threshold, expected_value,
                      expected_values, locate_block, predict_class, predict_classes)
from .select import StepRecord, fit, redundancy_coefficients
from .crossval import CvReport, FoldPlan, make_folds, tune
from .modelio import load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockModel",
    "BlockStats",
    "CvReport",
    "Dataset",
    "FeaturePartition",
    "FoldPlan",
    "LevelTable",
    "PartitionResult",
    "PredictorView",
    "SplitScan",
    "StepRecord",
    "TaskKind",
    "TrainConfig",
    "build_scan",
    "choose_threshold",
    "expected_value",
    "expected_values",
    "fit",
    "fit_partition",
    "gain_at",
    "ingest_csv",
    "load_model",
    "locate_block",
    "make_folds",
    "predict_class",
    "predict_classes",
    "redundancy_coefficients",
    "save_model",
    "sst",
    "tune",
    "__version__",
]
