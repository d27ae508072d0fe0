"""Confounding Index: how strongly a binary variable can confound a classifier."""

from .classifier import ClassifierConfig, LogisticGD
from .dataset import (
    BinSpec,
    CellPartition,
    DataError,
    Dataset,
    bin_continuous,
    load_csv,
    partition_cells,
    write_csv,
)
from .engine import (
    AucCurve,
    CiReport,
    ConfoundingIndex,
    PhiResult,
    Scenario,
    compute_ci,
    compute_phi,
    confounding_index,
)
from .metrics import auc
from .monotonicity import Direction, delta_pairs, is_delta_monotone
from .permutation import compute_rp_baseline, rp_sweep
from .sampler import BiasSchedule, Orientation
from .simgen import SimConfig, generate

__version__ = "0.1.0"

__all__ = [
    "AucCurve", "BiasSchedule", "BinSpec", "CellPartition", "CiReport", "ClassifierConfig",
    "ConfoundingIndex", "DataError", "Dataset", "Direction", "LogisticGD", "Orientation",
    "PhiResult", "Scenario", "SimConfig", "auc", "bin_continuous", "compute_ci", "compute_phi",
    "compute_rp_baseline", "confounding_index", "delta_pairs", "generate", "is_delta_monotone",
    "load_csv", "partition_cells", "rp_sweep", "write_csv",
]
