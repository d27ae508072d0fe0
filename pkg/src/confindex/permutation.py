"""Restricted-permutation confounding estimate, kept as a comparison baseline.

Labels are shuffled within each confounder group, a classifier is trained on
the shuffled labels and tested against the true ones. The mean test AUC over
permutations is compared with the normal approximation of the AUC of an
uninformative scorer. When labels and confounder are correlated in the
training data, the within-group shuffle keeps part of the label signal and
the test flags confounding even when the confounder has no effect on the
features.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import clone

from .classifier import as_estimator, decision_scores
from .dataset import CELL_KEYS, DataError, Dataset
from .metrics import auc, auc_null_variance
from .simgen import SimConfig, generate, preset_table2


@dataclass(frozen=True)
class PermutationResult:
    rp_mean_auc: float
    rp_aucs: tuple
    p_value: float
    n_permutations: int
    n_pos: int
    n_neg: int
    null_variance: float

    def to_dict(self) -> dict:
        return {
            "rp_mean_auc": self.rp_mean_auc,
            "p_value": self.p_value,
            "n_permutations": self.n_permutations,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "null_variance": self.null_variance,
            "null_assumption": "variance of the mean = single-AUC null variance / n_permutations",
            "rp_aucs": list(self.rp_aucs),
        }


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def restricted_permute(labels, confounder, seed=0) -> np.ndarray:
    """Shuffle ``labels`` independently inside each confounder group."""
    labels = np.asarray(labels)
    confounder = np.asarray(confounder)
    if labels.shape != confounder.shape:
        raise ValueError("labels and confounder must have the same length")
    rng = _rng(seed)
    out = labels.copy()
    for value in np.unique(confounder):
        idx = np.flatnonzero(confounder == value)
        out[idx] = labels[idx[rng.permutation(idx.size)]]
    return out


def standard_permute(labels, seed=0) -> np.ndarray:
    labels = np.asarray(labels)
    return labels[_rng(seed).permutation(labels.size)]


def stratified_split(data: Dataset, test_fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Train/test positions with every (y, c) cell split at the same fraction."""
    train, test = [], []
    for key in CELL_KEYS:
        rows = np.flatnonzero((data.y == key[0]) & (data.c == key[1]))
        rows = rows[rng.permutation(rows.size)]
        n_test = int(math.floor(test_fraction * rows.size + 0.5))
        test.append(rows[:n_test])
        train.append(rows[n_test:])
    return np.concatenate(train), np.concatenate(test)


def _one_permutation(data: Dataset, estimator, test_fraction: float, seed: int) -> float:
    rng = np.random.default_rng(seed)
    train, test = stratified_split(data, test_fraction, rng)
    y_perm = restricted_permute(data.y[train], data.c[train], rng)
    if np.unique(y_perm).size < 2 or np.unique(data.y[test]).size < 2:
        raise DataError("degenerate split: both labels are needed in training and test sets")
    est = clone(estimator).fit(data.X[train], y_perm)
    s = decision_scores(est, data.X[test])
    yt = data.y[test]
    return auc(s[yt == 1], s[yt == -1]).value


def normal_upper_tail(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def compute_rp_baseline(data: Dataset, clf=None, n_perms: int = 100, test_fraction: float = 0.3,
                        seed: int = 0, n_jobs: int = 1) -> PermutationResult:
    """Mean test AUC of classifiers trained on restricted-permuted labels.

    One fresh stratified train/test split per permutation. The p-value is the
    upper tail of the mean under a normal null centred at 0.5 whose variance
    is the single-AUC null variance divided by ``n_perms``.
    """
    data._require_confounder()
    if n_perms < 1:
        raise ValueError("n_perms must be >= 1")
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    if np.unique(data.y).size < 2 or np.unique(data.c).size < 2:
        raise DataError("both classes and both confounder values are required")
    estimator = as_estimator(clf)
    seeds = [int(s.generate_state(1, np.uint64)[0])
             for s in np.random.SeedSequence(seed).spawn(n_perms)]
    aucs = Parallel(n_jobs=n_jobs)(
        delayed(_one_permutation)(data, estimator, test_fraction, s) for s in seeds
    )
    _, test = stratified_split(data, test_fraction, np.random.default_rng(0))
    n_pos = int(np.count_nonzero(data.y[test] == 1))
    n_neg = int(np.count_nonzero(data.y[test] == -1))
    var = auc_null_variance(n_pos, n_neg) / n_perms
    mean = float(np.mean(aucs))
    p = normal_upper_tail((mean - 0.5) / math.sqrt(var))
    return PermutationResult(mean, tuple(float(a) for a in aucs), p, n_perms, n_pos, n_neg, var)


def rp_base_config(k_y: float = 2.0, k_c: float = 5.0, **kw) -> SimConfig:
    """Eight features: the label shifts block 0 (opposite signs for the two
    classes) and both confounder values shift block 1 identically, so the
    confounder has no effect on the features."""
    return SimConfig(n_features=8, k_plus=k_y, k_minus=-k_y, k_alpha=k_c, k_beta=k_c,
                     index_sets=preset_table2("AABB"), **kw)


def biased_cell_sizes(P: float, n_per_class: int) -> tuple[int, int, int, int]:
    """Fraction P of the positives carry alpha and fraction P of the negatives beta."""
    if not 0 <= P <= 1:
        raise ValueError("P must lie in [0, 1]")
    major = int(math.floor(P * n_per_class + 0.5))
    minor = n_per_class - major
    return major, minor, minor, major


def rp_sweep(P_values, base: SimConfig | None = None, n_per_class: int = 200, clf=None,
             n_perms: int = 100, test_fraction: float = 0.3, seed: int = 0,
             n_jobs: int = 1) -> list[tuple[float, PermutationResult]]:
    """Restricted-permutation estimate as a function of the label/confounder bias P."""
    base = base or rp_base_config(seed=seed)
    out = []
    for P in P_values:
        cfg = replace(base, cell_sizes=biased_cell_sizes(P, n_per_class))
        res = compute_rp_baseline(generate(cfg), clf, n_perms, test_fraction, seed, n_jobs)
        out.append((float(P), res))
    return out
