"""Rank-based AUC and the Mann-Whitney null variance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AucEstimate:
    value: float
    n_pos: int
    n_neg: int

    def __float__(self) -> float:
        return self.value


def _as_scores(values, side: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError(f"one-class validation set: no {side} scores")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite {side} score")
    return arr


def auc(pos_scores, neg_scores) -> AucEstimate:
    """Area under the ROC curve as the normalised Mann-Whitney U statistic.

    Every (positive, negative) pair where the positive scores higher counts 1,
    a tie counts 0.5.  Tied groups receive their average rank so the whole
    computation is a single sort.

    Parameters
    ----------
    pos_scores, neg_scores : array-like of float
        Classifier scores of the positive and negative validation samples.

    Returns
    -------
    AucEstimate
    """
    pos = _as_scores(pos_scores, "positive")
    neg = _as_scores(neg_scores, "negative")
    n_pos, n_neg = pos.size, neg.size

    allscores = np.concatenate([pos, neg])
    uniq, inverse, counts = np.unique(allscores, return_inverse=True, return_counts=True)
    # average 1-based rank of each tie group
    upper = np.cumsum(counts)
    avg_rank = upper - (counts - 1) / 2.0
    rank_sum = avg_rank[inverse[:n_pos]].sum()

    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return AucEstimate(float(u / (n_pos * n_neg)), n_pos, n_neg)


def auc_pairwise(pos_scores, neg_scores) -> float:
    """O(n_pos * n_neg) definition-literal AUC, kept as a reference."""
    pos = _as_scores(pos_scores, "positive")
    neg = _as_scores(neg_scores, "negative")
    diff = pos[:, None] - neg[None, :]
    wins = np.count_nonzero(diff > 0) + 0.5 * np.count_nonzero(diff == 0)
    return float(wins / (pos.size * neg.size))


def auc_null_variance(n_pos: int, n_neg: int) -> float:
    """Variance of the AUC of an uninformative scorer on n_pos vs n_neg samples."""
    if n_pos < 1 or n_neg < 1:
        raise ValueError("n_pos and n_neg must both be >= 1")
    return (n_pos + n_neg + 1) / (12.0 * n_pos * n_neg)
