"""Scale-based (delta) monotonicity of a noisy series.

A delta-pair is two positions i < j whose values differ by at least ``delta``
while every value strictly between them stays within ``delta`` of both ends.
A series is delta-monotone when all its delta-pairs point the same way, so
fluctuations smaller than ``delta`` are ignored.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Direction(str, enum.Enum):
    INCREASING = "INCREASING"
    DECREASING = "DECREASING"
    ANY = "ANY"


@dataclass(frozen=True)
class DeltaPair:
    i: int
    j: int
    direction: Direction


def _check(series, delta) -> np.ndarray:
    F = np.asarray(series, dtype=float).ravel()
    if F.size < 2:
        raise ValueError("series needs at least two points")
    if not np.all(np.isfinite(F)):
        raise ValueError("series contains a non-finite value")
    if not delta > 0:
        raise ValueError("delta must be positive")
    return F


def delta_pairs(series, delta: float) -> list[DeltaPair]:
    """All delta-pairs of ``series``, ordered by their first index.

    For a given i only the first j that leaves the delta band around F[i] can
    qualify (any later j would have that point in its interior), so each i
    needs a single forward scan.
    """
    F = _check(series, delta)
    n = F.size
    pairs = []
    for i in range(n - 1):
        j = i + 1
        while j < n and abs(F[j] - F[i]) < delta:
            j += 1
        if j == n:
            continue
        if np.all(np.abs(F[i + 1:j] - F[j]) < delta):
            d = Direction.INCREASING if F[j] > F[i] else Direction.DECREASING
            pairs.append(DeltaPair(i, j, d))
    return pairs


def delta_pairs_bruteforce(series, delta: float) -> list[DeltaPair]:
    """Literal check of both conditions over every (i, j); O(n^3)."""
    F = _check(series, delta)
    n = F.size
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if abs(F[j] - F[i]) < delta:
                continue
            if all(abs(F[k] - F[i]) < delta and abs(F[k] - F[j]) < delta for k in range(i + 1, j)):
                d = Direction.INCREASING if F[j] > F[i] else Direction.DECREASING
                out.append(DeltaPair(i, j, d))
    return out


def is_delta_monotone(series, delta: float, required: Direction | str = Direction.ANY) -> bool:
    """True iff every delta-pair shares one direction (matching ``required``).

    A series without delta-pairs is monotone in any direction.
    """
    required = Direction(required)
    directions = {p.direction for p in delta_pairs(series, delta)}
    if len(directions) > 1:
        return False
    if required is Direction.ANY or not directions:
        return True
    return directions == {required}


def default_delta(stderrs, factor: float = 3.0, floor: float = 0.01) -> float:
    """Noise scale for an AUC curve: ``factor`` times its largest standard error."""
    se = np.asarray(stderrs, dtype=float)
    return max(factor * float(se.max(initial=0.0)), floor)
