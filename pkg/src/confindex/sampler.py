"""Bias-controlled training sets, validation subsets and the resampling plan."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .dataset import ALPHA, BETA, CELL_KEYS, CellPartition, DataError, cell_name

POS_A, POS_B, NEG_A, NEG_B = (1, ALPHA), (1, BETA), (-1, ALPHA), (-1, BETA)


class Orientation(str, enum.Enum):
    """Which label/confounder pairing the biased training sets favour.

    PHI over-represents (+1, beta) and (-1, alpha); PHI_STAR the reverse.
    """

    PHI = "PHI"
    PHI_STAR = "PHI_STAR"

    @property
    def code(self) -> int:
        return 0 if self is Orientation.PHI else 1

    def pro_pair(self):
        """(positive cell, negative cell) validated with the same bias as training."""
        return (POS_B, NEG_A) if self is Orientation.PHI else (POS_A, NEG_B)

    def cons_pair(self):
        return (POS_A, NEG_B) if self is Orientation.PHI else (POS_B, NEG_A)


@dataclass(frozen=True)
class BiasSchedule:
    """Bias grid b = k*s/N for k = 0, 1, ... while b <= 1, with M repeats per bias.

    ``cell_size_N`` is the per-cell training size at b = 0 and ``step_s`` the
    integer grid step. When s does not divide N the grid stops short of 1 and
    :attr:`partial_coverage` is set.
    """

    cell_size_N: int
    step_s: int
    repeats_M: int = 10
    root_seed: int = 0

    def __post_init__(self):
        if self.cell_size_N < 1:
            raise ValueError("cell_size_N must be >= 1")
        if not 1 <= self.step_s <= self.cell_size_N:
            raise ValueError(f"step_s must satisfy 1 <= s <= N (N={self.cell_size_N})")
        if self.repeats_M < 1:
            raise ValueError("repeats_M must be >= 1")
        if self.root_seed < 0:
            raise ValueError("root_seed must be non-negative")

    @classmethod
    def from_step(cls, cell_size_N: int, step: float, repeats_M: int = 10, root_seed: int = 0):
        """Schedule from a bias increment in (0, 1] instead of an integer step."""
        s = int(math.floor(step * cell_size_N + 0.5))
        if not 0 < step <= 1 or s < 1:
            raise ValueError(f"step {step} too small for N={cell_size_N}")
        return cls(cell_size_N, s, repeats_M, root_seed)

    @property
    def grid(self) -> list[int]:
        """Bias numerators a, with b = a / N."""
        return list(range(0, self.cell_size_N + 1, self.step_s))

    @property
    def biases(self) -> list[float]:
        return [a / self.cell_size_N for a in self.grid]

    @property
    def b_max(self) -> float:
        return self.grid[-1] / self.cell_size_N

    @property
    def partial_coverage(self) -> bool:
        return self.grid[-1] != self.cell_size_N

    @property
    def normaliser(self) -> float:
        """Largest area difference reachable on this grid: b_max - s/(2N).

        Equals 1 - s/(2N) on a grid ending at b = 1.
        """
        return self.b_max - self.step_s / (2.0 * self.cell_size_N)

    def to_dict(self) -> dict:
        return asdict(self)


def split_sizes(N: int, b: float) -> tuple[int, int]:
    """(N(1-b), N(1+b)) rounded half-up on the larger side, summing to 2N."""
    hi = int(math.floor(N * (1.0 + b) + 0.5))
    hi = min(max(hi, N), 2 * N)
    return 2 * N - hi, hi


def training_sizes(N: int, b: float, orient: Orientation = Orientation.PHI) -> dict:
    lo, hi = split_sizes(N, b)
    sizes = {POS_A: lo, POS_B: hi, NEG_A: hi, NEG_B: lo}
    if orient is Orientation.PHI_STAR:
        sizes = {(y, 1 - c): n for (y, c), n in sizes.items()}
    return sizes


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def make_biased_training(partition: CellPartition, N: int, b: float,
                         orient: Orientation = Orientation.PHI, seed=0) -> np.ndarray:
    """Draw a training set with bias ``b`` without replacement.

    Returns sample positions, cell by cell in the fixed cell order. PHI_STAR
    is PHI applied to the alpha/beta-swapped partition, so both orientations
    consume a random stream identically.
    """
    orient = Orientation(orient)
    if not 0.0 <= b <= 1.0:
        raise ValueError("bias must lie in [0, 1]")
    if orient is Orientation.PHI_STAR:
        partition = partition.swapped()
    rng = _rng(seed)
    sizes = training_sizes(N, b)
    for key in CELL_KEYS:
        if len(partition.cells[key]) < sizes[key]:
            raise DataError(
                f"training pool {cell_name(_unswap(key, orient))} has "
                f"{len(partition.cells[key])} samples, {sizes[key]} required (N={N}, b={b:g})"
            )
    parts = [rng.choice(partition.cells[key], size=sizes[key], replace=False) for key in CELL_KEYS]
    return np.concatenate(parts)


def _unswap(key, orient):
    return key if orient is Orientation.PHI else (key[0], 1 - key[1])


def make_validation(partition: CellPartition, balance_n: int, seed=0,
                    orient: Orientation = Orientation.PHI) -> dict:
    """Equal-size draws from the four held-out pools, keyed by cell.

    ``orient`` only decides the consumption order of the random stream (the
    mirrored order for PHI_STAR); keys are always the true cells.
    """
    orient = Orientation(orient)
    if balance_n < 1:
        raise ValueError("balance_n must be >= 1")
    rng = _rng(seed)
    out = {}
    for key in CELL_KEYS:
        true_key = _unswap(key, orient)
        pool = partition.heldout[true_key]
        if len(pool) < balance_n:
            raise DataError(
                f"held-out pool {cell_name(true_key)} has {len(pool)} samples, "
                f"{balance_n} required"
            )
        out[true_key] = rng.choice(pool, size=balance_n, replace=False)
    return out


class Job(NamedTuple):
    a: int
    b: float
    m: int
    seed: int


def job_seed(root_seed: int, orient: Orientation, a: int, m: int) -> int:
    ss = np.random.SeedSequence(root_seed, spawn_key=(Orientation(orient).code, a, m))
    return int(ss.generate_state(1, np.uint64)[0])


def resample_plan(schedule: BiasSchedule, orient: Orientation = Orientation.PHI,
                  stream: Orientation | None = None) -> list[Job]:
    """One job per (bias, repeat), b = 0 included.

    Seeds hash (root_seed, stream, a, m), so a job's seed does not depend on
    where it sits in the plan. ``stream`` defaults to ``orient``.
    """
    stream = Orientation(stream or orient)
    N = schedule.cell_size_N
    return [
        Job(a, a / N, m, job_seed(schedule.root_seed, stream, a, m))
        for a in schedule.grid
        for m in range(schedule.repeats_M)
    ]
