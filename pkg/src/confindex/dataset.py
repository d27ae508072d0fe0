"""Tabular ingestion, the four (label, confounder) cells and continuous binning.

Samples carry a stable integer id (their row position at load time). Cells are
keyed by ``(y, c)`` with ``y`` in ``{+1, -1}`` and ``c`` in ``{ALPHA, BETA}``
(0 and 1). Both a confounder and its partition are immutable once built.

Note: the index assumes every other variable that may affect the features has
already been matched between the classes. No matching is performed here.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

ALPHA = 0
BETA = 1
CELL_KEYS = ((1, ALPHA), (1, BETA), (-1, ALPHA), (-1, BETA))


class DataError(ValueError):
    """Raised for malformed or insufficient input data."""


def cell_name(key) -> str:
    y, c = key
    return f"({'+1' if y == 1 else '-1'},{'alpha' if c == ALPHA else 'beta'})"


@dataclass(frozen=True)
class LabeledSample:
    id: int
    features: np.ndarray
    label: int
    confounder: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix with +/-1 labels and a binary confounder.

    ``c`` holds 0 (alpha) or 1 (beta); ``c`` may be None when the
    confounder is still a continuous covariate waiting to be binned.
    """

    X: np.ndarray
    y: np.ndarray
    c: np.ndarray | None
    ids: np.ndarray
    feature_names: tuple[str, ...] = ()
    confounder_levels: tuple[str, str] = ("alpha", "beta")
    label_levels: tuple[str, str] = ("-1", "1")
    covariates: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise DataError("X must be two-dimensional")
        n = X.shape[0]
        y = np.asarray(self.y, dtype=int)
        if y.shape != (n,):
            raise DataError("y must have one entry per sample")
        if not np.all(np.isin(y, (-1, 1))):
            raise DataError("labels must be +1 or -1")
        if not np.all(np.isfinite(X)):
            bad = int(np.argwhere(~np.isfinite(X))[0, 0])
            raise DataError(f"non-finite feature in sample {bad}")
        c = self.c
        if c is not None:
            c = np.asarray(c, dtype=int)
            if c.shape != (n,) or not np.all(np.isin(c, (ALPHA, BETA))):
                raise DataError("confounder must hold 0 (alpha) or 1 (beta) per sample")
            c.setflags(write=False)
        ids = np.asarray(self.ids, dtype=int)
        if ids.shape != (n,) or np.unique(ids).size != n:
            raise DataError("ids must be unique, one per sample")
        names = tuple(self.feature_names) or tuple(f"f{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DataError("feature_names length does not match X")
        covs = {}
        for k, v in dict(self.covariates).items():
            v = np.asarray(v, dtype=float)
            if v.shape != (n,):
                raise DataError(f"covariate {k!r} must have one entry per sample")
            v.setflags(write=False)
            covs[k] = v
        for arr in (X, y, ids):
            arr.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "confounder_levels", tuple(self.confounder_levels))
        object.__setattr__(self, "covariates", MappingProxyType(covs))

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.n_samples

    def sample(self, i: int) -> LabeledSample:
        return LabeledSample(
            int(self.ids[i]), self.X[i], int(self.y[i]),
            -1 if self.c is None else int(self.c[i]),
        )

    def subset(self, rows) -> "Dataset":
        """Rows selected by position; ids are preserved."""
        rows = np.asarray(rows, dtype=int)
        return Dataset(
            self.X[rows], self.y[rows], None if self.c is None else self.c[rows],
            self.ids[rows], self.feature_names, self.confounder_levels,
            self.label_levels, {k: v[rows] for k, v in self.covariates.items()},
        )

    def rows_for_ids(self, ids) -> np.ndarray:
        """Positions of the given sample ids."""
        order = np.argsort(self.ids)
        pos = np.searchsorted(self.ids, ids, sorter=order)
        return order[pos]

    def cell_counts(self) -> dict:
        self._require_confounder()
        return {k: int(np.count_nonzero((self.y == k[0]) & (self.c == k[1]))) for k in CELL_KEYS}

    def _require_confounder(self):
        if self.c is None:
            raise DataError("dataset has no binary confounder; bin a covariate first")


def _parse_float(text: str, row: int, col: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"row {row}: non-numeric value {text!r} in column {col!r}") from None
    if not math.isfinite(value):
        raise DataError(f"row {row}: non-finite value {text!r} in column {col!r}")
    return value


def load_csv(
    path,
    label: str,
    confounder: str | None = None,
    *,
    covariates: Sequence[str] = (),
    ignore: Sequence[str] = (),
    label_map: Mapping[str, int] | None = None,
) -> Dataset:
    """Read a CSV with a header row into a :class:`Dataset`.

    Every column that is not the label, the confounder, a covariate or
    ignored is a feature and must be numeric. Label values are mapped to
    -1/+1 in lexicographic order unless ``label_map`` is given; confounder
    values map to alpha/beta the same way. Covariates are numeric columns kept
    aside (not features), typically continuous candidate confounders for
    :func:`bin_continuous`.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)

    for col in [label, *([confounder] if confounder else []), *covariates]:
        if col not in header:
            raise DataError(f"{path}: missing column {col!r}")
    special = {label, confounder, *covariates, *ignore}
    feat_cols = [h for h in header if h not in special]
    if not feat_cols:
        raise DataError(f"{path}: no feature columns")
    idx = {h: i for i, h in enumerate(header)}

    X = np.empty((len(rows), len(feat_cols)))
    labels, conf = [], []
    covs = {k: np.empty(len(rows)) for k in covariates}
    for r, row in enumerate(rows):
        lineno = r + 2  # header is line 1
        if len(row) != len(header):
            raise DataError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
        for j, col in enumerate(feat_cols):
            X[r, j] = _parse_float(row[idx[col]], lineno, col)
        for k in covariates:
            covs[k][r] = _parse_float(row[idx[k]], lineno, k)
        labels.append(row[idx[label]].strip())
        if confounder:
            conf.append(row[idx[confounder]].strip())

    if not rows:
        raise DataError(f"{path}: no data rows")

    label_values = sorted(set(labels))
    if label_map is not None:
        unknown = set(labels) - set(label_map)
        if unknown:
            raise DataError(f"label values {sorted(unknown)} not in label_map")
        y = np.array([label_map[v] for v in labels], dtype=int)
        levels = tuple(sorted(label_map, key=label_map.get))
    else:
        if len(label_values) > 2:
            raise DataError(f"more than two label values: {label_values}")
        if len(label_values) < 2:
            raise DataError(f"label column has a single value {label_values}")
        y = np.where(np.array(labels) == label_values[1], 1, -1)
        levels = tuple(label_values)

    c = None
    conf_levels = ("alpha", "beta")
    if confounder:
        values = sorted(set(conf))
        if len(values) != 2:
            raise DataError(f"confounder {confounder!r} must take exactly two values, got {values}")
        c = np.where(np.array(conf) == values[1], BETA, ALPHA)
        conf_levels = tuple(values)

    return Dataset(X, y, c, np.arange(len(rows)), tuple(feat_cols), conf_levels, levels, covs)


def write_csv(data: Dataset, path, label: str = "label", confounder: str = "confounder") -> None:
    """Write a dataset in the format :func:`load_csv` reads (17 significant digits)."""
    data._require_confounder()
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*data.feature_names, label, confounder])
        for i in range(data.n_samples):
            w.writerow([
                *(format(v, ".17g") for v in data.X[i]),
                int(data.y[i]),
                data.confounder_levels[data.c[i]],
            ])


@dataclass(frozen=True, eq=False)
class CellPartition:
    """Training and held-out pools of sample positions for the four cells."""

    data: Dataset
    cells: Mapping[tuple, np.ndarray]
    heldout: Mapping[tuple, np.ndarray]

    def __post_init__(self):
        for pools in (self.cells, self.heldout):
            for v in pools.values():
                v.setflags(write=False)
        object.__setattr__(self, "cells", MappingProxyType(dict(self.cells)))
        object.__setattr__(self, "heldout", MappingProxyType(dict(self.heldout)))

    @property
    def cell_counts(self) -> dict:
        return {k: len(self.cells[k]) + len(self.heldout[k]) for k in CELL_KEYS}

    def swapped(self) -> "CellPartition":
        """The same partition with alpha and beta exchanged."""
        swap = {(y, c): (y, 1 - c) for (y, c) in CELL_KEYS}
        return CellPartition(
            self.data,
            {swap[k]: v for k, v in self.cells.items()},
            {swap[k]: v for k, v in self.heldout.items()},
        )


def partition_cells(data: Dataset, heldout_fraction: float = 0.2, seed: int = 0) -> CellPartition:
    """Split every (y, c) cell at random into a training and a held-out pool."""
    if not 0.0 < heldout_fraction < 1.0:
        raise ValueError("heldout_fraction must be in (0, 1)")
    data._require_confounder()
    rng = np.random.default_rng(seed)
    cells, heldout = {}, {}
    for key in CELL_KEYS:
        rows = np.flatnonzero((data.y == key[0]) & (data.c == key[1]))
        n_held = int(math.floor(heldout_fraction * len(rows) + 0.5))
        if len(rows) < 2 or n_held == 0 or n_held == len(rows):
            raise DataError(f"insufficient data in cell {cell_name(key)}: {len(rows)} samples")
        rows = rows[rng.permutation(len(rows))]
        heldout[key] = np.sort(rows[:n_held])
        cells[key] = np.sort(rows[n_held:])
    return CellPartition(data, cells, heldout)


@dataclass(frozen=True)
class BinSpec:
    """Two bins of width ``bin_width``: [start, start+l) and [start+d, start+d+l)."""

    bin_width: float
    start: float
    distance: float

    def __post_init__(self):
        if not self.bin_width > 0:
            raise ValueError("bin_width must be positive")
        if self.distance < self.bin_width:
            raise ValueError(f"bins overlap: distance {self.distance} < bin width {self.bin_width}")

    @property
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]:
        lo = (self.start, self.start + self.bin_width)
        hi = (self.start + self.distance, self.start + self.distance + self.bin_width)
        return lo, hi


def bin_continuous(data: Dataset, variable: str, spec: BinSpec) -> Dataset:
    """Keep samples whose ``variable`` falls in one of the two bins; first bin is alpha."""
    if variable not in data.covariates:
        raise DataError(f"unknown covariate {variable!r}; available: {sorted(data.covariates)}")
    v = data.covariates[variable]
    (a0, a1), (b0, b1) = spec.bounds
    in_a = (v >= a0) & (v < a1)
    in_b = (v >= b0) & (v < b1)
    for name, mask, lo, hi in (("alpha", in_a, a0, a1), ("beta", in_b, b0, b1)):
        if not mask.any():
            raise DataError(f"empty {name} bin [{lo:g}, {hi:g}) for {variable!r}: 0 samples")
    rows = np.flatnonzero(in_a | in_b)
    out = data.subset(rows)
    levels = (f"{variable}[{a0:g},{a1:g})", f"{variable}[{b0:g},{b1:g})")
    return Dataset(
        out.X, out.y, np.where(in_b[rows], BETA, ALPHA), out.ids, out.feature_names,
        levels, out.label_levels, out.covariates,
    )
