"""Canonical JSON and CSV writers for reports and plot-ready curves.

JSON output has sorted keys and Python's shortest round-trip float repr, and
CSV floats carry 17 significant digits, so identical results always produce
identical bytes.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path

import numpy as np

CURVE_COLUMNS = ("b", "mean_auc_pro", "stderr_pro", "mean_auc_cons", "stderr_cons")
RP_COLUMNS = ("P", "rp_mean_auc", "p_value")


def to_jsonable(obj):
    """Convert numpy values, enums, tuples and arbitrary objects to plain JSON types.

    Non-finite floats become None; unknown objects fall back to ``repr``.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return to_jsonable(obj.value)
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, np.bool_):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, dict):
        return {str(to_jsonable(k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return repr(obj)


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _fmt(v) -> str:
    return format(float(v), ".17g")


def curve_rows(result) -> list[tuple[float, float, float, float, float]]:
    """Rows of :data:`CURVE_COLUMNS` for a :class:`~confindex.engine.PhiResult`."""
    pro, cons = result.pro_curve, result.cons_curve
    return list(zip(pro.b, pro.mean_auc, pro.stderr, cons.mean_auc, cons.stderr))


def write_curves(result, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        for row in curve_rows(result):
            w.writerow([_fmt(v) for v in row])


def read_curves(path) -> dict[str, np.ndarray]:
    """Read a curve CSV; any column that is present must be numeric and finite.

    ``b`` is required together with at least one ``mean_auc*`` column.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"malformed curve CSV {path}: empty file") from None
        rows = [r for r in reader if r]
    if "b" not in header or not any(h.startswith("mean_auc") for h in header):
        raise ValueError(f"malformed curve CSV {path}: needs a 'b' and a 'mean_auc' column")
    if len(set(header)) != len(header):
        raise ValueError(f"malformed curve CSV {path}: duplicate column")
    cols = {h: [] for h in header}
    for n, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise ValueError(f"malformed curve CSV {path}: line {n} has {len(row)} fields, "
                             f"expected {len(header)}")
        for h, text in zip(header, row):
            try:
                v = float(text)
            except ValueError:
                raise ValueError(f"malformed curve CSV {path}: line {n}, column {h}: "
                                 f"{text!r} is not a number") from None
            if not math.isfinite(v):
                raise ValueError(f"malformed curve CSV {path}: line {n}, column {h}: non-finite")
            cols[h].append(v)
    if len(rows) < 2:
        raise ValueError(f"malformed curve CSV {path}: needs at least two rows")
    return {h: np.asarray(v) for h, v in cols.items()}


def write_rp_sweep(rows, path) -> None:
    """``rows`` are (P, PermutationResult) pairs as returned by ``rp_sweep``."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RP_COLUMNS)
        for P, res in rows:
            w.writerow([_fmt(P), _fmt(res.rp_mean_auc), _fmt(res.p_value)])
