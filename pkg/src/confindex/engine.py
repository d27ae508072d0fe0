"""Phi / Phi* estimation and the Confounding Index decision.

For each bias b on the schedule a classifier is trained on a biased training
set and scored on two validation pairs: the "pro" pair, biased the same way as
training, and the "cons" pair, biased the opposite way. Both AUC curves start
from the unbiased anchor AUC at b = 0. Phi is the area between them,
normalised so that the largest value reachable on the grid is 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, clone
from sklearn.utils.validation import check_X_y

from .classifier import as_estimator, decision_scores
from .dataset import CELL_KEYS, CellPartition, DataError, Dataset, partition_cells
from .metrics import auc
from .monotonicity import Direction, default_delta, is_delta_monotone
from .sampler import (
    BiasSchedule,
    Orientation,
    make_biased_training,
    make_validation,
    resample_plan,
    training_sizes,
)

class Scenario(str, enum.Enum):
    BOTH_MONOTONE = "BOTH_MONOTONE"
    ONLY_PHI = "ONLY_PHI"
    ONLY_PHI_STAR = "ONLY_PHI_STAR"
    UNDEFINED = "UNDEFINED"


UNDEFINED_MESSAGE = (
    "neither Phi nor Phi* satisfies the monotonicity conditions; the confounding "
    "index is undefined. Probably the data have not been correctly matched for "
    "one or more other confounding variables."
)


@dataclass(frozen=True, eq=False)
class AucCurve:
    b: np.ndarray
    mean_auc: np.ndarray
    stderr: np.ndarray
    repeats: np.ndarray

    def __post_init__(self):
        arrs = [np.asarray(v, dtype=float) for v in (self.b, self.mean_auc, self.stderr)]
        reps = np.asarray(self.repeats, dtype=int)
        if len({a.shape for a in arrs} | {reps.shape}) != 1 or arrs[0].ndim != 1:
            raise ValueError("curve columns must be 1-D and of equal length")
        b, mean, se = arrs
        if b.size and (b[0] != 0 or np.any(np.diff(b) <= 0)):
            raise ValueError("curve biases must start at 0 and strictly increase")
        if np.any((mean < 0) | (mean > 1)) or np.any(se < 0):
            raise ValueError("mean AUC must lie in [0, 1] and stderr be non-negative")
        for name, v in zip(("b", "mean_auc", "stderr", "repeats"), (b, mean, se, reps)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def points(self) -> list[tuple[float, float, float, int]]:
        return [(float(b), float(m), float(s), int(r))
                for b, m, s, r in zip(self.b, self.mean_auc, self.stderr, self.repeats)]

    def __len__(self) -> int:
        return self.b.size


def trapezoid_weights(b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.size < 2:
        raise ValueError("at least two points are needed to integrate")
    h = np.diff(b)
    w = np.zeros_like(b)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def trapezoid_area(curve: AucCurve) -> float:
    """Composite trapezoid integral of the mean AUC over [0, b_max]."""
    return float(trapezoid_weights(curve.b) @ curve.mean_auc)


@dataclass(frozen=True, eq=False)
class PhiResult:
    orientation: Orientation
    phi: float
    phi_raw: float
    phi_pro: float
    phi_cons: float
    pro_curve: AucCurve
    cons_curve: AucCurve
    pro_monotone_increasing: bool
    cons_monotone_decreasing: bool
    stderr: float
    correction_factor: float
    delta_pro: float
    delta_cons: float
    schedule: BiasSchedule
    balance_n: int
    partial_coverage: bool = False

    @property
    def monotone(self) -> bool:
        return self.pro_monotone_increasing and self.cons_monotone_decreasing

    def to_dict(self) -> dict:
        return {
            "orientation": self.orientation.value,
            "phi": self.phi,
            "phi_raw": self.phi_raw,
            "phi_pro": self.phi_pro,
            "phi_cons": self.phi_cons,
            "stderr": self.stderr,
            "correction_factor": self.correction_factor,
            "pro_monotone_increasing": self.pro_monotone_increasing,
            "cons_monotone_decreasing": self.cons_monotone_decreasing,
            "delta_pro": self.delta_pro,
            "delta_cons": self.delta_cons,
            "balance_n": self.balance_n,
            "partial_coverage": self.partial_coverage,
            "pro_curve": [list(p) for p in self.pro_curve.points],
            "cons_curve": [list(p) for p in self.cons_curve.points],
        }


@dataclass(frozen=True, eq=False)
class CiReport:
    ci: float | None
    ci_raw: float | None
    scenario: Scenario
    phi: PhiResult
    phi_star: PhiResult
    ci_stderr: float
    message: str = ""
    config: dict = field(default_factory=dict)

    @property
    def defined(self) -> bool:
        return self.scenario is not Scenario.UNDEFINED

    @property
    def root_seed(self) -> int:
        return self.phi.schedule.root_seed

    def to_dict(self) -> dict:
        sched = self.phi.schedule
        return {
            "ci": self.ci,
            "ci_raw": self.ci_raw,
            "ci_stderr": self.ci_stderr,
            "scenario": self.scenario.value,
            "message": self.message,
            "root_seed": sched.root_seed,
            "schedule": {
                **sched.to_dict(),
                "biases": sched.biases,
                "b_max": sched.b_max,
                "partial_coverage": sched.partial_coverage,
                "b0_repeats": sched.repeats_M,
            },
            "phi": self.phi.to_dict(),
            "phi_star": self.phi_star.to_dict(),
            "config": self.config,
        }


def _run_job(data: Dataset, partition: CellPartition, estimator, N: int, job, orient,
             balance_n: int):
    rng = np.random.default_rng(job.seed)
    try:
        train = make_biased_training(partition, N, job.b, orient, rng)
        val = make_validation(partition, balance_n, rng, orient)
    except DataError as exc:
        raise DataError(f"job (b={job.b:g}, m={job.m}): {exc}") from exc
    est = clone(estimator).fit(data.X[train], data.y[train])
    keys = list(CELL_KEYS)
    rows = np.concatenate([val[k] for k in keys])
    s = decision_scores(est, data.X[rows])
    by_cell = dict(zip(keys, np.split(s, len(keys))))
    if job.a == 0:
        pos = np.concatenate([by_cell[k] for k in keys if k[0] == 1])
        neg = np.concatenate([by_cell[k] for k in keys if k[0] == -1])
        a0 = auc(pos, neg).value
        return a0, a0
    pp, pn = orient.pro_pair()
    cp, cn = orient.cons_pair()
    return auc(by_cell[pp], by_cell[pn]).value, auc(by_cell[cp], by_cell[cn]).value


def _check_feasible(partition: CellPartition, schedule: BiasSchedule, orient, balance_n):
    N = schedule.cell_size_N
    sizes = training_sizes(N, schedule.b_max, orient)
    for key, need in sizes.items():
        if len(partition.cells[key]) < need:
            raise DataError(
                f"training pool {key} has {len(partition.cells[key])} samples but the "
                f"schedule needs {need} at b={schedule.b_max:g}"
            )
    for key in CELL_KEYS:
        if len(partition.heldout[key]) < balance_n:
            raise DataError(f"held-out pool {key} smaller than balance_n={balance_n}")


def default_balance_n(partition: CellPartition) -> int:
    """Half of the smallest held-out pool, so validation draws vary across repeats."""
    return max(1, min(len(v) for v in partition.heldout.values()) // 2)


def default_cell_size(partition: CellPartition) -> int:
    """Largest N for which b = 1 is feasible: half the smallest training pool."""
    return min(len(v) for v in partition.cells.values()) // 2


def compute_phi(partition: CellPartition, clf=None, schedule: BiasSchedule | None = None,
                orient: Orientation = Orientation.PHI, *, balance_n: int | None = None,
                delta: float | None = None, n_jobs: int = 1,
                stream: Orientation | None = None) -> PhiResult:
    """Run every (bias, repeat) job for one orientation and integrate the curves.

    Parameters
    ----------
    partition : CellPartition
    clf : ClassifierConfig, scikit-learn classifier or None
        None trains :class:`LogisticGD` with default settings.
    schedule : BiasSchedule
    orient : Orientation
    balance_n : int, optional
        Per-cell validation size; see :func:`default_balance_n`.
    delta : float, optional
        Monotonicity scale for both curves. By default each curve uses three times
        its largest per-bias standard error, floored at 0.01.
    n_jobs : int
        Worker processes for the job grid. Results do not depend on it.
    stream : Orientation, optional
        Orientation whose seed stream is used (defaults to ``orient``).
    """
    orient = Orientation(orient)
    estimator = as_estimator(clf)
    if schedule is None:
        schedule = BiasSchedule.from_step(default_cell_size(partition), 0.2)
    if len(schedule.grid) < 2:
        raise ValueError("schedule must contain at least one non-zero bias")
    balance_n = balance_n or default_balance_n(partition)
    _check_feasible(partition, schedule, orient, balance_n)

    jobs = resample_plan(schedule, orient, stream)
    N = schedule.cell_size_N
    data = partition.data
    results = Parallel(n_jobs=n_jobs)(
        delayed(_run_job)(data, partition, estimator, N, job, orient, balance_n) for job in jobs
    )
    table = {(job.a, job.m): r for job, r in zip(jobs, results)}

    M = schedule.repeats_M
    grid = schedule.grid
    pro = np.array([[table[a, m][0] for m in range(M)] for a in grid])
    cons = np.array([[table[a, m][1] for m in range(M)] for a in grid])
    b = np.array(grid, dtype=float) / N

    def stderr(v):
        return v.std(axis=1, ddof=1) / math.sqrt(M) if M > 1 else np.zeros(len(v))

    reps = np.full(len(grid), M)
    pro_curve = AucCurve(b, pro.mean(axis=1), stderr(pro), reps)
    cons_curve = AucCurve(b, cons.mean(axis=1), stderr(cons), reps)

    w = trapezoid_weights(b)
    norm = schedule.normaliser
    area_pro = float(w @ pro_curve.mean_auc)
    area_cons = float(w @ cons_curve.mean_auc)
    anchor = float(pro_curve.mean_auc[0])
    phi_raw = (area_pro - area_cons) / norm
    phi_pro = (area_pro - anchor * b[-1]) / norm
    phi_cons = (anchor * b[-1] - area_cons) / norm

    # pro and cons AUCs of one job share a model and are anti-correlated, so the
    # error is taken from the paired per-job differences; at b = 0 they vanish
    diff_se = stderr(pro - cons)
    phi_se = math.sqrt(float(np.sum(w**2 * diff_se**2))) / norm

    d_pro = delta if delta is not None else default_delta(pro_curve.stderr)
    d_cons = delta if delta is not None else default_delta(cons_curve.stderr)
    pro_ok = is_delta_monotone(pro_curve.mean_auc, d_pro, Direction.INCREASING)
    cons_ok = is_delta_monotone(cons_curve.mean_auc, d_cons, Direction.DECREASING)

    return PhiResult(
        orientation=orient,
        phi=min(1.0, max(-1.0, phi_raw)),
        phi_raw=phi_raw,
        phi_pro=phi_pro,
        phi_cons=phi_cons,
        pro_curve=pro_curve,
        cons_curve=cons_curve,
        pro_monotone_increasing=pro_ok,
        cons_monotone_decreasing=cons_ok,
        stderr=phi_se,
        correction_factor=1.0 / norm,
        delta_pro=d_pro,
        delta_cons=d_cons,
        schedule=schedule,
        balance_n=balance_n,
        partial_coverage=schedule.partial_coverage,
    )


def compute_ci(phi: PhiResult, phi_star: PhiResult, config: dict | None = None) -> CiReport:
    """Pick the index from Phi and Phi* according to which pass monotonicity."""
    if phi.schedule != phi_star.schedule or phi.balance_n != phi_star.balance_n:
        raise ValueError("Phi and Phi* were computed on different schedules")
    if phi.orientation is not Orientation.PHI or phi_star.orientation is not Orientation.PHI_STAR:
        raise ValueError("expected (PHI, PHI_STAR) results in that order")

    passing = [r for r in (phi, phi_star) if r.monotone]
    if len(passing) == 2:
        scenario = Scenario.BOTH_MONOTONE
    elif passing:
        scenario = Scenario.ONLY_PHI if passing[0] is phi else Scenario.ONLY_PHI_STAR
    else:
        return CiReport(None, None, Scenario.UNDEFINED, phi, phi_star, 0.0,
                        UNDEFINED_MESSAGE, dict(config or {}))

    chosen = max(passing, key=lambda r: r.phi)
    ci = min(1.0, max(0.0, chosen.phi))
    return CiReport(ci, chosen.phi_raw, scenario, phi, phi_star, chosen.stderr,
                    "", dict(config or {}))


def confounding_index(partition: CellPartition, clf=None, schedule: BiasSchedule | None = None,
                      *, balance_n: int | None = None, delta: float | None = None,
                      n_jobs: int = 1, config: dict | None = None) -> CiReport:
    """Phi, Phi* and the resulting index for one partition."""
    if schedule is None:
        schedule = BiasSchedule.from_step(default_cell_size(partition), 0.2)
    balance_n = balance_n or default_balance_n(partition)
    kw = dict(balance_n=balance_n, delta=delta, n_jobs=n_jobs)
    phi = compute_phi(partition, clf, schedule, Orientation.PHI, **kw)
    phi_star = compute_phi(partition, clf, schedule, Orientation.PHI_STAR, **kw)
    return compute_ci(phi, phi_star, config)


class ConfoundingIndex(BaseEstimator):
    """Estimate how strongly a binary variable can confound a classifier.

    ``fit(X, y, confounder)`` partitions the data into the four
    (label, confounder) cells, trains ``estimator`` on increasingly biased
    training sets in both orientations and stores the resulting report.

    Parameters
    ----------
    estimator : classifier, default=None
        Any scikit-learn binary classifier; None means :class:`LogisticGD`.
    cell_size : int, default=None
        Per-cell training size N at b = 0. Defaults to half of the smallest
        training pool so that b = 1 is reachable.
    step : float, default=0.2
        Bias increment; converted to the integer step round(step * N).
    repeats : int, default=10
    heldout_fraction : float, default=0.2
    balance_n : int, default=None
    delta : float, default=None
    n_jobs : int, default=1
    random_state : int, default=0

    Attributes
    ----------
    report_ : CiReport
    ci_ : float or None
        None when neither orientation passes the monotonicity checks.
    scenario_ : Scenario
    phi_, phi_star_ : PhiResult
    """

    def __init__(self, estimator=None, cell_size=None, step=0.2, repeats=10,
                 heldout_fraction=0.2, balance_n=None, delta=None, n_jobs=1,
                 random_state=0):
        self.estimator = estimator
        self.cell_size = cell_size
        self.step = step
        self.repeats = repeats
        self.heldout_fraction = heldout_fraction
        self.balance_n = balance_n
        self.delta = delta
        self.n_jobs = n_jobs
        self.random_state = random_state

    def fit(self, X, y, confounder):
        X, y = check_X_y(X, y)
        confounder = np.asarray(confounder)
        if confounder.shape != y.shape:
            raise ValueError("confounder must have one value per sample")
        labels = np.unique(y)
        levels = np.unique(confounder)
        if labels.size != 2 or levels.size != 2:
            raise ValueError("y and confounder must both be binary")
        data = Dataset(
            X, np.where(y == labels[1], 1, -1), np.where(confounder == levels[1], 1, 0),
            np.arange(len(y)), confounder_levels=(str(levels[0]), str(levels[1])),
            label_levels=(str(labels[0]), str(labels[1])),
        )
        seed = int(self.random_state or 0)
        partition = partition_cells(data, self.heldout_fraction, seed)
        return self.fit_partition(partition)

    def fit_partition(self, partition: CellPartition):
        seed = int(self.random_state or 0)
        N = self.cell_size or default_cell_size(partition)
        schedule = BiasSchedule.from_step(N, self.step, self.repeats, seed)
        self.report_ = confounding_index(
            partition, self.estimator, schedule, balance_n=self.balance_n,
            delta=self.delta, n_jobs=self.n_jobs, config=self.get_params(deep=False),
        )
        self.ci_ = self.report_.ci
        self.scenario_ = self.report_.scenario
        self.phi_ = self.report_.phi
        self.phi_star_ = self.report_.phi_star
        self.schedule_ = schedule
        return self
