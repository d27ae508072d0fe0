"""Synthetic four-cell benchmark data.

Each sample is uniform noise plus a label pattern and a confounder pattern.
A pattern on an index set of length 2h adds +k to its first h positions and
-k to the last h, so it sums to zero. Overlapping sets add up.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .dataset import ALPHA, CELL_KEYS, Dataset

BLOCK = 4
SET_NAMES = ("plus", "minus", "alpha", "beta")

# rows of the overlap table, symbols in (I+, I-, I_alpha, I_beta) order
TABLE2 = (
    "△△◆◆", "△△◆□", "△◆□□", "△◆□★",
    "◆◆◆◆", "◆◆◆□", "◆◆□◆", "◆□◆◆", "□◆◆◆", "◆△◆△", "◆△△◆",
    "◆□◆△", "□◆◆△", "□◆△◆", "◆□△◆",
)

PRESETS = {
    "disjoint": "ABCD",
    "shared-y": "AABC",
    "shared-c": "ABCC",
    "minus-alpha": "ABBC",
    "plus-alpha": "ABAC",
    "minus-beta": "ABCB",
    "plus-beta": "ABCA",
    **{f"t2-{i + 1:02d}": row for i, row in enumerate(TABLE2)},
}


def preset_table2(row) -> dict[str, tuple[int, ...]]:
    """Index sets from a four-symbol pattern; equal symbols share a block.

    Distinct symbols get the 4-index blocks 0-3, 4-7, ... in order of first
    appearance.
    """
    symbols = tuple(row)
    if len(symbols) != 4:
        raise ValueError(f"pattern must have exactly four symbols, got {row!r}")
    blocks = {}
    for s in symbols:
        blocks.setdefault(s, len(blocks))
    return {
        name: tuple(range(blocks[s] * BLOCK, (blocks[s] + 1) * BLOCK))
        for name, s in zip(SET_NAMES, symbols)
    }


PATTERN_SYMBOLS = "ABCD△◆□★"


def resolve_preset(name: str) -> dict[str, tuple[int, ...]]:
    """A named preset or a literal four-symbol pattern over :data:`PATTERN_SYMBOLS`."""
    if name in PRESETS:
        return preset_table2(PRESETS[name])
    if len(name) == 4 and set(name) <= set(PATTERN_SYMBOLS):
        return preset_table2(name)
    raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESETS)} "
                     f"or a four-symbol pattern over {PATTERN_SYMBOLS}")


@dataclass(frozen=True)
class SimConfig:
    """Generator settings. ``cell_sizes`` overrides ``n_per_cell`` per cell,
    in the order (+1,alpha), (+1,beta), (-1,alpha), (-1,beta)."""

    n_features: int = 100
    n_per_cell: int = 200
    noise_lo: float = -10.0
    noise_hi: float = 10.0
    k_plus: float = 0.0
    k_minus: float = 0.0
    k_alpha: float = 0.0
    k_beta: float = 0.0
    index_sets: dict = field(default_factory=lambda: preset_table2("ABCD"))
    seed: int = 0
    cell_sizes: tuple | None = None

    def __post_init__(self):
        sets = {k: tuple(int(i) for i in self.index_sets[k]) for k in SET_NAMES}
        for name, idx in sets.items():
            if len(idx) % 2:
                raise ValueError(f"index set {name} must have even length")
            if any(i < 0 or i >= self.n_features for i in idx):
                raise ValueError(f"index set {name} out of range for {self.n_features} features")
            if len(set(idx)) != len(idx):
                raise ValueError(f"index set {name} repeats an index")
        object.__setattr__(self, "index_sets", sets)
        if not self.noise_lo < self.noise_hi:
            raise ValueError("noise_lo must be below noise_hi")
        if self.cell_sizes is not None:
            sizes = tuple(int(n) for n in self.cell_sizes)
            if len(sizes) != 4 or min(sizes) < 0:
                raise ValueError("cell_sizes needs four non-negative counts")
            object.__setattr__(self, "cell_sizes", sizes)
        elif self.n_per_cell < 1:
            raise ValueError("n_per_cell must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @classmethod
    def single(cls, k_y: float, k_c: float, preset: str = "disjoint", **kw) -> "SimConfig":
        """k_+ = k_- = k_y and k_alpha = k_beta = k_c."""
        return cls(k_plus=k_y, k_minus=k_y, k_alpha=k_c, k_beta=k_c,
                   index_sets=resolve_preset(preset), **kw)

    def sizes(self) -> tuple[int, int, int, int]:
        return self.cell_sizes or (self.n_per_cell,) * 4

    def to_dict(self) -> dict:
        d = asdict(self)
        d["index_sets"] = {k: list(v) for k, v in self.index_sets.items()}
        d["cell_sizes"] = None if self.cell_sizes is None else list(self.cell_sizes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        return cls(**d)


def _pattern(n_features: int, idx, k: float) -> np.ndarray:
    v = np.zeros(n_features)
    h = len(idx) // 2
    v[list(idx[:h])] += k
    v[list(idx[h:])] -= k
    return v


def _noise_block(key: np.ndarray, cell: int, n: int, cfg: SimConfig) -> np.ndarray:
    # counter-based stream per (seed, cell); sample i, feature j sits at stream
    # position i * L + j, independent of how many other samples are drawn
    bitgen = np.random.Philox(key=key, counter=[0, 0, 0, cell])
    u = np.random.Generator(bitgen).random((n, cfg.n_features))
    return cfg.noise_lo + (cfg.noise_hi - cfg.noise_lo) * u


def generate(config: SimConfig) -> Dataset:
    """Draw the four cells in the fixed cell order; ids are sequential."""
    L = config.n_features
    sets = config.index_sets
    k = {"plus": config.k_plus, "minus": config.k_minus,
         "alpha": config.k_alpha, "beta": config.k_beta}
    g = {name: _pattern(L, sets[name], k[name]) for name in SET_NAMES}
    key = np.random.SeedSequence(config.seed).generate_state(2, np.uint64)

    X, y, c = [], [], []
    for cell, ((label, conf), n) in enumerate(zip(CELL_KEYS, config.sizes())):
        shift = g["plus" if label == 1 else "minus"] + g["alpha" if conf == ALPHA else "beta"]
        X.append(_noise_block(key, cell, n, config) + shift)
        y += [label] * n
        c += [conf] * n
    X = np.concatenate(X) if X else np.empty((0, L))
    return Dataset(X, np.array(y), np.array(c, dtype=int), np.arange(len(y)),
                   tuple(f"f{j}" for j in range(L)), ("alpha", "beta"), ("-1", "1"))


def sweep_grid(k_y_values, k_c_values, base: SimConfig | None = None) -> list[SimConfig]:
    """Cartesian grid of single-constant configs (k_+ = k_- = k_y, k_alpha = k_beta = k_c).

    Constants are clipped to the noise half-range, beyond which a pattern is
    trivially visible.
    """
    base = base or SimConfig()
    r = (base.noise_hi - base.noise_lo) / 2.0
    clip = lambda v: float(min(r, max(-r, v)))  # noqa: E731
    return [
        replace(base, k_plus=clip(ky), k_minus=clip(ky), k_alpha=clip(kc), k_beta=clip(kc))
        for ky, kc in itertools.product(k_y_values, k_c_values)
    ]


OVERLAP_CONSTANTS = (-5.0, -1.5, 0.0, 1.5, 5.0)
PAPER_GRID = tuple(x / 2 for x in range(21))  # 0 to 10 in steps of 0.5
