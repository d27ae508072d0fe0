import numpy as np
import pytest
from hypothesis import settings

from confindex.dataset import partition_cells
from confindex.simgen import SimConfig, generate

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_data():
    """Strong confounder, weak label signal; 60 samples per cell, 20 features."""
    cfg = SimConfig.single(1.5, 8.0, "disjoint", n_features=20, n_per_cell=60, seed=11)
    return generate(cfg)


@pytest.fixture(scope="session")
def small_partition(small_data):
    return partition_cells(small_data, 0.25, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
