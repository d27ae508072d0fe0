from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from confindex.dataset import CELL_KEYS, Dataset
from confindex.permutation import (
    biased_cell_sizes,
    compute_rp_baseline,
    normal_upper_tail,
    restricted_permute,
    rp_base_config,
    rp_sweep,
    standard_permute,
    stratified_split,
)
from confindex.simgen import generate

labels_conf = st.lists(st.tuples(st.sampled_from([-1, 1]), st.sampled_from([0, 1])),
                       min_size=1, max_size=60)


@given(labels_conf, st.integers(0, 1000))
def test_restricted_permutation_keeps_cell_counts(pairs, seed):
    y = np.array([p[0] for p in pairs])
    c = np.array([p[1] for p in pairs])
    out = restricted_permute(y, c, seed)
    for key in CELL_KEYS:
        assert np.count_nonzero((out == key[0]) & (c == key[1])) == \
            np.count_nonzero((y == key[0]) & (c == key[1]))


@given(st.lists(st.integers(), max_size=40), st.integers(0, 1000))
def test_standard_permutation_is_a_permutation(v, seed):
    assert sorted(standard_permute(v, seed).tolist()) == sorted(v)


def test_restricted_permute_shape_mismatch():
    with pytest.raises(ValueError):
        restricted_permute([1, -1], [0])


def test_stratified_split_per_cell():
    d = generate(rp_base_config(cell_sizes=(10, 20, 30, 40), seed=1))
    train, test = stratified_split(d, 0.3, np.random.default_rng(0))
    assert not set(train) & set(test)
    assert len(train) + len(test) == 100
    counts = [np.count_nonzero((d.y[test] == k[0]) & (d.c[test] == k[1])) for k in CELL_KEYS]
    assert counts == [3, 6, 9, 12]


def test_biased_cell_sizes():
    assert biased_cell_sizes(0.5, 200) == (100, 100, 100, 100)
    assert biased_cell_sizes(0.9, 200) == (180, 20, 20, 180)
    with pytest.raises(ValueError):
        biased_cell_sizes(1.2, 10)


def test_normal_upper_tail():
    assert normal_upper_tail(0.0) == 0.5
    assert normal_upper_tail(1.959963984540054) == pytest.approx(0.025, abs=1e-12)


def test_base_config_has_no_confounder_effect():
    cfg = rp_base_config()
    assert cfg.k_alpha == cfg.k_beta
    assert cfg.index_sets["alpha"] == cfg.index_sets["beta"]
    assert cfg.k_plus == -cfg.k_minus


@pytest.fixture(scope="module")
def balanced_run():
    d = generate(replace(rp_base_config(seed=2), cell_sizes=biased_cell_sizes(0.5, 100)))
    return d, compute_rp_baseline(d, n_perms=20, seed=3)


def test_unbiased_data_near_chance(balanced_run):
    _, r = balanced_run
    assert 0.4 < r.rp_mean_auc < 0.6
    assert len(r.rp_aucs) == r.n_permutations == 20
    assert r.rp_mean_auc == pytest.approx(np.mean(r.rp_aucs))
    assert r.null_variance == pytest.approx((r.n_pos + r.n_neg + 1) / (12 * r.n_pos * r.n_neg) / 20)
    assert 0 <= r.p_value <= 1


def test_baseline_deterministic_across_workers(balanced_run):
    d, r = balanced_run
    again = compute_rp_baseline(d, n_perms=20, seed=3, n_jobs=2)
    assert again.rp_aucs == r.rp_aucs


def test_baseline_needs_confounder():
    d = Dataset(np.zeros((4, 1)), [1, -1, 1, -1], None, np.arange(4))
    with pytest.raises(ValueError):
        compute_rp_baseline(d)


def test_heavy_bias_inflates_statistic():
    rows = rp_sweep([0.5, 0.95], n_per_class=100, n_perms=15, seed=4)
    (p0, low), (p1, high) = rows
    assert (p0, p1) == (0.5, 0.95)
    assert high.rp_mean_auc > low.rp_mean_auc + 0.1
    assert high.p_value < 0.05
