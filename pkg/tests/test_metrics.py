import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.metrics import roc_auc_score

from confindex.metrics import auc, auc_null_variance, auc_pairwise

scores = st.lists(st.integers(-5, 5).map(float), min_size=1, max_size=30)


def test_perfect_separation():
    assert auc([0.9, 0.8], [0.1, 0.2]).value == 1.0
    assert auc([0.1, 0.2], [0.9, 0.8]).value == 0.0


def test_all_tied_is_half():
    est = auc([0.5] * 4, [0.5] * 3)
    assert est.value == 0.5
    assert (est.n_pos, est.n_neg) == (4, 3)


def test_partial_ties_by_hand():
    # pairs: (3>1) (3>2) (2>1) (2=2) -> 3.5 / 4
    assert auc([3.0, 2.0], [1.0, 2.0]).value == pytest.approx(0.875, abs=1e-15)


@pytest.mark.parametrize("pos, neg", [([], [1.0]), ([1.0], [])])
def test_one_class_rejected(pos, neg):
    with pytest.raises(ValueError, match="one-class validation set"):
        auc(pos, neg)


def test_non_finite_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        auc([np.nan, 1.0], [0.0])


@given(scores, scores)
def test_matches_pairwise_oracle(pos, neg):
    assert abs(auc(pos, neg).value - auc_pairwise(pos, neg)) <= 1e-12


@given(scores, scores)
def test_matches_sklearn(pos, neg):
    y = np.r_[np.ones(len(pos)), np.zeros(len(neg))]
    assert auc(pos, neg).value == pytest.approx(roc_auc_score(y, pos + neg), abs=1e-12)


@given(scores, scores)
def test_swapping_classes_complements(pos, neg):
    assert auc(pos, neg).value + auc(neg, pos).value == pytest.approx(1.0, abs=1e-12)


@given(scores, scores)
def test_invariant_under_monotone_transform(pos, neg):
    f = lambda v: np.exp(np.asarray(v) / 3.0) * 7 - 2  # noqa: E731
    assert auc(f(pos), f(neg)).value == pytest.approx(auc(pos, neg).value, abs=1e-12)


def test_null_variance_matches_simulation():
    rng = np.random.default_rng(0)
    vals = [auc(rng.random(15), rng.random(25)).value for _ in range(20000)]
    assert np.var(vals) == pytest.approx(auc_null_variance(15, 25), rel=0.05)
    assert auc_null_variance(15, 25) == pytest.approx(41 / (12 * 15 * 25))


def test_null_variance_rejects_empty():
    with pytest.raises(ValueError):
        auc_null_variance(0, 3)


def test_large_input_uses_no_quadratic_memory():
    rng = np.random.default_rng(1)
    v = auc(rng.normal(1, 1, 200_000), rng.normal(0, 1, 200_000)).value
    expected = 0.5 * math.erfc(-1 / 2)  # Phi(1/sqrt 2)
    assert v == pytest.approx(expected, abs=0.005)
