import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from suppesnet.caprese import ROOT, TreeModel, desper_weight, reconstruct_tree, shrinkage_scores
from suppesnet.dataset import DataError, GenotypeMatrix, consolidate
from suppesnet.evaluation import tree_edit_distance
from suppesnet.synthgen import TopologySpec, random_tree, sample_dataset

from conftest import make
import oracles


def test_d6_pair_scores(d6):
    s = shrinkage_scores(d6, 0.5)
    assert s.alpha_raw[0, 1] == pytest.approx(1.0)
    assert s.beta[0, 1] == pytest.approx(0.2)
    assert s.m_score[0, 1] == pytest.approx(0.6)
    assert np.isnan(s.m_score[0, 0])


def test_lambda_zero_is_alpha(d6):
    s = shrinkage_scores(d6, 0.0)
    ok = ~np.isnan(s.alpha_raw)
    assert np.array_equal(s.m_score[ok], s.alpha_raw[ok])


def test_independent_pair_scores():
    m = make([[1, 1], [1, 0], [0, 1], [0, 0]])
    s = shrinkage_scores(m, 0.5)
    assert s.alpha_raw[0, 1] == s.beta[0, 1] == s.m_score[0, 1] == 0.0


def test_degenerate_marginal_rejected():
    with pytest.raises(DataError):
        shrinkage_scores(make([[1, 0], [1, 1]]))


def test_desper_weight(d6):
    half = make([[1, 1], [0, 0]])
    assert desper_weight(half, 0, 1) == pytest.approx(0.0)
    assert desper_weight(d6, "a", "b") == pytest.approx(0.0, abs=1e-12)
    assert desper_weight(make([[1, 0], [0, 1]]), 0, 1) == -math.inf


@pytest.mark.parametrize("method", ["argmax", "edmonds"])
def test_d6_tree(d6, method):
    t = reconstruct_tree(d6, 0.5, method=method)
    assert t.parent == (ROOT, 0, 1)
    assert t.score[1] == pytest.approx(0.6) and t.score[2] == pytest.approx(0.75)
    assert t.edge_names() == {("*", "a"), ("a", "b"), ("b", "c")}


def test_single_event():
    t = reconstruct_tree(make([[1], [0]], ["a"]))
    assert t.parent == (ROOT,) and t.edge_names() == {("*", "a")}


def test_unconsolidated_rejected():
    with pytest.raises(DataError):
        reconstruct_tree(make([[1, 1], [0, 0]]))


def test_known_tree_recovered():
    gt = random_tree(TopologySpec(10, "tree", seed=0))
    d = sample_dataset(gt, 5000, seed=0)
    assert tree_edit_distance(reconstruct_tree(d, 0.01), gt.to_tree()) == 0


def test_tree_model_validation():
    with pytest.raises(ValueError):
        TreeModel(("a", "b"), (1, 0))
    with pytest.raises(ValueError):
        TreeModel(("a",), (0,))
    with pytest.raises(ValueError):
        TreeModel(("a", "b"), (ROOT,))


def _consolidated(bits):
    m = GenotypeMatrix.from_array(bits)
    return m if consolidate(m).ok else None


grids = arrays(np.uint8, st.tuples(st.integers(4, 30), st.integers(2, 6)), elements=st.integers(0, 1))


def check_tree(t, m):
    n = len(t.labels)
    assert len(t.parent) == n
    for j in range(n):  # every event reaches the root without repeats
        seen, k = set(), j
        while k != ROOT:
            assert k not in seen
            seen.add(k)
            k = t.parent[k]
    p = m.bits.mean(axis=0)
    for j, q in enumerate(t.parent):
        if q != ROOT:
            assert p[q] > p[j]


@settings(max_examples=200, deadline=None)
@given(grids, st.floats(0, 1), st.sampled_from(["argmax", "edmonds"]))
def test_tree_invariants(bits, lam, method):
    m = _consolidated(bits)
    if m is None:
        return
    check_tree(reconstruct_tree(m, lam, method=method), m)


@settings(max_examples=200, deadline=None)
@given(grids, st.floats(0, 1))
def test_scores_against_oracle(bits, lam):
    m = _consolidated(bits)
    if m is None:
        return
    s = shrinkage_scores(m, lam)
    half = shrinkage_scores(m, 0.5)
    rows = oracles.rows_of(bits)
    n = m.n_events
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            sc, a, b = oracles.shrinkage(rows, i, j, lam)
            assert s.alpha_raw[i, j] == pytest.approx(float(a), abs=1e-12)
            assert s.beta[i, j] == pytest.approx(float(b), abs=1e-12)
            assert s.m_score[i, j] == pytest.approx(float(sc), abs=1e-12)
            assert s.beta[i, j] == s.beta[j, i]
            assert half.m_score[i, j] == pytest.approx((s.alpha_raw[i, j] + s.beta[i, j]) / 2, abs=1e-15)
            if a != 0 and b != 0:
                assert np.sign(s.alpha_raw[i, j]) == np.sign(s.beta[i, j])
