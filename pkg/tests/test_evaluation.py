import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from suppesnet.caprese import ROOT, TreeModel
from suppesnet.dataset import DataError
from suppesnet.evaluation import EvalReport, confusion, evaluate, hamming, precision_recall, tree_edit_distance

import oracles

N = ("a", "b", "c")


def g(*edges):
    return set(N), set(edges)


def test_hamming_examples():
    assert hamming(g(("a", "b")), g(("a", "b"))) == 0
    assert hamming(g(("a", "b")), g(("a", "b"), ("b", "c"))) == 1
    assert hamming(g(("a", "b")), g(("b", "a"))) == 2
    with pytest.raises(DataError):
        hamming(g(), ({"x"}, set()))


def test_precision_recall():
    truth = g(("a", "b"), ("b", "c"), ("a", "c"), ("c", "a"), ("b", "a"))
    inferred = g(("a", "b"), ("b", "c"), ("a", "c"), ("c", "b"))
    assert confusion(inferred, truth) == (3, 1, 2)
    assert precision_recall(inferred, truth) == (0.75, 0.6)
    assert precision_recall(truth, truth) == (1.0, 1.0)
    assert precision_recall(g(), truth)[1] == 0.0


def T(labels, parent):
    return TreeModel(tuple(labels), tuple(parent))


def test_ted_examples():
    chain = T("ab", (ROOT, 0))
    assert tree_edit_distance(chain, chain) == 0
    assert tree_edit_distance(chain, T("ab", (1, ROOT))) == 2
    # relabelling one leaf
    t1 = T("abc", (ROOT, 0, 0))
    t2 = TreeModel(("a", "b", "d"), (ROOT, 0, 0))
    assert tree_edit_distance(t1, t2) == 1
    assert oracles.ted(oracles.to_nested("ab", (ROOT, 0)), oracles.to_nested("ab", (1, ROOT))) == 2


def test_ted_child_order_irrelevant():
    t1 = T("abc", (ROOT, 0, 0))
    t2 = TreeModel(("a", "c", "b"), (ROOT, 0, 0))
    assert tree_edit_distance(t1, t2) == 0


def test_report():
    t = T("abc", (ROOT, 0, 1))
    rep = evaluate(t, t)
    assert rep.ted == 0 and rep.hamming == 0 and rep.precision == 1.0
    assert rep.to_csv().splitlines()[0] == ",".join(EvalReport.FIELDS)
    assert evaluate(g(("a", "b")), g(("a", "b"))).ted is None


def random_parent(n, draw):
    return tuple(ROOT if j == 0 else draw(st.integers(-1, j - 1)) for j in range(n))


@st.composite
def trees(draw, n=5):
    perm = draw(st.permutations(list("abcde")[:n]))
    return TreeModel(tuple(perm), random_parent(n, draw))


@settings(max_examples=200, deadline=None)
@given(trees(), trees())
def test_ted_matches_oracle(a, b):
    d = tree_edit_distance(a, b)
    assert d == tree_edit_distance(b, a)
    assert d == oracles.ted(oracles.to_nested(a.labels, a.parent), oracles.to_nested(b.labels, b.parent))


edge_sets = st.sets(st.tuples(st.sampled_from(N), st.sampled_from(N)).filter(lambda e: e[0] != e[1]))


@settings(max_examples=300, deadline=None)
@given(edge_sets, edge_sets, edge_sets)
def test_hamming_metric(x, y, z):
    a, b, c = g(*x), g(*y), g(*z)
    assert hamming(a, a) == 0
    assert hamming(a, b) == hamming(b, a)
    assert (hamming(a, b) == 0) == (x == y)
    assert hamming(a, c) <= hamming(a, b) + hamming(b, c)
    assert hamming(a, b) <= len(N) * (len(N) - 1)
    tp, fp, fn = confusion(a, b)
    p, r = precision_recall(a, b)
    assert hamming(a, b) == fp + fn
    assert 0 <= p <= 1 and 0 <= r <= 1
    if tp + fp:
        assert p == tp / (tp + fp)
    if tp + fn:
        assert r == tp / (tp + fn)
