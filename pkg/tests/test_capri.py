import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from suppesnet.capri import (DIM_MINUS_ONE, ProgressionModel, Regularizer, dimension, exhaustive_best,
                             hill_climb, labeling, log_likelihood, reconstruct, regularized_score)
from suppesnet.dataset import DataError, GenotypeMatrix, consolidate
from suppesnet.patterns import lift
from suppesnet.suppes import PrimaFacieGraph, prima_facie_graph, remove_cycles

from conftest import D6_ROWS, make
import oracles


def _space(m):
    return remove_cycles(prima_facie_graph(lift(m), nboot=0))


def test_empty_model_loglik(d6):
    ll = log_likelihood([(), (), ()], d6)
    assert ll == pytest.approx(oracles.smoothed_loglik(oracles.rows_of(d6.bits), [(), (), ()]), abs=1e-12)
    assert ll == pytest.approx(-10.508050769391584, abs=1e-12)


def test_copy_parent_loglik_vanishes():
    def child_cost(m):
        both = np.array([[1, 1]] * (m // 2) + [[0, 0]] * (m // 2), np.uint8)
        return -(log_likelihood([(), (0,)], both) - log_likelihood([()], both[:, :1])) / m
    costs = [child_cost(m) for m in (10, 100, 10000)]
    assert costs[0] > costs[1] > costs[2] and costs[2] < 1e-3


def test_unobserved_parent_configuration_is_finite():
    bits = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]], np.uint8)
    ll = log_likelihood([(), (), (0, 1)], bits)
    assert math.isfinite(ll)
    assert labeling([(), (), (0, 1)], bits)[2] == 0.0


def test_dimension():
    assert dimension([(), (), ()]) == 3
    assert dimension([(), (0,), (1,)]) == 5
    assert dimension([(0, 1, 2), (), (), ()]) == 8 + 3
    assert dimension([(), (0,)], DIM_MINUS_ONE) == 0 + 1


def test_penalties():
    assert -50 - Regularizer.bic(100).penalty(4) == pytest.approx(-59.2103, abs=1e-4)
    assert -50 - Regularizer.aic().penalty(4) == pytest.approx(-54)
    assert Regularizer.aic().penalty(0) == 0
    with pytest.raises(ValueError):
        Regularizer("x", 0.0)


def test_empty_space(d6):
    space = PrimaFacieGraph(("a", "b", "c"), {}, (True,) * 3)
    model = hill_climb(space, d6, Regularizer.bic(6))
    assert model.edges == set()
    assert model.score == pytest.approx(regularized_score([(), (), ()], d6, Regularizer.bic(6)))


def test_max_iter_zero(d6x50):
    assert hill_climb(_space(d6x50), d6x50, Regularizer.bic(300), max_iter=0).edges == set()


@pytest.mark.parametrize("reg", ["bic", "aic"])
def test_d6x50_chain_is_optimal(d6x50, reg):
    space = _space(d6x50)
    r = Regularizer.named(reg, 300)
    model = hill_climb(space, d6x50, r, seed=3)
    assert {("a", "b"), ("b", "c")} <= model.edge_names()
    best, edges = exhaustive_best(space, d6x50, r)
    assert model.score == pytest.approx(best, abs=1e-9)
    rows = oracles.rows_of(d6x50.bits)
    assert best == pytest.approx(oracles.best_structure(rows, 3, sorted(space.edges), r.theta), abs=1e-9)


def test_reconstruct_d6x50(d6x50):
    models = reconstruct(d6x50, seed=1)
    assert set(models) == {"bic", "aic"}
    for model in models.values():
        assert {("a", "b"), ("b", "c")} <= model.edge_names()


def test_reconstruct_requires_consolidation():
    with pytest.raises(DataError):
        reconstruct(make([[1, 1, 0], [0, 0, 1], [1, 1, 1]]))


def test_reconstruct_deterministic(d6x50):
    a = reconstruct(d6x50, seed=5, nboot=30)
    b = reconstruct(d6x50, seed=5, nboot=30)
    for k in a:
        assert a[k].edges == b[k].edges and a[k].score == b[k].score


def _random_instance(seed):
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(3, 6))
        m = int(rng.integers(20, 80))
        root = rng.random(m) < 0.7
        cols = [root]
        for _ in range(n - 1):
            par = cols[int(rng.integers(len(cols)))]
            cols.append(par & (rng.random(m) < rng.uniform(0.4, 0.9)) | (rng.random(m) < 0.05))
        bits = np.column_stack(cols).astype(np.uint8)
        g = GenotypeMatrix.from_array(bits)
        if consolidate(g).ok:
            space = _space(g)
            if 1 <= len(space.edges) <= 6:
                return g, space


def check_model(model, space, data):
    assert model.is_acyclic()
    for i, j in model.edges:
        assert (i, j) in space.edges
        assert space.is_event[j]
    bits = data.bits
    for j, ps in enumerate(model.parents):
        rows = np.ones(bits.shape[0], bool)
        for p in ps:
            rows &= bits[:, p] == 1
        want = bits[rows, j].mean() if rows.any() else 0.0
        assert model.labeling[j] == pytest.approx(want, abs=1e-12)
        assert 0.0 <= model.labeling[j] <= 1.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["bic", "aic"]))
def test_search_properties(seed, reg):
    data, space = _random_instance(seed)
    r = Regularizer.named(reg, data.n_samples)
    model, trace = hill_climb(space, data, r, seed=seed, restarts=20, return_trace=True)
    check_model(model, space, data)
    assert all(b > a for a, b in zip(trace, trace[1:]))
    rows = oracles.rows_of(data.bits)
    assert model.score == pytest.approx(
        oracles.best_structure(rows, data.n_events, sorted(space.edges), r.theta), abs=1e-9)
    assert model.score == pytest.approx(
        regularized_score([set(p) for p in model.parents], data, r), abs=1e-9)
