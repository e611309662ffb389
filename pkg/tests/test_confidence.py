import math

import numpy as np
import pytest

from suppesnet.caprese import ROOT, TreeModel
from suppesnet.capri import reconstruct
from suppesnet.confidence import (caprese_algo, capri_algo, derive_seed, ground_truth_from_tree,
                                  hypergeometric_overlap, nonparametric_bootstrap, parametric_bootstrap,
                                  statistical_bootstrap)
from suppesnet.dataset import DataError, GenotypeMatrix
from suppesnet.synthgen import GroundTruth, flip_noise, sample_dataset

from conftest import make
import oracles


def test_nonparametric_d6x50(d6x50):
    rep = nonparametric_bootstrap(d6x50, caprese_algo(0.5), 100, seed=0)["caprese"]
    assert rep.edge_freq[("a", "b")] >= 0.9
    assert all(0 <= f <= 1 for f in rep.edge_freq.values())
    assert rep.model_freq <= min(rep.edge_freq[e] for e in rep.reference)


def test_nboot_zero(d6x50):
    with pytest.raises(ValueError):
        nonparametric_bootstrap(d6x50, caprese_algo(), 0)
    with pytest.raises(ValueError):
        statistical_bootstrap(d6x50, {}, 0)


def test_nonparametric_deterministic(d6x50):
    a = nonparametric_bootstrap(d6x50, capri_algo(nboot=20), 5, seed=3)
    b = nonparametric_bootstrap(d6x50, capri_algo(nboot=20), 5, seed=3)
    assert {k: v.to_json() for k, v in a.items()} == {k: v.to_json() for k, v in b.items()}


def test_statistical_strong_signal(d6x50):
    reps = statistical_bootstrap(d6x50, {"nboot": 30}, 5, seed=1)
    for rep in reps.values():
        assert all(rep.edge_freq[e] == 1.0 for e in rep.reference)
        assert rep.model_freq == 1.0


def test_statistical_single_iteration_matches_reconstruct(d6x50):
    rep = statistical_bootstrap(d6x50, {"nboot": 20}, 1, seed=9)
    direct = reconstruct(d6x50, nboot=20, seed=derive_seed(9, 0))
    for k, model in direct.items():
        assert {e for e, c in rep[k].counts.items() if c} == model.edge_names()


def test_statistical_borderline():
    # a is three rows more frequent than b: the temporal-priority test is borderline
    m = 200
    a = np.zeros(m, np.uint8)
    b = np.zeros(m, np.uint8)
    a[:63] = 1
    b[30:90] = 1
    g = GenotypeMatrix.from_array(np.column_stack([a, b]), ["a", "b"])
    f = statistical_bootstrap(g, {"nboot": 30, "regularizers": ("bic",)}, 20, seed=0)["bic"]
    assert 0 < f.edge_freq[("a", "b")] < 1


def test_parametric_noise_free_chain():
    chain = GroundTruth(("a", "b", "c"), ((), (0,), (1,)), (0.8, 0.7, 0.6))
    rep = parametric_bootstrap(chain, 5000, 0.0, 0.0, caprese_algo(0.5), 10, seed=0)["caprese"]
    assert rep.model_freq == 1.0
    assert all(f == 1.0 for f in rep.edge_freq.values())


def test_parametric_rejects_bad_eps():
    chain = GroundTruth(("a", "b"), ((), (0,)), (0.8, 0.7))
    with pytest.raises(DataError):
        parametric_bootstrap(chain, 100, 0.5, 0.5, caprese_algo(), 2)


def test_flip_noise_marginals():
    gt = GroundTruth(("a", "b"), ((), (0,)), (0.4, 0.5))
    m = 100_000
    clean = sample_dataset(gt, m, seed=1)
    ep, em = 0.05, 0.1
    noisy = flip_noise(clean, ep, em, seed=2).bits.mean(axis=0)
    for p, obs in zip(clean.bits.mean(axis=0), noisy):
        want = p * (1 - em) + (1 - p) * ep
        assert abs(obs - want) <= 4 * math.sqrt(want * (1 - want) / m)


def test_ground_truth_from_tree(d6):
    tree = TreeModel(("a", "b", "c"), (ROOT, 0, 1))
    gt = ground_truth_from_tree(tree, d6)
    assert gt.prob == pytest.approx((4 / 6, 0.5, 0.5))


def test_hypergeometric():
    same = make([[1, 1], [1, 1], [0, 0], [0, 0], [0, 0], [0, 0]])
    assert hypergeometric_overlap(same, 0, 1) == pytest.approx(1 / math.comb(6, 2))
    disjoint = make([[1, 0], [0, 1], [0, 0], [1, 0]])
    assert hypergeometric_overlap(disjoint, 0, 1) == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    for _ in range(50):
        bits = (rng.random((12, 2)) < 0.5).astype(np.uint8)
        c = bits.sum(axis=0)
        if (c == 0).any() or (c == 12).any():
            continue
        k = int((bits[:, 0] & bits[:, 1]).sum())
        want = oracles.hypergeom_upper(12, int(c[1]), int(c[0]), k)
        assert hypergeometric_overlap(GenotypeMatrix.from_array(bits), 0, 1) == pytest.approx(want, abs=1e-12)
    with pytest.raises(DataError):
        hypergeometric_overlap(make([[1, 1], [1, 0]]), 0, 1)
