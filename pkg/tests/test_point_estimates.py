"""Point-estimate equivalences checked on 1000 random matrices."""
import numpy as np
import pytest

from suppesnet.caprese import shrinkage_scores
from suppesnet.dataset import GenotypeMatrix
from suppesnet.suppes import point_estimates

TOL = 1e-12


def _matrices(count=1000, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        m, n = rng.integers(5, 60), rng.integers(2, 6)
        bits = (rng.random((m, n)) < rng.uniform(0.1, 0.9, n)).astype(np.uint8)
        c = bits.sum(axis=0)
        if ((c == 0) | (c == m)).any():
            continue
        out.append(bits)
    return out


MATS = _matrices()


def _sign(x):
    return 0 if abs(x) <= TOL else (1 if x > 0 else -1)


def _pairs(n):
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def test_dependence_iff_raising():
    for bits in MATS:
        m = bits.shape[0]
        c = bits.sum(axis=0).astype(int)
        jc = bits.T.astype(int) @ bits.astype(int)
        _, lam = point_estimates(bits)
        for i, j in _pairs(bits.shape[1]):
            excess = int(jc[i, j]) * m - int(c[i]) * int(c[j])
            assert _sign(lam[i, j]) == np.sign(excess)


def test_mutuality():
    for bits in MATS:
        _, lam = point_estimates(bits)
        for i, j in _pairs(bits.shape[1]):
            assert _sign(lam[i, j]) == _sign(lam[j, i])


def test_natural_ordering():
    for bits in MATS:
        m = bits.shape[0]
        c = bits.sum(axis=0).astype(int)
        jc = bits.T.astype(int) @ bits.astype(int)
        p, lam = point_estimates(bits)
        for a, b in _pairs(bits.shape[1]):
            if not (lam[a, b] > TOL and p[a] > p[b]):
                continue
            # P(b|a)/P(b|not a) and P(a|b)/P(a|not b) with nonzero denominators
            if c[b] == jc[a, b] or c[a] == jc[a, b]:
                continue
            r_ab = (jc[a, b] / c[a]) / ((c[b] - jc[a, b]) / (m - c[a]))
            r_ba = (jc[a, b] / c[b]) / ((c[a] - jc[a, b]) / (m - c[b]))
            assert r_ab > r_ba


def test_monotonic_normalisation():
    for bits in MATS:
        s = shrinkage_scores(GenotypeMatrix.from_array(bits))
        p = bits.mean(axis=0)
        for a, b in _pairs(bits.shape[1]):
            if not s.alpha_raw[a, b] > TOL or p[a] == p[b]:
                continue
            assert (p[a] > p[b]) == (s.alpha_raw[a, b] > s.alpha_raw[b, a])


def test_beta_coherent_with_alpha():
    for bits in MATS:
        m = bits.shape[0]
        c = bits.sum(axis=0).astype(int)
        jc = bits.T.astype(int) @ bits.astype(int)
        s = shrinkage_scores(GenotypeMatrix.from_array(bits))
        for a, b in _pairs(bits.shape[1]):
            dep = np.sign(int(jc[a, b]) * m - int(c[a]) * int(c[b]))
            assert _sign(s.alpha_raw[a, b]) == dep
            assert _sign(s.beta[a, b]) == dep
            assert s.beta[a, b] == pytest.approx(s.beta[b, a], abs=TOL)
