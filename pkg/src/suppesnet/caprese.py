"""Tree reconstruction with the shrinkage-like estimator."""
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .dataset import DataError, consolidate, counts

ROOT = -1
ROOT_NAME = "*"

LAMBDA_DEFAULT = 0.5
LAMBDA_SMALL = 0.01


@dataclass(frozen=True, eq=False)
class ShrinkageScores:
    lam: float
    alpha_raw: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    m_score: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class TreeModel:
    """A rooted forest over events; ``parent[j] == ROOT`` hangs j off the root."""

    labels: tuple
    parent: tuple
    score: tuple = ()

    def __post_init__(self):
        n = len(self.labels)
        if len(self.parent) != n:
            raise ValueError("parent vector length mismatch")
        for j, p in enumerate(self.parent):
            if p != ROOT and not 0 <= p < n or p == j:
                raise ValueError(f"bad parent for {self.labels[j]}")
        for j in range(n):
            seen = set()
            k = j
            while k != ROOT:
                if k in seen:
                    raise ValueError("parent function has a cycle")
                seen.add(k)
                k = self.parent[k]

    @property
    def edges(self):
        return {(p, j) for j, p in enumerate(self.parent)}

    def edge_names(self, with_root=True):
        out = set()
        for j, p in enumerate(self.parent):
            if p == ROOT:
                if with_root:
                    out.add((ROOT_NAME, self.labels[j]))
            else:
                out.add((self.labels[p], self.labels[j]))
        return out

    def children(self, v):
        return [j for j, p in enumerate(self.parent) if p == v]

    def depth(self):
        def d(j):
            return 1 if self.parent[j] == ROOT else 1 + d(self.parent[j])
        return max((d(j) for j in range(len(self.labels))), default=0)


def _probabilities(bits):
    bits = np.asarray(bits)
    m = bits.shape[0]
    c, jc = counts(bits)
    return c / m, jc / m


def shrinkage_scores(m, lam=LAMBDA_DEFAULT, allow_degenerate=False):
    """Pairwise raw estimator, correction factor and their blend.

    ``alpha_raw[i, j]`` is the normalised probability raising of i on j,
    ``beta[i, j]`` the normalised co-occurrence excess, ``m_score`` the
    blend ``(1 - lam) * alpha + lam * beta``. Undefined entries are NaN.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    p, pj = _probabilities(m.bits)
    degenerate = (p <= 0) | (p >= 1)
    if degenerate.any() and not allow_degenerate:
        bad = ", ".join(m.labels[i] for i in np.flatnonzero(degenerate))
        raise DataError(f"degenerate marginal for {bad}")
    with np.errstate(divide="ignore", invalid="ignore"):
        # rows index the cause i, columns the effect j
        given = pj / p[:, None]
        given_not = (p[None, :] - pj) / (1.0 - p)[:, None]
        alpha = (given - given_not) / (given + given_not)
        prod = np.outer(p, p)
        beta = (pj - prod) / (pj + prod)
    bad = degenerate[:, None] | degenerate[None, :]
    alpha[bad] = np.nan
    beta[bad] = np.nan
    np.fill_diagonal(alpha, np.nan)
    np.fill_diagonal(beta, np.nan)
    score = (1.0 - lam) * alpha + lam * beta
    return ShrinkageScores(lam, alpha, beta, score)


def desper_weight(m, a, b):
    """Oncotree edge weight log[P(a)/(P(a)+P(b)) * P(a,b)/(P(a)P(b))]."""
    ia, ib = m.index(a), m.index(b)
    n = m.n_samples
    ca = int(m.bits[:, ia].sum())
    cb = int(m.bits[:, ib].sum())
    cab = int((m.bits[:, ia] & m.bits[:, ib]).sum())
    if ca == 0 or cb == 0:
        raise DataError("desper weight needs P(a), P(b) > 0")
    if cab == 0:
        return -math.inf
    pa, pb, pab = ca / n, cb / n, cab / n
    return math.log(pa / (pa + pb) * pab / (pa * pb))


def _root_filter(j, p, pj):
    """True when every more frequent event looks independent of j."""
    thr = 1.0 / (1.0 + p[j])
    for x in range(len(p)):
        if x == j or not p[x] > p[j]:
            continue
        w = p[x] / (p[x] + p[j]) * pj[x, j] / (p[x] * p[j])
        if not thr > w:
            return False
    return True


def reconstruct_tree(m, lam=LAMBDA_DEFAULT, method="argmax", allow_degenerate=False):
    """Reconstruct a progression tree (or forest hanging off the root).

    Each event takes as parent its best scoring candidate cause: positive
    score, higher than the reverse direction, ties broken by the larger
    correction factor and then the smaller index. The parent is then
    replaced by the root when the independent-progression test fires.

    ``method="edmonds"`` selects parents with a maximum weight branching over
    the same candidate arcs instead of per-node argmax. ``allow_degenerate``
    hangs events with probability 0 or 1 from the root instead of raising.
    """
    if method not in ("argmax", "edmonds"):
        raise ValueError(f"unknown method {method!r}")
    rep = consolidate(m)
    if not allow_degenerate and not rep.ok:
        if rep.degenerate:
            raise DataError("matrix not consolidated: degenerate events "
                            + ", ".join(m.labels[i] for i, _ in rep.degenerate))
        raise DataError("matrix not consolidated: indistinguishable events "
                        + "; ".join(",".join(m.labels[i] for i in g) for g in rep.duplicates))
    s = shrinkage_scores(m, lam, allow_degenerate=True)
    sc, beta = s.m_score, s.beta
    n = m.n_events
    p, pj = _probabilities(m.bits)

    cand = np.zeros((n, n), dtype=bool)
    with np.errstate(invalid="ignore"):
        cand = (sc > 0) & (sc > sc.T)
    parent = [ROOT] * n
    if method == "argmax":
        for j in range(n):
            best = None
            for i in np.flatnonzero(cand[:, j]):
                key = (sc[i, j], beta[i, j], -i)
                if best is None or key > best[0]:
                    best = (key, int(i))
            if best is not None:
                parent[j] = best[1]
    else:
        g = nx.DiGraph()
        g.add_nodes_from(range(n))
        for i, j in zip(*np.nonzero(cand)):
            g.add_edge(int(i), int(j), weight=float(sc[i, j]))
        for i, j in nx.maximum_branching(g, attr="weight").edges:
            parent[j] = i

    for j in range(n):
        if parent[j] != ROOT and _root_filter(j, p, pj):
            parent[j] = ROOT
    score = tuple(None if parent[j] == ROOT else float(sc[parent[j], j]) for j in range(n))
    return TreeModel(tuple(m.labels), tuple(parent), score)
