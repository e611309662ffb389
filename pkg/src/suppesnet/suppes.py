"""Temporal priority and probability raising tests over a lifted matrix."""
import math
from collections import Counter
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from . import kernels
from .dataset import DataError, counts

EXACT_LIMIT = 20

# defaults: nboot = 100, pvalue = 0.05, min.boot = 3
NBOOT = 100
PVALUE = 0.05
MIN_BOOT = 3


def _midranks(pooled):
    order = np.argsort(pooled, kind="mergesort")
    ranks = np.empty(len(pooled))
    sorted_vals = pooled[order]
    i = 0
    ties = []
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        ties.append(j - i + 1)
        i = j + 1
    return ranks, ties


def _exact_upper_tail(ranks, n1, observed):
    """P(rank sum of a random n1-subset >= observed), ties kept as midranks."""
    doubled = [int(round(2 * r)) for r in ranks]
    target = int(round(2 * observed))
    top = sum(sorted(doubled)[-n1:])
    # ways[k][s]: number of k-subsets whose doubled rank sum is s
    ways = [np.zeros(top + 1, dtype=np.int64) for _ in range(n1 + 1)]
    ways[0][0] = 1
    for r in doubled:
        for k in range(n1, 0, -1):
            ways[k][r:] += ways[k - 1][:top + 1 - r]
    total = math.comb(len(ranks), n1)
    return int(ways[n1][target:].sum()) / total


def mann_whitney_greater(a, b):
    """One-sided Mann-Whitney p-value for "a is stochastically greater than b".

    Exact permutation distribution (midranks for ties) when the pooled size is
    at most 20, otherwise the normal approximation with tie and continuity
    correction.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise ValueError("empty sample")
    pooled = np.concatenate([a, b])
    ranks, ties = _midranks(pooled)
    rank_sum = ranks[:n1].sum()
    if n1 + n2 <= EXACT_LIMIT:
        return min(1.0, _exact_upper_tail(ranks, n1, rank_sum))
    n = n1 + n2
    u = rank_sum - n1 * (n1 + 1) / 2.0
    tie_term = sum(t ** 3 - t for t in ties) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = (u - n1 * n2 / 2.0 - 0.5) / math.sqrt(var)
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True, eq=False)
class BootstrapDistributions:
    """Accepted resamples: ``marginals[k, i]`` and ``joints[k, i, j]``."""

    marginals: np.ndarray = field(repr=False)
    joints: np.ndarray = field(repr=False)
    attempts: int = 0

    @property
    def k(self):
        return self.marginals.shape[0]

    def conditionals(self, i, j):
        """Per-resample P(j | i) and P(j | not i)."""
        pi = self.marginals[:, i]
        pj = self.marginals[:, j]
        pij = self.joints[:, i, j]
        return pij / pi, (pj - pij) / (1.0 - pi)


def _violations(marg, joint, m):
    """Columns breaking 0 < P < 1 and pairs of indistinguishable columns."""
    bad_cols = np.flatnonzero((marg == 0) | (marg == m))
    same = (joint == marg[:, None]) & (joint == marg[None, :])
    np.fill_diagonal(same, False)
    pairs = np.argwhere(np.triu(same))
    return bad_cols, pairs


def bootstrap_distributions(lifted, k_min=NBOOT, seed=0, max_attempts=None):
    """Resample rows until ``k_min`` resamples satisfy the non-degeneracy rules.

    Resample ``r`` draws its rows from a generator seeded with ``(seed, r)``,
    so the accepted set does not depend on evaluation order.
    """
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    if max_attempts is None:
        max_attempts = max(1000, 100 * k_min)
    bits = np.ascontiguousarray(lifted.bits)
    m = bits.shape[0]
    names = lifted.names if hasattr(lifted, "names") else [str(i) for i in range(bits.shape[1])]
    margs, joints = [], []
    blame = Counter()
    attempt = 0
    while len(margs) < k_min and attempt < max_attempts:
        rng = np.random.default_rng([seed, attempt])
        attempt += 1
        idx = rng.integers(0, m, size=m)
        marg, joint = kernels.resample_counts(bits, idx)
        bad_cols, bad_pairs = _violations(marg, joint, m)
        if len(bad_cols) or len(bad_pairs):
            blame.update(names[c] for c in bad_cols)
            blame.update(f"{names[i]}={names[j]}" for i, j in bad_pairs)
            continue
        margs.append(marg / m)
        joints.append(joint / m)
    if len(margs) < k_min:
        worst = ", ".join(f"{k} ({v}x)" for k, v in blame.most_common(5))
        raise DataError(f"degenerate data: {len(margs)}/{k_min} resamples accepted after "
                        f"{attempt} attempts; offending columns: {worst}")
    return BootstrapDistributions(np.array(margs), np.array(joints), attempt)


@dataclass(frozen=True)
class PfEdge:
    src: int
    dst: int
    gamma: float
    lambda_pr: float
    p_tp: float
    p_pr: float

    @property
    def pvalue(self):
        return max(self.p_tp, self.p_pr)


@dataclass(frozen=True, eq=False)
class PrimaFacieGraph:
    names: tuple
    edges: dict  # (src, dst) -> PfEdge
    is_event: tuple = ()

    @property
    def n_nodes(self):
        return len(self.names)

    def parents(self, j):
        return sorted(i for (i, k) in self.edges if k == j)

    def digraph(self):
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n_nodes))
        g.add_edges_from(self.edges)
        return g

    def is_acyclic(self):
        return nx.is_directed_acyclic_graph(self.digraph())

    def edge_names(self):
        return {(self.names[i], self.names[j]) for i, j in self.edges}


def point_estimates(bits):
    """Marginals P(i) and the matrix lam[i, j] = P(j | i) - P(j | not i)."""
    bits = np.asarray(bits)
    m = bits.shape[0]
    c, jc = counts(bits)
    p = c / m
    with np.errstate(divide="ignore", invalid="ignore"):
        given = jc / c[:, None]
        given_not = (c[None, :] - jc) / (m - c)[:, None]
    return p, given - given_not


def candidate_pairs(lifted):
    """Ordered pairs allowed by the parent function: into events only."""
    cols = lifted.columns
    out = []
    for j, cj in enumerate(cols):
        if cj.event is None:
            continue
        for i, ci in enumerate(cols):
            if i == j:
                continue
            if ci.event is not None or j in ci.targets:
                out.append((i, j))
    return out


def prima_facie_graph(lifted, alpha=PVALUE, dists=None, seed=0, nboot=NBOOT, min_boot=MIN_BOOT):
    """Edges i -> j passing temporal priority and probability raising.

    With ``dists`` (or ``nboot > 0``) both conditions are tested with
    one-sided Mann-Whitney tests on the bootstrapped distributions and must
    hold at level ``alpha``; the point estimates must also be strictly
    positive. ``nboot=0`` and no ``dists`` keeps point estimates only.
    """
    p, lam = point_estimates(lifted.bits)
    if dists is None and nboot:
        dists = bootstrap_distributions(lifted, nboot, seed)
    if dists is not None and dists.k < min_boot:
        raise DataError(f"only {dists.k} bootstrap resamples, need at least {min_boot}")
    edges = {}
    for i, j in candidate_pairs(lifted):
        gamma = p[i] - p[j]
        lpr = lam[i, j]
        if not (gamma > 0 and lpr > 0):
            continue
        if dists is not None:
            p_tp = mann_whitney_greater(dists.marginals[:, i], dists.marginals[:, j])
            if not p_tp < alpha:
                continue
            given, given_not = dists.conditionals(i, j)
            p_pr = mann_whitney_greater(given, given_not)
            if not p_pr < alpha:
                continue
        else:
            p_tp = p_pr = 0.0
        edges[(i, j)] = PfEdge(i, j, float(gamma), float(lpr), float(p_tp), float(p_pr))
    return PrimaFacieGraph(tuple(lifted.names), edges, tuple(c.event is not None for c in lifted.columns))


def remove_cycles(g):
    """Break directed cycles by dropping the least confident cycle edges.

    Only edges inside a strongly connected component can lie on a cycle.
    Among those, the one with the largest p-value (max of the two tests) goes
    first; ties fall to the smaller probability raising, then to name order.
    """
    edges = dict(g.edges)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(g.n_nodes))
    dg.add_edges_from(edges)
    names = g.names
    while True:
        comps = [c for c in nx.strongly_connected_components(dg) if len(c) > 1]
        if not comps:
            break
        cand = [e for c in comps for e in dg.subgraph(c).edges]
        worst = min(cand, key=lambda e: (-edges[e].pvalue, edges[e].lambda_pr, names[e[0]], names[e[1]]))
        dg.remove_edge(*worst)
        del edges[worst]
    return PrimaFacieGraph(g.names, edges, g.is_event)
