"""Regularised likelihood fit inside the prima facie search space."""
import itertools
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from . import kernels
from .dataset import require_consolidated
from .patterns import lift
from .suppes import (MIN_BOOT, NBOOT, PVALUE, bootstrap_distributions, prima_facie_graph,
                     remove_cycles)

# parameters per node: one per parent configuration, or one fewer
DIM_FULL = "full"
DIM_MINUS_ONE = "minus_one"

MAX_ITER = 100_000
RESTARTS = 10
_EPS = 1e-10


@dataclass(frozen=True)
class Regularizer:
    """Penalty ``theta / 2 * dim``: BIC uses theta = ln m, AIC theta = 2."""

    name: str
    theta: float

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("regularizer weight must be positive")

    @classmethod
    def bic(cls, m):
        return cls("bic", math.log(m))

    @classmethod
    def aic(cls):
        return cls("aic", 2.0)

    @classmethod
    def named(cls, name, m):
        name = name.lower()
        if name == "bic":
            return cls.bic(m)
        if name == "aic":
            return cls.aic()
        raise ValueError(f"unknown regularizer {name!r}")

    def penalty(self, dim):
        return self.theta / 2.0 * dim


@dataclass(frozen=True, eq=False)
class ProgressionModel:
    names: tuple
    parents: tuple  # per node, sorted tuple of parent indices
    labeling: tuple
    regularizer: str = ""
    score: float = float("nan")
    is_event: tuple = ()
    space: object = field(default=None, repr=False)

    @property
    def n_nodes(self):
        return len(self.names)

    @property
    def edges(self):
        return {(i, j) for j, ps in enumerate(self.parents) for i in ps}

    def edge_names(self):
        return {(self.names[i], self.names[j]) for i, j in self.edges}

    def digraph(self):
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n_nodes))
        g.add_edges_from(self.edges)
        return g

    def is_acyclic(self):
        return nx.is_directed_acyclic_graph(self.digraph())


def _as_data(data):
    bits = data.bits if hasattr(data, "bits") else data
    return np.ascontiguousarray(bits, dtype=np.uint8)


def family_loglik(bits, child, parents):
    """Add-one smoothed log-likelihood of one node given its parent set."""
    ps = np.asarray(sorted(parents), dtype=np.int64)
    c = kernels.family_counts(bits, int(child), ps)
    n = c.sum(axis=1, keepdims=True)
    return float((c * np.log((c + 1.0) / (n + 2.0))).sum())


def node_dimension(k, convention=DIM_FULL):
    if convention == DIM_FULL:
        return 2 ** k
    if convention == DIM_MINUS_ONE:
        return 2 ** k - 1
    raise ValueError(f"unknown dimension convention {convention!r}")


def log_likelihood(parents, data):
    """Sum of per-node smoothed log-likelihoods; ``parents`` is a model or a list of parent sets."""
    ps = parents.parents if isinstance(parents, ProgressionModel) else parents
    bits = _as_data(data)
    if len(ps) != bits.shape[1]:
        raise ValueError("model nodes do not match data columns")
    return sum(family_loglik(bits, j, p) for j, p in enumerate(ps))


def dimension(parents, convention=DIM_FULL):
    ps = parents.parents if isinstance(parents, ProgressionModel) else parents
    return sum(node_dimension(len(p), convention) for p in ps)


def regularized_score(parents, data, reg, convention=DIM_FULL):
    return log_likelihood(parents, data) - reg.penalty(dimension(parents, convention))


def labeling(parents, data):
    """P(j) without parents, P(j | all parents) otherwise (0 if never observed)."""
    bits = _as_data(data)
    out = []
    for j, ps in enumerate(parents):
        rows = np.ones(bits.shape[0], dtype=bool)
        for p in ps:
            rows &= bits[:, p] == 1
        tot = int(rows.sum())
        out.append(float(bits[rows, j].sum()) / tot if tot else 0.0)
    return tuple(out)


class _Scorer:
    def __init__(self, bits, reg, convention):
        self.bits = bits
        self.reg = reg
        self.convention = convention
        self.cache = {}

    def family(self, j, ps):
        key = (j, ps)
        v = self.cache.get(key)
        if v is None:
            v = family_loglik(self.bits, j, ps) - self.reg.penalty(node_dimension(len(ps), self.convention))
            self.cache[key] = v
        return v

    def total(self, parents):
        return sum(self.family(j, frozenset(p)) for j, p in enumerate(parents))


def _reaches(children, src, dst):
    """True when dst is reachable from src along current edges."""
    stack, seen = [src], {src}
    while stack:
        v = stack.pop()
        if v == dst:
            return True
        for w in children[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def _climb(scorer, n, moves, rng, max_iter):
    parents = [set() for _ in range(n)]
    children = [set() for _ in range(n)]
    fam = [scorer.family(j, frozenset()) for j in range(n)]
    trace = [sum(fam)]
    it = 0
    while it < max_iter:
        improved = False
        for k in rng.permutation(len(moves)):
            if it >= max_iter:
                break
            it += 1
            i, j = moves[k]
            if i in parents[j]:
                new = frozenset(parents[j] - {i})
            else:
                if _reaches(children, j, i):
                    continue
                new = frozenset(parents[j] | {i})
            cand = scorer.family(j, new)
            if cand - fam[j] > _EPS:
                if i in parents[j]:
                    parents[j].discard(i)
                    children[i].discard(j)
                else:
                    parents[j].add(i)
                    children[i].add(j)
                fam[j] = cand
                trace.append(sum(fam))
                improved = True
                break
        if not improved:
            break
    return parents, sum(fam), trace


def hill_climb(space, data, reg, max_iter=MAX_ITER, seed=0, restarts=RESTARTS,
               convention=DIM_FULL, return_trace=False, acyclic_space=True):
    """Greedy single-edge search over the edges of an acyclic prima facie graph.

    Every restart starts from the empty graph and proposes additions or
    removals in a random order drawn from its own generator; a proposal is
    accepted only on strict score improvement. A restart ends after a full
    pass without improvement or ``max_iter`` proposals. The best restart
    wins; ties keep the earliest. With ``acyclic_space=False`` the space may
    hold cycles and additions closing one are skipped.
    """
    if acyclic_space and not space.is_acyclic():
        raise ValueError("search space has cycles")
    bits = _as_data(data)
    n = bits.shape[1]
    if n != space.n_nodes:
        raise ValueError("space nodes do not match data columns")
    scorer = _Scorer(bits, reg, convention)
    moves = sorted(space.edges)
    best = None
    for r in range(max(1, restarts)):
        rng = np.random.default_rng([*np.atleast_1d(seed).tolist(), r])
        parents, score, trace = _climb(scorer, n, moves, rng, max_iter)
        if best is None or score > best[1] + _EPS:
            best = (parents, score, trace)
    parents, score, trace = best
    ps = tuple(tuple(sorted(p)) for p in parents)
    model = ProgressionModel(tuple(space.names), ps, labeling(ps, bits), reg.name, float(score),
                             tuple(space.is_event), space)
    return (model, trace) if return_trace else model


def exhaustive_best(space, data, reg, convention=DIM_FULL):
    """Brute-force maximum over every acyclic subset of the space's edges."""
    bits = _as_data(data)
    n = bits.shape[1]
    scorer = _Scorer(bits, reg, convention)
    edges = sorted(space.edges)
    best = (-math.inf, ())
    for mask in itertools.product((0, 1), repeat=len(edges)):
        chosen = [e for e, b in zip(edges, mask) if b]
        g = nx.DiGraph(chosen)
        if chosen and not nx.is_directed_acyclic_graph(g):
            continue
        parents = [set() for _ in range(n)]
        for i, j in chosen:
            parents[j].add(i)
        s = scorer.total(parents)
        if s > best[0] + _EPS:
            best = (s, tuple(chosen))
    return best


def reconstruct(m, hyps=(), alpha=PVALUE, nboot=NBOOT, regularizers=("bic", "aic"), seed=0,
                restarts=RESTARTS, max_iter=MAX_ITER, convention=DIM_FULL, min_boot=MIN_BOOT):
    """Lift, test prima facie conditions, break cycles, then fit per regularizer."""
    require_consolidated(m)
    lifted = lift(m, hyps)
    dists = bootstrap_distributions(lifted, nboot, seed) if nboot else None
    pf = prima_facie_graph(lifted, alpha, dists=dists, nboot=0, min_boot=min_boot)
    space = remove_cycles(pf)
    out = {}
    for k, name in enumerate(regularizers):
        reg = Regularizer.named(name, m.n_samples)
        out[reg.name] = hill_climb(space, lifted, reg, max_iter, seed=[seed, 1, k],
                                   restarts=restarts, convention=convention)
    return out
