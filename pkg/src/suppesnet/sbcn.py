"""Causal networks over decision records and random-walk discrimination scores."""
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .capri import RESTARTS, MAX_ITER, Regularizer, hill_climb
from .dataset import DataError, EventMeta, GenotypeMatrix, require_consolidated
from .suppes import PfEdge, PrimaFacieGraph, point_estimates

N_WALKS = 10_000
DAMPING = 0.85
PPR_TOL = 1e-12
MAX_MOVES = 10 ** 6

# Berkeley 1973 admissions: dept -> (male admitted, male denied, female admitted, female denied)
BERKELEY = {
    "A": (512, 313, 89, 19),
    "B": (313, 207, 17, 8),
    "C": (120, 205, 202, 391),
    "D": (138, 279, 131, 244),
    "E": (53, 138, 94, 299),
    "F": (22, 351, 24, 317),
}
BERKELEY_ORDER = {"sex": 0, "Dep": 1, "Admission": 2}


def berkeley_records():
    """Expand the admissions table into one record per applicant."""
    out = []
    for dept, (ma, md, fa, fd) in BERKELEY.items():
        for sex, adm, n in (("Male", "Yes", ma), ("Male", "No", md),
                            ("Female", "Yes", fa), ("Female", "No", fd)):
            out.extend({"sex": sex, "Dep": dept, "Admission": adm} for _ in range(n))
    return out


def read_table(text):
    """Categorical CSV with a header row; returns (attributes, records)."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if len(rows) < 2:
        raise DataError("empty table")
    header = [h.strip() for h in rows[0]]
    recs = []
    for k, r in enumerate(rows[1:], start=1):
        if len(r) != len(header):
            raise DataError(f"ragged row {k}")
        recs.append({h: v.strip() for h, v in zip(header, r)})
    return header, recs


def binarize(records, order, attributes=None):
    """One 0/1 column per observed ``attribute=value`` pair.

    Returns the matrix and the level of every event column, inherited from
    its attribute.
    """
    records = list(records)
    if not records:
        raise DataError("empty table")
    attrs = list(attributes) if attributes is not None else list(records[0])
    for a in attrs:
        if a not in order:
            raise DataError(f"attribute {a!r} has no temporal level")
    values = {a: set() for a in attrs}
    for k, rec in enumerate(records):
        for a in attrs:
            v = rec.get(a)
            if v is None or v == "":
                raise DataError(f"record {k} is missing attribute {a!r}")
            values[a].add(str(v))
    events, levels = [], []
    for a in attrs:
        for v in sorted(values[a]):
            events.append((a, v))
            levels.append(int(order[a]))
    col = {e: i for i, e in enumerate(events)}
    bits = np.zeros((len(records), len(events)), dtype=np.uint8)
    for r, rec in enumerate(records):
        for a in attrs:
            bits[r, col[(a, str(rec[a]))]] = 1
    metas = tuple(EventMeta(f"{a}={v}") for a, v in events)
    m = GenotypeMatrix(tuple(f"r{r + 1}" for r in range(len(records))), metas, bits)
    return m, tuple(levels)


@dataclass(frozen=True, eq=False)
class Sbcn:
    names: tuple
    weights: dict  # (v, u) -> W
    levels: tuple
    neg: int
    pos: int
    score: float = float("nan")
    _csr: tuple = field(default=None, repr=False)

    @property
    def n_nodes(self):
        return len(self.names)

    @property
    def edges(self):
        return set(self.weights)

    def edge_names(self):
        return {(self.names[v], self.names[u]) for v, u in self.weights}

    def index(self, node):
        if isinstance(node, (int, np.integer)):
            return int(node)
        try:
            return self.names.index(node)
        except ValueError:
            raise DataError(f"unknown node {node!r}") from None

    def csr(self):
        """Adjacency with cumulative transition probabilities per source."""
        if self._csr is None:
            n = self.n_nodes
            out = [[] for _ in range(n)]
            for (v, u), w in sorted(self.weights.items()):
                out[v].append((u, w))
            ptr = np.zeros(n + 1, dtype=np.int64)
            nbr, cum = [], []
            for v in range(n):
                tot = sum(w for _, w in out[v])
                acc = 0.0
                for u, w in out[v]:
                    acc += w / tot
                    nbr.append(u)
                    cum.append(acc)
                ptr[v + 1] = len(nbr)
            object.__setattr__(self, "_csr", (ptr, np.asarray(nbr, dtype=np.int64),
                                              np.asarray(cum, dtype=np.float64)))
        return self._csr

    def reachable(self, v):
        ptr, nbr, _ = self.csr()
        seen, stack = {v}, [v]
        while stack:
            x = stack.pop()
            for u in nbr[ptr[x]:ptr[x + 1]]:
                if u not in seen:
                    seen.add(int(u))
                    stack.append(int(u))
        return seen

    def to_dict(self):
        return {
            "nodes": [{"id": i, "label": n, "level": self.levels[i]} for i, n in enumerate(self.names)],
            "edges": [{"from": self.names[v], "to": self.names[u], "weight": w}
                      for (v, u), w in sorted(self.weights.items())],
            "decision_neg": self.names[self.neg],
            "decision_pos": self.names[self.pos],
            "score": self.score,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def suppes_space(m, levels):
    """Pairs v -> u with r(v) <= r(u) and P(u|v) > P(u|not v), point estimates only."""
    p, lam = point_estimates(m.bits)
    edges = {}
    n = m.n_events
    for v in range(n):
        for u in range(n):
            if u != v and levels[v] <= levels[u] and lam[v, u] > 0:
                edges[(v, u)] = PfEdge(v, u, float(p[v] - p[u]), float(lam[v, u]), 0.0, 0.0)
    return PrimaFacieGraph(tuple(m.labels), edges, (True,) * n)


def learn_sbcn(m, levels, neg, pos, regularizer="bic", max_iter=MAX_ITER, restarts=RESTARTS, seed=0):
    """Temporal/probability-raising filter followed by a penalised DAG fit."""
    if neg is None or pos is None:
        raise DataError("both decision nodes must be designated")
    require_consolidated(m)
    if len(levels) != m.n_events:
        raise DataError("one temporal level per event required")
    ineg, ipos = m.index(neg), m.index(pos)
    if ineg == ipos:
        raise DataError("decision nodes must differ")
    space = suppes_space(m, levels)
    reg = Regularizer.named(regularizer, m.n_samples)
    model = hill_climb(space, m, reg, max_iter=max_iter, seed=seed, restarts=restarts,
                       acyclic_space=False)
    weights = {(v, u): space.edges[(v, u)].lambda_pr for v, u in sorted(model.edges)}
    return Sbcn(tuple(m.labels), weights, tuple(levels), ineg, ipos, model.score)


@dataclass(frozen=True)
class WalkScores:
    ds_neg: float
    ds_pos: float
    as_neg: float
    as_pos: float
    n_walks: int
    fed: float = None

    def to_dict(self):
        def clean(x):
            return None if x is None or (isinstance(x, float) and math.isnan(x)) else x
        return {k: clean(getattr(self, k)) for k in ("ds_neg", "ds_pos", "as_neg", "as_pos", "n_walks", "fed")}


def _walks(s, v, via_nodes, n_walks, seed, max_moves):
    if n_walks < 1:
        raise ValueError("n_walks must be >= 1")
    v = s.index(v)
    if v in (s.neg, s.pos):
        raise DataError("walks must start away from the decision nodes")
    reach = s.reachable(v)
    if s.neg not in reach and s.pos not in reach:
        raise DataError("disconnected group: no decision node reachable")
    ptr, nbr, cum = s.csr()
    via = np.zeros(s.n_nodes, dtype=np.bool_)
    for u in via_nodes:
        via[s.index(u)] = True
    outcome, steps, hit = kernels.run_walks(ptr, nbr, cum, v, s.neg, s.pos, via, int(n_walks),
                                            int(seed), int(max_moves))
    if (outcome == kernels.WALK_CAPPED).any():
        raise DataError(f"walk exceeded {max_moves} moves")
    return outcome, steps, hit


def group_discrimination(s, v, n_walks=N_WALKS, seed=0, max_moves=MAX_MOVES):
    outcome, steps, _ = _walks(s, v, (), n_walks, seed, max_moves)
    neg = outcome == kernels.WALK_NEG
    pos = ~neg
    ds = float(neg.mean())
    as_neg = float(steps[neg].mean()) if neg.any() else float("nan")
    as_pos = float(steps[pos].mean()) if pos.any() else float("nan")
    return WalkScores(ds, 1.0 - ds, as_neg, as_pos, int(n_walks))


def explainable_fraction(s, v, via, n_walks=N_WALKS, seed=0, max_moves=MAX_MOVES):
    """Share of walks reaching the negative decision that passed through ``via``.

    ``via`` is a node or a collection of nodes, treated jointly.
    """
    nodes = [via] if isinstance(via, (str, int, np.integer)) else list(via)
    if s.index(v) in {s.index(u) for u in nodes}:
        raise DataError("mediator must differ from the source node")
    outcome, _, hit = _walks(s, v, nodes, n_walks, seed, max_moves)
    neg = outcome == kernels.WALK_NEG
    if not neg.any():
        raise DataError("no walk reached the negative decision")
    return float(hit[neg].mean())


def personalized_pagerank(s, seeds, damping=DAMPING, tol=PPR_TOL, max_iter=100_000):
    """Stationary vector of weight-proportional moves with restarts to ``seeds``.

    Mass on nodes without out-edges returns to the restart vector.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    idx = sorted({s.index(u) for u in seeds})
    if not idx:
        raise ValueError("seed set must be nonempty")
    n = s.n_nodes
    e = np.zeros(n)
    e[idx] = 1.0 / len(idx)
    ptr, nbr, cum = s.csr()
    src = np.repeat(np.arange(n), np.diff(ptr))
    # per-edge transition probability from the cumulative rows
    prob = np.empty(len(nbr))
    for v in range(n):
        seg = cum[ptr[v]:ptr[v + 1]]
        prob[ptr[v]:ptr[v + 1]] = np.diff(np.concatenate([[0.0], seg]))
    dangling = np.diff(ptr) == 0
    x = e.copy()
    for _ in range(max_iter):
        moved = np.bincount(nbr, weights=x[src] * prob, minlength=n)
        nxt = (1.0 - damping) * e + damping * (moved + x[dangling].sum() * e)
        nxt /= nxt.sum()
        if np.abs(nxt - x).sum() < tol:
            return nxt
        x = nxt
    return x


def generalized_score(s, seeds, damping=DAMPING):
    r = personalized_pagerank(s, seeds, damping)
    tot = r[s.neg] + r[s.pos]
    if tot <= 0:
        raise DataError("neither decision node carries PageRank mass")
    return float(r[s.neg] / tot)
