"""Random ground-truth topologies, sampling from them, and uniform noise."""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .caprese import ROOT, TreeModel
from .dataset import DataError, GenotypeMatrix

KINDS = ("tree", "forest", "connected_dag", "disconnected_dag")


@dataclass(frozen=True)
class TopologySpec:
    n_events: int
    kind: str = "tree"
    max_parents: int = 1
    p_min: float = 0.05
    p_max: float = 0.95
    components: int = 1
    disjunctive: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"unknown topology kind {self.kind!r}")
        if self.n_events < 1:
            raise DataError("need at least one event")
        if not 0.0 <= self.p_min <= self.p_max <= 1.0:
            raise DataError("need 0 <= p_min <= p_max <= 1")
        if self.max_parents < 1:
            raise DataError("max_parents must be >= 1")
        if self.kind in ("tree", "forest") and self.max_parents != 1:
            raise DataError("trees have exactly one parent per event")
        if self.components < 1 or self.components > self.n_events:
            raise DataError("component count must lie in [1, n_events]")
        if self.kind in ("tree", "connected_dag") and self.components != 1:
            raise DataError("connected topologies have one component")
        if self.disjunctive and self.max_parents > 3:
            raise DataError("disjunctions have at most 3 atoms")


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """A generative model over named events.

    ``parents[j]`` is empty for roots. ``prob[j]`` is the probability that j
    fires once its parents allow it: the edge probability for trees (roots
    hang off the implicit root with their own probability) and the per-node
    draw ``y`` for DAGs. ``alpha[j]`` is the labeling, the product of ``prob``
    along the parents for DAGs.
    """

    names: tuple
    parents: tuple
    prob: tuple
    kind: str = "tree"
    disjunctive: bool = False
    levels: tuple = field(default=(), repr=False)

    @property
    def n_events(self):
        return len(self.names)

    @property
    def alpha(self):
        return tuple(self._alpha_of(j) for j in range(self.n_events))

    def _alpha_of(self, j):
        a = self.prob[j]
        for p in self.parents[j]:
            a *= self._alpha_of(p)
        return a

    def order(self):
        """Topological order (parents first)."""
        if self.levels:
            return sorted(range(self.n_events), key=lambda j: (self.levels[j], j))
        seen, out = set(), []

        def visit(j):
            if j in seen:
                return
            seen.add(j)
            for p in self.parents[j]:
                visit(p)
            out.append(j)
        for j in range(self.n_events):
            visit(j)
        return out

    @property
    def edges(self):
        return {(p, j) for j, ps in enumerate(self.parents) for p in ps}

    def edge_names(self, with_root=False):
        out = {(self.names[p], self.names[j]) for p, j in self.edges}
        if with_root:
            out |= {("*", self.names[j]) for j, ps in enumerate(self.parents) if not ps}
        return out

    def to_tree(self):
        if any(len(ps) > 1 for ps in self.parents):
            raise DataError("ground truth is not a tree")
        parent = tuple(ps[0] if ps else ROOT for ps in self.parents)
        return TreeModel(tuple(self.names), parent, tuple(self.prob))

    def marginals(self):
        """Analytic marginals for conjunctive trees/DAGs whose parents are independent paths."""
        if self.kind not in ("tree", "forest"):
            raise DataError("closed-form marginals only for trees")
        out = [None] * self.n_events
        for j in self.order():
            out[j] = self.prob[j] * (out[self.parents[j][0]] if self.parents[j] else 1.0)
        return tuple(out)

    def to_json(self):
        return {
            "kind": self.kind,
            "disjunctive": self.disjunctive,
            "nodes": [{"id": j, "label": self.names[j], "prob": self.prob[j],
                       "alpha": a, "level": self.levels[j] if self.levels else None}
                      for j, a in enumerate(self.alpha)],
            "edges": [{"from": self.names[p], "to": self.names[j]} for p, j in sorted(self.edges)],
        }

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        nodes = sorted(doc["nodes"], key=lambda n: n["id"])
        names = tuple(n["label"] for n in nodes)
        idx = {n: i for i, n in enumerate(names)}
        parents = [[] for _ in names]
        for e in doc["edges"]:
            parents[idx[e["to"]]].append(idx[e["from"]])
        levels = tuple(n.get("level") for n in nodes)
        if any(v is None for v in levels):
            levels = ()
        return cls(names, tuple(tuple(sorted(p)) for p in parents), tuple(float(n["prob"]) for n in nodes),
                   doc.get("kind", "tree"), bool(doc.get("disjunctive", False)), levels)


def depth_bound(n):
    return max(2, math.ceil(math.log2(n))) if n > 1 else 1


def _levels(n, rng):
    """Level 1 holds the single root; the rest fill levels 2..L, none empty."""
    if n == 1:
        return np.array([1])
    top = depth_bound(n)
    if n - 1 < top - 1:
        raise DataError(f"{n} events cannot populate {top} levels")
    while True:
        lv = rng.integers(2, top + 1, size=n - 1)
        if len(np.unique(lv)) == top - 1:
            return np.concatenate([[1], lv])


def _component(n, rng, max_parents, offset):
    lv = _levels(n, rng)
    parents = []
    for j in range(n):
        if lv[j] == 1:
            parents.append(())
            continue
        prev = np.flatnonzero(lv == lv[j] - 1)
        k = int(rng.integers(1, min(max_parents, len(prev)) + 1))
        chosen = rng.choice(prev, size=k, replace=False)
        parents.append(tuple(sorted(int(c) + offset for c in chosen)))
    return parents, [int(v) for v in lv]


def _composition(n, k, rng):
    if k == 1:
        return [n]
    cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
    return list(np.diff(np.concatenate([[0], cuts, [n]])))


def _generate(spec, kind):
    rng = np.random.default_rng(spec.seed)
    sizes = _composition(spec.n_events, spec.components, rng)
    parents, levels, off = [], [], 0
    for size in sizes:
        ps, lv = _component(int(size), rng, spec.max_parents, off)
        parents.extend(ps)
        levels.extend(lv)
        off += int(size)
    prob = rng.uniform(spec.p_min, spec.p_max, size=spec.n_events)
    names = tuple(f"e{j + 1}" for j in range(spec.n_events))
    return GroundTruth(names, tuple(parents), tuple(float(p) for p in prob), kind,
                       spec.disjunctive, tuple(levels))


def random_tree(spec):
    if spec.kind not in ("tree", "forest"):
        raise DataError("random_tree needs a tree or forest spec")
    return _generate(spec, spec.kind)


def random_dag(spec):
    if spec.kind not in ("connected_dag", "disconnected_dag"):
        raise DataError("random_dag needs a DAG spec")
    return _generate(spec, spec.kind)


def disjunctive_dag(spec):
    if not spec.disjunctive:
        raise DataError("disjunctive flag not set")
    return random_dag(spec)


def sample_dataset(gt, m_rows, seed=0):
    """Draw ``m_rows`` samples from the model's generative law.

    Conjunctive models fire an event only when all its parents fired and its
    own coin succeeds. Disjunctive models first draw a nonempty parent subset
    uniformly per row and require only that subset.
    """
    if m_rows < 1:
        raise DataError("m_rows must be >= 1")
    rng = np.random.default_rng(seed)
    n = gt.n_events
    bits = np.zeros((m_rows, n), dtype=np.uint8)
    for j in gt.order():
        ps = list(gt.parents[j])
        coin = rng.random(m_rows) < gt.prob[j]
        if not ps:
            gate = np.ones(m_rows, dtype=bool)
        elif gt.disjunctive and len(ps) > 1:
            # nonempty subsets encoded as bit masks 1..2^k-1
            mask = rng.integers(1, 2 ** len(ps), size=m_rows)
            gate = np.ones(m_rows, dtype=bool)
            for b, p in enumerate(ps):
                need = (mask >> b) & 1 == 1
                gate &= ~need | (bits[:, p] == 1)
        else:
            gate = np.all(bits[:, ps] == 1, axis=1)
        bits[:, j] = gate & coin
    samples = tuple(f"s{r + 1}" for r in range(m_rows))
    return GenotypeMatrix(samples, tuple(gt.names), bits)


def apply_noise(m, nu, seed=0):
    """Replace each cell by a fair coin with probability ``nu``."""
    if not 0.0 <= nu < 1.0:
        raise DataError("noise rate must lie in [0, 1)")
    if nu == 0:
        return m
    rng = np.random.default_rng(seed)
    hit = rng.random(m.bits.shape) < nu
    coin = rng.integers(0, 2, size=m.bits.shape, dtype=np.uint8)
    return GenotypeMatrix(m.samples, m.events, np.where(hit, coin, m.bits))


def flip_noise(m, eps_plus, eps_minus, seed=0):
    """Flip 0 -> 1 with ``eps_plus`` and 1 -> 0 with ``eps_minus``, independently per cell."""
    if not (0.0 <= eps_plus < 1.0 and 0.0 <= eps_minus < 1.0 and eps_plus + eps_minus < 1.0):
        raise DataError("need 0 <= eps < 1 and eps_plus + eps_minus < 1")
    rng = np.random.default_rng(seed)
    u = rng.random(m.bits.shape)
    b = m.bits
    out = np.where(b == 1, u >= eps_minus, u < eps_plus).astype(np.uint8)
    return GenotypeMatrix(m.samples, m.events, out)


def lethality_dataset(m_rows, seed=0, pattern=0.8, branch=0.7, effect=0.7):
    """Three events where exactly one of a, b precedes c.

    With probability ``pattern`` a row carries one of a or b (a with
    probability ``branch``, else b, never both); c then follows with
    probability ``effect``. Other rows are empty.
    """
    rng = np.random.default_rng(seed)
    on = rng.random(m_rows) < pattern
    pick_a = rng.random(m_rows) < branch
    c = on & (rng.random(m_rows) < effect)
    bits = np.column_stack([on & pick_a, on & ~pick_a, c]).astype(np.uint8)
    return GenotypeMatrix(tuple(f"s{r + 1}" for r in range(m_rows)), ("a", "b", "c"), bits)
