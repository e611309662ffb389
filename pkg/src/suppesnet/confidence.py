"""Bootstrap confidence for reconstructed edges and overlap significance."""
import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import hypergeom

from .caprese import LAMBDA_DEFAULT, ROOT, reconstruct_tree
from .capri import reconstruct
from .dataset import DataError
from .synthgen import GroundTruth, flip_noise, sample_dataset

KINDS = ("nonparametric", "statistical", "parametric")


def derive_seed(seed, i):
    """Integer seed for iteration ``i``, stable across runs and platforms."""
    base = [int(s) for s in np.atleast_1d(seed)]
    return int(np.random.SeedSequence(base + [int(i)]).generate_state(1, np.uint64)[0] >> np.uint64(1))


def _edge_key(e):
    return f"{e[0]}->{e[1]}"


@dataclass(frozen=True)
class BootstrapReport:
    kind: str
    nboot: int
    edge_freq: dict  # (from, to) -> frequency
    model_freq: float
    reference: frozenset = frozenset()
    skipped: int = 0
    label: str = ""
    counts: dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        return {
            "kind": self.kind,
            "label": self.label,
            "nboot": self.nboot,
            "skipped": self.skipped,
            "model_freq": self.model_freq,
            "edge_freq": {_edge_key(e): f for e, f in sorted(self.edge_freq.items())},
            "reference": sorted(_edge_key(e) for e in self.reference),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def caprese_algo(lam=LAMBDA_DEFAULT, method="argmax", allow_degenerate=False):
    """Wrap tree reconstruction as ``algo(matrix, seed) -> {label: edges}``."""
    def run(m, seed=0):
        t = reconstruct_tree(m, lam, method=method, allow_degenerate=allow_degenerate)
        return {"caprese": frozenset(t.edge_names(with_root=True))}
    return run


def capri_algo(hyps=(), **params):
    """Wrap DAG reconstruction; one edge set per regularizer."""
    def run(m, seed=0):
        models = reconstruct(m, hyps, seed=seed, **params)
        return {k: frozenset(v.edge_names()) for k, v in models.items()}
    return run


class _Tally:
    def __init__(self, kind, nboot, reference):
        self.kind = kind
        self.nboot = nboot
        self.reference = reference
        self.counts = {k: Counter() for k in reference}
        self.exact = Counter()
        self.skipped = 0

    def add(self, result):
        for k, edges in result.items():
            self.counts[k].update(edges)
            if edges == self.reference[k]:
                self.exact[k] += 1

    def reports(self):
        out = {}
        for k, ref in self.reference.items():
            freq = {e: c / self.nboot for e, c in self.counts[k].items()}
            for e in ref:
                freq.setdefault(e, 0.0)
            out[k] = BootstrapReport(self.kind, self.nboot, freq, self.exact[k] / self.nboot,
                                     frozenset(ref), self.skipped, k, dict(self.counts[k]))
        return out


def _check_nboot(nboot):
    if nboot < 1:
        raise ValueError("nboot must be >= 1")


def nonparametric_bootstrap(m, algo, nboot, seed=0):
    """Rerun ``algo`` on row resamples; frequencies are over all ``nboot`` iterations.

    Resamples the algorithm rejects count as skipped and still weigh in the
    denominator.
    """
    _check_nboot(nboot)
    tally = _Tally("nonparametric", nboot, algo(m, seed))
    for b in range(nboot):
        rng = np.random.default_rng([*np.atleast_1d(seed).tolist(), b])
        rows = rng.integers(0, m.n_samples, size=m.n_samples)
        try:
            tally.add(algo(m.take_rows(rows), derive_seed(seed, b)))
        except DataError:
            tally.skipped += 1
    return tally.reports()


def statistical_bootstrap(m, capri_params=None, nboot=100, seed=0):
    """Data fixed; only the seed of the internal resampling tests changes.

    ``capri_params`` holds keyword arguments for the DAG reconstruction,
    hypotheses under ``hyps``.
    """
    _check_nboot(nboot)
    params = dict(capri_params or {})
    algo = capri_algo(params.pop("hyps", ()), **params)
    tally = _Tally("statistical", nboot, algo(m, seed))
    for b in range(nboot):
        try:
            tally.add(algo(m, derive_seed(seed, b)))
        except DataError:
            tally.skipped += 1
    return tally.reports()


def ground_truth_from_tree(tree, m):
    """Edge probabilities P(j | parent), root edges P(j), estimated from ``m``."""
    bits = m.bits
    prob = []
    for j, p in enumerate(tree.parent):
        rows = np.ones(bits.shape[0], dtype=bool) if p == ROOT else bits[:, p] == 1
        tot = int(rows.sum())
        prob.append(float(bits[rows, j].sum()) / tot if tot else 0.0)
    parents = tuple(() if p == ROOT else (p,) for p in tree.parent)
    return GroundTruth(tuple(tree.labels), parents, tuple(prob), "tree")


def ground_truth_from_dag(model):
    """Conjunctive generative model from a progression model over plain events."""
    if model.is_event and not all(model.is_event):
        raise DataError("parametric resampling needs a model over plain events only")
    return GroundTruth(tuple(model.names), tuple(model.parents), tuple(model.labeling), "connected_dag")


def parametric_bootstrap(model, m_rows, eps_plus, eps_minus, algo, nboot, seed=0):
    """Sample from the model, flip bits at the given rates, rerun ``algo``.

    The reference is the model's own edge set; ``model_freq`` is the share of
    iterations recovering it exactly.
    """
    _check_nboot(nboot)
    if not (0.0 <= eps_plus < 1.0 and 0.0 <= eps_minus < 1.0 and eps_plus + eps_minus < 1.0):
        raise DataError("need 0 <= eps < 1 and eps_plus + eps_minus < 1")
    if not isinstance(model, GroundTruth):
        raise TypeError("parametric bootstrap needs a GroundTruth; see ground_truth_from_tree")
    with_root = model.kind in ("tree", "forest")
    ref_edges = frozenset(model.edge_names(with_root=with_root))
    results, skipped = [], 0
    for b in range(nboot):
        s = derive_seed(seed, b)
        d = sample_dataset(model, m_rows, seed=[s, 0])
        d = flip_noise(d, eps_plus, eps_minus, seed=[s, 1])
        try:
            results.append(algo(d, s))
        except DataError:
            skipped += 1
    keys = results[0].keys() if results else ("model",)
    tally = _Tally("parametric", nboot, {k: ref_edges for k in keys})
    tally.skipped = skipped
    for res in results:
        tally.add(res)
    return tally.reports()


def hypergeometric_overlap(m, e1, e2):
    """Upper-tail p-value of the observed co-occurrence of two events."""
    i, j = m.index(e1), m.index(e2)
    a, b = m.bits[:, i], m.bits[:, j]
    n = m.n_samples
    ca, cb = int(a.sum()), int(b.sum())
    for c, e in ((ca, e1), (cb, e2)):
        if c in (0, n):
            raise DataError(f"degenerate event {e!r}")
    k = int((a & b).sum())
    return float(hypergeom.sf(k - 1, n, cb, ca))
