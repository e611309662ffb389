"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package's numeric code: each oracle recomputes its
quantity from first principles with plain Python loops.
"""
import itertools
import math
from fractions import Fraction
from functools import lru_cache


def rows_of(bits):
    return [tuple(int(v) for v in r) for r in bits]


def p_marg(rows, i):
    return Fraction(sum(r[i] for r in rows), len(rows))


def p_joint(rows, i, j):
    return Fraction(sum(r[i] & r[j] for r in rows), len(rows))


def p_cond(rows, j, i, negated=False):
    sel = [r for r in rows if r[i] == (0 if negated else 1)]
    if not sel:
        return None
    return Fraction(sum(r[j] for r in sel), len(sel))


def shrinkage(rows, i, j, lam):
    """Blended estimator for the ordered pair i -> j, exact rationals."""
    a = p_cond(rows, j, i)
    b = p_cond(rows, j, i, True)
    alpha = (a - b) / (a + b)
    pij, pi, pj = p_joint(rows, i, j), p_marg(rows, i), p_marg(rows, j)
    beta = (pij - pi * pj) / (pij + pi * pj)
    return (1 - lam) * alpha + lam * beta, alpha, beta


def midranks(values):
    order = sorted(range(len(values)), key=lambda k: values[k])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def mw_exact(a, b):
    """P(rank sum of a >= observed) over all equally likely splits of the pooled ranks."""
    pooled = list(a) + list(b)
    ranks = midranks(pooled)
    obs = sum(ranks[:len(a)])
    hits = total = 0
    for combo in itertools.combinations(range(len(pooled)), len(a)):
        total += 1
        if sum(ranks[k] for k in combo) >= obs - 1e-9:
            hits += 1
    return hits / total


def hypergeom_upper(n, marked, drawn, k):
    """P(X >= k), X hypergeometric with population n, marked items, draws."""
    tot = math.comb(n, drawn)
    return sum(math.comb(marked, x) * math.comb(n - marked, drawn - x)
               for x in range(k, min(marked, drawn) + 1)) / tot


def smoothed_loglik(rows, parents):
    """Add-one smoothed log-likelihood from per-configuration tallies."""
    total = 0.0
    for j, ps in enumerate(parents):
        tally = {}
        for r in rows:
            cfg = tuple(r[p] for p in ps)
            n0, n1 = tally.get(cfg, (0, 0))
            tally[cfg] = (n0 + (r[j] == 0), n1 + (r[j] == 1))
        for n0, n1 in tally.values():
            n = n0 + n1
            p1 = (n1 + 1) / (n + 2)
            total += n1 * math.log(p1) + n0 * math.log(1 - p1)
    return total


def is_acyclic(n, edges):
    indeg = [0] * n
    out = [[] for _ in range(n)]
    for a, b in edges:
        indeg[b] += 1
        out[a].append(b)
    queue = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == n


def best_structure(rows, n, edges, theta, minus_one=False):
    """Exhaustive best score LL - theta/2 * dim over acyclic edge subsets."""
    best = -math.inf
    for k in range(len(edges) + 1):
        for sub in itertools.combinations(edges, k):
            if not is_acyclic(n, sub):
                continue
            parents = [tuple(sorted(a for a, b in sub if b == j)) for j in range(n)]
            dim = sum(2 ** len(p) - (1 if minus_one else 0) for p in parents)
            best = max(best, smoothed_loglik(rows, parents) - theta / 2 * dim)
    return best


# ---------------------------------------------------------------------------
# tree edit distance by recursion over ordered forests


def to_nested(labels, parent, root_label="*"):
    kids = {}
    for j, p in enumerate(parent):
        kids.setdefault(p, []).append(j)

    def build(v):
        cs = sorted(kids.get(v, []), key=lambda c: labels[c])
        return (root_label if v == -1 else labels[v], tuple(build(c) for c in cs))
    return build(-1)


def _size(forest):
    return sum(1 + _size(t[1]) for t in forest)


@lru_cache(maxsize=None)
def forest_distance(f, g):
    if not f and not g:
        return 0
    if not f:
        return _size(g)
    if not g:
        return _size(f)
    (lf, cf), (lg, cg) = f[-1], g[-1]
    return min(
        forest_distance(f[:-1] + cf, g) + 1,
        forest_distance(f, g[:-1] + cg) + 1,
        forest_distance(cf, cg) + forest_distance(f[:-1], g[:-1]) + (lf != lg),
    )


def ted(a, b):
    return forest_distance((a,), (b,))


# ---------------------------------------------------------------------------


def ppr_dense(n, weights, seeds, damping):
    """Personalised PageRank from the linear system, dangling mass to the seeds."""
    import numpy as np

    e = np.zeros(n)
    e[list(seeds)] = 1.0 / len(seeds)
    P = np.zeros((n, n))
    out = {}
    for (v, u), w in weights.items():
        out.setdefault(v, []).append((u, w))
    for v in range(n):
        if v in out:
            tot = sum(w for _, w in out[v])
            for u, w in out[v]:
                P[v, u] = w / tot
        else:
            P[v] = e
    # x = (1 - d) e + d P^T x
    A = np.eye(n) - damping * P.T
    return np.linalg.solve(A, (1 - damping) * e)
