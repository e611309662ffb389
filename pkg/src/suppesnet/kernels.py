"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba and a
vectorised numpy version. Both must return identical results for identical
inputs; ``tests/test_kernels.py`` holds them to that. The module-level names
(``resample_counts``, ``family_counts``, ``run_walks``) dispatch to one or
the other depending on :data:`suppesnet._accel.NUMBA_ENABLED`.
"""
import numpy as np

from ._accel import NUMBA_ENABLED, njit

# splitmix64 constants
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

WALK_NEG = 0
WALK_POS = 1
WALK_CAPPED = -1


# ---------------------------------------------------------------------------
# bootstrap resample counts


def _resample_counts_numpy(bits, idx):
    b = bits[idx].astype(np.int64)
    joint = b.T @ b
    return np.diag(joint).copy(), joint


@njit(cache=True)
def _resample_counts_numba(bits, idx):
    n = bits.shape[1]
    joint = np.zeros((n, n), dtype=np.int64)
    on = np.empty(n, dtype=np.int64)
    for r in range(idx.shape[0]):
        row = idx[r]
        k = 0
        for i in range(n):
            if bits[row, i]:
                on[k] = i
                k += 1
        for a in range(k):
            ia = on[a]
            for b in range(k):
                joint[ia, on[b]] += 1
    marg = np.empty(n, dtype=np.int64)
    for i in range(n):
        marg[i] = joint[i, i]
    return marg, joint


# ---------------------------------------------------------------------------
# conditional probability table counts for one node


def _family_counts_numpy(data, child, parents):
    k = parents.shape[0]
    if k:
        weights = np.left_shift(np.int64(1), np.arange(k, dtype=np.int64))
        code = data[:, parents].astype(np.int64) @ weights
    else:
        code = np.zeros(data.shape[0], dtype=np.int64)
    flat = np.bincount(code * 2 + data[:, child], minlength=2 ** (k + 1))
    return flat.reshape(-1, 2).astype(np.int64)


@njit(cache=True)
def _family_counts_numba(data, child, parents):
    k = parents.shape[0]
    counts = np.zeros((2 ** k, 2), dtype=np.int64)
    for r in range(data.shape[0]):
        code = 0
        for p in range(k):
            if data[r, parents[p]]:
                code += 1 << p
        counts[code, data[r, child]] += 1
    return counts


# ---------------------------------------------------------------------------
# weighted random walks with first-passage absorption


@njit(cache=True)
def _splitmix(x):
    z = x + _GOLDEN
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def _uniform(seed, walk, draw):
    h = _splitmix(_splitmix(_splitmix(seed) ^ walk) ^ draw)
    return np.float64(h >> _S11) * _INV53


def _splitmix_np(x):
    # uint64 arithmetic wraps by design
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def _uniform_np(seed, walk, draw):
    h = _splitmix_np(_splitmix_np(_splitmix_np(seed) ^ walk) ^ draw)
    return (h >> _S11).astype(np.float64) * _INV53


@njit(cache=True)
def _run_walks_numba(ptr, nbr, cum, start, neg, pos, via, n_walks, seed, max_moves):
    outcome = np.empty(n_walks, dtype=np.int8)
    steps = np.zeros(n_walks, dtype=np.int64)
    hit = np.zeros(n_walks, dtype=np.bool_)
    useed = np.uint64(seed)
    for w in range(n_walks):
        uw = np.uint64(w)
        cur = start
        draws = np.uint64(0)
        moves = 0
        length = 0
        seen = False
        outcome[w] = WALK_CAPPED
        while True:
            if cur == neg:
                outcome[w] = WALK_NEG
                break
            if cur == pos:
                outcome[w] = WALK_POS
                break
            if moves > max_moves:
                break
            lo = ptr[cur]
            hi = ptr[cur + 1]
            moves += 1
            if hi == lo:
                cur = start
                length = 0
                seen = False
                continue
            u = _uniform(useed, uw, draws)
            draws += np.uint64(1)
            k = lo
            while k < hi - 1 and not (u < cum[k]):
                k += 1
            cur = nbr[k]
            length += 1
            if via[cur]:
                seen = True
        steps[w] = length
        hit[w] = seen
    return outcome, steps, hit


def _run_walks_numpy(ptr, nbr, cum, start, neg, pos, via, n_walks, seed, max_moves):
    n_nodes = ptr.shape[0] - 1
    deg = np.diff(ptr)
    width = max(int(deg.max()) if n_nodes else 0, 1)
    cum_pad = np.full((n_nodes, width), np.inf)
    nbr_pad = np.zeros((n_nodes, width), dtype=np.int64)
    for v in range(n_nodes):
        d = deg[v]
        if d:
            seg = slice(ptr[v], ptr[v + 1])
            cum_pad[v, :d] = cum[seg]
            cum_pad[v, d - 1] = np.inf  # last neighbour always accepts
            nbr_pad[v, :d] = nbr[seg]

    outcome = np.full(n_walks, WALK_CAPPED, dtype=np.int8)
    steps = np.zeros(n_walks, dtype=np.int64)
    hit = np.zeros(n_walks, dtype=bool)
    cur = np.full(n_walks, start, dtype=np.int64)
    draws = np.zeros(n_walks, dtype=np.uint64)
    moves = np.zeros(n_walks, dtype=np.int64)
    walk_ids = np.arange(n_walks, dtype=np.uint64)
    active = np.arange(n_walks)
    useed = np.uint64(seed)
    while active.size:
        c = cur[active]
        done_neg = c == neg
        done_pos = c == pos
        outcome[active[done_neg]] = WALK_NEG
        outcome[active[done_pos]] = WALK_POS
        over = moves[active] > max_moves
        keep = ~(done_neg | done_pos | over)
        active = active[keep]
        if not active.size:
            break
        c = cur[active]
        moves[active] += 1
        dead = deg[c] == 0
        if dead.any():
            a = active[dead]
            cur[a] = start
            steps[a] = 0
            hit[a] = False
        live = active[~dead]
        if live.size:
            cl = cur[live]
            u = _uniform_np(useed, walk_ids[live], draws[live])
            draws[live] += np.uint64(1)
            k = (cum_pad[cl] <= u[:, None]).sum(axis=1)
            nxt = nbr_pad[cl, k]
            cur[live] = nxt
            steps[live] += 1
            hit[live] |= via[nxt]
    return outcome, steps, hit


if NUMBA_ENABLED:
    resample_counts = _resample_counts_numba
    family_counts = _family_counts_numba
    run_walks = _run_walks_numba
else:
    resample_counts = _resample_counts_numpy
    family_counts = _family_counts_numpy
    run_walks = _run_walks_numpy

BACKENDS = {
    "numba": (_resample_counts_numba, _family_counts_numba, _run_walks_numba),
    "numpy": (_resample_counts_numpy, _family_counts_numpy, _run_walks_numpy),
}
