"""Time the numba and numpy backends of every hot kernel.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both backends are imported side by side from ``suppesnet.kernels.BACKENDS``,
so ``SUPPESNET_NUMBA`` does not matter here. The first numba call (JIT
compile) is excluded from the timings; outputs are checked for equality.
"""
import argparse
import json
import time

import numpy as np

from suppesnet import kernels
from suppesnet.sbcn import BERKELEY_ORDER, berkeley_records, binarize, learn_sbcn


def _best_of(fn, args, repeat):
    out = fn(*args)  # warm-up; compiles the numba path
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def cases():
    rng = np.random.default_rng(0)
    bits = (rng.random((5000, 40)) < 0.2).astype(np.uint8)
    idx = rng.integers(0, bits.shape[0], size=bits.shape[0])
    yield "resample_counts 5000x40", 0, (bits, idx)

    fam = (rng.random((20000, 12)) < 0.5).astype(np.uint8)
    yield "family_counts 20000 rows, 3 parents", 1, (fam, 0, np.array([3, 5, 9], dtype=np.int64))

    m, levels = binarize(berkeley_records(), BERKELEY_ORDER)
    s = learn_sbcn(m, levels, "Admission=No", "Admission=Yes")
    ptr, nbr, cum = s.csr()
    via = np.zeros(s.n_nodes, dtype=np.bool_)
    start = s.index("sex=Female")
    yield "run_walks 1e5 walks (admissions graph)", 2, (ptr, nbr, cum, start, s.neg, s.pos, via, 100_000, 0, 10 ** 6)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the timings here")
    args = ap.parse_args()

    rows = []
    print(f"{'kernel':42s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}  equal")
    for name, k, call in cases():
        t_nb, o_nb = _best_of(kernels.BACKENDS["numba"][k], call, args.repeat)
        t_np, o_np = _best_of(kernels.BACKENDS["numpy"][k], call, args.repeat)
        same = _same(o_nb, o_np)
        rows.append({"kernel": name, "numba": t_nb, "numpy": t_np, "equal": bool(same)})
        print(f"{name:42s} {t_nb:10.5f} {t_np:10.5f} {t_np / t_nb:8.1f}  {same}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
