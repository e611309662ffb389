"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""
import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .capri import DIM_FULL, DIM_MINUS_ONE, reconstruct
from .caprese import LAMBDA_DEFAULT, reconstruct_tree
from .confidence import (caprese_algo, capri_algo, nonparametric_bootstrap, parametric_bootstrap,
                         statistical_bootstrap)
from .dataset import DataError, consolidate, import_matrix
from .evaluation import EvalReport, evaluate
from .patterns import hypotheses_from_json
from .sbcn import (DAMPING, N_WALKS, binarize, explainable_fraction, generalized_score,
                   group_discrimination, learn_sbcn, read_table)
from .serialize import dot_to_model, dumps, load_model, model_to_dict, to_dot, write_atomic
from .suppes import NBOOT, PVALUE
from .synthgen import (GroundTruth, TopologySpec, apply_noise, random_dag, random_tree,
                       sample_dataset)

SEED_ENV = "SUPPESNET_SEED"
EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer") from None


def _read(path):
    try:
        with open(path, newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _load_matrix(args):
    fmt = args.format or ("tsv" if args.input.endswith((".tsv", ".tab")) else "csv")
    return import_matrix(_read(args.input), fmt)


def _emit(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        write_atomic(path, text)


def _csv_list(text, cast=str):
    return [cast(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------


def cmd_validate(args):
    m = _load_matrix(args)
    rep = consolidate(m)
    doc = rep.to_dict(m)
    doc.update(ok=rep.ok, n_samples=m.n_samples, n_events=m.n_events)
    _emit(args.out, dumps(doc))
    return 0 if rep.ok else EXIT_DATA


def cmd_caprese(args):
    m = _load_matrix(args)
    tree = reconstruct_tree(m, args.lam, method=args.method)
    doc = model_to_dict(tree, m, seed=None)
    _emit(args.out, dumps(doc))
    if args.dot:
        write_atomic(args.dot, to_dot(doc))
    return 0


def _hyps(args, m):
    return hypotheses_from_json(_read(args.hypotheses), m) if args.hypotheses else ()


def cmd_capri(args):
    m = _load_matrix(args)
    seed = args.seed
    models = reconstruct(m, _hyps(args, m), alpha=args.alpha, nboot=args.nboot,
                         regularizers=_csv_list(args.regularizers), seed=seed,
                         restarts=args.restarts, convention=args.dimension)
    docs = {k: model_to_dict(v, m, seed=seed) for k, v in models.items()}
    if args.out is None:
        sys.stdout.write(dumps(docs))
    else:
        for k, doc in docs.items():
            write_atomic(f"{args.out}.{k}.json", dumps(doc))
            write_atomic(f"{args.out}.{k}.dot", to_dot(doc))
    return 0


def cmd_bootstrap(args):
    seed = args.seed
    if args.kind == "parametric":
        if not args.truth:
            raise UsageError("parametric bootstrap needs --truth")
        gt = GroundTruth.from_json(_read(args.truth))
        algo = caprese_algo(args.lam) if args.algo == "caprese" else capri_algo(nboot=args.inner_nboot)
        reports = parametric_bootstrap(gt, args.m_rows, args.eps_plus, args.eps_minus, algo,
                                       args.nboot, seed)
    else:
        if not args.input:
            raise UsageError(f"{args.kind} bootstrap needs an input matrix")
        m = _load_matrix(args)
        if args.kind == "statistical":
            if args.algo != "capri":
                raise UsageError("statistical bootstrap only applies to capri")
            reports = statistical_bootstrap(m, {"hyps": _hyps(args, m), "nboot": args.inner_nboot},
                                            args.nboot, seed)
        else:
            algo = (caprese_algo(args.lam) if args.algo == "caprese"
                    else capri_algo(_hyps(args, m), nboot=args.inner_nboot))
            reports = nonparametric_bootstrap(m, algo, args.nboot, seed)
    doc = {k: r.to_dict() for k, r in reports.items()}
    doc["seed"] = seed
    _emit(args.out, dumps(doc))
    return 0


def _spec(args, seed):
    return TopologySpec(args.n_events, args.kind, args.max_parents, args.p_min, args.p_max,
                        args.components, args.disjunctive, seed)


def _truth(spec):
    return random_tree(spec) if spec.kind in ("tree", "forest") else random_dag(spec)


def cmd_synth(args):
    seed = args.seed
    gt = _truth(_spec(args, seed))
    doc = gt.to_json()
    doc["seed"] = seed
    write_atomic(args.out_truth, dumps(doc))
    if args.m_rows:
        d = sample_dataset(gt, args.m_rows, seed=[seed, 1])
        d = apply_noise(d, args.noise, seed=[seed, 2])
        write_atomic(args.out_data, d.to_csv())
    return 0


def _load_any(path):
    text = _read(path)
    if path.endswith(".dot"):
        return dot_to_model(text)
    try:
        return load_model(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc.msg})") from None


def cmd_eval(args):
    rep = evaluate(_load_any(args.inferred), _load_any(args.truth))
    _emit(args.out, rep.to_csv() if args.csv else dumps(json.loads(rep.to_json())))
    return 0


def cmd_sbcn(args):
    seed = args.seed
    header, recs = read_table(_read(args.table))
    order = json.loads(_read(args.order))
    m, levels = binarize(recs, order, header)
    s = learn_sbcn(m, levels, args.neg, args.pos, seed=seed, restarts=args.restarts)
    _emit(args.out, s.to_json() + "\n")
    if args.scores:
        doc = {"seed": seed, "n_walks": args.n_walks, "groups": {}}
        for k, src in enumerate(_csv_list(args.source or "")):
            ws = group_discrimination(s, src, args.n_walks, seed=seed + k)
            entry = ws.to_dict()
            if args.via:
                entry["fed"] = explainable_fraction(s, src, _csv_list(args.via), args.n_walks, seed=seed + k)
            entry["gds_neg"] = generalized_score(s, [src], args.damping)
            doc["groups"][src] = entry
        write_atomic(args.scores, dumps(doc))
    return 0


def cmd_sweep(args):
    """Grid over sample size and noise; one CSV row per replicate."""
    seed = args.seed
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["m", "nu", "topology", "replicate"] + EvalReport.csv_header())
    for m_rows in _csv_list(args.m, int):
        for nu in _csv_list(args.nu, float):
            for t in range(args.topologies):
                gt = _truth(_spec(args, int(np.random.SeedSequence([seed, t]).generate_state(1)[0])))
                for r in range(args.reps):
                    d = sample_dataset(gt, m_rows, seed=[seed, t, r, m_rows])
                    d = apply_noise(d, nu, seed=[seed, t, r, m_rows, 1])
                    if args.algo == "caprese":
                        inf = reconstruct_tree(d, args.lam, allow_degenerate=True)
                        rep = evaluate(inf, gt)
                    else:
                        try:
                            inf = reconstruct(d, nboot=args.inner_nboot, regularizers=("bic",),
                                              seed=seed)["bic"]
                        except DataError:
                            continue
                        rep = evaluate(inf, gt)
                    w.writerow([m_rows, nu, t, r] + rep.csv_row())
    _emit(args.out, out.getvalue())
    return 0


# ---------------------------------------------------------------------------


def _add_matrix(p, required=True):
    if required:
        p.add_argument("input", help="genotype matrix (CSV or TSV)")
    else:
        p.add_argument("input", nargs="?", help="genotype matrix (CSV or TSV)")
    p.add_argument("--format", choices=("csv", "tsv"))


def _add_topology(p):
    p.add_argument("--n-events", type=int, default=10)
    p.add_argument("--kind", choices=("tree", "forest", "connected_dag", "disconnected_dag"), default="tree")
    p.add_argument("--max-parents", type=int, default=1)
    p.add_argument("--components", type=int, default=1)
    p.add_argument("--p-min", type=float, default=0.05)
    p.add_argument("--p-max", type=float, default=0.95)
    p.add_argument("--disjunctive", action="store_true")


def build_parser(seed):
    ap = _Parser(prog="suppesnet", description="Probabilistic causation models of progression.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a matrix for degenerate or duplicate events")
    _add_matrix(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("caprese", help="reconstruct a tree model")
    _add_matrix(p)
    p.add_argument("--lambda", dest="lam", type=float, default=LAMBDA_DEFAULT)
    p.add_argument("--method", choices=("argmax", "edmonds"), default="argmax")
    p.add_argument("--out")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_caprese)

    p = sub.add_parser("capri", help="reconstruct a DAG model")
    _add_matrix(p)
    p.add_argument("--hypotheses", help="JSON file of patterns")
    p.add_argument("--alpha", type=float, default=PVALUE)
    p.add_argument("--nboot", type=int, default=NBOOT)
    p.add_argument("--regularizers", default="bic,aic")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--dimension", choices=(DIM_FULL, DIM_MINUS_ONE), default=DIM_FULL)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out", help="output prefix; writes PREFIX.<reg>.json and .dot")
    p.set_defaults(func=cmd_capri)

    p = sub.add_parser("bootstrap", help="edge confidence by resampling")
    _add_matrix(p, required=False)
    p.add_argument("--algo", choices=("caprese", "capri"), default="caprese")
    p.add_argument("--kind", choices=("nonparametric", "statistical", "parametric"), default="nonparametric")
    p.add_argument("--nboot", type=int, default=100)
    p.add_argument("--inner-nboot", type=int, default=NBOOT)
    p.add_argument("--lambda", dest="lam", type=float, default=LAMBDA_DEFAULT)
    p.add_argument("--hypotheses")
    p.add_argument("--truth", help="ground-truth JSON for parametric resampling")
    p.add_argument("--m-rows", type=int, default=1000)
    p.add_argument("--eps-plus", type=float, default=0.0)
    p.add_argument("--eps-minus", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("synth", help="random ground truth and a dataset sampled from it")
    _add_topology(p)
    p.add_argument("--m-rows", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out-truth", required=True)
    p.add_argument("--out-data")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="compare an inferred model to the truth")
    p.add_argument("inferred")
    p.add_argument("truth")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sbcn", help="causal network over decision records")
    p.add_argument("table")
    p.add_argument("--order", required=True, help="JSON mapping attribute -> level")
    p.add_argument("--neg", required=True, help="negative decision, attribute=value")
    p.add_argument("--pos", required=True, help="positive decision, attribute=value")
    p.add_argument("--source", help="comma-separated group nodes to score")
    p.add_argument("--via", help="comma-separated mediator nodes for the explainable fraction")
    p.add_argument("--n-walks", type=int, default=N_WALKS)
    p.add_argument("--damping", type=float, default=DAMPING)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.add_argument("--scores")
    p.set_defaults(func=cmd_sbcn)

    p = sub.add_parser("sweep", help="replicated reconstructions over a (m, noise) grid")
    _add_topology(p)
    p.add_argument("--algo", choices=("caprese", "capri"), default="caprese")
    p.add_argument("--m", default="50,100,150,200,250")
    p.add_argument("--nu", default="0")
    p.add_argument("--topologies", type=int, default=10)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=LAMBDA_DEFAULT)
    p.add_argument("--inner-nboot", type=int, default=NBOOT)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None):
    try:
        seed = default_seed()
        args = build_parser(seed).parse_args(argv)
        if args.command == "synth" and args.m_rows and not args.out_data:
            raise UsageError("--m-rows needs --out-data")
        return args.func(args)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"suppesnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, KeyError) as exc:
        print(f"suppesnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"suppesnet: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
