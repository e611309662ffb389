"""Boolean hypotheses over events and the lifted matrix they induce."""
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import DataError

OPS = ("AND", "OR", "XOR")


@dataclass(frozen=True)
class Leaf:
    event: int
    negated: bool = False


@dataclass(frozen=True)
class Op:
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in OPS:
            raise DataError(f"unknown operator {self.op!r}")
        if len(self.args) < 2:
            raise DataError(f"{self.op} needs at least two operands")
        object.__setattr__(self, "args", tuple(self.args))


def AND(*args):
    return Op("AND", args)


def OR(*args):
    return Op("OR", args)


def XOR(*args):
    return Op("XOR", args)


def NOT(f):
    return negate(f)


def negate(f):
    """Push a negation down to the leaves."""
    if isinstance(f, Leaf):
        return Leaf(f.event, not f.negated)
    if f.op == "AND":
        return Op("OR", tuple(negate(a) for a in f.args))
    if f.op == "OR":
        return Op("AND", tuple(negate(a) for a in f.args))
    # parity flips when exactly one operand flips
    return Op("XOR", (negate(f.args[0]),) + f.args[1:])


def leaves(f):
    if isinstance(f, Leaf):
        yield f
    else:
        for a in f.args:
            yield from leaves(a)


def evaluate(f, row):
    """Evaluate a formula on one row of bits. XOR is odd parity."""
    if isinstance(f, Leaf):
        if not 0 <= f.event < len(row):
            raise DataError(f"leaf index {f.event} out of range")
        v = bool(row[f.event])
        return int(v != f.negated)
    vals = [evaluate(a, row) for a in f.args]
    if f.op == "AND":
        return int(all(vals))
    if f.op == "OR":
        return int(any(vals))
    return sum(vals) % 2


def evaluate_columns(f, bits):
    """Column-wise :func:`evaluate` over every row of ``bits``."""
    bits = np.asarray(bits)
    if isinstance(f, Leaf):
        if not 0 <= f.event < bits.shape[1]:
            raise DataError(f"leaf index {f.event} out of range")
        col = bits[:, f.event].astype(np.uint8)
        return 1 - col if f.negated else col
    cols = [evaluate_columns(a, bits) for a in f.args]
    if f.op == "AND":
        return np.logical_and.reduce(cols).astype(np.uint8)
    if f.op == "OR":
        return np.logical_or.reduce(cols).astype(np.uint8)
    return (np.sum(cols, axis=0) % 2).astype(np.uint8)


def clauses(f):
    """Top-level conjuncts; a non-AND root is a single clause."""
    if isinstance(f, Op) and f.op == "AND":
        return list(f.args)
    return [f]


def to_text(f, names):
    if isinstance(f, Leaf):
        return ("!" if f.negated else "") + names[f.event]
    sym = {"AND": " & ", "OR": " | ", "XOR": " ^ "}[f.op]
    return "(" + sym.join(to_text(a, names) for a in f.args) + ")"


def canonical(f):
    """Order-insensitive normal form, used to compare formulas."""
    if isinstance(f, Leaf):
        return f
    args = tuple(sorted((canonical(a) for a in f.args), key=repr))
    return Op(f.op, args)


@dataclass(frozen=True)
class Hypothesis:
    formula: object
    target: int
    label: str = ""

    def __post_init__(self):
        if any(l.event == self.target for l in leaves(self.formula)):
            raise DataError(f"hypothesis {self.label!r} contains its own target")

    def check(self, m):
        n = m.n_events
        if not 0 <= self.target < n:
            raise DataError(f"hypothesis {self.label!r}: unknown target")
        for l in leaves(self.formula):
            if not 0 <= l.event < n:
                raise DataError(f"hypothesis {self.label!r}: leaf index out of range")


@dataclass(frozen=True)
class LiftedColumn:
    """One node of the prima facie search space.

    ``event`` is set for plain events. Pattern clauses carry the indices of
    the hypotheses they belong to and the events those hypotheses target.
    Clauses that are a single positive event reuse that event's column, so
    they never appear as separate columns.
    """

    name: str
    event: int = None
    hypotheses: tuple = ()
    targets: tuple = ()


@dataclass(frozen=True, eq=False)
class LiftedMatrix:
    base: object
    bits: np.ndarray = field(repr=False)
    columns: tuple
    hypotheses: tuple = ()
    # per hypothesis: lifted column index of each top-level clause
    clause_index: tuple = ()

    @property
    def n_samples(self):
        return self.bits.shape[0]

    @property
    def n_columns(self):
        return self.bits.shape[1]

    @property
    def names(self):
        return [c.name for c in self.columns]

    def is_event(self, k):
        return self.columns[k].event is not None

    def formula_column(self, h):
        """Whole-formula column: the AND of the hypothesis's clause columns."""
        return np.logical_and.reduce([self.bits[:, k] for k in self.clause_index[h]]).astype(np.uint8)

    def take_rows(self, rows):
        return LiftedMatrix(self.base.take_rows(rows), self.bits[rows], self.columns,
                            self.hypotheses, self.clause_index)


def lift(m, hyps=()):
    """Append one column per non-atomic clause of every hypothesis.

    The same clause shared by several hypotheses (e.g. one formula tested
    against many targets) maps to a single column.
    """
    names = m.labels
    cols = [LiftedColumn(names[i], event=i) for i in range(m.n_events)]
    data = [m.bits[:, i] for i in range(m.n_events)]
    signatures = {m.bits[:, i].tobytes(): names[i] for i in range(m.n_events)}
    by_formula = {}
    owners = {}
    clause_index = []
    for h_i, h in enumerate(hyps):
        h.check(m)
        idx = []
        for c in clauses(h.formula):
            if isinstance(c, Leaf) and not c.negated:
                idx.append(c.event)
                continue
            key = canonical(c)
            if key in by_formula:
                k = by_formula[key]
            else:
                col = evaluate_columns(c, m.bits)
                sig = col.tobytes()
                text = to_text(c, names)
                if sig in signatures:
                    raise DataError(f"pattern duplicates: clause {text} of {h.label!r} "
                                    f"equals column {signatures[sig]!r}")
                signatures[sig] = text
                cols.append(LiftedColumn(text))
                data.append(col)
                k = by_formula[key] = len(cols) - 1
            owners.setdefault(k, []).append(h_i)
            idx.append(k)
        clause_index.append(tuple(idx))
    for k, hs in owners.items():
        targets = tuple(sorted({hyps[h].target for h in hs}))
        cols[k] = LiftedColumn(cols[k].name, hypotheses=tuple(sorted(set(hs))), targets=targets)
    bits = np.column_stack(data).astype(np.uint8)
    bits.setflags(write=False)
    return LiftedMatrix(m, bits, tuple(cols), tuple(hyps), tuple(clause_index))


def _group_events(m, genes):
    idx = [i for i, e in enumerate(m.events) if e.label in genes or e.key in genes]
    return idx


def _targets(m, formula, target):
    used = {l.event for l in leaves(formula)}
    if target == "*":
        return [i for i in range(m.n_events) if i not in used]
    t = m.index(target)
    return [] if t in used else [t]


def group_hypotheses(m, genes, op="OR", dim_min=2, dim_max=None, target="*"):
    """One hypothesis per subset of the gene group with size in [dim_min, dim_max]."""
    op = op.upper()
    events = _group_events(m, set(genes))
    if len(events) < 2:
        raise DataError("group resolves to fewer than two events")
    if dim_max is None:
        dim_max = len(events)
    if not 2 <= dim_min <= dim_max <= len(events):
        raise DataError("need 2 <= dim_min <= dim_max <= group size")
    out = []
    for k in range(dim_min, dim_max + 1):
        for sub in itertools.combinations(events, k):
            f = Op(op, tuple(Leaf(i) for i in sub))
            label = to_text(f, m.labels)
            for t in _targets(m, f, target):
                out.append(Hypothesis(f, t, label))
    return out


def homologous_hypotheses(m, op="OR", target="*"):
    """Patterns joining events that share a label but differ in kind.

    When the grouped columns never co-occur the operator is hardened to XOR.
    """
    op = op.upper()
    if op not in ("OR", "XOR"):
        raise DataError("homologous patterns use OR or XOR")
    by_label = {}
    for i, e in enumerate(m.events):
        by_label.setdefault(e.label, []).append(i)
    out = []
    for label, idx in by_label.items():
        if len(idx) < 2 or len({m.events[i].kind for i in idx}) < 2:
            continue
        this_op = op
        if (m.bits[:, idx].sum(axis=1) > 1).sum() == 0:
            this_op = "XOR"
        f = Op(this_op, tuple(Leaf(i) for i in idx))
        for t in _targets(m, f, target):
            out.append(Hypothesis(f, t, to_text(f, m.labels)))
    return out


# ---------------------------------------------------------------------------
# JSON form: {"label", "target", "formula": {"op", "args"} | {"event"}}


def formula_from_json(obj, m):
    if "event" in obj:
        return Leaf(m.index(obj["event"]))
    op = obj.get("op", "").lower()
    args = [formula_from_json(a, m) for a in obj.get("args", [])]
    if op == "not":
        if len(args) != 1:
            raise DataError("not takes exactly one operand")
        return negate(args[0])
    if op not in ("and", "or", "xor"):
        raise DataError(f"unknown operator {op!r}")
    return Op(op.upper(), tuple(args))


def formula_to_json(f, m):
    if isinstance(f, Leaf):
        leaf = {"event": m.events[f.event].key}
        return {"op": "not", "args": [leaf]} if f.negated else leaf
    return {"op": f.op.lower(), "args": [formula_to_json(a, m) for a in f.args]}


def hypotheses_from_json(text, m):
    doc = json.loads(text) if isinstance(text, str) else text
    if isinstance(doc, dict):
        doc = doc.get("hypotheses", [doc])
    out = []
    for h in doc:
        f = formula_from_json(h["formula"], m)
        label = h.get("label") or to_text(f, m.labels)
        target = h.get("target", "*")
        ts = _targets(m, f, target) if target == "*" else [m.index(target)]
        out.extend(Hypothesis(f, t, label) for t in ts)
    return out


def hypotheses_to_json(hyps, m):
    return [{"label": h.label, "target": m.events[h.target].key, "formula": formula_to_json(h.formula, m)}
            for h in hyps]
