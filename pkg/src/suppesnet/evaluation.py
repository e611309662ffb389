"""Structural distances between a reconstructed model and the ground truth."""
import csv
import io
import json
from dataclasses import asdict, dataclass

from .caprese import ROOT, ROOT_NAME, TreeModel
from .dataset import DataError


def _nodes_and_edges(model):
    """Node-name universe and directed named edges (root edges included for trees)."""
    if isinstance(model, TreeModel):
        return set(model.labels), model.edge_names(with_root=True)
    if hasattr(model, "to_tree") and hasattr(model, "parents") and hasattr(model, "prob"):
        if model.kind in ("tree", "forest"):
            t = model.to_tree()
            return set(t.labels), t.edge_names(with_root=True)
        return set(model.names), model.edge_names()
    if hasattr(model, "edge_names") and hasattr(model, "names"):
        return set(model.names), model.edge_names()
    if isinstance(model, tuple) and len(model) == 2:
        nodes, edges = model
        return set(nodes), {tuple(e) for e in edges}
    raise TypeError(f"cannot compare {type(model).__name__}")


def _universes(a, b):
    na, ea = _nodes_and_edges(a)
    nb, eb = _nodes_and_edges(b)
    if na != nb:
        raise DataError("models are defined over different nodes")
    return ea, eb


def hamming(a, b):
    """Number of directed adjacency entries on which the two models differ."""
    ea, eb = _universes(a, b)
    return len(ea ^ eb)


def confusion(inferred, truth):
    ei, et = _universes(inferred, truth)
    return len(ei & et), len(ei - et), len(et - ei)


def _ratio(num, den, empty):
    return num / den if den else empty


def precision_recall(inferred, truth):
    tp, fp, fn = confusion(inferred, truth)
    truth_empty = tp + fn == 0
    precision = _ratio(tp, tp + fp, 1.0 if truth_empty else 0.0)
    recall = _ratio(tp, tp + fn, 1.0)
    return precision, recall


# ---------------------------------------------------------------------------
# ordered tree edit distance (Zhang & Shasha), unit costs


class _Node:
    __slots__ = ("label", "children")

    def __init__(self, label, children=()):
        self.label = label
        self.children = list(children)


def to_ordered(tree):
    """Rooted ordered tree with children sorted by label."""
    if isinstance(tree, _Node):
        return tree
    if not isinstance(tree, TreeModel):
        tree = tree.to_tree()
    kids = {ROOT: []}
    for j in range(len(tree.labels)):
        kids.setdefault(j, [])
        kids.setdefault(tree.parent[j], []).append(j)

    def build(v):
        label = ROOT_NAME if v == ROOT else tree.labels[v]
        cs = sorted(kids[v], key=lambda c: tree.labels[c])
        return _Node(label, [build(c) for c in cs])
    return build(ROOT)


def _postorder(root):
    labels, lmd = [], []

    def walk(node):
        first = None
        for c in node.children:
            leftmost = walk(c)
            if first is None:
                first = leftmost
        idx = len(labels)
        labels.append(node.label)
        lmd.append(idx if first is None else first)
        return lmd[idx]
    walk(root)
    return labels, lmd


def _keyroots(lmd):
    seen, out = set(), []
    for i in range(len(lmd) - 1, -1, -1):
        if lmd[i] not in seen:
            seen.add(lmd[i])
            out.append(i)
    return sorted(out)


def tree_edit_distance(a, b):
    la, ma = _postorder(to_ordered(a))
    lb, mb = _postorder(to_ordered(b))
    na, nb = len(la), len(lb)
    td = [[0] * nb for _ in range(na)]
    for i in _keyroots(ma):
        for j in _keyroots(mb):
            li, lj = ma[i], mb[j]
            rows, cols = i - li + 2, j - lj + 2
            fd = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = fd[x - 1][0] + 1
            for y in range(1, cols):
                fd[0][y] = fd[0][y - 1] + 1
            for x in range(1, rows):
                for y in range(1, cols):
                    ni, nj = li + x - 1, lj + y - 1
                    if ma[ni] == li and mb[nj] == lj:
                        sub = 0 if la[ni] == lb[nj] else 1
                        fd[x][y] = min(fd[x - 1][y] + 1, fd[x][y - 1] + 1, fd[x - 1][y - 1] + sub)
                        td[ni][nj] = fd[x][y]
                    else:
                        fd[x][y] = min(fd[x - 1][y] + 1, fd[x][y - 1] + 1,
                                       fd[ma[ni] - li][mb[nj] - lj] + td[ni][nj])
    return td[na - 1][nb - 1]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalReport:
    hamming: int
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int
    ted: int = None

    FIELDS = ("ted", "hamming", "precision", "recall", "tp", "fp", "fn")

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    def csv_row(self):
        return [("" if getattr(self, f) is None else getattr(self, f)) for f in self.FIELDS]

    @classmethod
    def csv_header(cls):
        return list(cls.FIELDS)

    def to_csv(self, header=True):
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        if header:
            w.writerow(self.csv_header())
        w.writerow(self.csv_row())
        return out.getvalue()


def _is_tree(model):
    if isinstance(model, TreeModel):
        return True
    return getattr(model, "kind", None) in ("tree", "forest")


def evaluate(inferred, truth):
    tp, fp, fn = confusion(inferred, truth)
    precision, recall = precision_recall(inferred, truth)
    ted = tree_edit_distance(inferred, truth) if _is_tree(inferred) and _is_tree(truth) else None
    return EvalReport(fp + fn, precision, recall, tp, fp, fn, ted)
