"""Model files: JSON documents and Graphviz DOT."""
import json
import math
import os
import re
import tempfile

import numpy as np

from .capri import ProgressionModel
from .caprese import ROOT, ROOT_NAME, TreeModel
from .confidence import hypergeometric_overlap
from .dataset import DataError


def _finite(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def tree_to_dict(tree, m=None, seed=None):
    alpha = [None] * len(tree.labels)
    if m is not None:
        bits = m.bits
        for j, p in enumerate(tree.parent):
            rows = np.ones(bits.shape[0], bool) if p == ROOT else bits[:, p] == 1
            tot = int(rows.sum())
            alpha[j] = float(bits[rows, j].sum()) / tot if tot else 0.0
    nodes = [{"id": j, "label": lab, "kind": "event", "alpha": alpha[j]} for j, lab in enumerate(tree.labels)]
    edges = []
    for j, p in enumerate(tree.parent):
        score = tree.score[j] if tree.score else None
        edges.append({"from": ROOT_NAME if p == ROOT else tree.labels[p], "to": tree.labels[j],
                      "score": _finite(score)})
    edges.sort(key=lambda e: (e["from"], e["to"]))
    return {"type": "tree", "nodes": nodes, "edges": edges, "regularizer": None, "seed": seed}


def dag_to_dict(model, m=None, seed=None, npb=None):
    """Progression model document; confidence from the search space and data when known."""
    nodes = [{"id": j, "label": n, "kind": "event" if (not model.is_event or model.is_event[j]) else "pattern",
              "alpha": model.labeling[j]} for j, n in enumerate(model.names)]
    edges = []
    for i, j in sorted(model.edges, key=lambda e: (model.names[e[0]], model.names[e[1]])):
        conf = {}
        score = None
        if model.space is not None and (i, j) in model.space.edges:
            pe = model.space.edges[(i, j)]
            score = pe.lambda_pr
            conf["tp"] = pe.p_tp
            conf["pr"] = pe.p_pr
        if m is not None and i < m.n_events and j < m.n_events:
            try:
                conf["hg"] = hypergeometric_overlap(m, i, j)
            except DataError:
                pass
        if npb is not None:
            conf["npb"] = npb.get((model.names[i], model.names[j]), 0.0)
        edges.append({"from": model.names[i], "to": model.names[j], "score": _finite(score),
                      "confidence": conf})
    return {"type": "dag", "nodes": nodes, "edges": edges, "regularizer": model.regularizer,
            "score": _finite(model.score), "seed": seed}


def model_to_dict(model, m=None, seed=None, **kw):
    if isinstance(model, TreeModel):
        return tree_to_dict(model, m, seed)
    if isinstance(model, ProgressionModel):
        return dag_to_dict(model, m, seed, **kw)
    raise TypeError(f"cannot serialise {type(model).__name__}")


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_model(doc):
    """Parse a model or ground-truth document into something the evaluators accept.

    Trees come back as :class:`TreeModel`; everything else as a
    ``(nodes, edges)`` pair of label sets.
    """
    if isinstance(doc, str):
        doc = json.loads(doc)
    if "nodes" not in doc or "edges" not in doc:
        raise DataError("model document needs nodes and edges")
    labels = [n["label"] for n in sorted(doc["nodes"], key=lambda n: n["id"])]
    edges = [(e["from"], e["to"]) for e in doc["edges"]]
    kind = doc.get("type") or doc.get("kind")
    if kind in ("tree", "forest"):
        idx = {lab: i for i, lab in enumerate(labels)}
        parent = [ROOT] * len(labels)
        for a, b in edges:
            if b not in idx or (a != ROOT_NAME and a not in idx):
                raise DataError(f"edge {a}->{b} names an unknown node")
            parent[idx[b]] = ROOT if a == ROOT_NAME else idx[a]
        return TreeModel(tuple(labels), tuple(parent))
    return set(labels), {tuple(e) for e in edges}


# ---------------------------------------------------------------------------
# DOT


def _q(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(doc):
    lines = ["digraph model {"]
    for n in sorted(doc["nodes"], key=lambda n: n["id"]):
        shape = "box" if n.get("kind") == "pattern" else "ellipse"
        lines.append(f"  {_q(n['label'])} [shape={shape}];")
    if any(e["from"] == ROOT_NAME for e in doc["edges"]):
        lines.append(f"  {_q(ROOT_NAME)} [shape=point];")
    for e in doc["edges"]:
        conf = e.get("confidence") or {}
        primary = conf.get("npb", conf.get("pr", e.get("score")))
        attr = f" [label={_q(f'{primary:.4g}')}]" if primary is not None else ""
        lines.append(f"  {_q(e['from'])} -> {_q(e['to'])}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_QUOTED = r'"((?:[^"\\]|\\.)*)"'
_EDGE = re.compile(rf"^\s*{_QUOTED}\s*->\s*{_QUOTED}")
_NODE = re.compile(rf"^\s*{_QUOTED}\s*(\[|;)")


def _unq(s):
    return re.sub(r"\\(.)", r"\1", s)


def parse_dot(text):
    """Node labels and directed edges of a DOT file written by :func:`to_dot`."""
    nodes, edges = set(), set()
    for line in text.splitlines():
        em = _EDGE.match(line)
        if em:
            edges.add((_unq(em.group(1)), _unq(em.group(2))))
            continue
        nm = _NODE.match(line)
        if nm:
            nodes.add(_unq(nm.group(1)))
    nodes.discard(ROOT_NAME)
    return nodes, edges


def dot_to_model(text):
    """Like :func:`parse_dot`, but a graph with root edges and single parents becomes a tree."""
    nodes, edges = parse_dot(text)
    targets = [b for _, b in edges]
    if any(a == ROOT_NAME for a, _ in edges) and len(targets) == len(set(targets)) == len(nodes):
        labels = sorted(nodes)
        doc = {"type": "tree", "nodes": [{"id": i, "label": n} for i, n in enumerate(labels)],
               "edges": [{"from": a, "to": b} for a, b in edges]}
        return load_model(doc)
    return nodes, edges


# ---------------------------------------------------------------------------


def write_atomic(path, text):
    """Write through a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
