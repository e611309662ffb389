"""Binary event matrices and the empirical probabilities computed from them."""
import csv
import io
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Input data violates a structural or statistical precondition."""


@dataclass(frozen=True)
class EventMeta:
    label: str
    kind: str = "event"

    @property
    def key(self):
        return f"{self.kind}:{self.label}"

    def __str__(self):
        return self.label if self.kind == "event" else self.key


@dataclass(frozen=True, eq=False)
class GenotypeMatrix:
    """An ``m x n`` 0/1 matrix: rows are samples, columns are events.

    The bit grid is stored as a read-only ``uint8`` array and is never
    mutated after construction.
    """

    samples: tuple
    events: tuple
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.int64, copy=True)
        if bits.ndim != 2:
            raise DataError("bits must be a 2-d grid")
        if bits.shape[0] < 1 or bits.shape[1] < 1:
            raise DataError("empty matrix")
        if not np.isin(bits, (0, 1)).all():
            raise DataError("non-binary cell")
        bits = bits.astype(np.uint8)
        bits.setflags(write=False)
        events = tuple(e if isinstance(e, EventMeta) else EventMeta(str(e)) for e in self.events)
        samples = tuple(str(s) for s in self.samples)
        if len(events) != bits.shape[1] or len(samples) != bits.shape[0]:
            raise DataError("metadata does not match bit grid shape")
        if any(not e.label for e in events):
            raise DataError("event label must be nonempty")
        if len({(e.label, e.kind) for e in events}) != len(events):
            raise DataError("duplicate header labels")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_array(cls, bits, labels=None, samples=None):
        bits = np.asarray(bits)
        if bits.ndim != 2 or bits.size == 0:
            raise DataError("empty matrix")
        m, n = bits.shape
        if labels is None:
            labels = [f"e{i}" for i in range(n)]
        if samples is None:
            samples = [f"s{r}" for r in range(m)]
        events = [lab if isinstance(lab, EventMeta) else _parse_header(lab) for lab in labels]
        return cls(tuple(samples), tuple(events), bits)

    @property
    def n_samples(self):
        return self.bits.shape[0]

    @property
    def n_events(self):
        return self.bits.shape[1]

    @property
    def labels(self):
        return [str(e) for e in self.events]

    def index(self, name):
        """Resolve an event id, ``"kind:label"`` key or bare label to a column index."""
        if isinstance(name, (int, np.integer)):
            if not 0 <= name < self.n_events:
                raise DataError(f"unknown event {name}")
            return int(name)
        for i, e in enumerate(self.events):
            if name == e.key or name == str(e):
                return i
        hits = [i for i, e in enumerate(self.events) if e.label == name]
        if len(hits) == 1:
            return hits[0]
        if hits:
            raise DataError(f"ambiguous event label {name!r}")
        raise DataError(f"unknown event {name!r}")

    def column(self, e):
        return self.bits[:, self.index(e)]

    def take_events(self, idx):
        idx = list(idx)
        return GenotypeMatrix(self.samples, tuple(self.events[i] for i in idx), self.bits[:, idx])

    def take_rows(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        return GenotypeMatrix(tuple(self.samples[r] for r in rows), self.events, self.bits[rows])

    def to_csv(self, delimiter=","):
        out = io.StringIO()
        w = csv.writer(out, delimiter=delimiter, lineterminator="\n")
        w.writerow(["id"] + [e.key if e.kind != "event" else e.label for e in self.events])
        for s, row in zip(self.samples, self.bits):
            w.writerow([s] + [str(int(v)) for v in row])
        return out.getvalue()


@dataclass(frozen=True)
class ConsolidationReport:
    degenerate: tuple = ()
    duplicates: tuple = ()
    duplicate_samples: tuple = ()

    @property
    def ok(self):
        """True when no event is degenerate or duplicated (samples don't count)."""
        return not self.degenerate and not self.duplicates

    def to_dict(self, matrix=None):
        name = (lambda i: matrix.labels[i]) if matrix is not None else (lambda i: i)
        return {
            "degenerate": [{"event": name(i), "probability": p} for i, p in self.degenerate],
            "duplicates": [[name(i) for i in g] for g in self.duplicates],
            "duplicate_samples": [list(g) for g in self.duplicate_samples],
        }


def _parse_header(text):
    text = text.strip()
    if ":" in text:
        kind, label = text.split(":", 1)
        return EventMeta(label.strip(), kind.strip() or "event")
    return EventMeta(text, "event")


def import_matrix(text, fmt="csv"):
    """Parse a CSV/TSV genotype table.

    The header's first cell names the sample-id column; the remaining cells are
    event labels written ``kind:label`` or as a bare label.
    """
    if fmt not in ("csv", "tsv"):
        raise DataError(f"unsupported format {fmt!r}")
    if not isinstance(text, str):
        text = text.read()
    rows = [r for r in csv.reader(io.StringIO(text), delimiter="," if fmt == "csv" else "\t") if r]
    if len(rows) < 2 or len(rows[0]) < 2:
        raise DataError("empty matrix")
    header, body = rows[0], rows[1:]
    events = [_parse_header(h) for h in header[1:]]
    if len({(e.label, e.kind) for e in events}) != len(events):
        raise DataError("duplicate header labels")
    bits = np.zeros((len(body), len(events)), dtype=np.uint8)
    for r, row in enumerate(body):
        if len(row) != len(header):
            raise DataError(f"ragged row {r + 1}: expected {len(header)} cells, got {len(row)}")
        for c, cell in enumerate(row[1:]):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise DataError(f"non-binary cell {cell!r} at row {r + 1}, column {c + 1}")
            bits[r, c] = cell == "1"
    return GenotypeMatrix(tuple(row[0] for row in body), tuple(events), bits)


def marginal(m, e):
    col = m.column(e)
    return int(col.sum()) / m.n_samples


def joint(m, e1, e2):
    a, b = m.column(e1), m.column(e2)
    return int((a & b).sum()) / m.n_samples


def conditional(m, e, given, given_negated=False):
    """P(e | given), or P(e | not given) when ``given_negated``."""
    x, g = m.column(e), m.column(given)
    if given_negated:
        g = 1 - g
    den = int(g.sum())
    if den == 0:
        raise DataError("undefined conditional: conditioning event has empty support")
    return int((x & g).sum()) / den


def counts(bits):
    """Marginal counts and pairwise co-occurrence counts of a 0/1 grid."""
    b = np.asarray(bits, dtype=np.int64)
    j = b.T @ b
    return np.diag(j).copy(), j


def consolidate(m):
    bits = m.bits
    c = bits.sum(axis=0)
    degenerate = tuple((i, float(c[i] // m.n_samples)) for i in range(m.n_events) if c[i] in (0, m.n_samples))

    groups = {}
    for i in range(m.n_events):
        groups.setdefault(bits[:, i].tobytes(), []).append(i)
    duplicates = tuple(tuple(g) for g in groups.values() if len(g) > 1)

    rows = {}
    for r in range(m.n_samples):
        rows.setdefault(bits[r].tobytes(), []).append(m.samples[r])
    dup_samples = tuple(tuple(g) for g in rows.values() if len(g) > 1)
    return ConsolidationReport(degenerate, duplicates, dup_samples)


def require_consolidated(m):
    rep = consolidate(m)
    if rep.degenerate:
        names = ", ".join(m.labels[i] for i, _ in rep.degenerate)
        raise DataError(f"degenerate events (probability 0 or 1): {names}")
    if rep.duplicates:
        names = "; ".join(",".join(m.labels[i] for i in g) for g in rep.duplicates)
        raise DataError(f"indistinguishable events: {names}")
    return m


def select_events(m, min_freq=0.0, keep=()):
    if not 0.0 <= min_freq <= 1.0:
        raise DataError("min_freq must lie in [0, 1]")
    keep = set(keep)
    freq = m.bits.sum(axis=0) / m.n_samples
    idx = [i for i, e in enumerate(m.events) if freq[i] >= min_freq or e.label in keep or e.key in keep]
    if not idx:
        raise DataError("selection leaves zero events")
    return m.take_events(idx)
