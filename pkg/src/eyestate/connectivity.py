"""Channel correlation matrices, thresholded graphs and cluster ordering."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import _io
from .exceptions import (DataError, DegenerateChannel, EmptySubset,
                         NotCentered, UnsupportedFormat)
from .recording import Recording

__all__ = ["CorrMatrix", "ChannelGraph", "correlation_matrix", "adjacency",
           "average_degree", "cluster_order", "export_graph", "import_graph"]


@dataclass(frozen=True, eq=False)
class CorrMatrix:
    labels: tuple[str, ...]
    values: np.ndarray

    def reorder(self, order) -> "CorrMatrix":
        order = list(order)
        return CorrMatrix(tuple(self.labels[i] for i in order),
                          self.values[np.ix_(order, order)])

    def to_csv(self, config: dict | None = None) -> str:
        rows = ([name] + [repr(float(v)) for v in row]
                for name, row in zip(self.labels, self.values))
        return _io.csv_text(rows, header=[""] + list(self.labels), config=config)


@dataclass(frozen=True, eq=False)
class ChannelGraph:
    labels: tuple[str, ...]
    tau: float
    adjacency: np.ndarray
    eye_state: str = "all"

    @property
    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(i.tolist(), j.tolist()))

    @property
    def n_edges(self) -> int:
        return int(np.triu(self.adjacency, k=1).sum())


def _state_mask(labels: np.ndarray, state_filter) -> np.ndarray:
    if state_filter in (None, "all"):
        return np.ones(labels.shape, dtype=bool)
    state = int(state_filter)
    if state not in (0, 1):
        raise DataError(f"state_filter must be 0, 1 or 'all', got {state_filter!r}")
    return labels == state


def _check_centered(values: np.ndarray, names) -> None:
    means = values.mean(axis=0)
    scale = np.maximum(1.0, np.abs(values).max(axis=0))
    bad = np.flatnonzero(np.abs(means) > 1e-9 * scale)
    if bad.size:
        raise NotCentered(
            f"channel {names[bad[0]]!r} has mean {means[bad[0]]:.3g}; center the recording first")


def correlation_matrix(rec: Recording, state_filter="all",
                       index_range: tuple[int, int] | None = None) -> CorrMatrix:
    """Correlation of channel pairs over timepoints matching ``state_filter``.

    Uses uncentred sums, ``sum(x*y) / sqrt(sum(x*x) * sum(y*y))``, which
    equals the Pearson coefficient only for zero-mean channels; the whole
    recording must therefore be centred beforehand. ``index_range``
    optionally restricts the computation to ``[start, stop)`` before the
    state filter is applied.
    """
    _check_centered(rec.values, rec.names)
    values, labels = rec.values, rec.labels
    if index_range is not None:
        start, stop = index_range
        values, labels = values[start:stop], labels[start:stop]
    sub = values[_state_mask(labels, state_filter)]
    if sub.shape[0] < 2:
        raise EmptySubset(f"state filter {state_filter!r} matches {sub.shape[0]} timepoints")

    sq = np.einsum("ij,ij->j", sub, sub)
    zero = np.flatnonzero(sq == 0)
    if zero.size:
        raise DegenerateChannel(f"channel {rec.names[zero[0]]!r} is all zero in the selected subset")
    C = sub.shape[1]
    R = np.empty((C, C))
    for i in range(C):
        R[i, i] = sq[i] / np.sqrt(sq[i] * sq[i])
        for j in range(i + 1, C):
            r = np.dot(sub[:, i], sub[:, j]) / np.sqrt(sq[i] * sq[j])
            R[i, j] = R[j, i] = r
    return CorrMatrix(rec.names, R)


def adjacency(corr: CorrMatrix, tau: float, eye_state="all") -> ChannelGraph:
    """Binary graph with an edge wherever ``C_ij >= tau`` off the diagonal."""
    if not -1 < tau < 1:
        raise DataError(f"tau must lie in (-1, 1), got {tau}")
    A = (corr.values >= tau).astype(np.int8)
    np.fill_diagonal(A, 0)
    A = np.minimum(A, A.T)
    return ChannelGraph(corr.labels, float(tau), A, str(eye_state))


def average_degree(g: ChannelGraph) -> float:
    return 2.0 * g.n_edges / len(g.labels)


def cluster_order(corr: CorrMatrix) -> list[int]:
    """Leaf order of average-linkage clustering on ``1 - C``.

    Clusters are numbered like SciPy's linkage: leaves ``0..C-1``, then one
    new id per merge. The closest pair is merged, ties going to the
    lexicographically lowest id pair, and the merged cluster lists the
    lower id's leaves first.
    """
    D = 1.0 - np.asarray(corr.values, dtype=np.float64)
    n = D.shape[0]
    members = {i: [i] for i in range(n)}
    dist = {(i, j): D[i, j] for i in range(n) for j in range(i + 1, n)}
    next_id = n
    while len(members) > 1:
        (a, b), _ = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        na, nb = len(members[a]), len(members[b])
        merged = members.pop(a) + members.pop(b)
        del dist[(a, b)]
        for c in members:
            da = dist.pop((min(a, c), max(a, c)))
            db = dist.pop((min(b, c), max(b, c)))
            dist[(c, next_id)] = (na * da + nb * db) / (na + nb)
        members[next_id] = merged
        next_id += 1
    return members.popitem()[1]


_FORMATS = ("edge-list", "dot")


def export_graph(g: ChannelGraph, fmt: str = "edge-list") -> bytes:
    """Serialize ``g`` as a whitespace edge list or Graphviz DOT.

    Edges are written once each, sorted by channel index pair. Node
    declarations are kept in the header so isolated channels survive a
    round trip through :func:`import_graph`.
    """
    fmt = fmt.lower()
    names = g.labels
    if fmt == "edge-list":
        lines = [f"# nodes: {' '.join(names)}",
                 f"# tau: {g.tau!r}",
                 f"# eye_state: {g.eye_state}"]
        lines += [f"{names[i]} {names[j]}" for i, j in g.edges]
    elif fmt == "dot":
        lines = ["graph eeg {",
                 f'  // tau: {g.tau!r}',
                 f'  // eye_state: {g.eye_state}']
        lines += [f'  "{n}";' for n in names]
        lines += [f'  "{names[i]}" -- "{names[j]}";' for i, j in g.edges]
        lines.append("}")
    else:
        raise UnsupportedFormat(f"graph format {fmt!r} not in {_FORMATS}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def import_graph(data: bytes, fmt: str = "edge-list") -> ChannelGraph:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    fmt = fmt.lower()
    meta = dict(re.findall(r"(?://|#)\s*(tau|eye_state|nodes):\s*(.*)", text))
    if fmt == "edge-list":
        names = meta["nodes"].split()
        pairs = [ln.split() for ln in text.splitlines()
                 if ln.strip() and not ln.startswith("#")]
    elif fmt == "dot":
        names = re.findall(r'^\s*"([^"]+)";\s*$', text, flags=re.M)
        pairs = re.findall(r'"([^"]+)"\s*--\s*"([^"]+)"', text)
    else:
        raise UnsupportedFormat(f"graph format {fmt!r} not in {_FORMATS}")
    pos = {n: k for k, n in enumerate(names)}
    A = np.zeros((len(names), len(names)), dtype=np.int8)
    for u, v in pairs:
        A[pos[u], pos[v]] = A[pos[v], pos[u]] = 1
    return ChannelGraph(tuple(names), float(meta["tau"]), A, meta["eye_state"].strip())
