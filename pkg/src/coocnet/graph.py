"""Weighted undirected co-occurrence graph over CSR adjacency."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from . import _kernels
from .cooc import CoocMatrix, Vocabulary
from .exceptions import DataError


class CoGraph:
    """Immutable simple undirected graph with word labels and edge weights.

    Parameters
    ----------
    indptr, indices, weights : ndarray
        Symmetric CSR adjacency; neighbours of each node sorted by id.
    labels : sequence of str
        Word for every node id.
    vocab_ids : ndarray, optional
        Vocabulary id each node came from (identity when omitted).
    """

    def __init__(self, indptr, indices, weights, labels: Sequence[str], vocab_ids=None):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights)
        self.labels = tuple(labels)
        n = self.indptr.size - 1
        if len(self.labels) != n:
            raise ValueError("labels must match the node count")
        self.vocab_ids = (np.arange(n, dtype=np.int64) if vocab_ids is None
                          else np.asarray(vocab_ids, dtype=np.int64))
        for arr in (self.indptr, self.indices, self.weights, self.vocab_ids):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple], labels: Sequence[str] | None = None):
        """Build from ``(i, j)`` or ``(i, j, w)`` tuples; duplicates are an error."""
        rows, cols, ws = [], [], []
        seen = set()
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = e[2] if len(e) > 2 else 1
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"parallel edge {key}")
            seen.add(key)
            rows.append(key[0])
            cols.append(key[1])
            ws.append(w)
        weights = np.asarray(ws) if ws else np.empty(0, np.int64)
        if weights.dtype.kind not in "iuf":
            weights = weights.astype(np.float64)
        labels = [str(i) for i in range(n)] if labels is None else labels
        return _from_upper(n, np.asarray(rows, np.int64), np.asarray(cols, np.int64),
                           weights, labels)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    @property
    def m(self) -> int:
        return self.indices.size // 2

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def strength(self) -> np.ndarray:
        """Weighted degree of every node."""
        owner = np.repeat(np.arange(self.n), self.degree())
        out = np.bincount(owner, weights=self.weights, minlength=self.n)
        return out.astype(self.weights.dtype) if self.weights.dtype.kind in "iu" else out

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def weight(self, i: int, j: int):
        nbrs = self.neighbors(i)
        pos = np.searchsorted(nbrs, j)
        if pos < nbrs.size and nbrs[pos] == j:
            return self.weights[self.indptr[i] + pos].item()
        return 0

    def edges(self) -> Iterator[tuple[int, int, object]]:
        """Edges ``(i, j, w)`` with ``i < j`` in ``(i, j)`` order."""
        ip, idx, w = self.indptr, self.indices.tolist(), self.weights.tolist()
        for i in range(self.n):
            for p in range(ip[i], ip[i + 1]):
                j = idx[p]
                if j > i:
                    yield i, j, w[p]

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(self.n, self.n))

    def subgraph(self, nodes: Sequence[int]) -> "CoGraph":
        """Induced subgraph; node ids renumbered in the given order."""
        nodes = np.asarray(nodes, dtype=np.int64)
        sub = self.to_scipy()[nodes][:, nodes].tocsr()
        sub.sort_indices()
        return CoGraph(sub.indptr, sub.indices, sub.data, [self.labels[i] for i in nodes],
                       self.vocab_ids[nodes])

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoGraph):
            return NotImplemented
        return (self.labels == other.labels and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.weights, other.weights))

    def __repr__(self) -> str:
        return f"CoGraph(n={self.n}, m={self.m})"


def _from_upper(n, rows, cols, weights, labels, vocab_ids=None) -> CoGraph:
    r = np.concatenate([rows, cols])
    c = np.concatenate([cols, rows])
    w = np.concatenate([weights, weights])
    order = np.lexsort((c, r))
    r, c, w = r[order], c[order], w[order]
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(r, minlength=n), out=indptr[1:])
    return CoGraph(indptr, c, w, labels, vocab_ids)


def from_matrix(m: CoocMatrix, vocab: Vocabulary, tau: int = 1,
                drop_isolated: bool = False) -> CoGraph:
    """Keep pairs with weight >= ``tau`` as edges.

    Vocabulary words left without edges stay as degree-0 nodes unless
    ``drop_isolated``; surviving nodes keep vocabulary order.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if m.size != len(vocab):
        raise DataError("matrix size does not match the vocabulary")
    keep = m.weights >= tau
    rows, cols, w = m.rows[keep], m.cols[keep], m.weights[keep]
    if drop_isolated:
        present = np.zeros(m.size, bool)
        present[rows] = True
        present[cols] = True
        vocab_ids = np.flatnonzero(present)
        remap = np.full(m.size, -1, np.int64)
        remap[vocab_ids] = np.arange(vocab_ids.size)
        rows, cols = remap[rows], remap[cols]
    else:
        vocab_ids = np.arange(m.size, dtype=np.int64)
    words = vocab.words
    labels = [words[i] for i in vocab_ids.tolist()]
    return _from_upper(vocab_ids.size, rows, cols, w, labels, vocab_ids)


@dataclass(frozen=True)
class ComponentIndex:
    labels: np.ndarray
    sizes: np.ndarray
    largest: int

    @property
    def count(self) -> int:
        return int(self.sizes.size)

    def members(self, comp: int) -> np.ndarray:
        return np.flatnonzero(self.labels == comp)


def connected_components(g: CoGraph) -> ComponentIndex:
    """Label components in order of their smallest node id.

    Component 0 contains node 0, so among equally large components the one
    holding the smallest node id is reported as ``largest``.
    """
    if g.n == 0:
        return ComponentIndex(np.empty(0, np.int64), np.empty(0, np.int64), -1)
    _, raw = csgraph.connected_components(g.to_scipy(), directed=False)
    _, first = np.unique(raw, return_index=True)
    relabel = np.empty(first.size, np.int64)
    relabel[np.argsort(first, kind="stable")] = np.arange(first.size)
    labels = relabel[raw]
    sizes = np.bincount(labels)
    return ComponentIndex(labels, sizes, int(np.argmax(sizes)))


def bfs_distances(g: CoGraph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes are ``inf``."""
    if not (0 <= source < g.n):
        raise IndexError(f"node {source} out of range for n={g.n}")
    dist = np.empty(g.n, np.int64)
    _kernels.bfs_distances(g.indptr, g.indices, int(source), dist)
    out = dist.astype(np.float64)
    out[dist < 0] = np.inf
    return out


# -- validation --------------------------------------------------------------

def check_graph(X, labels: Sequence[str] | None = None) -> CoGraph:
    """Accept a :class:`CoGraph` or a square symmetric adjacency matrix.

    Dense arrays and scipy sparse matrices are converted; the diagonal must
    be zero and weights non-negative (zeros are not edges).
    """
    if isinstance(X, CoGraph):
        return X
    A = sp.csr_matrix(X) if not sp.issparse(X) else X.tocsr()
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {A.shape}")
    A = A.copy()
    A.eliminate_zeros()
    if A.diagonal().any():
        raise ValueError("adjacency must have a zero diagonal")
    if A.nnz and A.data.min() < 0:
        raise ValueError("adjacency weights must be non-negative")
    if (A != A.T).nnz:
        raise ValueError("adjacency must be symmetric")
    if A.nnz and not np.isfinite(A.data).all():
        raise ValueError("adjacency weights must be finite")
    upper = sp.triu(A, k=1).tocoo()
    n = A.shape[0]
    labels = [str(i) for i in range(n)] if labels is None else list(labels)
    if len(labels) != n:
        raise ValueError("labels must match the adjacency size")
    w = upper.data
    if w.dtype.kind == "f" and np.all(w == np.round(w)):
        w = w.astype(np.int64)
    return _from_upper(n, upper.row.astype(np.int64), upper.col.astype(np.int64), w, labels)


# -- serialization -----------------------------------------------------------

def write_graph(g: CoGraph, path: str | Path) -> None:
    """Plain JSON checkpoint of a graph (nodes, vocabulary ids, edges)."""
    kind = "int" if g.weights.dtype.kind in "iu" else "float"
    doc = {
        "format": "coocnet-graph",
        "version": 1,
        "n": g.n,
        "m": g.m,
        "weight_type": kind,
        "nodes": [[i, g.labels[i], int(v)] for i, v in enumerate(g.vocab_ids.tolist())],
        "edges": [[i, j, w] for i, j, w in g.edges()],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def read_graph(path: str | Path) -> CoGraph:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not a graph checkpoint ({exc.msg})", exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("format") != "coocnet-graph":
        raise DataError(f"{path}: not a graph checkpoint")
    try:
        nodes = doc["nodes"]
        n = len(nodes)
        labels = [nd[1] for nd in nodes]
        vocab_ids = [nd[2] for nd in nodes]
        if [nd[0] for nd in nodes] != list(range(n)):
            raise DataError(f"{path}: node ids must be 0..n-1 in order")
        dtype = np.int64 if doc.get("weight_type") == "int" else np.float64
        edges = doc["edges"]
        rows = np.array([e[0] for e in edges], np.int64)
        cols = np.array([e[1] for e in edges], np.int64)
        w = np.array([e[2] for e in edges], dtype)
    except (KeyError, IndexError, TypeError) as exc:
        raise DataError(f"{path}: malformed graph checkpoint ({exc})") from None
    if rows.size and (np.any(rows >= cols) or rows.min() < 0 or cols.max() >= n):
        raise DataError(f"{path}: edges must satisfy 0 <= i < j < n")
    if np.unique(rows * max(n, 1) + cols).size != rows.size:
        raise DataError(f"{path}: parallel edges")
    return _from_upper(n, rows, cols, w, labels, vocab_ids)


def write_edge_list(g: CoGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("word_i", "word_j", "weight"))
        for i, j, w in g.edges():
            writer.writerow((g.labels[i], g.labels[j], w))


def write_node_list(g: CoGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("id", "word", "degree"))
        for i, d in enumerate(g.degree().tolist()):
            writer.writerow((i, g.labels[i], d))
