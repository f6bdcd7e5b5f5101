"""Louvain community detection and Newman-Girvan modularity."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from . import _kernels
from .exceptions import DataError
from .graph import CoGraph, check_graph
from .metrics import CentralityVector

MIN_GAIN = 1e-7
MAX_SWEEPS = 1000


@dataclass(frozen=True)
class Partition:
    assignment: np.ndarray
    modularity: float
    levels: tuple[float, ...] = field(default=())

    @property
    def count(self) -> int:
        return int(self.assignment.max()) + 1 if self.assignment.size else 0

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.count)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == c)


def dense_labels(assignment: Sequence[int]) -> np.ndarray:
    """Renumber community ids to ``0..k-1`` in order of first appearance."""
    a = np.asarray(assignment, dtype=np.int64)
    if a.size == 0:
        return a
    _, first, inv = np.unique(a, return_index=True, return_inverse=True)
    rank = np.empty(first.size, np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inv]


def _edge_weights(g: CoGraph, weighted: bool) -> np.ndarray:
    return g.weights.astype(np.float64) if weighted else np.ones(g.indices.size)


def modularity(g: CoGraph, assignment: Sequence[int], resolution: float = 1.0,
               weighted: bool = True) -> float:
    r"""Newman-Girvan modularity of a partition.

    .. math::

        Q = \sum_c \left[ \frac{w_c}{W} - \gamma \left(\frac{s_c}{2W}\right)^2 \right]

    with ``W`` the total edge weight, ``w_c`` the weight inside community
    ``c`` and ``s_c`` the summed weighted degree of its nodes. Returns NaN
    for a graph without edges.
    """
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (g.n,):
        raise ValueError("assignment must give a community for every node")
    if g.m == 0:
        return math.nan
    w = _edge_weights(g, weighted)
    owner = np.repeat(np.arange(g.n), g.degree())
    two_w = w.sum()
    inside = a[owner] == a[g.indices]
    k = max(int(a.max()) + 1, 1) if a.size else 1
    s_c = np.bincount(a[owner], weights=w, minlength=k)
    w_c2 = np.bincount(a[owner][inside], weights=w[inside], minlength=k)  # 2 * w_c
    return float(w_c2.sum() / two_w - resolution * ((s_c / two_w) ** 2).sum())


def _aggregate(A: sp.csr_matrix, comm: np.ndarray) -> sp.csr_matrix:
    k = int(comm.max()) + 1
    P = sp.csr_matrix((np.ones(comm.size), (np.arange(comm.size), comm)), shape=(comm.size, k))
    B = (P.T @ A @ P).tocsr()
    B.sort_indices()
    return B


def _local_moves(A: sp.csr_matrix, init: np.ndarray, rng, resolution: float, m2: float,
                 allow_isolate: bool):
    degree = np.asarray(A.sum(axis=1)).ravel()
    order = rng.permutation(A.shape[0]).astype(np.int64)
    return _kernels.louvain_local_moves(
        A.indptr.astype(np.int64), A.indices.astype(np.int64), A.data.astype(np.float64),
        degree, order, float(resolution), m2, MAX_SWEEPS, init.astype(np.int64),
        allow_isolate)


def louvain(g: CoGraph, seed: int = 42, resolution: float = 1.0,
            weighted: bool = True, min_gain: float = MIN_GAIN) -> Partition:
    """Two-phase Louvain modularity maximisation.

    Nodes are visited in an order shuffled by ``seed``; each is moved to the
    neighbouring community with the largest strictly positive gain (ties go
    to the lowest community id). Communities are then collapsed into nodes
    and the process repeats until a level gains less than ``min_gain``.
    """
    if g.m == 0:
        raise ValueError("louvain needs a graph with at least one edge")
    rng = np.random.default_rng(seed)
    A = sp.csr_matrix((_edge_weights(g, weighted), g.indices, g.indptr), shape=(g.n, g.n))
    m2 = float(A.sum())
    assignment = np.arange(g.n, dtype=np.int64)
    q = modularity(g, assignment, resolution, weighted)
    levels = [q]
    while True:
        comm, moves = _local_moves(A, np.arange(A.shape[0]), rng, resolution, m2, False)
        if moves == 0:
            break
        comm = dense_labels(comm)
        candidate = comm[assignment]
        q_new = modularity(g, candidate, resolution, weighted)
        if q_new < q - 1e-12:
            raise RuntimeError(f"modularity decreased across a level ({q} -> {q_new})")
        gain = q_new - q
        assignment, q = candidate, q_new
        levels.append(q)
        if gain < min_gain:
            break
        A = _aggregate(A, comm)
    assignment = dense_labels(assignment)
    return Partition(assignment, modularity(g, assignment, resolution, weighted), tuple(levels))


class LouvainCommunities(ClusterMixin, BaseEstimator):
    """Louvain clustering of a co-occurrence graph or adjacency matrix.

    Parameters
    ----------
    random_state : int, default=42
        Seed for the node visiting order.
    resolution : float, default=1.0
    weighted : bool, default=True
        Use edge weights; otherwise every edge counts 1.

    Attributes
    ----------
    labels_ : ndarray of shape (n_nodes,)
    modularity_ : float
    level_modularity_ : tuple of float
    """

    def __init__(self, random_state=42, resolution=1.0, weighted=True):
        self.random_state = random_state
        self.resolution = resolution
        self.weighted = weighted

    def fit(self, X, y=None):
        g = check_graph(X)
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        p = louvain(g, seed=self.random_state, resolution=self.resolution,
                    weighted=self.weighted)
        self.partition_ = p
        self.labels_ = p.assignment
        self.modularity_ = p.modularity
        self.level_modularity_ = p.levels
        self.n_features_in_ = g.n
        return self

    def score(self, X, y=None) -> float:
        check_is_fitted(self, "labels_")
        return modularity(check_graph(X), self.labels_, self.resolution, self.weighted)


def community_keywords(g: CoGraph, p: Partition, centrality: CentralityVector,
                       k: int) -> list[list[str]]:
    """Top ``k`` member words of every community by ``centrality``.

    Ties are broken by ascending word (code-point order).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out = []
    vals = centrality.values
    for c in range(p.count):
        members = p.members(c).tolist()
        members.sort(key=lambda i: (-vals[i], g.labels[i]))
        out.append([g.labels[i] for i in members[:k]])
    return out


def write_partition_csv(g: CoGraph, p: Partition, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("word", "community_id"))
        for word, c in zip(g.labels, p.assignment.tolist()):
            writer.writerow((word, c))


def read_partition_csv(path, g: CoGraph) -> np.ndarray:
    """Community id of every node of ``g``, read from ``word,community_id`` rows."""
    index = {w: i for i, w in enumerate(g.labels)}
    out = np.full(g.n, -1, np.int64)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["word", "community_id"]:
            raise DataError(f"{path}: header must be word,community_id", 1)
        for row in reader:
            if len(row) != 2 or row[0] not in index:
                raise DataError(f"{path}: unknown word or bad row", reader.line_num)
            try:
                out[index[row[0]]] = int(row[1])
            except ValueError:
                raise DataError(f"{path}: community id must be an integer",
                                reader.line_num) from None
    if (out < 0).any():
        raise DataError(f"{path}: partition does not cover every node")
    return out
