"""Compiled graph kernels over CSR adjacency (``indptr``, ``indices``).

Parallel loops only ever write to slots owned by one iteration, and
floating-point reductions happen in a fixed order afterwards, so results do
not depend on the number of threads.
"""

import numba
import numpy as np
from numba import njit, prange

if numba.config.THREADING_LAYER == "default":
    # the bundled TBB may be too old; OpenMP ships with numba's wheels
    numba.config.THREADING_LAYER = "omp"

# number of source chunks; fixed so the summation order never changes
BRANDES_CHUNKS = 64


@njit(cache=True)
def bfs_distances(indptr, indices, source, dist):
    """Hop distances from ``source`` into ``dist`` (-1 = unreachable)."""
    n = indptr.size - 1
    for v in range(n):
        dist[v] = -1
    queue = np.empty(n, np.int64)
    dist[source] = 0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if dist[w] < 0:
                dist[w] = dv
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True, parallel=True)
def bfs_summary(indptr, indices, sources):
    """Per source: reachable count (incl. itself), distance sum, eccentricity."""
    n = indptr.size - 1
    ns = sources.size
    reach = np.zeros(ns, np.int64)
    total = np.zeros(ns, np.int64)
    ecc = np.zeros(ns, np.int64)
    n_chunks = min(ns, BRANDES_CHUNKS)
    for c in prange(n_chunks):
        dist = np.full(n, -1, np.int64)
        queue = np.empty(n, np.int64)
        for k in range(c, ns, n_chunks):
            s = sources[k]
            dist[s] = 0
            queue[0] = s
            head, tail = 0, 1
            acc = 0
            far = 0
            while head < tail:
                v = queue[head]
                head += 1
                dv = dist[v]
                acc += dv
                if dv > far:
                    far = dv
                for p in range(indptr[v], indptr[v + 1]):
                    w = indices[p]
                    if dist[w] < 0:
                        dist[w] = dv + 1
                        queue[tail] = w
                        tail += 1
            reach[k] = tail
            total[k] = acc
            ecc[k] = far
            for q in range(tail):
                dist[queue[q]] = -1
    return reach, total, ecc


@njit(cache=True, parallel=True)
def brandes_partials(indptr, indices):
    """Brandes dependency sums, one row per chunk of sources.

    Row ``c`` accumulates sources ``c, c + C, c + 2C, ...`` sequentially.
    Values count ordered pairs; halve for undirected betweenness.
    """
    n = indptr.size - 1
    n_chunks = min(n, BRANDES_CHUNKS)
    partial = np.zeros((max(n_chunks, 1), n), np.float64)
    for c in prange(n_chunks):
        dist = np.full(n, -1, np.int64)
        sigma = np.zeros(n, np.float64)
        delta = np.zeros(n, np.float64)
        order = np.empty(n, np.int64)
        row = partial[c]
        for s in range(c, n, n_chunks):
            dist[s] = 0
            sigma[s] = 1.0
            order[0] = s
            head, tail = 0, 1
            while head < tail:
                v = order[head]
                head += 1
                dv = dist[v] + 1
                sv = sigma[v]
                for p in range(indptr[v], indptr[v + 1]):
                    w = indices[p]
                    if dist[w] < 0:
                        dist[w] = dv
                        order[tail] = w
                        tail += 1
                    if dist[w] == dv:
                        sigma[w] += sv
            # reverse BFS order: successors are exactly neighbours one hop further
            for q in range(tail - 1, -1, -1):
                v = order[q]
                dv = dist[v] + 1
                acc = 0.0
                for p in range(indptr[v], indptr[v + 1]):
                    w = indices[p]
                    if dist[w] == dv:
                        acc += (1.0 + delta[w]) / sigma[w]
                delta[v] = sigma[v] * acc
                if v != s:
                    row[v] += delta[v]
            for q in range(tail):
                v = order[q]
                dist[v] = -1
                sigma[v] = 0.0
                delta[v] = 0.0
    return partial


def set_threads(workers):
    """Clamp and apply the numba thread count; returns the count used."""
    workers = max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(workers)
    return workers


@njit(cache=True)
def louvain_local_moves(indptr, indices, weights, degree, order, resolution, m2, max_sweeps,
                        init, allow_isolate):
    """Greedy modularity local moving on one level, starting from ``init``.

    ``degree`` includes self-loop weight twice (row sums of a symmetric
    adjacency whose diagonal stores twice the internal weight). Among equal
    gains the current community is kept, otherwise the lowest id wins. With
    ``allow_isolate`` a node may also leave for an empty community when that
    strictly beats every other option.
    Returns the community of every node and the number of moves made.
    """
    n = indptr.size - 1
    comm = init.copy()
    tot = np.zeros(n, np.float64)
    size = np.zeros(n, np.int64)
    for i in range(n):
        tot[comm[i]] += degree[i]
        size[comm[i]] += 1
    free = np.empty(n, np.int64)
    n_free = 0
    for c in range(n - 1, -1, -1):  # popped lowest id first
        if size[c] == 0:
            free[n_free] = c
            n_free += 1
    link = np.zeros(n, np.float64)
    touched = np.empty(n, np.int64)
    moves = 0
    for _ in range(max_sweeps):
        moved = 0
        for idx in range(order.size):
            i = order[idx]
            ci = comm[i]
            ki = degree[i]
            n_t = 0
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if j == i:
                    continue
                cj = comm[j]
                if link[cj] == 0.0:
                    touched[n_t] = cj
                    n_t += 1
                link[cj] += weights[p]
            tot[ci] -= ki
            size[ci] -= 1
            scale = resolution * ki / m2
            stay_gain = link[ci] - tot[ci] * scale
            best = -1
            best_gain = -np.inf
            for t in range(n_t):
                c = touched[t]
                if c == ci:
                    continue
                gain = link[c] - tot[c] * scale
                if gain > best_gain or (gain == best_gain and c < best):
                    best = c
                    best_gain = gain
            for t in range(n_t):
                link[touched[t]] = 0.0
            if best < 0 or best_gain <= stay_gain:
                best = ci
                best_gain = stay_gain
            if allow_isolate and size[ci] > 0 and best_gain < 0.0 and n_free > 0:
                n_free -= 1
                best = free[n_free]
            tot[best] += ki
            size[best] += 1
            if best != ci:
                comm[i] = best
                moved += 1
                if size[ci] == 0:
                    free[n_free] = ci
                    n_free += 1
        moves += moved
        if moved == 0:
            break
    return comm, moves
