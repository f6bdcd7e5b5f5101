"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports from coocnet; graphs are plain adjacency dicts.
"""

from __future__ import annotations

import itertools
import random
from collections import deque


def adjacency(n, edges):
    adj = {i: set() for i in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def random_graph(n, p, rng: random.Random):
    return [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]


def bfs(adj, s):
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def all_shortest_paths(adj, s, t, dist_s):
    """Every shortest s-t path, by expanding the BFS predecessor DAG from t."""
    if t not in dist_s:
        return []
    out = []

    def walk(v, tail):
        if v == s:
            out.append([s] + tail)
            return
        for u in adj[v]:
            if dist_s.get(u) == dist_s[v] - 1:
                walk(u, [v] + tail)

    walk(t, [])
    return out


def naive_betweenness(n, edges, normalized=True):
    adj = adjacency(n, edges)
    dists = {s: bfs(adj, s) for s in range(n)}
    b = [0.0] * n
    for s, t in itertools.combinations(range(n), 2):
        paths = all_shortest_paths(adj, s, t, dists[s])
        if not paths:
            continue
        for path in paths:
            for v in path[1:-1]:
                b[v] += 1.0 / len(paths)
    if normalized and n > 2:
        scale = (n - 1) * (n - 2) / 2
        b = [x / scale for x in b]
    return b


def naive_closeness(n, edges):
    """Closeness with component scaling: ((r-1)/sum d) * ((r-1)/(n-1))."""
    adj = adjacency(n, edges)
    out = []
    for s in range(n):
        d = bfs(adj, s)
        total = sum(d.values())
        r = len(d)
        if total == 0 or n < 2:
            out.append(0.0)
        else:
            out.append(((r - 1) / total) * ((r - 1) / (n - 1)))
    return out


def naive_modularity(n, wedges, assignment, resolution=1.0):
    """Q from the definition, summing over node pairs ``A_ij - k_i k_j / 2W``."""
    A = [[0.0] * n for _ in range(n)]
    for u, v, w in wedges:
        A[u][v] += w
        A[v][u] += w
    k = [sum(row) for row in A]
    two_w = sum(k)
    q = 0.0
    for i in range(n):
        for j in range(n):
            if assignment[i] == assignment[j]:
                q += A[i][j] - resolution * k[i] * k[j] / two_w
    return q / two_w


def set_partitions(n):
    """All partitions of ``range(n)`` as restricted growth strings."""
    a = [0] * n

    def rec(i, top):
        if i == n:
            yield tuple(a)
            return
        for c in range(top + 2):
            a[i] = c
            yield from rec(i + 1, max(top, c))

    if n == 0:
        yield ()
        return
    yield from rec(1, 0)


def best_modularity(n, wedges):
    return max(naive_modularity(n, wedges, p) for p in set_partitions(n))


def brute_cooc(docs):
    """``{(a, b): number of docs containing both}`` over word pairs, a < b."""
    sets = [set(d) for d in docs]
    words = sorted(set().union(*sets)) if sets else []
    out = {}
    for a, b in itertools.combinations(words, 2):
        c = sum(1 for s in sets if a in s and b in s)
        if c:
            out[(a, b)] = c
    return out


def brute_cooc_tf(docs, mode):
    out = {}
    for d in docs:
        tf = {}
        for t in d:
            tf[t] = tf.get(t, 0) + 1
        for a, b in itertools.combinations(sorted(tf), 2):
            w = min(tf[a], tf[b]) if mode == "pair_min" else tf[a] * tf[b]
            out[(a, b)] = out.get((a, b), 0) + w
    return out
