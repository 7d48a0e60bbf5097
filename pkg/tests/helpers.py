"""Shared brute-force oracles and graph builders for the test suite.

Every oracle here is deliberately naive and independent of the library code
paths it checks.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from topoforce.graph import Graph
from topoforce.rng import XorShift64Star


def graph_from_edges(n, edges, weights=None):
    canon = tuple((u, v) if u < v else (v, u) for u, v in edges)
    return Graph(n, canon, None if weights is None else tuple(weights))


def floyd_warshall_oracle(g: Graph) -> np.ndarray:
    """O(N^3) hop distances; unreachable = n (matching DistanceMatrix)."""
    n = g.n
    big = float("inf")
    d = [[0 if i == j else big for j in range(n)] for i in range(n)]
    for u, v in g.edges:
        d[u][v] = 1
        d[v][u] = 1
    for k in range(n):
        for i in range(n):
            dik = d[i][k]
            if dik == big:
                continue
            for j in range(n):
                if dik + d[k][j] < d[i][j]:
                    d[i][j] = dik + d[k][j]
    return np.array([[n if x == big else int(x) for x in row] for row in d], dtype=np.int64)


def jaccard_oracle(g: Graph, closed=True):
    """Direct closed/open neighborhood set computation per edge."""
    hoods = []
    for i in range(g.n):
        h = {v for (u, v) in g.edges if u == i} | {u for (u, v) in g.edges if v == i}
        if closed:
            h.add(i)
        hoods.append(h)
    out = []
    for u, v in g.edges:
        union = hoods[u] | hoods[v]
        out.append(len(hoods[u] & hoods[v]) / len(union) if union else 0.0)
    return out


def threshold_sweep_h0_oracle(g: Graph) -> list[float]:
    """H0 death multiset by sweeping distinct weights descending and counting
    union-find merges when each weight class is added."""
    assert g.weights is not None
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    deaths = []
    for w in sorted(set(g.weights), reverse=True):
        for (u, v), we in zip(g.edges, g.weights):
            if we == w:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
                    deaths.append(w)
    return sorted(deaths)


def connected_components_oracle(g: Graph) -> list[set[int]]:
    comps = []
    seen = set()
    adj = {i: set() for i in range(g.n)}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    for s in range(g.n):
        if s in seen:
            continue
        comp, stack = set(), [s]
        while stack:
            u = stack.pop()
            if u in comp:
                continue
            comp.add(u)
            stack.extend(adj[u] - comp)
        seen |= comp
        comps.append(comp)
    return comps


def spanning_forest_max_weight_oracle(g: Graph) -> float:
    """Exhaustive max total weight over all spanning forests (acyclic edge
    subsets with n - #components edges spanning every component)."""
    assert g.weights is not None
    comps = connected_components_oracle(g)
    target = g.n - len(comps)
    best = -math.inf
    for subset in itertools.combinations(range(len(g.edges)), target):
        parent = list(range(g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for i in subset:
            u, v = g.edges[i]
            ru, rv = find(u), find(v)
            if ru == rv:
                acyclic = False
                break
            parent[ru] = rv
        if acyclic:
            best = max(best, sum(g.weights[i] for i in subset))
    return best if target > 0 else 0.0


def bfs_dist_in_complex(g: Graph, threshold: float, src: int, exclude=None) -> dict[int, int]:
    """Plain-dict BFS over edges of weight >= threshold, optionally excluding
    one undirected edge; independent of the library BFS."""
    adj = {i: [] for i in range(g.n)}
    for (u, v), w in zip(g.edges, g.weights):
        if w < threshold:
            continue
        if exclude and {u, v} == set(exclude):
            continue
        adj[u].append(v)
        adj[v].append(u)
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def count_shortest_paths(g: Graph, threshold: float, src: int, dst: int, exclude=None) -> int:
    """Number of distinct shortest src-dst paths in the thresholded complex."""
    adj = {i: [] for i in range(g.n)}
    for (u, v), w in zip(g.edges, g.weights):
        if w < threshold:
            continue
        if exclude and {u, v} == set(exclude):
            continue
        adj[u].append(v)
        adj[v].append(u)
    dist = {src: 0}
    count = {src: 1}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    count[v] = count[u]
                    nxt.append(v)
                elif dist[v] == dist[u] + 1:
                    count[v] += count[u]
        frontier = nxt
    return count.get(dst, 0)


# ---------------------------------------------------------------------------
# Naive co-ranking oracle: explicit sets and counting, no vectorization
# ---------------------------------------------------------------------------


def naive_neighborhood(drow, i, k):
    """Nodes within the k-th smallest distance from i (threshold set)."""
    pairs = sorted((d, j) for j, d in enumerate(drow) if j != i)
    threshold = pairs[k - 1][0]
    return {j for d, j in pairs if d <= threshold}


def naive_rank(drow, i, j):
    return 1 + sum(1 for l, d in enumerate(drow) if l != i and d < drow[j])


def naive_dist_rows_high(g):
    hops = floyd_warshall_oracle(g)
    return [[float(h) for h in row] for row in hops]


def naive_dist_rows_low(positions):
    n = len(positions)
    return [[math.dist(positions[i], positions[j]) for j in range(n)] for i in range(n)]


def naive_q_lcmc(g, positions, k_max):
    n = g.n
    k_max = min(k_max, n - 2)
    high = naive_dist_rows_high(g)
    low = naive_dist_rows_low(positions)
    total = 0.0
    for k in range(1, k_max + 1):
        overlap = 0.0
        for i in range(n):
            overlap += len(
                naive_neighborhood(high[i], i, k) & naive_neighborhood(low[i], i, k)
            )
        lcmc = (overlap / (n * k)) - k / (n - 1)
        val = lcmc / (1.0 - k / (n - 1))
        total += min(1.0, max(-1.0, val))
    return total / k_max


def naive_trust_cont(g, positions, k):
    n = g.n
    k = min(k, n - 2)
    high = naive_dist_rows_high(g)
    low = naive_dist_rows_low(positions)
    t_pen = c_pen = 0.0
    for i in range(n):
        nh = naive_neighborhood(high[i], i, k)
        nl = naive_neighborhood(low[i], i, k)
        for j in nl - nh:
            t_pen += naive_rank(high[i], i, j) - k
        for j in nh - nl:
            c_pen += naive_rank(low[i], i, j) - k
    if 2 * k < n:
        norm = n * k * (2 * n - 3 * k - 1) / 2.0
    else:
        norm = n * (n - k) * (n - k - 1) / 2.0
    trust = min(1.0, max(0.0, 1.0 - t_pen / norm))
    cont = min(1.0, max(0.0, 1.0 - c_pen / norm))
    return trust, cont


def shapely_crossing_oracle(g, positions):
    """Count proper crossings with shapely's `crosses` predicate; angles via
    atan2 of |cross| and |dot| of the segment directions."""
    import shapely

    segs = [
        shapely.LineString([tuple(positions[u]), tuple(positions[v])]) for u, v in g.edges
    ]
    count = 0
    angles = []
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            u1, v1 = g.edges[i]
            u2, v2 = g.edges[j]
            if {u1, v1} & {u2, v2}:
                continue
            if segs[i].crosses(segs[j]):
                count += 1
                d1 = positions[v1] - positions[u1]
                d2 = positions[v2] - positions[u2]
                cross = abs(d1[0] * d2[1] - d1[1] * d2[0])
                dot = abs(d1 @ d2)
                angles.append(math.degrees(math.atan2(cross, dot)))
    return count, angles


def random_weighted_graph(rng: XorShift64Star, max_n=50, weight_grid=None) -> Graph:
    """Random connected-ish graph with mixed weights including negatives and
    zeros, drawn from a quarter-integer grid so float comparisons are exact."""
    n = 2 + rng.randrange(max_n - 1)
    if weight_grid is None:
        weight_grid = [i * 0.25 for i in range(-8, 9)]
    edges = []
    seen = set()
    target_edges = rng.randrange(max(1, 2 * n)) + 1
    for _ in range(target_edges):
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        e = (u, v) if u < v else (v, u)
        if e in seen:
            continue
        seen.add(e)
        edges.append(e)
    weights = [weight_grid[rng.randrange(len(weight_grid))] for _ in edges]
    return Graph(n, tuple(edges), tuple(weights))
