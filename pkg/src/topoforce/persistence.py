"""Connected-component and cycle features of the descending edge-weight filtration.

A single largest-first Kruskal pass yields the maximal spanning forest:
each accepted edge is a component merge (an H0 death at the edge weight),
and each rejected edge closes an independent cycle (an H1 birth at the edge
weight). Cycle node paths are materialized lazily, only when requested, by
an unweighted shortest path inside the edge complex at the birth weight.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .graph import Graph


@dataclass(frozen=True)
class EdgeComplex:
    """Edges of weight >= threshold; shrinks monotonically as the threshold rises."""

    threshold: float
    edge_indices: tuple[int, ...]


@dataclass(frozen=True)
class H0Event:
    """A component merge: the forest edge that caused it and its weight."""

    edge_index: int
    u: int
    v: int
    death: float


@dataclass(frozen=True)
class H1Candidate:
    """A non-forest edge: closes one independent cycle born at its weight.

    ``trivial`` marks length-3 cycles (a common neighbor of u and v exists
    at the birth threshold); those are kept for bookkeeping but excluded
    from barcodes and extraction.
    """

    edge_index: int
    u: int
    v: int
    birth: float
    trivial: bool


@dataclass(frozen=True)
class CyclePath:
    """One cycle at its birth weight: the shortest u-v path in the edge
    complex, closed by the generating non-forest edge."""

    birth_weight: float
    nodes: tuple[int, ...]
    generating_edge: tuple[int, int]


@dataclass(frozen=True)
class BarcodeEntry:
    feature_id: int
    dimension: int
    value: float


@dataclass(frozen=True)
class Barcode:
    entries: tuple[BarcodeEntry, ...]

    def normalized_lengths(self) -> tuple[float, ...]:
        """Bar lengths in [0, 1], scaled by the maximum value; non-positive
        maxima collapse every bar to zero length."""
        if not self.entries:
            return ()
        top = max(e.value for e in self.entries)
        if top <= 0:
            return tuple(0.0 for _ in self.entries)
        return tuple(min(1.0, max(0.0, e.value / top)) for e in self.entries)


@dataclass
class PersistenceResult:
    """Maximal spanning forest plus the H0 death and H1 birth events.

    Every graph edge lands in exactly one of ``forest_edges`` or
    ``h1_candidates``. Extracted cycle paths are cached per candidate;
    insertion is lock-guarded so concurrent readers may share the result.
    """

    forest_edges: tuple[int, ...]
    h0_events: tuple[H0Event, ...]
    h1_candidates: tuple[H1Candidate, ...]
    _cycle_cache: dict[int, CyclePath] = field(default_factory=dict, repr=False, compare=False)
    _cache_lock: threading.Lock = field(
        default_factory=threading.Lock, repr=False, compare=False
    )

    def nontrivial_candidates(self) -> list[H1Candidate]:
        return [c for c in self.h1_candidates if not c.trivial]

    def get_cycle(self, g: Graph, candidate_index: int) -> CyclePath:
        """Extract (or fetch the cached) cycle for h1_candidates[candidate_index]."""
        with self._cache_lock:
            cached = self._cycle_cache.get(candidate_index)
        if cached is not None:
            return cached
        cycle = extract_cycle(g, self.h1_candidates[candidate_index])
        with self._cache_lock:
            self._cycle_cache.setdefault(candidate_index, cycle)
        return cycle


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]  # path halving
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def _has_triangle_at_threshold(adj: Sequence[dict[int, float]], u: int, v: int, t: float) -> bool:
    au, av = adj[u], adj[v]
    if len(av) < len(au):
        au, av = av, au
    for x, w_ux in au.items():
        if w_ux >= t:
            w_xv = av.get(x)
            if w_xv is not None and w_xv >= t:
                return True
    return False


def _has_triangle_sorted(
    by_weight: list[list[tuple[int, float]]],
    adj: Sequence[dict[int, float]],
    u: int,
    v: int,
    t: float,
) -> bool:
    """Same predicate over weight-descending neighbor lists: the scan stops
    at the first neighbor below the threshold."""
    if len(by_weight[v]) < len(by_weight[u]):
        u, v = v, u
    av = adj[v]
    for x, w_ux in by_weight[u]:
        if w_ux < t:
            return False
        w_xv = av.get(x)
        if w_xv is not None and w_xv >= t:
            return True
    return False


def is_trivial_cycle(g: Graph, edge_index: int) -> bool:
    """True iff the candidate edge (u, v) closes a length-3 cycle at its own
    weight: some common neighbor x has w(u,x) >= w(u,v) and w(x,v) >= w(u,v)."""
    u, v = g.edges[edge_index]
    if g.weights is None:
        raise ValueError("graph has no weights assigned")
    return _has_triangle_at_threshold(g.weighted_adjacency, u, v, g.weights[edge_index])


def compute_persistence(g: Graph) -> PersistenceResult:
    """Largest-first Kruskal over edges sorted by (weight desc, input index asc).

    O(E log E). Accepted edges form the maximal spanning forest and emit H0
    deaths in non-increasing weight order; rejected edges become H1 birth
    candidates, flagged trivial when a triangle exists at their threshold.
    """
    if g.weights is None:
        if g.edges:
            raise ValueError("graph has no weights assigned")
        return PersistenceResult((), (), ())
    weights = g.weights
    order = sorted(range(len(g.edges)), key=lambda i: (-weights[i], i))
    uf = _UnionFind(g.n)
    adj = g.weighted_adjacency
    by_weight = [sorted(a.items(), key=lambda kv: -kv[1]) for a in adj]
    forest: list[int] = []
    h0: list[H0Event] = []
    h1: list[H1Candidate] = []
    for i in order:
        u, v = g.edges[i]
        w = weights[i]
        if uf.union(u, v):
            forest.append(i)
            h0.append(H0Event(i, u, v, w))
        else:
            h1.append(H1Candidate(i, u, v, w, _has_triangle_sorted(by_weight, adj, u, v, w)))
    return PersistenceResult(tuple(forest), tuple(h0), tuple(h1))


def edge_complex(g: Graph, threshold: float) -> EdgeComplex:
    if g.weights is None:
        raise ValueError("graph has no weights assigned")
    idx = tuple(i for i, w in enumerate(g.weights) if w >= threshold)
    return EdgeComplex(threshold, idx)


def extract_cycle(g: Graph, candidate: H1Candidate) -> CyclePath:
    """BFS from u to v over edges of weight >= the birth weight, excluding the
    candidate edge itself; neighbors expand in ascending node index and the
    predecessor is fixed at first discovery, so the result is deterministic.

    The path always exists (the forest plus the candidate edge contains one);
    a failed search indicates a corrupted input and raises RuntimeError.
    """
    if candidate.trivial:
        raise ValueError("length-3 cycles are trivial and have no extracted path")
    t = candidate.birth
    adj = g.weighted_adjacency
    u, v = candidate.u, candidate.v
    prev: dict[int, int] = {u: -1}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == v:
            break
        for y, w in adj[x].items():  # dict preserves sorted insertion order
            if w < t or y in prev:
                continue
            if (x == u and y == v) or (x == v and y == u):
                continue  # the generating edge does not participate in the path
            prev[y] = x
            queue.append(y)
    if v not in prev:
        raise RuntimeError(
            f"no path between {u} and {v} at threshold {t}: persistence invariant violated"
        )
    path = [v]
    while path[-1] != u:
        path.append(prev[path[-1]])
    path.reverse()
    return CyclePath(birth_weight=t, nodes=tuple(path), generating_edge=(u, v))


def build_barcode(p: PersistenceResult, dimension: int) -> Barcode:
    """Bars sorted by value descending, ties kept stable by feature id.
    Dimension 0 lists H0 deaths; dimension 1 lists non-trivial H1 births."""
    if dimension == 0:
        entries = [BarcodeEntry(i, 0, e.death) for i, e in enumerate(p.h0_events)]
    elif dimension == 1:
        entries = [
            BarcodeEntry(i, 1, c.birth) for i, c in enumerate(p.h1_candidates) if not c.trivial
        ]
    else:
        raise ValueError(f"unsupported dimension {dimension}")
    entries.sort(key=lambda e: (-e.value, e.feature_id))
    return Barcode(tuple(entries))


def barcode_to_json(b: Barcode) -> list[dict]:
    return [
        {"feature_id": e.feature_id, "dimension": e.dimension, "value": e.value}
        for e in b.entries
    ]


def cycle_to_json(feature_id: int, cycle: CyclePath) -> dict:
    return {
        "feature_id": feature_id,
        "birth": cycle.birth_weight,
        "nodes": list(cycle.nodes),
    }
