"""Synthetic graph families for experiments and tests.

All generators emit unweighted graphs (weights assigned downstream, e.g. by
Jaccard) with deterministic edge order, and take explicit seeds where
randomness is involved.
"""

from __future__ import annotations

from .graph import Graph
from .rng import XorShift64Star


def _canonical(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 nodes")
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return Graph(n, tuple(edges))


def circular_ladder(n: int) -> Graph:
    """Two n-cycles joined by rungs: 2n nodes, 3n edges."""
    if n < 3:
        raise ValueError("circular ladder needs at least 3 rungs")
    ring_a = [_canonical(i, (i + 1) % n) for i in range(n)]
    ring_b = [_canonical(n + i, n + (i + 1) % n) for i in range(n)]
    rungs = [(i, n + i) for i in range(n)]
    return Graph(2 * n, tuple(ring_a + ring_b + rungs))


def grid(w: int, h: int) -> Graph:
    if w < 1 or h < 1:
        raise ValueError("grid dimensions must be positive")
    edges = []
    for r in range(h):
        for c in range(w):
            i = r * w + c
            if c + 1 < w:
                edges.append((i, i + 1))
            if r + 1 < h:
                edges.append((i, i + w))
    return Graph(w * h, tuple(edges))


def watts_strogatz(n: int, k: int, p: float, seed: int) -> Graph:
    """Ring lattice of degree k with each edge rewired with probability p;
    rewiring resamples to avoid self-loops and duplicates."""
    if k % 2 != 0 or k < 2:
        raise ValueError("k must be even and >= 2")
    if k >= n:
        raise ValueError("k must be smaller than n")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    rng = XorShift64Star(seed)
    position: dict[tuple[int, int], int] = {}
    edges = []
    for j in range(1, k // 2 + 1):
        for i in range(n):
            e = _canonical(i, (i + j) % n)
            position[e] = len(edges)
            edges.append(e)
    for j in range(1, k // 2 + 1):
        for i in range(n):
            if rng.random() >= p:
                continue
            old = _canonical(i, (i + j) % n)
            if old not in position:
                continue  # already rewired away by an earlier pass
            for _ in range(8 * n):
                target = rng.randrange(n)
                new = _canonical(i, target)
                if target != i and new not in position:
                    slot = position.pop(old)
                    position[new] = slot
                    edges[slot] = new
                    break
            # a saturated node keeps its lattice edge
    return Graph(n, tuple(edges))


def random_gnp(n: int, p: float, seed: int) -> Graph:
    if n < 1:
        raise ValueError("need at least one node")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    rng = XorShift64Star(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j))
    return Graph(n, tuple(edges))


def random_tree(n: int, seed: int) -> Graph:
    """Random recursive tree: node i attaches to a uniform earlier node."""
    if n < 1:
        raise ValueError("need at least one node")
    rng = XorShift64Star(seed)
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    return Graph(n, tuple(edges))


GENERATORS = {
    "cycle": cycle_graph,
    "circular_ladder": circular_ladder,
    "grid": grid,
    "watts_strogatz": watts_strogatz,
    "gnp": random_gnp,
    "tree": random_tree,
}


def from_spec(spec: str) -> Graph:
    """Build a graph from ``name:arg1,arg2,...`` (e.g. ``circular_ladder:30``,
    ``watts_strogatz:1000,6,0.05,7``)."""
    name, _, argstr = spec.partition(":")
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r}; choices: {sorted(GENERATORS)}")
    args = []
    for tok in filter(None, argstr.split(",")):
        args.append(float(tok) if "." in tok or "e" in tok.lower() else int(tok))
    return GENERATORS[name](*args)
