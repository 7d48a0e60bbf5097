"""Fast initial node placement from the maximal spanning forest.

The forest is turned into an abstract layout first: every node receives a
half-open span inside [0, 1), subdivided top-down so each child's width is
proportional to its subtree node count. The abstract layout is then embedded
on the canvas by a layered scheme (span -> x, depth -> y) or a radial scheme
(span -> angle, depth -> radius). Multiple components share the root interval
side by side, proportionally to component size.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph import Graph
from .rng import XorShift64Star


@dataclass(frozen=True)
class AbstractTree:
    """Rooted forest with per-node span, depth, and subtree size.

    Invariants: child spans partition the parent span; component root spans
    partition [0, 1) proportionally to component sizes; depth(root) = 0.
    """

    roots: tuple[int, ...]
    parent: tuple[int, ...]  # -1 at roots
    children: tuple[tuple[int, ...], ...]
    subtree_size: tuple[int, ...]
    span: tuple[tuple[float, float], ...]
    depth: tuple[int, ...]
    max_depth: int


@dataclass(frozen=True)
class Layout:
    """Per-node canvas coordinates, indexed by node id."""

    positions: np.ndarray  # (n, 2) float64

    def to_json(self, labels: Sequence[str]) -> dict:
        return {
            labels[i]: [float(self.positions[i, 0]), float(self.positions[i, 1])]
            for i in range(len(labels))
        }


def _forest_adjacency(g: Graph, forest_edges: Sequence[int]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for i in forest_edges:
        u, v = g.edges[i]
        adj[u].append(v)
        adj[v].append(u)
    for a in adj:
        a.sort()
    return adj


def _forest_components(adj: list[list[int]]) -> list[list[int]]:
    n = len(adj)
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def choose_roots(g: Graph, forest_edges: Sequence[int], seed: int) -> tuple[int, ...]:
    """One uniformly random root per forest component, deterministic in the
    seed. Components are visited in order of their smallest node id."""
    adj = _forest_adjacency(g, forest_edges)
    rng = XorShift64Star(seed)
    return tuple(comp[rng.randrange(len(comp))] for comp in _forest_components(adj))


def abstract_layout(g: Graph, forest_edges: Sequence[int], roots: Sequence[int]) -> AbstractTree:
    """Allocate spans top-down from the given roots.

    Children are ordered by subtree size descending, ties by node index.
    Iterative traversal; safe for path-shaped forests of any length.
    """
    adj = _forest_adjacency(g, forest_edges)
    n = g.n
    parent = [-1] * n
    depth = [0] * n
    children: list[list[int]] = [[] for _ in range(n)]
    order: list[int] = []  # BFS order over all components
    seen = [False] * n
    for root in roots:
        if seen[root]:
            raise ValueError(f"node {root} rooted twice")
        seen[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    children[u].append(v)
                    queue.append(v)
    if len(order) != n:
        raise ValueError("roots do not cover every forest component")

    subtree = [1] * n
    for u in reversed(order):
        if parent[u] >= 0:
            subtree[parent[u]] += subtree[u]
    for u in range(n):
        children[u].sort(key=lambda c: (-subtree[c], c))

    span = [(0.0, 0.0)] * n
    total = float(n)
    lo = 0.0
    root_list = list(roots)
    for i, root in enumerate(root_list):
        hi = 1.0 if i == len(root_list) - 1 else lo + subtree[root] / total
        span[root] = (lo, hi)
        lo = hi
    for u in order:
        s_lo, s_hi = span[u]
        width = s_hi - s_lo
        kids = children[u]
        if not kids:
            continue
        ksum = float(sum(subtree[c] for c in kids))
        c_lo = s_lo
        for j, c in enumerate(kids):
            c_hi = s_hi if j == len(kids) - 1 else c_lo + width * (subtree[c] / ksum)
            span[c] = (c_lo, c_hi)
            c_lo = c_hi
    return AbstractTree(
        roots=tuple(roots),
        parent=tuple(parent),
        children=tuple(tuple(c) for c in children),
        subtree_size=tuple(subtree),
        span=tuple(span),
        depth=tuple(depth),
        max_depth=max(depth),
    )


def embed_layered(t: AbstractTree, canvas: tuple[float, float]) -> Layout:
    """x = span midpoint scaled to width; y = layer center scaled to height."""
    w, h = canvas
    n = len(t.span)
    pos = np.empty((n, 2))
    layers = t.max_depth + 1
    for i in range(n):
        lo, hi = t.span[i]
        pos[i, 0] = w * (lo + hi) / 2.0
        pos[i, 1] = h * (t.depth[i] + 0.5) / layers
    return Layout(pos)


def embed_radial(t: AbstractTree, canvas: tuple[float, float]) -> Layout:
    """Angle = span midpoint over the full circle; radius grows with depth.

    Placement at the exact center (single root, or a depth-0-only forest)
    would co-locate nodes and stall force simulations, so such nodes get a
    deterministic offset of 1e-3 * R instead; a lone node stays centered.
    """
    w, h = canvas
    cx, cy = w / 2.0, h / 2.0
    radius = min(w, h) / 2.0
    n = len(t.span)
    pos = np.empty((n, 2))
    multi_root = len(t.roots) > 1
    for i in range(n):
        lo, hi = t.span[i]
        theta = 2.0 * math.pi * (lo + hi) / 2.0
        if t.max_depth == 0:
            if n == 1:
                pos[i] = (cx, cy)
                continue
            r = 1e-3 * radius
            theta = 2.0 * math.pi * i / n
        elif t.depth[i] == 0:
            r = 1e-3 * radius if multi_root else 0.0
        else:
            r = radius * t.depth[i] / t.max_depth
        pos[i, 0] = cx + r * math.cos(theta)
        pos[i, 1] = cy + r * math.sin(theta)
    return Layout(pos)


def random_layout(n: int, seed: int, canvas: tuple[float, float]) -> Layout:
    rng = XorShift64Star(seed)
    w, h = canvas
    pos = np.empty((n, 2))
    for i in range(n):
        pos[i, 0] = rng.random() * w
        pos[i, 1] = rng.random() * h
    return Layout(pos)


def initial_layout(
    g: Graph,
    scheme: str,
    seed: int,
    canvas: tuple[float, float] = (1000.0, 1000.0),
    forest_edges: Optional[Sequence[int]] = None,
) -> Layout:
    """Dispatch on scheme: 'layered' / 'radial' need the spanning forest,
    'random' draws uniform positions from the seed."""
    if scheme == "random":
        return random_layout(g.n, seed, canvas)
    if forest_edges is None:
        raise ValueError(f"scheme {scheme!r} requires the spanning forest")
    roots = choose_roots(g, forest_edges, seed)
    tree = abstract_layout(g, forest_edges, roots)
    if scheme == "layered":
        return embed_layered(tree, canvas)
    if scheme == "radial":
        return embed_radial(tree, canvas)
    raise ValueError(f"unknown scheme {scheme!r}")
