"""Graph container, edge-list/JSON ingestion, Jaccard weighting, and hop distances.

The graph is undirected and immutable: nodes are dense integer indices
0..n-1 (original tokens kept as labels), each unordered edge is stored once
as (u, v) with u < v, and weights are either all assigned or all unset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path


class GraphFormat(Enum):
    EDGE_LIST_TSV = "tsv"
    GRAPH_JSON = "json"


class ParseError(ValueError):
    """Malformed input; carries the offending line/record number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ParseReport:
    """Ingestion warnings that do not abort the parse."""

    dropped_self_loops: int = 0
    collapsed_duplicates: int = 0


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with optional per-edge weights.

    Invariants: edges are (u, v) with u < v, no duplicates, no self-loops;
    ``weights`` is None until assigned (parse without a weight column, or
    generator output awaiting Jaccard weighting).
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: Optional[tuple[float, ...]] = None
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("graph must have at least one node")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))
        if len(self.labels) != self.n:
            raise ValueError("labels length must equal node count")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u}, {v}) is not canonical for n={self.n}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        if self.weights is not None and len(self.weights) != len(self.edges):
            raise ValueError("weights length must equal edge count")
        if self.weights == ():  # edgeless: weighted and unweighted coincide
            object.__setattr__(self, "weights", None)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def has_weights(self) -> bool:
        return self.weights is not None

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Per-node neighbor lists, each sorted ascending."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def weighted_adjacency(self) -> tuple[dict[int, float], ...]:
        """Per-node {neighbor: weight} maps in ascending neighbor order;
        requires assigned weights."""
        if self.weights is None and self.edges:
            raise ValueError("graph has no weights assigned")
        adj: list[dict[int, float]] = [{} for _ in range(self.n)]
        for (u, v), w in zip(self.edges, self.weights or ()):
            adj[u][v] = w
            adj[v][u] = w
        return tuple({k: a[k] for k in sorted(a)} for a in adj)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def with_weights(self, weights: Sequence[float]) -> "Graph":
        return Graph(self.n, self.edges, tuple(float(w) for w in weights), self.labels)


@dataclass(frozen=True)
class DistanceMatrix:
    """All-pairs hop counts. ``unreachable`` (= n, beyond any real hop count)
    marks disconnected pairs, so it sorts after every finite distance."""

    n: int
    hops: np.ndarray  # (n, n) int64
    unreachable: int

    def is_reachable(self, i: int, j: int) -> bool:
        return int(self.hops[i, j]) != self.unreachable


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------


def _canonical(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class _EdgeAccumulator:
    """Builds dense node ids in first-appearance order and collapses
    duplicate edges keeping the maximum weight."""

    def __init__(self):
        self.ids: dict[str, int] = {}
        self.labels: list[str] = []
        self.edge_weight: dict[tuple[int, int], Optional[float]] = {}
        self.edge_order: list[tuple[int, int]] = []
        self.dropped_self_loops = 0
        self.collapsed_duplicates = 0
        self.saw_weighted = False
        self.saw_unweighted = False

    def node(self, token: str) -> int:
        idx = self.ids.get(token)
        if idx is None:
            idx = len(self.labels)
            self.ids[token] = idx
            self.labels.append(token)
        return idx

    def edge(self, a: str, b: str, weight: Optional[float], line: Optional[int]):
        if weight is None:
            self.saw_unweighted = True
        else:
            self.saw_weighted = True
        if self.saw_weighted and self.saw_unweighted:
            raise ParseError("mixed weighted and unweighted edges", line)
        u, v = self.node(a), self.node(b)
        if u == v:
            self.dropped_self_loops += 1
            return
        key = _canonical(u, v)
        if key in self.edge_weight:
            self.collapsed_duplicates += 1
            old = self.edge_weight[key]
            if weight is not None and (old is None or weight > old):
                self.edge_weight[key] = weight
        else:
            self.edge_weight[key] = weight
            self.edge_order.append(key)

    def build(self) -> tuple[Graph, ParseReport]:
        if not self.labels:
            raise ParseError("input contains no nodes")
        weights: Optional[tuple[float, ...]] = None
        if self.saw_weighted:
            weights = tuple(self.edge_weight[e] for e in self.edge_order)  # type: ignore[misc]
        graph = Graph(len(self.labels), tuple(self.edge_order), weights, tuple(self.labels))
        report = ParseReport(self.dropped_self_loops, self.collapsed_duplicates)
        return graph, report


def parse_edge_list_tsv(text: str) -> tuple[Graph, ParseReport]:
    """One edge per line: ``src<TAB>dst[<TAB>weight]``; ``#`` starts a comment."""
    acc = _EdgeAccumulator()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            acc.edge(parts[0], parts[1], None, lineno)
        elif len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(f"bad weight {parts[2]!r}", lineno) from None
            acc.edge(parts[0], parts[1], w, lineno)
        else:
            raise ParseError(f"expected 2 or 3 tab-separated fields, got {len(parts)}", lineno)
    return acc.build()


def parse_graph_json(text: str) -> tuple[Graph, ParseReport]:
    """Node-link JSON: ``{nodes: [{id, label?}], links: [{source, target, value?}]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise ParseError("expected object with 'nodes' and 'links'")
    acc = _EdgeAccumulator()
    for i, node in enumerate(doc.get("nodes", [])):
        if not isinstance(node, dict) or "id" not in node:
            raise ParseError("node record missing 'id'", i + 1)
        acc.node(str(node["id"]))
    for i, link in enumerate(doc.get("links", [])):
        if not isinstance(link, dict) or "source" not in link or "target" not in link:
            raise ParseError("link record missing 'source'/'target'", i + 1)
        src, dst = str(link["source"]), str(link["target"])
        if src not in acc.ids or dst not in acc.ids:
            raise ParseError(f"link references undeclared node {src!r} or {dst!r}", i + 1)
        value = link.get("value")
        acc.edge(src, dst, None if value is None else float(value), i + 1)
    return acc.build()


def parse_graph(data: bytes | str, fmt: GraphFormat) -> tuple[Graph, ParseReport]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt is GraphFormat.EDGE_LIST_TSV:
        return parse_edge_list_tsv(text)
    return parse_graph_json(text)


def to_edge_list_tsv(g: Graph) -> str:
    """Serialize to TSV. Isolated nodes cannot be represented in an edge list
    and are silently lost; use GraphJSON for lossless round-trips."""
    lines = []
    for i, (u, v) in enumerate(g.edges):
        if g.weights is None:
            lines.append(f"{g.labels[u]}\t{g.labels[v]}")
        else:
            lines.append(f"{g.labels[u]}\t{g.labels[v]}\t{g.weights[i]!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def to_graph_json(g: Graph) -> dict:
    links = []
    for i, (u, v) in enumerate(g.edges):
        link: dict = {"source": g.labels[u], "target": g.labels[v]}
        if g.weights is not None:
            link["value"] = g.weights[i]
        links.append(link)
    return {"nodes": [{"id": lbl} for lbl in g.labels], "links": links}


# ---------------------------------------------------------------------------
# Weighting and distances
# ---------------------------------------------------------------------------


def jaccard_weights(g: Graph, closed: bool = True) -> Graph:
    """Assign each edge the Jaccard index |A∩B| / |A∪B| of its endpoints'
    1-neighborhoods.

    ``closed`` includes each node in its own neighborhood (the default),
    which keeps pendant edges above zero and the union always non-empty;
    pass False for open neighborhoods.
    """
    hoods: list[set[int]] = [set(nbrs) for nbrs in g.adjacency]
    if closed:
        for i, h in enumerate(hoods):
            h.add(i)
    weights = []
    for u, v in g.edges:
        a, b = hoods[u], hoods[v]
        union = len(a | b)
        weights.append(len(a & b) / union if union else 0.0)
    return g.with_weights(weights)


def bfs_distances(g: Graph) -> DistanceMatrix:
    """All-pairs hop counts via per-source breadth-first search, O(N(N+E))."""
    n = g.n
    if g.edges:
        rows = [u for u, v in g.edges] + [v for u, v in g.edges]
        cols = [v for u, v in g.edges] + [u for u, v in g.edges]
        adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        dist = shortest_path(adj, method="D", unweighted=True, directed=False)
    else:
        dist = np.full((n, n), np.inf)
        np.fill_diagonal(dist, 0.0)
    hops = np.where(np.isinf(dist), n, dist).astype(np.int64)
    return DistanceMatrix(n=n, hops=hops, unreachable=n)


def avg_eccentricity(g: Graph, dist: Optional[DistanceMatrix] = None) -> float:
    """Mean over nodes of the maximum finite hop distance (per-component
    eccentricities weighted by component size; single node counts as 0)."""
    d = dist or bfs_distances(g)
    finite = np.where(d.hops == d.unreachable, -1, d.hops)
    ecc = finite.max(axis=1)
    ecc = np.maximum(ecc, 0)  # isolated nodes: only the self-distance
    return float(ecc.mean())


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by smallest member."""
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in g.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps
