"""Force primitives for the layout simulation.

Semantics mirror the de-facto defaults of browser force-layout engines:
links pull with degree-derived strength and bias, many-body repulsion uses a
Barnes-Hut quadtree with a squared-theta acceptance criterion, and centering
shifts all positions so the centroid sits at a fixed point. Co-located pairs
get a deterministic index-based jitter instead of a random jiggle so runs
reproduce exactly.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Optional, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .simulation import SimState


_GOLDEN_ANGLE = 2.399963229728653


def _jitter_vec(i: int) -> tuple[float, float]:
    """1e-6 offset whose direction varies with the index, so coincident nodes
    are pushed apart rather than translated together."""
    a = _GOLDEN_ANGLE * (i + 1)
    return 1e-6 * math.cos(a), 1e-6 * math.sin(a)


class LinkForce:
    """Spring force per graph edge, rest length ``distance``.

    Default strength is 1 / min(degree(u), degree(v)); the velocity change is
    split between endpoints biased by their degrees, so high-degree nodes
    move less.
    """

    def __init__(self, graph, distance: float = 30.0, strength: Optional[float] = None):
        self.id = "link"
        self.links = graph.edges
        deg = [graph.degree(i) for i in range(graph.n)]
        self.distance = distance
        self.strengths = [
            strength if strength is not None else 1.0 / min(deg[u], deg[v])
            for u, v in self.links
        ]
        self.bias = [deg[u] / (deg[u] + deg[v]) for u, v in self.links]

    def apply(self, sim: "SimState", alpha: float) -> None:
        x, y, vx, vy = sim.x, sim.y, sim.vx, sim.vy
        for li, (u, v) in enumerate(self.links):
            dx = x[v] + vx[v] - x[u] - vx[u]
            dy = y[v] + vy[v] - y[u] - vy[u]
            l2 = dx * dx + dy * dy
            if l2 == 0.0:
                dx, dy = _jitter_vec(li)
                l2 = dx * dx + dy * dy
            l = math.sqrt(l2)
            f = (l - self.distance) / l * alpha * self.strengths[li]
            dx *= f
            dy *= f
            b = self.bias[li]
            vx[v] -= dx * b
            vy[v] -= dy * b
            vx[u] += dx * (1.0 - b)
            vy[u] += dy * (1.0 - b)


class ManyBodyForce:
    """Pairwise repulsion (negative strength) approximated with a Barnes-Hut
    quadtree: a cell of width w at squared distance l is treated as a single
    body when w^2 < theta^2 * l. theta = 0 disables aggregation entirely and
    reproduces the exact O(N^2) pairwise sum."""

    def __init__(
        self,
        strength: float = -30.0,
        theta: float = 0.9,
        distance_min: float = 1.0,
        distance_max: float = math.inf,
    ):
        self.id = "charge"
        self.strength = strength
        self.theta2 = theta * theta
        self.dmin2 = distance_min * distance_min
        self.dmax2 = distance_max * distance_max

    def apply(self, sim: "SimState", alpha: float) -> None:
        n = len(sim.x)
        if n < 2:
            return
        x, y, vx, vy = sim.x, sim.y, sim.vx, sim.vy
        tree = _QuadTree(x, y)
        tree.aggregate(self.strength)
        theta2, dmin2, dmax2 = self.theta2, self.dmin2, self.dmax2
        strength = self.strength
        child, pts = tree.child, tree.pts
        half, comx, comy, value = tree.half, tree.comx, tree.comy, tree.value
        for i in range(n):
            px, py = x[i], y[i]
            fx = fy = 0.0
            stack = [0]
            while stack:
                q = stack.pop()
                dx = comx[q] - px
                dy = comy[q] - py
                l = dx * dx + dy * dy
                w = 2.0 * half[q]
                if w * w < theta2 * l:
                    if l < dmax2:
                        if l < dmin2:
                            l = math.sqrt(dmin2 * l)
                        f = value[q] * alpha / l
                        fx += dx * f
                        fy += dy * f
                    continue
                kids = child[q]
                if kids is not None:
                    # reversed push keeps quadrant visitation order 0..3
                    for c in (kids[3], kids[2], kids[1], kids[0]):
                        if c >= 0:
                            stack.append(c)
                    continue
                if l >= dmax2:
                    continue
                leaf_pts = pts[q]
                if dx == 0.0 and dy == 0.0 and (len(leaf_pts) > 1 or leaf_pts[0] != i):
                    dx, dy = _jitter_vec(i)
                    l = dx * dx + dy * dy
                if l < dmin2:
                    l = math.sqrt(dmin2 * l)
                for j in leaf_pts:
                    if j != i:
                        f = strength * alpha / l
                        fx += dx * f
                        fy += dy * f
            vx[i] += fx
            vy[i] += fy


class _QuadTree:
    """Array-backed point quadtree. Exactly coincident points share a leaf;
    children are created after their parent, so a reverse index sweep is a
    valid bottom-up order for aggregation."""

    __slots__ = ("x", "y", "cx", "cy", "half", "child", "pts", "value", "comx", "comy")

    def __init__(self, x: Sequence[float], y: Sequence[float]):
        self.x, self.y = x, y
        x0, x1 = min(x), max(x)
        y0, y1 = min(y), max(y)
        size = max(x1 - x0, y1 - y0)
        half = size / 2.0 if size > 0 else 0.5
        self.cx = [x0 + half]
        self.cy = [y0 + half]
        self.half = [half]
        self.child: list[Optional[list[int]]] = [None]
        self.pts: list[Optional[list[int]]] = [None]
        for i in range(len(x)):
            self._insert(i)

    def _quadrant(self, node: int, px: float, py: float) -> int:
        return (1 if px >= self.cx[node] else 0) | (2 if py >= self.cy[node] else 0)

    def _insert(self, i: int) -> None:
        px, py = self.x[i], self.y[i]
        node = 0
        depth = 0
        while True:
            depth += 1
            if self.child[node] is None and self.pts[node] is None:
                self.pts[node] = [i]
                return
            if self.pts[node] is not None:
                existing = self.pts[node]
                j = existing[0]
                # depth cap: points closer than float subdivision resolves
                # are treated as coincident
                if (self.x[j] == px and self.y[j] == py) or depth > 64:
                    existing.append(i)
                    return
                # split the leaf and reinsert its points one level down
                self.pts[node] = None
                self.child[node] = [-1, -1, -1, -1]
                q_old = self._quadrant(node, self.x[j], self.y[j])
                c_old = self._spawn(node, q_old)
                self.pts[c_old] = existing
            quad = self._quadrant(node, px, py)
            nxt = self.child[node][quad]
            if nxt < 0:
                nxt = self._spawn(node, quad)
            node = nxt

    def _spawn(self, node: int, quad: int) -> int:
        h = self.half[node] / 2.0
        idx = len(self.cx)
        self.cx.append(self.cx[node] + (h if quad & 1 else -h))
        self.cy.append(self.cy[node] + (h if quad & 2 else -h))
        self.half.append(h)
        self.child.append(None)
        self.pts.append(None)
        self.child[node][quad] = idx
        return idx

    def aggregate(self, strength: float) -> None:
        """Per-cell total strength and |strength|-weighted center of mass."""
        count = len(self.cx)
        self.value = [0.0] * count
        self.comx = [0.0] * count
        self.comy = [0.0] * count
        for q in range(count - 1, -1, -1):
            if self.pts[q] is not None:
                p0 = self.pts[q][0]
                self.value[q] = strength * len(self.pts[q])
                self.comx[q] = self.x[p0]
                self.comy[q] = self.y[p0]
            elif self.child[q] is not None:
                weight = 0.0
                sx = sy = sv = 0.0
                for c in self.child[q]:
                    if c >= 0:
                        m = abs(self.value[c])
                        sv += self.value[c]
                        weight += m
                        sx += m * self.comx[c]
                        sy += m * self.comy[c]
                self.value[q] = sv
                if weight > 0:
                    self.comx[q] = sx / weight
                    self.comy[q] = sy / weight


class CenterForce:
    """Translate every node so the centroid sits at (cx, cy)."""

    def __init__(self, cx: float, cy: float, strength: float = 1.0):
        self.id = "center"
        self.cx, self.cy = cx, cy
        self.strength = strength

    def apply(self, sim: "SimState", alpha: float) -> None:
        n = len(sim.x)
        sx = sum(sim.x) / n - self.cx
        sy = sum(sim.y) / n - self.cy
        sx *= self.strength
        sy *= self.strength
        for i in range(n):
            sim.x[i] -= sx
            sim.y[i] -= sy


class SpringForce:
    """Zero-rest-length springs between selected node pairs; used to pull the
    endpoints of chosen forest edges together."""

    def __init__(self, pairs: Sequence[tuple[int, int]], strength: float, force_id: str = "h0"):
        self.id = force_id
        self.pairs = list(pairs)
        self.strength = strength

    def apply(self, sim: "SimState", alpha: float) -> None:
        x, y, vx, vy = sim.x, sim.y, sim.vx, sim.vy
        k = alpha * self.strength
        for u, v in self.pairs:
            dx = (x[v] + vx[v] - x[u] - vx[u]) * k
            dy = (y[v] + vy[v] - y[u] - vy[u]) * k
            vx[v] -= dx * 0.5
            vy[v] -= dy * 0.5
            vx[u] += dx * 0.5
            vy[u] += dy * 0.5


class EllipseForce:
    """Attract each cycle node toward a fixed target point on an ellipse.

    Targets are computed once at creation time: the farthest cycle-node pair
    spans the major axis, the minor diameter is aspect times the major one,
    and targets sit at equally spaced parameter angles assigned in cycle
    order with the rigid rotation/direction that minimizes total squared
    displacement.
    """

    def __init__(
        self,
        nodes: Sequence[int],
        targets: Sequence[tuple[float, float]],
        strength: float,
        force_id: str,
        aspect: float,
        focus_a: int,
        focus_b: int,
    ):
        self.id = force_id
        self.nodes = list(nodes)
        self.targets = list(targets)
        self.strength = strength
        self.aspect = aspect
        self.focus_a = focus_a
        self.focus_b = focus_b

    def apply(self, sim: "SimState", alpha: float) -> None:
        k = self.strength * alpha
        x, y, vx, vy = sim.x, sim.y, sim.vx, sim.vy
        for node, (tx, ty) in zip(self.nodes, self.targets):
            vx[node] += (tx - x[node]) * k
            vy[node] += (ty - y[node]) * k


def ellipse_targets(
    positions, nodes: Sequence[int], aspect: float
) -> tuple[list[tuple[float, float]], int, int]:
    """Target points for the cycle nodes, in cycle order.

    Returns (targets, focus_a, focus_b) where the foci are the cycle nodes
    realizing the maximum pairwise Euclidean distance (first such pair in
    index-scan order). Every target satisfies the ellipse equation in the
    major-axis frame.
    """
    L = len(nodes)
    best_d2 = -1.0
    fa = fb = 0
    for ii in range(L):
        xi, yi = positions[nodes[ii]]
        for jj in range(ii + 1, L):
            xj, yj = positions[nodes[jj]]
            d2 = (xj - xi) ** 2 + (yj - yi) ** 2
            if d2 > best_d2:
                best_d2 = d2
                fa, fb = ii, jj
    ax_, ay_ = positions[nodes[fa]]
    bx_, by_ = positions[nodes[fb]]
    cx, cy = (ax_ + bx_) / 2.0, (ay_ + by_) / 2.0
    a = math.sqrt(best_d2) / 2.0
    if a == 0.0:
        a = 1.0  # fully degenerate cycle: fall back to a unit circle
    b = aspect * a
    phi = math.atan2(by_ - ay_, bx_ - ax_)
    cp, sp = math.cos(phi), math.sin(phi)
    ring = []
    for k in range(L):
        t = 2.0 * math.pi * k / L
        ex, ey = a * math.cos(t), b * math.sin(t)
        ring.append((cx + ex * cp - ey * sp, cy + ex * sp + ey * cp))

    best_cost = math.inf
    best_dir, best_rot = 1, 0
    for direction in (1, -1):
        for rot in range(L):
            cost = 0.0
            for idx, node in enumerate(nodes):
                tx, ty = ring[(direction * idx + rot) % L]
                px, py = positions[node]
                cost += (tx - px) ** 2 + (ty - py) ** 2
            if cost < best_cost:
                best_cost = cost
                best_dir, best_rot = direction, rot
    targets = [ring[(best_dir * idx + best_rot) % L] for idx in range(L)]
    return targets, nodes[fa], nodes[fb]
