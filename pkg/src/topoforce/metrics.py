"""Layout-quality, convergence, and timing metrics.

Co-ranking metrics compare hop-distance neighborhoods in the graph against
Euclidean neighborhoods in the layout. Hop distances are heavily tied, so
k-neighborhoods are defined by distance threshold: the k-neighborhood of i
contains every node whose distance is <= the k-th smallest distance from i,
equivalently every node of competition rank <= k. This makes all co-ranking
metrics deterministic under ties, in both spaces.

The normalizations of the averaged neighborhood-overlap score (to [-1, 1]),
the crossing-angle score, and the angular-resolution score are documented
reconstructions: only their ranges are standardized, not their formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph import DistanceMatrix, Graph, bfs_distances
from .simulation import LayoutTrace

IDEAL_CROSSING_ANGLE_DEG = 70.0
DEFAULT_K = 20
READABILITY_EDGE_LIMIT = 10_000


@dataclass(frozen=True)
class CoRanking:
    """Per-k neighborhood overlap fractions |N_graph(k) ∩ N_layout(k)| / k
    for k = 1..k_max. Ties can push a fraction above 1."""

    n: int
    k_max: int
    q_nx: np.ndarray
    clamped: bool = False


@dataclass(frozen=True)
class TimingReport:
    t_it: float
    t_ait: float
    t_lcmc: float


@dataclass(frozen=True)
class QualityReport:
    q_lcmc: float
    q_trust: float
    q_cont: float
    q_ec: float
    q_ca: float
    q_mar: float
    c_lcmc: int
    t_it: float
    t_ait: float
    t_lcmc: float


# ---------------------------------------------------------------------------
# Rank machinery
# ---------------------------------------------------------------------------


def _min_rank_matrix(dist: np.ndarray) -> np.ndarray:
    """Row-wise competition ranks (ties share the smallest rank, 1-based).
    The diagonal must be pre-set beyond every real distance so a node is
    never its own neighbor."""
    n = dist.shape[0]
    order = np.argsort(dist, axis=1, kind="stable")
    s = np.take_along_axis(dist, order, axis=1)
    idx = np.broadcast_to(np.arange(n), (n, n))
    is_new = np.ones((n, n), dtype=bool)
    is_new[:, 1:] = s[:, 1:] > s[:, :-1]
    mr_sorted = np.maximum.accumulate(np.where(is_new, idx, 0), axis=1) + 1
    mr = np.empty((n, n), dtype=np.int64)
    np.put_along_axis(mr, order, mr_sorted, axis=1)
    return mr


def graph_ranks(dist: DistanceMatrix) -> np.ndarray:
    """Hop-distance ranks; unreachable pairs rank after all finite distances,
    tied among themselves."""
    d = dist.hops.astype(np.float64)
    np.fill_diagonal(d, dist.unreachable + 1)
    return _min_rank_matrix(d)


def layout_ranks(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    return _min_rank_matrix(d2)


def _effective_k(n: int, k: int) -> tuple[int, bool]:
    """Clamp k to n - 2: at k = n - 1 the per-k normalization degenerates."""
    if n < 3:
        raise ValueError("co-ranking metrics need at least 3 nodes")
    if k > n - 2:
        return n - 2, True
    return k, False


def co_ranking(
    g: Graph,
    positions: np.ndarray,
    k_max: int = DEFAULT_K,
    dist: Optional[DistanceMatrix] = None,
    rank_high: Optional[np.ndarray] = None,
) -> CoRanking:
    k_eff, clamped = _effective_k(g.n, k_max)
    if rank_high is None:
        rank_high = graph_ranks(dist or bfs_distances(g))
    rank_low = layout_ranks(positions)
    worst = np.maximum(rank_high, rank_low)
    q_nx = np.empty(k_eff)
    for k in range(1, k_eff + 1):
        q_nx[k - 1] = (worst <= k).sum(axis=1).mean() / k
    return CoRanking(n=g.n, k_max=k_eff, q_nx=q_nx, clamped=clamped)


def q_lcmc_from_coranking(cr: CoRanking) -> float:
    """Average over k of the baseline-adjusted overlap, normalized per k to
    [-1, 1] (values beyond the range, possible under ties, are clamped)."""
    n = cr.n
    ks = np.arange(1, cr.k_max + 1)
    baseline = ks / (n - 1)
    vals = (cr.q_nx - baseline) / (1.0 - baseline)
    return float(np.clip(vals, -1.0, 1.0).mean())


def q_lcmc(
    g: Graph,
    positions: np.ndarray,
    k_max: int = DEFAULT_K,
    dist: Optional[DistanceMatrix] = None,
    rank_high: Optional[np.ndarray] = None,
) -> float:
    return q_lcmc_from_coranking(co_ranking(g, positions, k_max, dist, rank_high))


def _rank_penalty(rank_a: np.ndarray, rank_b: np.ndarray, n: int, k: int) -> float:
    """Normalized penalty over nodes that are k-neighbors by rank_a but not
    by rank_b, weighted by their rank_b excess; shared by the
    trustworthiness / continuity pair."""
    offender = (rank_a <= k) & (rank_b > k)
    penalty = float((rank_b[offender] - k).sum())
    if 2 * k < n:
        norm = n * k * (2 * n - 3 * k - 1) / 2.0
    else:
        norm = n * (n - k) * (n - k - 1) / 2.0
    if norm <= 0:
        return 1.0 if penalty == 0 else 0.0
    return float(np.clip(1.0 - penalty / norm, 0.0, 1.0))


def q_trust(
    g: Graph,
    positions: np.ndarray,
    k: int = DEFAULT_K,
    dist: Optional[DistanceMatrix] = None,
    rank_high: Optional[np.ndarray] = None,
) -> float:
    """Penalizes layout neighbors that are not graph neighbors (1 = perfect)."""
    k_eff, _ = _effective_k(g.n, k)
    if rank_high is None:
        rank_high = graph_ranks(dist or bfs_distances(g))
    rank_low = layout_ranks(positions)
    return _rank_penalty(rank_low, rank_high, g.n, k_eff)


def q_cont(
    g: Graph,
    positions: np.ndarray,
    k: int = DEFAULT_K,
    dist: Optional[DistanceMatrix] = None,
    rank_high: Optional[np.ndarray] = None,
) -> float:
    """Penalizes graph neighbors missing from the layout neighborhood."""
    k_eff, _ = _effective_k(g.n, k)
    if rank_high is None:
        rank_high = graph_ranks(dist or bfs_distances(g))
    rank_low = layout_ranks(positions)
    return _rank_penalty(rank_high, rank_low, g.n, k_eff)


# ---------------------------------------------------------------------------
# Convergence and timing
# ---------------------------------------------------------------------------


def lcmc_curve(
    g: Graph, trace: LayoutTrace, k_max: int = DEFAULT_K, dist: Optional[DistanceMatrix] = None
) -> tuple[list[int], list[float]]:
    """Q_LCMC per trace snapshot; graph ranks are computed once."""
    rank_high = graph_ranks(dist or bfs_distances(g))
    iters, values = [], []
    for iteration, positions in trace.snapshots:
        iters.append(iteration)
        values.append(q_lcmc(g, positions, k_max, rank_high=rank_high))
    return iters, values


def c_lcmc(
    g: Graph, trace: LayoutTrace, k_max: int = DEFAULT_K, dist: Optional[DistanceMatrix] = None
) -> int:
    """First iteration from which Q_LCMC stays within 0.01 of its final value
    for the rest of the trace (sustained, so a dip-and-recover does not
    report a misleadingly early convergence)."""
    if not trace.snapshots:
        raise ValueError("empty trace")
    iters, values = lcmc_curve(g, trace, k_max, dist)
    final = values[-1]
    first = len(values) - 1
    while first > 0 and abs(values[first - 1] - final) <= 0.01:
        first -= 1
    return iters[first]


def timing(trace: LayoutTrace, convergence_iteration: int) -> TimingReport:
    """t_it from the trace, t_ait as the mean per-iteration wall time, and
    total time-to-convergence t_it + t_ait * convergence_iteration."""
    t_ait = float(np.mean(trace.iter_times)) if trace.iter_times else 0.0
    return TimingReport(
        t_it=trace.init_time,
        t_ait=t_ait,
        t_lcmc=trace.init_time + t_ait * convergence_iteration,
    )


# ---------------------------------------------------------------------------
# Readability metrics
# ---------------------------------------------------------------------------


def _proper_crossings(g: Graph, positions: np.ndarray) -> list[tuple[int, int]]:
    """Edge-index pairs whose open segments cross in a single interior point.
    Touching endpoints and collinear overlaps do not count."""
    E = len(g.edges)
    if E < 2:
        return []
    ends = np.array(g.edges, dtype=np.int64)
    p1 = positions[ends[:, 0]]
    p2 = positions[ends[:, 1]]
    crossings = []
    for i in range(E - 1):
        a, b = ends[i]
        js = np.arange(i + 1, E)
        disjoint = (
            (ends[js, 0] != a) & (ends[js, 0] != b) & (ends[js, 1] != a) & (ends[js, 1] != b)
        )
        js = js[disjoint]
        if js.size == 0:
            continue
        d1 = p2[i] - p1[i]
        r1 = p1[js] - p1[i]
        r2 = p2[js] - p1[i]
        o1 = d1[0] * r1[:, 1] - d1[1] * r1[:, 0]
        o2 = d1[0] * r2[:, 1] - d1[1] * r2[:, 0]
        d2 = p2[js] - p1[js]
        s1 = p1[i] - p1[js]
        s2 = p2[i] - p1[js]
        o3 = d2[:, 0] * s1[:, 1] - d2[:, 1] * s1[:, 0]
        o4 = d2[:, 0] * s2[:, 1] - d2[:, 1] * s2[:, 0]
        hit = (o1 * o2 < 0) & (o3 * o4 < 0)
        crossings.extend((i, int(j)) for j in js[hit])
    return crossings


def q_ec(g: Graph, positions: np.ndarray) -> float:
    """1 - crossings / possible crossings; pairs sharing an endpoint cannot
    cross and are excluded from the denominator. No possible pairs -> 1."""
    E = len(g.edges)
    deg = np.array([g.degree(i) for i in range(g.n)], dtype=np.int64)
    c_max = E * (E - 1) / 2.0 - float((deg * (deg - 1)).sum()) / 2.0
    if c_max <= 0:
        return 1.0
    crossings = len(_proper_crossings(g, positions))
    return float(np.clip(1.0 - crossings / c_max, 0.0, 1.0))


def _acute_angle_deg(d1: np.ndarray, d2: np.ndarray) -> float:
    n1 = math.hypot(d1[0], d1[1])
    n2 = math.hypot(d2[0], d2[1])
    if n1 == 0.0 or n2 == 0.0:
        return 90.0
    c = abs(float(d1[0] * d2[0] + d1[1] * d2[1])) / (n1 * n2)
    return math.degrees(math.acos(min(1.0, c)))


def q_ca(g: Graph, positions: np.ndarray) -> float:
    """1 - mean relative deviation of crossing angles from the ideal 70
    degrees; a drawing without crossings scores a vacuous 1."""
    pairs = _proper_crossings(g, positions)
    if not pairs:
        return 1.0
    ends = np.array(g.edges, dtype=np.int64)
    devs = []
    for i, j in pairs:
        d1 = positions[ends[i, 1]] - positions[ends[i, 0]]
        d2 = positions[ends[j, 1]] - positions[ends[j, 0]]
        phi = _acute_angle_deg(d1, d2)
        devs.append(abs(IDEAL_CROSSING_ANGLE_DEG - phi) / IDEAL_CROSSING_ANGLE_DEG)
    return float(np.clip(1.0 - float(np.mean(devs)), 0.0, 1.0))


def q_mar(g: Graph, positions: np.ndarray) -> float:
    """1 - mean relative deviation of each node's minimum incident-edge gap
    from its ideal angle 360 / degree; nodes of degree < 2 are skipped."""
    devs = []
    for v in range(g.n):
        nbrs = g.adjacency[v]
        if len(nbrs) < 2:
            continue
        angles = sorted(
            math.atan2(positions[u, 1] - positions[v, 1], positions[u, 0] - positions[v, 0])
            for u in nbrs
        )
        gaps = [b - a for a, b in zip(angles, angles[1:])]
        gaps.append(2.0 * math.pi - (angles[-1] - angles[0]))
        ideal = 2.0 * math.pi / len(nbrs)
        devs.append(abs(ideal - min(gaps)) / ideal)
    if not devs:
        return 1.0
    return float(np.clip(1.0 - float(np.mean(devs)), 0.0, 1.0))


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


def quality_report(
    g: Graph,
    trace: LayoutTrace,
    k: int = DEFAULT_K,
    dist: Optional[DistanceMatrix] = None,
    readability_edge_limit: int = READABILITY_EDGE_LIMIT,
) -> QualityReport:
    """All metrics on the final snapshot; convergence and timing over the
    whole trace. Readability metrics are skipped (NaN) above the edge limit
    because of their quadratic cost."""
    dist = dist or bfs_distances(g)
    rank_high = graph_ranks(dist)
    final = trace.final_positions()
    conv = c_lcmc(g, trace, k, dist)
    t = timing(trace, conv)
    small = len(g.edges) <= readability_edge_limit
    return QualityReport(
        q_lcmc=q_lcmc(g, final, k, rank_high=rank_high),
        q_trust=q_trust(g, final, k, rank_high=rank_high),
        q_cont=q_cont(g, final, k, rank_high=rank_high),
        q_ec=q_ec(g, final) if small else math.nan,
        q_ca=q_ca(g, final) if small else math.nan,
        q_mar=q_mar(g, final) if small else math.nan,
        c_lcmc=conv,
        t_it=t.t_it,
        t_ait=t.t_ait,
        t_lcmc=t.t_lcmc,
    )


CSV_HEADER = "dataset,scheme,seed,T_IT,T_AIT,C_LCMC,T_LCMC,Q_LCMC,Q_trust,Q_cont,Q_EC,Q_CA,Q_MAR"


def report_csv_rows(rows: Sequence[tuple[str, str, int, QualityReport]]) -> str:
    lines = [CSV_HEADER]
    for dataset, scheme, seed, r in rows:
        lines.append(
            f"{dataset},{scheme},{seed},{r.t_it!r},{r.t_ait!r},{r.c_lcmc},{r.t_lcmc!r},"
            f"{r.q_lcmc!r},{r.q_trust!r},{r.q_cont!r},{r.q_ec!r},{r.q_ca!r},{r.q_mar!r}"
        )
    return "\n".join(lines) + "\n"


def report_json(dataset: str, scheme: str, seed: int, r: QualityReport) -> dict:
    return {
        "dataset": dataset,
        "scheme": scheme,
        "seed": seed,
        "T_IT": r.t_it,
        "T_AIT": r.t_ait,
        "C_LCMC": r.c_lcmc,
        "T_LCMC": r.t_lcmc,
        "Q_LCMC": r.q_lcmc,
        "Q_trust": r.q_trust,
        "Q_cont": r.q_cont,
        "Q_EC": r.q_ec,
        "Q_CA": r.q_ca,
        "Q_MAR": r.q_mar,
    }


def sample_nodes(n: int, limit: int) -> np.ndarray:
    """Deterministic, evenly spaced node sample used for live score readouts
    on large sessions."""
    if n <= limit:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, limit).round().astype(np.int64))


def q_lcmc_sampled(
    g: Graph,
    positions: np.ndarray,
    sample: np.ndarray,
    dist: DistanceMatrix,
    k_max: int = DEFAULT_K,
) -> float:
    """Q_LCMC restricted to a node sample; hop distances stay those of the
    full graph, only the rank comparison is subsampled."""
    m = len(sample)
    if m < 3:
        raise ValueError("sample too small")
    k_eff = min(k_max, m - 2)
    d = dist.hops[np.ix_(sample, sample)].astype(np.float64)
    np.fill_diagonal(d, dist.unreachable + 1)
    rank_high = _min_rank_matrix(d)
    rank_low = layout_ranks(positions[sample])
    worst = np.maximum(rank_high, rank_low)
    ks = np.arange(1, k_eff + 1)
    q_nx = np.array([(worst <= k).sum(axis=1).mean() / k for k in ks])
    baseline = ks / (m - 1)
    vals = (q_nx - baseline) / (1.0 - baseline)
    return float(np.clip(vals, -1.0, 1.0).mean())
