"""Iterative force-directed layout with cooling, tracing, and interactive forces.

Each step decays the global temperature alpha toward zero, lets every active
force accumulate velocity changes scaled by alpha, damps velocities, and
integrates positions. Interaction (adding or removing a force) re-heats
alpha so the layout can adapt. The run loop records a LayoutTrace with
per-iteration wall times for the convergence and timing metrics.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .forces import CenterForce, EllipseForce, LinkForce, ManyBodyForce, SpringForce, ellipse_targets
from .graph import Graph
from .initial import Layout
from .persistence import CyclePath, H0Event

logger = logging.getLogger(__name__)

STANDARD_FORCE_IDS = ("link", "charge", "center")
REHEAT_FACTOR = 0.5


class SimulationError(RuntimeError):
    """A node position became non-finite (force blowup diagnostics)."""


@dataclass(frozen=True)
class SimConfig:
    """Numeric knobs of the simulation; defaults reproduce the standard
    web-framework force layout (300 cooling iterations to alpha 0.001)."""

    link_strength: Optional[float] = None  # None: 1 / min(degree) per link
    link_distance: float = 30.0
    repulsion_strength: float = -30.0
    repulsion_theta: float = 0.9
    center_strength: float = 1.0
    alpha_initial: float = 1.0
    alpha_min: float = 0.001
    alpha_decay: float = 1.0 - 0.001 ** (1.0 / 300.0)
    velocity_decay: float = 0.4
    max_iterations: int = 300
    h0_strength: float = 2.0
    ellipse_strength: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha_min <= self.alpha_initial:
            raise ValueError("alpha_min must be in (0, alpha_initial]")
        if not 0.0 < self.alpha_decay < 1.0:
            raise ValueError("alpha_decay must be in (0, 1)")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if not 0.0 <= self.velocity_decay < 1.0:
            raise ValueError("velocity_decay must be in [0, 1)")


@dataclass
class SimState:
    """Mutable simulation state owned by a single stepping context."""

    config: SimConfig
    x: list[float]
    y: list[float]
    vx: list[float]
    vy: list[float]
    alpha: float
    iteration: int = 0
    forces: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.x)

    def positions(self) -> np.ndarray:
        return np.column_stack([self.x, self.y]).astype(float)

    def force_ids(self) -> list[str]:
        return [f.id for f in self.forces]

    def _find_force(self, force_id: str) -> int:
        for i, f in enumerate(self.forces):
            if f.id == force_id:
                return i
        raise KeyError(f"no force with id {force_id!r}")


@dataclass
class LayoutTrace:
    """Per-iteration snapshots (possibly thinned) plus wall-time accounting."""

    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)
    iter_times: list[float] = field(default_factory=list)
    init_time: float = 0.0

    def iterations(self) -> list[int]:
        return [it for it, _ in self.snapshots]

    def final_positions(self) -> np.ndarray:
        return self.snapshots[-1][1]


def init_sim(
    g: Graph,
    layout: Layout,
    cfg: Optional[SimConfig] = None,
    forces: Optional[Sequence] = None,
    center: tuple[float, float] = (500.0, 500.0),
) -> SimState:
    """Fresh state at iteration 0: zero velocities, alpha at its initial
    value, and the standard link / charge / center forces installed unless an
    explicit force list (possibly empty) overrides them."""
    cfg = cfg or SimConfig()
    if layout.positions.shape[0] != g.n:
        raise ValueError("layout does not cover every node")
    state = SimState(
        config=cfg,
        x=[float(v) for v in layout.positions[:, 0]],
        y=[float(v) for v in layout.positions[:, 1]],
        vx=[0.0] * g.n,
        vy=[0.0] * g.n,
        alpha=cfg.alpha_initial,
    )
    if forces is None:
        state.forces = [
            LinkForce(g, distance=cfg.link_distance, strength=cfg.link_strength),
            ManyBodyForce(strength=cfg.repulsion_strength, theta=cfg.repulsion_theta),
            CenterForce(center[0], center[1], strength=cfg.center_strength),
        ]
    else:
        state.forces = list(forces)
    return state


def step(state: SimState) -> SimState:
    """One iteration; mutates and returns the state. Deterministic."""
    cfg = state.config
    state.alpha += (0.0 - state.alpha) * cfg.alpha_decay
    for force in state.forces:
        force.apply(state, state.alpha)
    keep = 1.0 - cfg.velocity_decay
    x, y, vx, vy = state.x, state.y, state.vx, state.vy
    for i in range(len(x)):
        vx[i] *= keep
        x[i] += vx[i]
        vy[i] *= keep
        y[i] += vy[i]
    state.iteration += 1
    for i in range(len(x)):
        if not (math.isfinite(x[i]) and math.isfinite(y[i])):
            raise SimulationError(f"node {i} position became non-finite at iteration {state.iteration}")
    return state


def run(
    state: SimState,
    stop: str = "max_iterations",
    snapshot_every: int = 1,
    on_before_step: Optional[Callable[[SimState], None]] = None,
) -> LayoutTrace:
    """Step until the stop condition and collect a trace.

    ``stop``: 'max_iterations' runs exactly config.max_iterations steps;
    'alpha_min' stops once alpha drops below config.alpha_min. The trace
    always contains the starting and final snapshots; intermediate ones are
    kept every ``snapshot_every`` iterations.
    """
    if stop not in ("max_iterations", "alpha_min"):
        raise ValueError(f"unknown stop condition {stop!r}")
    if snapshot_every < 1:
        raise ValueError("snapshot_every must be >= 1")
    trace = LayoutTrace()
    trace.snapshots.append((state.iteration, state.positions()))
    steps_done = 0
    while True:
        if stop == "max_iterations":
            if steps_done >= state.config.max_iterations:
                break
        elif state.alpha < state.config.alpha_min:
            break
        if on_before_step is not None:
            on_before_step(state)
        t0 = time.perf_counter()
        step(state)
        trace.iter_times.append(time.perf_counter() - t0)
        steps_done += 1
        if state.iteration % snapshot_every == 0:
            trace.snapshots.append((state.iteration, state.positions()))
    if trace.snapshots[-1][0] != state.iteration:
        trace.snapshots.append((state.iteration, state.positions()))
    return trace


def reheat(state: SimState) -> SimState:
    state.alpha = state.config.alpha_initial * REHEAT_FACTOR
    return state


def select_h0_by_threshold(events: Sequence[H0Event], threshold: float) -> list[H0Event]:
    """Slider semantics: every component-merge event with death >= threshold."""
    return [e for e in events if e.death >= threshold]


def add_h0_force(
    state: SimState, events: Sequence[H0Event], strength: Optional[float] = None
) -> SimState:
    """Install zero-length springs on the forest edges of the selected merge
    events, replacing any previous selection. An empty selection leaves the
    state untouched (no reheat)."""
    if not events:
        return state
    strength = state.config.h0_strength if strength is None else strength
    pairs = [(e.u, e.v) for e in events]
    try:
        state.forces[state._find_force("h0")] = SpringForce(pairs, strength)
    except KeyError:
        state.forces.append(SpringForce(pairs, strength))
    return reheat(state)


def add_elliptical_force(
    state: SimState,
    cycle: CyclePath,
    aspect: float,
    strength: Optional[float] = None,
    force_id: Optional[str] = None,
) -> SimState:
    """Fit an ellipse over the cycle's current positions and attract each
    cycle node toward its assigned target point."""
    if len(cycle.nodes) < 4:
        raise ValueError("cycles shorter than 4 nodes cannot carry an elliptical force")
    if not 0.0 < aspect <= 1.0:
        raise ValueError("aspect must be in (0, 1]")
    strength = state.config.ellipse_strength if strength is None else strength
    if force_id is None:
        u, v = cycle.generating_edge
        force_id = f"ellipse:{u}-{v}"
    if force_id in state.force_ids():
        raise ValueError(f"force id {force_id!r} already active")
    positions = [(state.x[i], state.y[i]) for i in range(state.n)]
    targets, fa, fb = ellipse_targets(positions, cycle.nodes, aspect)
    state.forces.append(
        EllipseForce(cycle.nodes, targets, strength, force_id, aspect, fa, fb)
    )
    return reheat(state)


def remove_force(state: SimState, force_id: str) -> SimState:
    """Drop a force by id and reheat. Removing one of the standard forces is
    permitted but logged, since the layout degenerates without them."""
    idx = state._find_force(force_id)
    if force_id in STANDARD_FORCE_IDS:
        logger.warning("removing standard force %r", force_id)
    state.forces.pop(idx)
    return reheat(state)
