"""End-to-end run orchestration shared by the CLI and the service.

A RunSpec pins everything needed to reproduce a run: input source, weighting
mode, layout scheme, seed, simulation overrides, and an optional force
script (iteration-stamped interaction commands), so batch runs can replay
interactive sessions deterministically.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import generators
from .graph import Graph, GraphFormat, jaccard_weights, parse_graph
from .initial import Layout, initial_layout
from .persistence import PersistenceResult, compute_persistence
from .simulation import (
    LayoutTrace,
    SimConfig,
    SimState,
    add_elliptical_force,
    add_h0_force,
    init_sim,
    remove_force,
    run,
    select_h0_by_threshold,
)

SCHEMES = ("layered", "radial", "random")
WEIGHTINGS = ("auto", "given", "jaccard")


@dataclass(frozen=True)
class ScriptCommand:
    """One interaction applied just before the stamped iteration."""

    at: int
    op: str  # "ellipse" | "h0_threshold" | "remove"
    feature: Optional[str] = None  # candidate index or "longest" (ellipse)
    aspect: float = 1.0
    strength: Optional[float] = None
    threshold: Optional[float] = None  # h0_threshold
    force_id: Optional[str] = None  # remove

    def to_json(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


@dataclass(frozen=True)
class RunSpec:
    generator: Optional[str] = None  # e.g. "circular_ladder:30"
    input_path: Optional[str] = None
    input_format: Optional[str] = None  # "tsv" | "json"; inferred from suffix
    weighting: str = "auto"
    scheme: str = "radial"
    seed: int = 0
    canvas: tuple[float, float] = (1000.0, 1000.0)
    sim: dict = field(default_factory=dict)  # SimConfig overrides
    iterations: Optional[int] = None  # total steps; None -> config.max_iterations
    snapshot_every: int = 1
    script: tuple[ScriptCommand, ...] = ()

    def __post_init__(self):
        if (self.generator is None) == (self.input_path is None):
            raise ValueError("exactly one of generator / input_path must be set")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}")

    @property
    def dataset_name(self) -> str:
        if self.generator:
            return self.generator
        return Path(self.input_path).stem

    def to_json(self) -> dict:
        doc = {
            "weighting": self.weighting,
            "scheme": self.scheme,
            "seed": self.seed,
            "canvas": list(self.canvas),
            "sim": dict(self.sim),
            "snapshot_every": self.snapshot_every,
            "script": [c.to_json() for c in self.script],
        }
        if self.generator:
            doc["generator"] = self.generator
        else:
            doc["input_path"] = self.input_path
            if self.input_format:
                doc["input_format"] = self.input_format
        if self.iterations is not None:
            doc["iterations"] = self.iterations
        return doc

    @staticmethod
    def from_json(doc: dict) -> "RunSpec":
        script = tuple(ScriptCommand(**c) for c in doc.get("script", ()))
        return RunSpec(
            generator=doc.get("generator"),
            input_path=doc.get("input_path"),
            input_format=doc.get("input_format"),
            weighting=doc.get("weighting", "auto"),
            scheme=doc.get("scheme", "radial"),
            seed=int(doc.get("seed", 0)),
            canvas=tuple(doc.get("canvas", (1000.0, 1000.0))),
            sim=dict(doc.get("sim", {})),
            iterations=doc.get("iterations"),
            snapshot_every=int(doc.get("snapshot_every", 1)),
            script=script,
        )


@dataclass
class PipelineRun:
    spec: RunSpec
    graph: Graph
    persistence: Optional[PersistenceResult]
    layout0: Layout
    state: SimState
    trace: LayoutTrace


def load_graph(spec: RunSpec) -> Graph:
    if spec.generator:
        return generators.from_spec(spec.generator)
    path = Path(spec.input_path)
    fmt_name = spec.input_format or ("json" if path.suffix == ".json" else "tsv")
    fmt = GraphFormat.GRAPH_JSON if fmt_name == "json" else GraphFormat.EDGE_LIST_TSV
    g, _report = parse_graph(path.read_bytes(), fmt)
    return g


def apply_weighting(g: Graph, weighting: str) -> Graph:
    if weighting == "given":
        if g.weights is None:
            raise ValueError("weighting 'given' but the input carries no weights")
        return g
    if weighting == "jaccard":
        return jaccard_weights(g)
    return g if g.weights is not None else jaccard_weights(g)


def _longest_nontrivial_cycle_id(g: Graph, p: PersistenceResult) -> int:
    best_id, best_len = -1, -1
    for i, cand in enumerate(p.h1_candidates):
        if cand.trivial:
            continue
        cycle = p.get_cycle(g, i)
        if len(cycle.nodes) > best_len:
            best_id, best_len = i, len(cycle.nodes)
    if best_id < 0:
        raise ValueError("graph has no non-trivial cycle features")
    return best_id


def _apply_script_command(
    cmd: ScriptCommand, state: SimState, g: Graph, p: Optional[PersistenceResult]
) -> None:
    if cmd.op in ("ellipse", "h0_threshold") and p is None:
        raise ValueError(f"script op {cmd.op!r} needs persistence")
    if cmd.op == "ellipse":
        if cmd.feature == "longest":
            fid = _longest_nontrivial_cycle_id(g, p)
        else:
            fid = int(cmd.feature)
        cycle = p.get_cycle(g, fid)
        add_elliptical_force(
            state, cycle, aspect=cmd.aspect, strength=cmd.strength, force_id=f"ellipse:{fid}"
        )
    elif cmd.op == "h0_threshold":
        selected = select_h0_by_threshold(p.h0_events, cmd.threshold)
        if selected:
            add_h0_force(state, selected, strength=cmd.strength)
        else:
            try:
                remove_force(state, "h0")
            except KeyError:
                pass
    elif cmd.op == "remove":
        remove_force(state, cmd.force_id)
    else:
        raise ValueError(f"unknown script op {cmd.op!r}")


def run_pipeline(spec: RunSpec) -> PipelineRun:
    """Load/generate, weight, lay out, and simulate per the spec.

    init_time covers what each approach pays before the simulation takes
    over: persistence plus tree layout for layered/radial, only the RNG
    draw for random. Jaccard weighting is shared preprocessing and excluded.
    """
    g = apply_weighting(load_graph(spec), spec.weighting)
    needs_persistence = spec.scheme != "random" or any(
        c.op in ("ellipse", "h0_threshold") for c in spec.script
    )

    t0 = time.perf_counter()
    persistence = compute_persistence(g) if needs_persistence else None
    if spec.scheme == "random":
        t0 = time.perf_counter()  # persistence (if any) is not part of random's init
        layout0 = initial_layout(g, "random", spec.seed, spec.canvas)
    else:
        layout0 = initial_layout(
            g, spec.scheme, spec.seed, spec.canvas, forest_edges=persistence.forest_edges
        )
    init_time = time.perf_counter() - t0

    cfg_kwargs = dict(spec.sim)
    if spec.iterations is not None:
        cfg_kwargs["max_iterations"] = spec.iterations
    cfg = SimConfig(**cfg_kwargs)
    center = (spec.canvas[0] / 2.0, spec.canvas[1] / 2.0)
    state = init_sim(g, layout0, cfg, center=center)

    pending = sorted(spec.script, key=lambda c: c.at)
    queue = list(pending)

    def before_step(s: SimState) -> None:
        while queue and queue[0].at <= s.iteration:
            _apply_script_command(queue.pop(0), s, g, persistence)

    trace = run(state, stop="max_iterations", snapshot_every=spec.snapshot_every,
                on_before_step=before_step)
    trace.init_time = init_time
    return PipelineRun(spec, g, persistence, layout0, state, trace)
