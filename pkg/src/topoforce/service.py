"""Interactive session server bridging the engine and a browser client.

One session owns one graph, its persistence features, and one simulation.
A single asyncio task advances the simulation; client commands are queued
and applied only between steps. Frames fan out to WebSocket subscribers at
a throttled rate with latest-wins coalescing, each carrying the current
positions and a live neighborhood-overlap score (computed on a node sample
for sessions above 300 nodes).

Wire protocol (JSON text, versioned with "v"):
  server -> client: {type: "barcode"|"frame"|"cycle"|"ack"|"error", ...}
  client -> server: {type: "hover_h1"|"click_h1"|"toggle_h1"|
                     "set_h0_threshold"|"pause"|"resume"|"reheat"|"step", ...}
"""

from __future__ import annotations

import asyncio
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .graph import Graph, GraphFormat, bfs_distances, parse_graph
from .metrics import q_lcmc_sampled, sample_nodes
from .persistence import barcode_to_json, build_barcode, compute_persistence
from .pipeline import apply_weighting
from . import generators
from .initial import initial_layout
from .simulation import (
    add_elliptical_force,
    add_h0_force,
    init_sim,
    reheat,
    remove_force,
    select_h0_by_threshold,
    step,
)

PROTOCOL_VERSION = 1
QLCMC_SAMPLE_LIMIT = 300


class SessionRequest(BaseModel):
    generator: Optional[str] = None
    edges_tsv: Optional[str] = None
    graph_json: Optional[dict] = None
    weighting: str = "auto"
    scheme: str = "radial"
    seed: int = 0
    sim: dict = {}
    canvas: tuple[float, float] = (1000.0, 1000.0)
    start_paused: bool = False
    frame_rate: float = 30.0


class CommandError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


def _load_source(req: SessionRequest) -> Graph:
    sources = [s for s in (req.generator, req.edges_tsv, req.graph_json) if s is not None]
    if len(sources) != 1:
        raise CommandError("bad_source", "provide exactly one of generator/edges_tsv/graph_json")
    if req.generator is not None:
        return generators.from_spec(req.generator)
    if req.edges_tsv is not None:
        g, _ = parse_graph(req.edges_tsv, GraphFormat.EDGE_LIST_TSV)
        return g
    import json as _json

    g, _ = parse_graph(_json.dumps(req.graph_json), GraphFormat.GRAPH_JSON)
    return g


class Session:
    def __init__(self, sid: str, req: SessionRequest):
        from .simulation import SimConfig

        self.id = sid
        self.graph = apply_weighting(_load_source(req), req.weighting)
        self.persistence = compute_persistence(self.graph)
        layout = initial_layout(
            self.graph, req.scheme, req.seed, req.canvas,
            forest_edges=self.persistence.forest_edges if req.scheme != "random" else None,
        )
        cfg = SimConfig(**req.sim)
        center = (req.canvas[0] / 2.0, req.canvas[1] / 2.0)
        self.state = init_sim(self.graph, layout, cfg, center=center)
        self.dist = bfs_distances(self.graph)
        self.sample = sample_nodes(self.graph.n, QLCMC_SAMPLE_LIMIT)
        self.running = not req.start_paused
        self.frame_interval = 1.0 / max(req.frame_rate, 0.1)
        self.subscribers: list[asyncio.Queue] = []
        self.commands: asyncio.Queue = asyncio.Queue()
        self.closed = False
        self._last_emit = 0.0
        self.task: Optional[asyncio.Task] = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self.task = asyncio.get_running_loop().create_task(self._loop())

    def close(self) -> None:
        self.closed = True
        if self.task is not None:
            self.task.cancel()

    def subscribe(self) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue(maxsize=1)
        self.subscribers.append(q)
        self._emit_frame(force=True)
        return q

    def unsubscribe(self, q: asyncio.Queue) -> None:
        if q in self.subscribers:
            self.subscribers.remove(q)

    # -- messages ----------------------------------------------------------

    def barcode_message(self) -> dict:
        return {
            "v": PROTOCOL_VERSION,
            "type": "barcode",
            "h0": barcode_to_json(build_barcode(self.persistence, 0)),
            "h1": barcode_to_json(build_barcode(self.persistence, 1)),
        }

    def _frame(self) -> dict:
        s = self.state
        frame = {
            "v": PROTOCOL_VERSION,
            "type": "frame",
            "iter": s.iteration,
            "alpha": s.alpha,
            "pos": [[s.x[i], s.y[i]] for i in range(s.n)],
        }
        if self.graph.n >= 3:
            frame["qlcmc"] = q_lcmc_sampled(
                self.graph, s.positions(), self.sample, self.dist
            )
        return frame

    def _emit_frame(self, force: bool = False) -> None:
        now = time.monotonic()
        if not force and now - self._last_emit < self.frame_interval:
            return
        if not self.subscribers:
            return
        self._last_emit = now
        frame = self._frame()
        for q in self.subscribers:
            if q.full():
                q.get_nowait()  # coalesce: latest wins
            q.put_nowait(frame)

    # -- command handling ----------------------------------------------------

    def hover_cycle(self, feature_id: int) -> dict:
        """Read-only: extracting a cycle never touches the simulation."""
        self._check_h1_feature(feature_id)
        cycle = self.persistence.get_cycle(self.graph, feature_id)
        return {
            "v": PROTOCOL_VERSION,
            "type": "cycle",
            "feature_id": feature_id,
            "nodes": list(cycle.nodes),
        }

    def exact_score(self) -> dict:
        """Read-only full-graph score (frames carry a sampled one on large
        sessions); steps are synchronous, so this never sees a half-step."""
        s = self.state
        value = None
        if self.graph.n >= 3:
            value = q_lcmc_sampled(
                self.graph, s.positions(), sample_nodes(self.graph.n, self.graph.n), self.dist
            )
        return {
            "v": PROTOCOL_VERSION,
            "type": "qlcmc",
            "iter": s.iteration,
            "value": value,
        }

    def _check_h1_feature(self, feature_id) -> None:
        cands = self.persistence.h1_candidates
        if not isinstance(feature_id, int) or not 0 <= feature_id < len(cands):
            raise CommandError("unknown_feature", f"no cycle feature {feature_id!r}")
        if cands[feature_id].trivial:
            raise CommandError("unknown_feature", f"feature {feature_id} is a trivial cycle")

    async def submit(self, payload: dict) -> dict:
        """Queue a state-mutating command; resolves after it is applied
        between steps."""
        fut: asyncio.Future = asyncio.get_running_loop().create_future()
        await self.commands.put((payload, fut))
        return await fut

    async def _apply(self, payload: dict) -> dict:
        cmd = payload.get("type")
        s = self.state
        if cmd == "click_h1":
            fid = payload.get("feature_id")
            self._check_h1_feature(fid)
            force_id = f"ellipse:{fid}"
            if force_id in s.force_ids():
                raise CommandError("feature_active", f"feature {fid} already has a force")
            aspect = float(payload.get("aspect", 1.0))
            cycle = self.persistence.get_cycle(self.graph, fid)
            add_elliptical_force(s, cycle, aspect=aspect, force_id=force_id)
        elif cmd == "toggle_h1":
            fid = payload.get("feature_id")
            self._check_h1_feature(fid)
            try:
                remove_force(s, f"ellipse:{fid}")
            except KeyError:
                raise CommandError("not_active", f"feature {fid} has no active force") from None
        elif cmd == "set_h0_threshold":
            threshold = float(payload["value"])
            selected = select_h0_by_threshold(self.persistence.h0_events, threshold)
            if selected:
                add_h0_force(s, selected)
            elif "h0" in s.force_ids():
                remove_force(s, "h0")
        elif cmd == "pause":
            self.running = False
        elif cmd == "resume":
            self.running = True
        elif cmd == "reheat":
            reheat(s)
        elif cmd == "step":
            self.running = False
            n = int(payload.get("n", 1))
            for i in range(n):
                step(s)
                if i % 25 == 24:
                    await asyncio.sleep(0)
        else:
            raise CommandError("unknown_command", f"unsupported command {cmd!r}")
        return {
            "v": PROTOCOL_VERSION,
            "type": "ack",
            "cmd": cmd,
            "iter": s.iteration,
            "alpha": s.alpha,
            "forces": s.force_ids(),
        }

    # -- stepping loop -------------------------------------------------------

    def _converged(self) -> bool:
        return self.state.alpha < self.state.config.alpha_min

    async def _loop(self) -> None:
        while not self.closed:
            acted = False
            while not self.commands.empty():
                payload, fut = self.commands.get_nowait()
                try:
                    result = await self._apply(payload)
                    if not fut.done():
                        fut.set_result(result)
                except CommandError as exc:
                    if not fut.done():
                        fut.set_result(
                            {
                                "v": PROTOCOL_VERSION,
                                "type": "error",
                                "code": exc.code,
                                "message": str(exc),
                            }
                        )
                acted = True
            if acted:
                self._emit_frame(force=True)
            stepped = False
            if self.running and not self._converged():
                step(self.state)
                stepped = True
                self._emit_frame()
                if self._converged():
                    self._emit_frame(force=True)
            await asyncio.sleep(0.0 if (stepped or acted) else 0.02)


def create_app(ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="topoforce session service")
    sessions: dict[str, Session] = {}
    counter = {"next": 0}
    app.state.sessions = sessions

    @app.post("/session")
    async def create_session(req: SessionRequest):
        try:
            sid = f"s{counter['next']}"
            counter["next"] += 1
            session = Session(sid, req)
        except CommandError as exc:
            return JSONResponse(
                status_code=400,
                content={"v": PROTOCOL_VERSION, "type": "error", "code": exc.code,
                         "message": str(exc)},
            )
        except (ValueError, TypeError) as exc:
            return JSONResponse(
                status_code=400,
                content={"v": PROTOCOL_VERSION, "type": "error", "code": "bad_request",
                         "message": str(exc)},
            )
        sessions[sid] = session
        session.start()
        return {
            "v": PROTOCOL_VERSION,
            "session_id": sid,
            "n": session.graph.n,
            "labels": list(session.graph.labels),
            "edges": [list(e) for e in session.graph.edges],
            "barcode": session.barcode_message(),
        }

    @app.delete("/session/{sid}")
    async def delete_session(sid: str):
        session = sessions.pop(sid, None)
        if session is None:
            return JSONResponse(
                status_code=404,
                content={"v": PROTOCOL_VERSION, "type": "error",
                         "code": "unknown_session", "message": sid},
            )
        session.close()
        return {"v": PROTOCOL_VERSION, "type": "ack", "cmd": "delete"}

    @app.websocket("/ws/{sid}")
    async def session_ws(ws: WebSocket, sid: str):
        session = sessions.get(sid)
        if session is None:
            await ws.close(code=4404)
            return
        await ws.accept()
        await ws.send_json(session.barcode_message())
        queue = session.subscribe()

        async def relay():
            while True:
                frame = await queue.get()
                await ws.send_json(frame)

        relay_task = asyncio.get_running_loop().create_task(relay())
        try:
            while True:
                payload = await ws.receive_json()
                msg_type = payload.get("type")
                if msg_type in ("hover_h1", "qlcmc_exact"):  # read-only commands
                    try:
                        if msg_type == "hover_h1":
                            reply = session.hover_cycle(payload.get("feature_id"))
                        else:
                            reply = session.exact_score()
                    except CommandError as exc:
                        reply = {
                            "v": PROTOCOL_VERSION, "type": "error",
                            "code": exc.code, "message": str(exc),
                        }
                    await ws.send_json(reply)
                else:
                    await ws.send_json(await session.submit(payload))
        except WebSocketDisconnect:
            pass
        finally:
            relay_task.cancel()
            session.unsubscribe(queue)

    static_root = Path(ui_dir) if ui_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if static_root.is_dir():
        app.mount("/", StaticFiles(directory=str(static_root), html=True), name="ui")
    return app
