"""Batch command-line pipeline: generate, layout, metrics, persistence, serve.

All artifacts land under --out with fixed names (layout.json, trace.jsonl,
barcode.json, cycles.json, report.csv/.json, runspec.json) and rerunning an
identical spec reproduces them byte-for-byte except for timing fields.
Errors exit non-zero with one JSON diagnostic line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import generators
from .graph import to_edge_list_tsv
from .metrics import quality_report, report_csv_rows, report_json
from .persistence import barcode_to_json, build_barcode, cycle_to_json
from .pipeline import RunSpec, ScriptCommand, run_pipeline

_JSON_KW = dict(sort_keys=True, indent=2)


def _dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, **_JSON_KW) + "\n", encoding="utf-8")


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", help="edge list (.tsv) or node-link (.json) file")
    src.add_argument("--generator", help="generator spec, e.g. circular_ladder:30")
    p.add_argument("--format", choices=["tsv", "json"], help="input format override")
    p.add_argument("--weighting", choices=["auto", "given", "jaccard"], default="auto")
    p.add_argument("--scheme", choices=["layered", "radial", "random"], default="radial")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--canvas", default="1000x1000", help="WxH canvas size")
    p.add_argument("--iterations", type=int, help="total simulation steps")
    p.add_argument("--snapshot-every", type=int, default=1)
    p.add_argument("--sim", help="JSON object of simulation config overrides")
    p.add_argument("--script", help="JSON list of iteration-stamped force commands")
    p.add_argument("--config", help="JSON file holding a full run spec (flags win)")


def _spec_from_args(args: argparse.Namespace) -> RunSpec:
    base: dict = {}
    if args.config:
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
    w, _, h = args.canvas.partition("x")
    flags = {
        "generator": args.generator,
        "input_path": args.input,
        "input_format": args.format,
        "weighting": args.weighting,
        "scheme": args.scheme,
        "seed": args.seed,
        "canvas": (float(w), float(h)),
        "iterations": args.iterations,
        "snapshot_every": args.snapshot_every,
    }
    if args.sim:
        flags["sim"] = json.loads(args.sim)
    if args.script:
        flags["script"] = [ScriptCommand(**c) for c in json.loads(args.script)]
    merged = dict(base)
    defaults = {
        "weighting": "auto", "scheme": "radial", "seed": 0,
        "canvas": (1000.0, 1000.0), "snapshot_every": 1,
    }
    for key, value in flags.items():
        if value is None:
            continue
        if key in defaults and value == defaults[key] and key in merged:
            continue  # an explicit config file entry beats an untouched default
        merged[key] = value
    if "script" in merged and merged["script"] and isinstance(merged["script"][0], dict):
        merged["script"] = [ScriptCommand(**c) for c in merged["script"]]
    merged["script"] = tuple(merged.get("script", ()))
    if "canvas" in merged:
        merged["canvas"] = tuple(merged["canvas"])
    return RunSpec(**merged)


def _trace_jsonl(result) -> str:
    labels = result.graph.labels
    cumulative = 0.0
    times = result.trace.iter_times
    by_iter = {}
    consumed = 0
    for iteration, positions in result.trace.snapshots:
        while consumed < iteration and consumed < len(times):
            cumulative += times[consumed]
            consumed += 1
        pos = {labels[i]: [float(positions[i, 0]), float(positions[i, 1])] for i in range(len(labels))}
        by_iter[iteration] = {"iter": iteration, "t_ms": cumulative * 1000.0, "pos": pos}
    return "\n".join(json.dumps(by_iter[i], sort_keys=True) for i in sorted(by_iter)) + "\n"


def cmd_generate(args) -> int:
    g = generators.from_spec(args.generator)
    text = to_edge_list_tsv(g)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def cmd_layout(args) -> int:
    spec = _spec_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run_pipeline(spec)
    labels = result.graph.labels
    final = {labels[i]: [result.state.x[i], result.state.y[i]] for i in range(result.graph.n)}
    _dump(out / "layout.json", final)
    (out / "trace.jsonl").write_text(_trace_jsonl(result), encoding="utf-8")
    _dump(out / "runspec.json", spec.to_json())
    return 0


def cmd_metrics(args) -> int:
    spec = _spec_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    result = run_pipeline(spec)
    rep = quality_report(result.graph, result.trace)
    rows.append((spec.dataset_name, spec.scheme, spec.seed, rep))
    if args.compare:
        import dataclasses

        other_spec = dataclasses.replace(spec, scheme=args.compare)
        other = run_pipeline(other_spec)
        rows.append(
            (other_spec.dataset_name, other_spec.scheme, other_spec.seed,
             quality_report(other.graph, other.trace))
        )
    (out / "report.csv").write_text(report_csv_rows(rows), encoding="utf-8")
    _dump(out / "report.json", [report_json(*row) for row in rows])
    _dump(out / "runspec.json", spec.to_json())
    return 0


def cmd_persistence(args) -> int:
    spec = _spec_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    from .pipeline import apply_weighting, load_graph
    from .persistence import compute_persistence

    g = apply_weighting(load_graph(spec), spec.weighting)
    p = compute_persistence(g)
    _dump(out / "barcode.json", {
        "h0": barcode_to_json(build_barcode(p, 0)),
        "h1": barcode_to_json(build_barcode(p, 1)),
    })
    if args.cycles != "none":
        ids = [i for i, c in enumerate(p.h1_candidates) if not c.trivial]
        if args.cycles.startswith("top:"):
            limit = int(args.cycles.split(":", 1)[1])
            ids.sort(key=lambda i: -p.h1_candidates[i].birth)
            ids = sorted(ids[:limit])
        cycles = [cycle_to_json(i, p.get_cycle(g, i)) for i in ids]
        _dump(out / "cycles.json", cycles)
    _dump(out / "runspec.json", spec.to_json())
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topoforce")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a generated graph as edge-list TSV")
    p.add_argument("--generator", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("layout", help="run the pipeline; write layout.json + trace.jsonl")
    _add_spec_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("metrics", help="run the pipeline; write report.csv / report.json")
    _add_spec_args(p)
    p.add_argument("--compare", choices=["layered", "radial", "random"],
                   help="add a second row for the same graph under another scheme")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("persistence", help="write barcode.json and optional cycles.json")
    _add_spec_args(p)
    p.add_argument("--cycles", default="none", help="none | all | top:K")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_persistence)

    p = sub.add_parser("serve", help="launch the interactive session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surfaced as machine-readable diagnostics
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
