"""Command line entry points: elicit run | route | bench | serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import emit_report, load_suite, run_benchmark
from .fixtures import load_registry
from .interpreter import (
    FaultyBackend,
    KeywordBackend,
    ModelServerBackend,
    RetryPolicy,
    ScriptedBackend,
)
from .model import LatticeRegistry, parse_lattice
from .orchestrator import RunBudget, run_elicitation, utc_now_iso
from .router import build_centroids, route, similarity_scores
from .scribe import compile_spec


def _registry_for(lattice_arg: str | None) -> tuple[LatticeRegistry, str | None]:
    """Resolve --lattice as a bundled family id or a lattice file path."""
    registry = load_registry()
    if lattice_arg is None:
        return registry, None
    if lattice_arg in registry:
        return registry, lattice_arg
    path = Path(lattice_arg)
    if path.exists():
        lattice = parse_lattice(path.read_text("utf-8"))
        if lattice.family_id not in registry:
            registry.add(lattice)
        return registry, lattice.family_id
    raise SystemExit(f"--lattice {lattice_arg!r} is neither a family nor a file")


def _make_backend(args) -> object:
    if args.backend == "keyword":
        return KeywordBackend()
    if args.backend == "model":
        return ModelServerBackend(base_url=args.model_url)
    if args.backend == "scripted":
        if not args.script:
            raise SystemExit("--backend scripted requires --script FILE")
        script = json.loads(Path(args.script).read_text("utf-8"))
        return ScriptedBackend(script)
    if args.backend == "faulty":
        return FaultyBackend(fault_rate=args.fault_rate, seed=args.seed)
    raise SystemExit(f"unknown backend {args.backend}")


def _add_backend_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--backend",
        choices=["model", "keyword", "scripted", "faulty"],
        default="keyword",
    )
    parser.add_argument("--script", help="JSON file mapping node id to chosen ids")
    parser.add_argument("--fault-rate", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--model-url", help="model server base URL")


def cmd_run(args) -> int:
    registry, family_id = _registry_for(args.lattice)
    vision = Path(args.vision).read_text("utf-8") if args.vision else ""
    if family_id is None:
        family_id = route(vision, build_centroids(registry))
        print(f"routed vision to family: {family_id}", file=sys.stderr)
    lattice = registry.get(family_id)
    budget = RunBudget(
        max_transitions=args.max_transitions, max_model_calls=args.max_model_calls
    )
    policy = RetryPolicy(retry_cap=args.retry_cap, on_exhaustion=args.on_exhaustion)
    audit_path = None
    if args.audit:
        audit_dir = Path(args.audit)
        audit_dir.mkdir(parents=True, exist_ok=True)
        audit_path = audit_dir / f"{args.session_id}.audit.jsonl"
    outcome = run_elicitation(
        lattice, vision, _make_backend(args), budget=budget, policy=policy,
        audit_path=audit_path,
    )
    print(
        f"status={outcome.status.value} selected={len(outcome.final_selection)} "
        f"model_calls={outcome.model_calls} rejections={outcome.rejections} "
        f"repairs={outcome.repairs} transitions={outcome.transitions}"
    )
    if outcome.completed and (args.out or args.sidecar):
        # Provenance lives in the audit trail; recover it when available.
        provenance = None
        if audit_path is not None:
            from .orchestrator import checkpoint_read

            provenance = checkpoint_read(audit_path).provenance
        doc = compile_spec(
            lattice,
            set(outcome.final_selection),
            outcome,
            vision=vision,
            provenance=provenance,
            timestamp=utc_now_iso(),
        )
        if args.out:
            Path(args.out).write_text(doc.markdown, encoding="utf-8")
            print(f"wrote {args.out}")
        if args.sidecar:
            Path(args.sidecar).write_text(doc.sidecar_json(), encoding="utf-8")
            print(f"wrote {args.sidecar}")
    return 0 if outcome.completed else 1


def cmd_route(args) -> int:
    registry, _ = _registry_for(args.lattice)
    vision = Path(args.vision).read_text("utf-8")
    centroids = build_centroids(registry)
    scores = similarity_scores(vision, centroids)
    print(
        json.dumps(
            {"family_id": route(vision, centroids), "scores": scores}, indent=2
        )
    )
    return 0


def cmd_bench(args) -> int:
    registry, _ = _registry_for(args.lattice)
    suite_text = Path(args.suite).read_text("utf-8")
    suite = load_suite(suite_text, registry)
    policy = RetryPolicy(retry_cap=args.retry_cap, on_exhaustion=args.on_exhaustion)
    results = run_benchmark(
        suite, lambda: _make_backend(args), registry, policy=policy
    )
    markdown, csv_text = emit_report(results)
    print(markdown)
    if args.report:
        Path(args.report).write_text(markdown, encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(csv_text, encoding="utf-8")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir=args.data_dir), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elicit",
        description="Constraint-guarded requirements elicitation over requirement lattices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one elicitation session")
    run_p.add_argument("--lattice", help="bundled family id or lattice JSON path")
    run_p.add_argument("--vision", help="file containing the project vision")
    _add_backend_args(run_p)
    run_p.add_argument("--max-transitions", type=int, default=250)
    run_p.add_argument("--max-model-calls", type=int, default=100)
    run_p.add_argument("--retry-cap", type=int, default=5)
    run_p.add_argument(
        "--on-exhaustion", choices=["repair", "abort"], default="repair"
    )
    run_p.add_argument("--audit", help="directory for the audit trail")
    run_p.add_argument("--session-id", default="session")
    run_p.add_argument("--out", help="write the specification Markdown here")
    run_p.add_argument("--sidecar", help="write the JSON sidecar here")
    run_p.set_defaults(func=cmd_run)

    route_p = sub.add_parser("route", help="route a vision to a family")
    route_p.add_argument("--vision", required=True)
    route_p.add_argument("--lattice", help="extra lattice JSON path to include")
    route_p.set_defaults(func=cmd_route)

    bench_p = sub.add_parser("bench", help="run a benchmark suite")
    bench_p.add_argument("--suite", required=True)
    _add_backend_args(bench_p)
    bench_p.add_argument("--retry-cap", type=int, default=5)
    bench_p.add_argument(
        "--on-exhaustion", choices=["repair", "abort"], default="repair"
    )
    bench_p.add_argument("--report", help="write the Markdown report here")
    bench_p.add_argument("--csv", help="write the CSV twin here")
    bench_p.add_argument("--lattice", help="extra lattice JSON path to include")
    bench_p.set_defaults(func=cmd_bench)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8714)
    serve_p.add_argument("--data-dir", default="./elicit-data")
    serve_p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
