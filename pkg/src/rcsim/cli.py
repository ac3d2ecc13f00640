"""Command-line front end: ``rcsim run | batch | check-graph | gen-graph``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import graph as graphs
from .engine import SimulationError, run as simulate
from .metrics import evaluate
from .output import Summary, aggregate, write_trace
from .scenario_file import ScenarioFile, ScenarioFileError

logger = logging.getLogger("rcsim")

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2


def verdict_ok(summary: Summary) -> bool:
    v = summary.verdict
    return v.passed and v.monotone_ok and v.zeno_ok and v.lemma3_ok is not False


def run_one(sf: ScenarioFile, seed: int | None, out_dir: Path) -> Summary:
    scenario = sf.build(seed)
    start = time.perf_counter()
    trace = simulate(scenario)
    verdict = evaluate(trace)
    wall = time.perf_counter() - start
    write_trace(trace, out_dir)
    summary = Summary(
        scenario=scenario.name,
        digest=sf.digest,
        seed=scenario.seed,
        n=scenario.n,
        normal=sorted(scenario.normal),
        attacked=sorted(scenario.attacked),
        verdict=verdict,
        event_counts=trace.event_counts(),
        wall_time=wall,
    )
    summary.write(out_dir / "summary.json")
    return summary


def cmd_run(scenario_path, out_dir, assert_verdict=False, seed=None) -> int:
    try:
        sf = ScenarioFile.load(scenario_path)
        summary = run_one(sf, seed, Path(out_dir))
    except ScenarioFileError as exc:
        print(f"{scenario_path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SimulationError as exc:
        print(f"{scenario_path}: simulation aborted: {exc}", file=sys.stderr)
        return EXIT_INPUT
    v = summary.verdict
    print(
        f"{summary.scenario or scenario_path} seed={summary.seed}: hull_ok={v.hull_ok} "
        f"monotone_ok={v.monotone_ok} diameter_final={v.diameter_final:.6g} "
        f"T_conv={v.T_conv} zeno_ok={v.zeno_ok} lemma3={v.lemma3_ok}"
    )
    if assert_verdict and not verdict_ok(summary):
        return EXIT_VERDICT
    return EXIT_OK


def _batch_worker(args):
    path, seed, out_dir = args
    return run_one(ScenarioFile.load(path), seed, Path(out_dir)).to_dict()


def batch_threads(default: int | None = None) -> int:
    raw = os.environ.get("RC_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning("ignoring non-integer RC_THREADS=%r", raw)
    return default or os.cpu_count() or 1


def cmd_batch(scenario_path, seeds: int, out_dir, assert_verdict=False) -> int:
    if seeds < 1:
        print("--seeds must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    out = Path(out_dir)
    try:
        sf = ScenarioFile.load(scenario_path)
        base = sf.build().seed
    except ScenarioFileError as exc:
        print(f"{scenario_path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    jobs = [(str(scenario_path), base + k, str(out / f"seed_{base + k}")) for k in range(seeds)]
    workers = min(batch_threads(), seeds)
    try:
        if workers == 1:
            results = [_batch_worker(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_batch_worker, jobs))
    except SimulationError as exc:
        print(f"{scenario_path}: simulation aborted: {exc}", file=sys.stderr)
        return EXIT_INPUT
    summaries = [Summary.from_dict(r) for r in results]
    agg = aggregate(summaries)
    agg["digest"] = sf.digest
    (out / "aggregate.json").write_text(json.dumps(agg, indent=2, sort_keys=True) + "\n")
    print(
        f"{seeds} runs: passed={agg['passed']} hull_ok={agg['hull_ok']} "
        f"monotone_ok={agg['monotone_ok']} zeno_ok={agg['zeno_ok']} "
        f"lemma3={agg['lemma3_ok']}/{agg['lemma3_applicable']}"
    )
    if assert_verdict and not all(verdict_ok(s) for s in summaries):
        return EXIT_VERDICT
    return EXIT_OK


def parse_graph_source(source: str, params: list[str] = ()) -> graphs.Graph:
    """An edge-list path, or a generator name with ``key=value`` parameters."""
    if Path(source).is_file():
        return graphs.read_edgelist(source)
    return graphs.generate(source, **_key_values(params))


def _key_values(params) -> dict:
    kwargs = {}
    for p in params:
        key, sep, value = p.partition("=")
        if not sep:
            raise graphs.GraphError(f"expected key=value, got {p!r}")
        kwargs[key] = value
    return kwargs


def cmd_check_graph(source, F: int, variant: str, params=()) -> int:
    try:
        g = parse_graph_source(source, params)
        report = graphs.check_assumption(g, F, variant)
    except (graphs.GraphError, OSError, ValueError) as exc:
        print(f"{source}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    doc = {"source": source, "n": g.n, "edges": g.edge_count, "connected": g.connected,
           "F": F, "variant": variant, **report.to_dict()}
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK if report.satisfied else EXIT_VERDICT


def cmd_gen_graph(generator: str, params, out_path) -> int:
    try:
        g = graphs.generate(generator, **_key_values(params))
    except (graphs.GraphError, ValueError) as exc:
        print(f"gen-graph: {exc}", file=sys.stderr)
        return EXIT_INPUT
    graphs.write_edgelist(g, out_path)
    print(f"wrote {out_path}: n={g.n} edges={g.edge_count}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rcsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario file")
    p.add_argument("scenario")
    p.add_argument("--out", default="out")
    p.add_argument("--seed", type=int, default=None, help="override run.seed")
    p.add_argument("--assert", dest="assert_verdict", action="store_true",
                   help="exit 1 when a verdict check fails")

    p = sub.add_parser("batch", help="simulate a scenario under consecutive seeds")
    p.add_argument("scenario")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--assert", dest="assert_verdict", action="store_true")

    p = sub.add_parser("check-graph", help="check the common-neighbor condition")
    p.add_argument("source", help="edge-list file or generator name")
    p.add_argument("params", nargs="*", help="generator parameters as key=value")
    p.add_argument("--F", type=int, required=True)
    p.add_argument("--variant", choices=[graphs.GENERIC, graphs.ACQ_TIMING], default=graphs.GENERIC)

    p = sub.add_parser("gen-graph", help="write a generated topology as an edge list")
    p.add_argument("generator", choices=sorted(graphs.GENERATORS))
    p.add_argument("params", nargs="*", help="generator parameters as key=value")
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return cmd_run(args.scenario, args.out, args.assert_verdict, args.seed)
    if args.command == "batch":
        return cmd_batch(args.scenario, args.seeds, args.out, args.assert_verdict)
    if args.command == "check-graph":
        return cmd_check_graph(args.source, args.F, args.variant, args.params)
    return cmd_gen_graph(args.generator, args.params, args.out)


if __name__ == "__main__":
    sys.exit(main())
