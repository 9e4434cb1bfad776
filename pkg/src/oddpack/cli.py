"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import io
from .cover import build_commodity_graph, build_double_cover
from .generators import random_instance
from .graph import Network
from .multiflow import max_multiflow_fractional
from .oddwalk import Barrier, BarrierError, max_odd_walk_packing
from .oracle import (BudgetExceeded, OracleBudget, certify, max_multiflow_exhaustive,
                     max_trail_packing_exhaustive, min_barrier_exhaustive)
from .pipeline import PipelineInputError, PipelineTrace, run_pipeline

OK, FAILED, INPUT_ERROR, INTERNAL_ERROR = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    """Everything a command run depends on; equal configs give equal bytes."""
    command: str
    inputs: tuple = ()
    output: str | None = None
    seed: int | None = None
    budget: OracleBudget | None = None
    trace: str | None = None
    jobs: int = 1

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        inputs = getattr(args, "instances", None) or (getattr(args, "instance", None),)
        budget = None
        if getattr(args, "budget", None):
            budget = _parse_budget(args.budget)
        elif args.command == "oracle":
            budget = _parse_budget(None)
        return cls(args.command, tuple(x for x in inputs if x), args.output,
                   getattr(args, "seed", None), budget, getattr(args, "trace", None),
                   getattr(args, "jobs", 1) or 1)


def _parse_budget(text):
    env = None if text is None else {"ODDPACK_ORACLE_BUDGET": text}
    try:
        return OracleBudget.from_env(env)
    except ValueError as ex:
        raise io.InputError(str(ex)) from None


# ---------------------------------------------------------------- solvers

def _load(path: str) -> Network:
    return io.parse_instance(io.read_json(path, path))


def solve_pack_walks(n: Network) -> dict:
    r = max_odd_walk_packing(n)
    return {"value": str(r.value), "packing": io.packing_to_json(r.packing),
            "barrier": io.barrier_to_json(n, r.barrier)}


def solve_min_barrier(n: Network) -> dict:
    r = max_odd_walk_packing(n)
    return io.barrier_to_json(n, r.barrier)


def solve_pack_trails(n: Network, trace: PipelineTrace | None = None) -> dict:
    try:
        r = run_pipeline(n, trace)
    except PipelineInputError as ex:
        raise io.InputError(str(ex)) from None
    return {"value": str(r.value), "packing": io.packing_to_json(r.packing)}


def solve_multiflow(n: Network) -> dict:
    if len(n.terminals) < 2:
        raise io.InputError("the commodity graph needs at least two terminals")
    dc = build_double_cover(n)
    h, _ = build_commodity_graph(n.terminals)
    r = max_multiflow_fractional(dc.cover, h)
    return {"value": str(r.value), "packing": io.cover_packing_to_json(r.packing),
            "certificate": io.partition_to_json(r.certificate)}


def solve_oracle(kind: str, n: Network, budget: OracleBudget | None = None) -> dict:
    budget = budget or OracleBudget()
    if kind in ("pack-walks", "min-barrier"):
        vs, es, cap = min_barrier_exhaustive(n, budget)
        return {"value": str(cap), "barrier": io.barrier_to_json(n, Barrier.of(vs, es))}
    if kind == "pack-trails":
        p = max_trail_packing_exhaustive(n, "odd", "G", budget=budget)
        return {"value": str(p.value), "packing": io.packing_to_json(p)}
    if kind == "multiflow":
        dc = build_double_cover(n)
        if any(c.denominator != 1 for c in dc.cover.cap.values()):
            raise io.InputError("exhaustive multiflow needs even integer capacities")
        h, _ = build_commodity_graph(n.terminals)
        p = max_multiflow_exhaustive(dc.cover, h,
                                     budget=OracleBudget(2 * budget.vertices, 2 * budget.edges,
                                                         2 * budget.terminals, budget.time))
        return {"value": str(p.value), "packing": io.cover_packing_to_json(p)}
    raise io.InputError(f"unknown oracle target {kind!r}")


SOLVERS = {"pack-walks": solve_pack_walks, "min-barrier": solve_min_barrier,
           "pack-trails": solve_pack_trails, "multiflow": solve_multiflow}


def _run_one(command: str, path: str):
    """Worker for batch mode: ``(exit code, payload or message)``."""
    try:
        return OK, SOLVERS[command](_load(path))
    except (io.InputError, BudgetExceeded) as ex:
        return INPUT_ERROR, str(ex)
    except Exception as ex:  # noqa: BLE001 - reported as an internal breach
        return INTERNAL_ERROR, f"{type(ex).__name__}: {ex}"


# ---------------------------------------------------------------- DOT export

def export_dot(n: Network, barrier=None, packing=None) -> str:
    def q(x):
        return '"' + str(x).replace('"', '\\"') + '"'

    lines = ["graph oddpack {", "  node [shape=circle];"]
    for v in n.graph.vertices:
        shape = "box" if n.is_terminal(v) else "circle"
        lines.append(f"  {q(v)} [shape={shape}];")
    labels: dict = {}
    if packing is not None:
        for i, (_, w) in enumerate(packing):
            for eid in dict.fromkeys(w.edge_ids):
                labels.setdefault(eid, []).append(str(i))
    inner = set(barrier.inner_edges(n)) if barrier is not None else set()
    unused = set(barrier.unused_edges(n)) if barrier is not None else set()
    for e in n.graph.edges:
        attrs = [f"label={q(str(e.id) + ' (' + str(n.cap[e.id]) + ')' + (' [' + ','.join(labels[e.id]) + ']' if e.id in labels else ''))}"]
        if barrier is not None:
            if e.id in barrier.edges:
                attrs.append("style=solid")
            elif e.id in inner:
                attrs.append('style=dashed, color="blue", xlabel="I"')
            elif e.id in unused:
                attrs.append('style=bold, color="red", xlabel="U"')
            else:
                attrs.append('style=dotted, color="gray"')
        lines.append(f"  {q(e.u)} -- {q(e.v)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands

def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args, cfg: RunConfig) -> int:
    paths = list(cfg.inputs)
    if len(paths) == 1:
        n = _load(paths[0])
        if args.command == "pack-trails":
            trace = PipelineTrace()
            result = solve_pack_trails(n, trace)
            if cfg.trace:
                with open(cfg.trace, "w", encoding="utf-8") as fh:
                    fh.write(io.dumps(trace.as_json()))
        else:
            result = SOLVERS[args.command](n)
        _emit(io.dumps(result), cfg.output)
        return OK
    if args.command == "pack-trails" and cfg.trace:
        raise io.InputError("--trace needs a single instance")
    jobs = max(1, cfg.jobs)
    if jobs == 1:
        results = [_run_one(args.command, p) for p in paths]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, [args.command] * len(paths), paths))
    out = []
    worst = OK
    for path, (code, payload) in zip(paths, results):
        worst = max(worst, code)
        entry = {"instance": path, "exit": code}
        entry["result" if code == OK else "error"] = payload
        out.append(entry)
    _emit(io.dumps(out), cfg.output)
    return worst


def cmd_verify(args, cfg: RunConfig) -> int:
    n = _load(args.instance)
    packing = io.parse_packing(_unwrap(io.read_json(args.packing), "packing"), n)
    barrier = None
    if args.barrier:
        barrier = io.parse_barrier(io.read_json(args.barrier))
    report = certify(n, packing, barrier)
    out = {"ok": report.ok, "value": str(report.value),
           "capacity": None if report.capacity is None else str(report.capacity),
           "problems": list(report.problems)}
    _emit(io.dumps(out), cfg.output)
    return OK if report.ok else FAILED


def _unwrap(obj, key):
    if isinstance(obj, dict) and key in obj and "items" not in obj:
        return obj[key]
    return obj


def cmd_oracle(args, cfg: RunConfig) -> int:
    n = _load(args.instance)
    _emit(io.dumps(solve_oracle(args.target, n, cfg.budget)), cfg.output)
    return OK


def cmd_gen(args, cfg: RunConfig) -> int:
    caps = (1, 2, 3, 4)
    if args.even_caps:
        caps = (2, 4)
    if args.cap2:
        caps = (2,)
    n = random_instance(args.seed, max_vertices=args.vertices, max_edges=args.edges,
                        terminals=(args.min_terminals, args.max_terminals), caps=caps,
                        eulerian=args.eulerian)
    _emit(io.dumps(io.instance_to_json(n)), cfg.output)
    return OK


def cmd_export_dot(args, cfg: RunConfig) -> int:
    n = _load(args.instance)
    barrier = io.parse_barrier(io.read_json(args.barrier)) if args.barrier else None
    packing = None
    if args.packing:
        packing = io.parse_packing(_unwrap(io.read_json(args.packing), "packing"), n)
    _emit(export_dot(n, barrier, packing), cfg.output)
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oddpack", description="Odd T-walk and T-trail packings.")
    sub = ap.add_subparsers(dest="command", required=True)

    def solver(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("instances", nargs="+", help="instance JSON file(s)")
        p.add_argument("-o", "--output")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for several instances")
        p.set_defaults(func=cmd_solve)
        return p

    solver("pack-walks", "maximum odd T-walk packing with a minimum barrier")
    p = solver("pack-trails", "maximum integer odd T-trail packing (cap 2, inner Eulerian)")
    p.add_argument("--trace", help="write the pipeline trace to this file")
    solver("min-barrier", "minimum odd T-walk barrier")
    solver("multiflow", "maximum multiflow in the double cover with its partition")

    p = sub.add_parser("verify", help="check a packing, and optimality against a barrier")
    p.add_argument("instance")
    p.add_argument("packing")
    p.add_argument("--barrier")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive counterpart of a solver command")
    p.add_argument("target", choices=["pack-walks", "pack-trails", "min-barrier", "multiflow"])
    p.add_argument("instance")
    p.add_argument("--exhaustive", action="store_true", default=True,
                   help="brute-force search (the only mode)")
    p.add_argument("--budget", help='e.g. "vertices=8,edges=12,terminals=4,time=60"; '
                                    'overrides ODDPACK_ORACLE_BUDGET')
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--vertices", type=int, default=7, help="maximum number of vertices")
    p.add_argument("--edges", type=int, default=10, help="maximum number of edges")
    p.add_argument("--min-terminals", type=int, default=2)
    p.add_argument("--max-terminals", type=int, default=4)
    p.add_argument("--eulerian", action="store_true", help="make every non-terminal degree even")
    p.add_argument("--even-caps", action="store_true", help="capacities in {2, 4}")
    p.add_argument("--cap2", action="store_true", help="capacity 2 on every edge")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("export-dot", help="Graphviz rendering of an instance")
    p.add_argument("instance")
    p.add_argument("--barrier")
    p.add_argument("--packing")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args, RunConfig.from_args(args))
    except (io.InputError, BudgetExceeded, PipelineInputError, BarrierError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return INPUT_ERROR
    except Exception as ex:  # noqa: BLE001
        print(f"internal error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
