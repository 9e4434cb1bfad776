"""Acceptance criteria 1-9.

Each test records one ``criterion N: PASS|FAIL ...`` line; the lines are
printed in the terminal summary (see conftest.py) and by running this file
directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from oddpack import fixtures, io
from oddpack.cover import build_commodity_graph, build_double_cover
from oddpack.generators import random_instance, trail_suite, walk_suite
from oddpack.graph import is_trail, validate_packing
from oddpack.multiflow import (half_sum_of_lambdas, lc_trail_packing, max_multiflow_fractional,
                               max_multiflow_integer, min_proper_partition)
from oddpack.oddwalk import (Barrier, barrier_capacity, barrier_check, barrier_to_partition,
                             max_odd_walk_packing, partition_to_barrier, value_parity_check)
from oddpack.oracle import certify, max_trail_packing_exhaustive, min_barrier_exhaustive
from oddpack.pipeline import PipelineTrace, initial_classify, run_pipeline, terminal_evacuation
from oddpack.signed import (MINUS, PLUS, SignedValenceNetwork, Valence, ValenceGraph,
                            bidirected_trail_packing, is_inner_balanced, lambda_sum, to_bidirected)

SUITE_SIZE = 200
RESULTS: dict[int, str] = {}


def report(k: int, failures: list, detail: str) -> None:
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {k}: {status} - {detail}"
    if failures:
        line += f" ({len(failures)} failures, first: {failures[0]})"
    RESULTS[k] = line
    print(line)
    assert not failures, line


@pytest.fixture(scope="module")
def walk_runs():
    """Suite of even-capacity instances with their walk packings."""
    runs = []
    for i, n in enumerate(walk_suite(SUITE_SIZE)):
        runs.append((i, n, max_odd_walk_packing(n)))
    return runs


@pytest.fixture(scope="module")
def trail_runs():
    runs = []
    for i, n in enumerate(trail_suite(SUITE_SIZE)):
        trace = PipelineTrace()
        runs.append((i, n, run_pipeline(n, trace), trace))
    return runs


def test_criterion_1_fixtures():
    failures, times = [], []
    expected = {"I1": (2, Barrier.of(["s", "t"])),
                "I2": (0, Barrier.of(["s", "v", "t"], ["sv", "vt"])),
                "I3": (2, Barrier.of(["s", "t", "u"], ["su", "ut"]))}
    for name, (value, barrier) in expected.items():
        n = fixtures.load(name)
        t0 = time.perf_counter()
        r = max_odd_walk_packing(n)
        dt = time.perf_counter() - t0
        times.append(dt)
        cert = certify(n, r.packing, r.barrier)
        if r.value != value or r.barrier != barrier or not cert.ok or cert.capacity != value:
            failures.append(f"{name}: value {r.value}, barrier {sorted(r.barrier.vertices)}")
        if dt >= 1.0:
            failures.append(f"{name}: {dt:.2f}s")
    report(1, failures, "I1/I2/I3 values 2/0/2 with matching barriers, "
                        f"max {max(times) * 1000:.1f} ms")


def test_criterion_2_strong_duality(walk_runs):
    t0 = time.perf_counter()
    failures = []
    for i, n, r in walk_runs:
        vs, es, cap = min_barrier_exhaustive(n)
        if r.value != cap or r.capacity != cap:
            failures.append(f"instance {i}: {r.value} vs {cap}")
    total = time.perf_counter() - t0
    if total >= 600:
        failures.append(f"took {total:.0f}s")
    report(2, failures, f"{len(walk_runs)} instances, value = exhaustive barrier capacity, "
                        f"oracle time {total:.1f}s")


def _mod4(n):
    return all(n.vertex_load(v) % 4 == 0 for v in n.graph.vertices if not n.is_terminal(v))


def test_criterion_3_fractionality(walk_runs):
    failures = []
    sub = 0
    for i, n, r in walk_runs:
        if not r.packing.is_half_integer():
            failures.append(f"instance {i}: weight not half-integer")
        if _mod4(n):
            sub += 1
            if not r.packing.is_integer():
                failures.append(f"instance {i}: weight not integer on the mod-4 sub-suite")
        pr = value_parity_check(n, r.value)
        if not pr.holds:
            failures.append(f"instance {i}: {pr.detail}")
    if sub == 0:
        failures.append("mod-4 sub-suite is empty")
    report(3, failures, f"half-integer on {len(walk_runs)}, integer on {sub} mod-4 instances, "
                        "value parity holds")


def test_criterion_4_multiflow_duality(walk_runs):
    failures = []
    integer_runs = 0
    for i, n, _ in walk_runs:
        dc = build_double_cover(n)
        h, _ = build_commodity_graph(n.terminals)
        cap = min_proper_partition(dc.cover, h).capacity
        r = max_multiflow_fractional(dc.cover, h)
        if r.value != cap or not validate_packing(dc.cover, r.packing).ok:
            failures.append(f"instance {i}: {r.value} vs {cap}")
        integral = all(c.denominator == 1 for c in dc.cover.cap.values())
        even = all(dc.cover.vertex_load(v) % 2 == 0 for v in dc.cover.graph.vertices
                   if not dc.cover.is_terminal(v))
        if integral and even:
            integer_runs += 1
            ri = max_multiflow_integer(dc.cover, h)
            if ri.value != cap or not ri.packing.is_integer():
                failures.append(f"instance {i}: integer multiflow {ri.value} vs {cap}")
    report(4, failures, f"{len(walk_runs)} covers, max multiflow = min partition; "
                        f"integer multiflow on {integer_runs}")


def test_criterion_5_conversions(walk_runs):
    failures = []
    for i, n, r in walk_runs:
        dc = build_double_cover(n)
        h, _ = build_commodity_graph(n.terminals)
        x = min_proper_partition(dc.cover, h)
        b = partition_to_barrier(dc, x)
        if not barrier_check(n, b) or barrier_capacity(n, b) != x.capacity:
            failures.append(f"instance {i}: partition {x.capacity} -> barrier "
                            f"{barrier_capacity(n, b)}")
        vs, es, cap = min_barrier_exhaustive(n)
        y = barrier_to_partition(dc, Barrier.of(vs, es))
        if y.capacity != cap:
            failures.append(f"instance {i}: barrier {cap} -> partition {y.capacity}")
        # non-optimal barriers: never an increase, both directions
        for bb in (Barrier.of(n.terminals), Barrier.of(n.graph.vertices)):
            c0 = barrier_capacity(n, bb)
            z = barrier_to_partition(dc, bb)
            back = partition_to_barrier(dc, z)
            if z.capacity > c0 or barrier_capacity(n, back) > z.capacity:
                failures.append(f"instance {i}: round trip from capacity {c0} increased")
    report(5, failures, f"{len(walk_runs)} instances, both conversions exact at the optimum, "
                        "never increasing elsewhere")


def test_criterion_6_trail_pipeline(trail_runs):
    failures = []
    t0 = time.perf_counter()
    for i, n, r, _ in trail_runs:
        walk_value = max_odd_walk_packing(n).value
        oracle = max_trail_packing_exhaustive(n, upper_bound=int(walk_value)).value
        rep = validate_packing(n, r.packing)
        if not (r.value == walk_value == oracle):
            failures.append(f"instance {i}: trails {r.value}, walks {walk_value}, oracle {oracle}")
        if not rep.ok or any(v > 2 for v in rep.loads.values()) or not r.packing.is_integer():
            failures.append(f"instance {i}: infeasible packing")
        for _, w in r.packing.items:
            if len(w) % 2 == 0 or not is_trail(w) or w.start == w.end:
                failures.append(f"instance {i}: bad trail {w.edge_ids}")
    total = time.perf_counter() - t0
    if total >= 1800:
        failures.append(f"took {total:.0f}s")
    report(6, failures, f"{len(trail_runs)} inner Eulerian cap-2 instances, pipeline = walk "
                        f"optimum = exhaustive trail optimum, check time {total:.1f}s")


CASE4_SEEDS = ((20477, 6), (21068, 6), (20546, 7), (20780, 7))


def test_criterion_7_pipeline_invariants(trail_runs):
    failures = []
    traces = [(f"instance {i}", t) for i, _, _, t in trail_runs]
    for seed, mv in CASE4_SEEDS:
        n = random_instance(seed, max_vertices=mv, caps=(2,), eulerian=True)
        t = PipelineTrace()
        run_pipeline(n, t)
        traces.append((f"seed {seed}", t))
    counts = {"sub": 0, "reg": 0, "case4": 0}
    for label, t in traces:
        for rec in t.of_kind("subcubization"):
            counts["sub"] += 1
            if rec.s_after != rec.s_before - 1:
                failures.append(f"{label}: supercubicity {rec.s_before} -> {rec.s_after}")
        for rec in t.of_kind("regularization"):
            counts["reg"] += 1
            if not rec.p_measure_after < rec.p_measure_before:
                failures.append(f"{label}: measure {rec.p_measure_before} -> {rec.p_measure_after}")
            if not rec.measure_after < rec.measure_before:
                failures.append(f"{label}: witness measure {rec.measure_before} -> "
                                f"{rec.measure_after}")
            if rec.case == 4:
                counts["case4"] += 1
                s = rec.edge_sign
                if rec.deg_y != 3 or rec.end_signs != (-s, -s) or s not in (PLUS, MINUS) \
                        or rec.u == rec.v:
                    failures.append(f"{label}: case 4 record {rec}")
    if counts["case4"] == 0:
        failures.append("no Case-4 step was exercised")
    report(7, failures, f"{counts['sub']} subcubizations, {counts['reg']} regularizations "
                        f"({counts['case4']} of Case 4) checked")


def _alternating_signing(n, seed):
    """Inner balanced signing: opposite signs on the two valencies, seeded order."""
    import random
    rng = random.Random(seed)
    sign = {}
    for e in n.graph.edges:
        a = rng.choice((PLUS, MINUS))
        sign[Valence(e.id, 1)], sign[Valence(e.id, 2)] = a, -a
    return SignedValenceNetwork(n.graph, tuple(n.terminals), sign)


def _bidirected_ok(svn):
    bg = to_bidirected(svn)
    trails = bidirected_trail_packing(bg, svn.terminals)
    target = lambda_sum(bg.vertices, svn.terminals, [(e.u, e.v) for e in bg.edges])
    return 2 * len(trails) == target, len(trails), Fraction(target, 2)


def test_criterion_8_lc_and_bidirected(trail_runs, walk_runs):
    failures = []
    checks = 0
    for i, n, _, _ in trail_runs:
        unit = n.with_caps({e.id: Fraction(1) for e in n.graph.edges})
        got, want = lc_trail_packing(unit).value, half_sum_of_lambdas(unit)
        checks += 1
        if got != want:
            failures.append(f"trail instance {i}: lc {got} vs {want}")
        svn, _ = terminal_evacuation(initial_classify(n))
        ok, got, want = _bidirected_ok(svn)
        checks += 1
        if not ok:
            failures.append(f"trail instance {i}: evacuated bidirected {got} vs {want}")
    for i, n, _ in walk_runs:
        vg = ValenceGraph(n.graph).graph
        unit = type(n).build(vg.vertices, n.terminals, [(e.id, e.u, e.v, 1) for e in vg.edges])
        got, want = lc_trail_packing(unit).value, half_sum_of_lambdas(unit)
        checks += 1
        if got != want:
            failures.append(f"walk instance {i}: valence graph lc {got} vs {want}")
        svn = _alternating_signing(n, i)
        if is_inner_balanced(svn):
            ok, got, want = _bidirected_ok(svn)
            checks += 1
            if not ok:
                failures.append(f"walk instance {i}: random signing {got} vs {want}")
    report(8, failures, f"{checks} packings equal half the lambda sum")


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "oddpack", *map(str, args)],
                           capture_output=True, cwd=cwd)


def test_criterion_9_determinism(tmp_path):
    failures = []
    gen = tmp_path / "gen.json"
    _cli(["gen", "--seed", 7, "--eulerian", "--cap2", "-o", gen], tmp_path)
    walk = tmp_path / "walk.json"
    _cli(["gen", "--seed", 3, "-o", walk], tmp_path)
    res = tmp_path / "res.json"
    _cli(["pack-walks", walk, "-o", res], tmp_path)
    commands = [
        ["gen", "--seed", 1, "--vertices", 6],
        ["gen", "--seed", 7, "--eulerian", "--cap2"],
        ["pack-walks", walk],
        ["pack-walks", fixtures.path("I3")],
        ["min-barrier", walk],
        ["multiflow", walk],
        ["pack-trails", gen, "--trace", tmp_path / "trace.json"],
        ["verify", walk, res, "--barrier", res],
        ["oracle", "pack-trails", gen, "--exhaustive"],
        ["oracle", "min-barrier", walk, "--exhaustive"],
        ["export-dot", walk, "--barrier", res, "--packing", res],
        ["pack-walks", walk, fixtures.path("I1"), fixtures.path("I3"), "--jobs", 2],
    ]
    for cmd in commands:
        outs = []
        for _ in range(2):
            r = _cli(cmd, tmp_path)
            extra = (tmp_path / "trace.json").read_bytes() if "--trace" in cmd else b""
            outs.append((r.returncode, r.stdout, extra))
        if outs[0] != outs[1] or outs[0][0] != 0 or not outs[0][1]:
            failures.append(" ".join(map(str, cmd[:2])))
    report(9, failures, f"{len(commands)} commands byte-identical across reruns")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
