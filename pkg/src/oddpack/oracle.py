"""Brute-force ground truth for small instances.

Nothing here uses the structural results the main modules rely on: barriers
are checked by parity reachability, packings by enumerating every walk and
searching all capacity-respecting multisets of them.
"""

from __future__ import annotations

import os
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .graph import Network, Packing, PackingItem, Step, Walk, validate_packing


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    vertices: int = 8
    edges: int = 12
    terminals: int = 4
    time: float = 60.0

    @classmethod
    def from_env(cls, env=None) -> "OracleBudget":
        """Read ``ODDPACK_ORACLE_BUDGET="vertices=8,edges=12,terminals=4,time=60"``."""
        env = os.environ if env is None else env
        raw = env.get("ODDPACK_ORACLE_BUDGET", "").strip()
        if not raw:
            return cls()
        values = {}
        for item in raw.split(","):
            key, sep, val = item.partition("=")
            key = key.strip()
            if not sep or key not in ("vertices", "edges", "terminals", "time"):
                raise ValueError(f"bad ODDPACK_ORACLE_BUDGET entry {item!r}")
            values[key] = float(val) if key == "time" else int(val)
        return cls(**values)

    def check(self, vertices: int, edges: int, terminals: int) -> None:
        for name, got, limit in (("vertices", vertices, self.vertices),
                                 ("edges", edges, self.edges),
                                 ("terminals", terminals, self.terminals)):
            if got > limit:
                raise BudgetExceeded(f"{got} {name} exceed the oracle budget of {limit}")

    def check_network(self, n: Network) -> None:
        self.check(len(n.graph.vertices), len(n.graph.edges), len(n.terminals))


class _Clock:
    def __init__(self, limit: float):
        self.deadline = time.monotonic() + limit
        self.ticks = 0

    def tick(self) -> None:
        self.ticks += 1
        if self.ticks % 4096 == 1 and time.monotonic() > self.deadline:
            raise BudgetExceeded("oracle time limit exceeded")


# ---------------------------------------------------------------- barriers

def has_odd_t_walk(n: Network, vertices: Iterable, edge_ids: Iterable) -> bool:
    """Parity reachability: is some terminal reached from another by an odd walk?"""
    vs = set(vertices)
    adj = {v: [] for v in vs}
    for eid in edge_ids:
        e = n.graph.edge(eid)
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    terms = [t for t in n.terminals if t in vs]
    for t in terms:
        seen = {(t, 0)}
        dq = deque([(t, 0)])
        while dq:
            x, par = dq.popleft()
            if par == 1 and x != t and x in n.terminal_set:
                return True
            for y in adj[x]:
                st = (y, 1 - par)
                if st not in seen:
                    seen.add(st)
                    dq.append(st)
    return False


def min_barrier_exhaustive(n: Network, budget: OracleBudget | None = None):
    """Minimum capacity odd T-walk barrier by enumeration.

    Every vertex set containing ``T`` is tried; for each, edge subsets of the
    induced edge set are searched by branch and bound (a subgraph of a
    barrier is a barrier, so infeasible branches are cut early).
    Returns ``(vertices, edges, capacity)``.
    """
    budget = budget or OracleBudget.from_env()
    budget.check_network(n)
    clock = _Clock(budget.time)
    g = n.graph
    terms = list(n.terminals)
    others = [v for v in g.vertices if v not in n.terminal_set]
    best = None
    for mask in range(1 << len(others)):
        vs = set(terms) | {others[i] for i in range(len(others)) if mask >> i & 1}
        half_i = n.cap_of(g.boundary(vs)) / 2
        if best is not None and half_i >= best[2]:
            continue
        inside = sorted(g.inside(vs), key=lambda e: -n.cap[e.id])
        chosen: list = []

        def search(k, lost):
            nonlocal best
            clock.tick()
            if best is not None and half_i + lost >= best[2]:
                return
            if k == len(inside):
                best = (frozenset(vs), frozenset(chosen), half_i + lost)
                return
            e = inside[k]
            chosen.append(e.id)
            if not has_odd_t_walk(n, vs, chosen):
                search(k + 1, lost)
            chosen.pop()
            search(k + 1, lost + n.cap[e.id])

        search(0, Fraction(0))
    return best


# ---------------------------------------------------------------- walk packings

def enumerate_walks(vertices, edges, terminals, mult: dict,
                    endpoint_ok: Callable, parity: str | None = "odd",
                    transition_ok: Callable | None = None,
                    clock: _Clock | None = None) -> list[Walk]:
    """Every walk between terminals ``a != b`` with ``endpoint_ok(a, b)``.

    ``edges`` holds ``(id, u, v)``; a walk uses edge ``id`` at most
    ``mult[id]`` times.  Of a walk and its reverse only the one starting at
    the earlier vertex is kept.  ``transition_ok(prev_id, next_id, vertex)``
    restricts consecutive edges.
    """
    order = {v: i for i, v in enumerate(vertices)}
    tset = set(terminals)
    adj = {v: [] for v in vertices}
    for eid, u, v in edges:
        adj[u].append((eid, v))
        adj[v].append((eid, u))
    used = {eid: 0 for eid, _, _ in edges}
    out = []
    steps: list[Step] = []

    def dfs(start, x):
        if clock:
            clock.tick()
        if steps and x in tset and x != start and order[start] < order[x]:
            if (parity is None or (len(steps) % 2 == 1) == (parity == "odd")) and endpoint_ok(start, x):
                out.append(Walk(tuple(steps)))
        for eid, y in adj[x]:
            if used[eid] >= mult[eid]:
                continue
            if transition_ok and steps and not transition_ok(steps[-1].edge, eid, x):
                continue
            used[eid] += 1
            steps.append(Step(eid, x, y))
            dfs(start, y)
            steps.pop()
            used[eid] -= 1

    for t in terminals:
        dfs(t, t)
    return out


def max_walk_packing(walks: list[Walk], caps: dict, terminals, edge_ends: dict,
                     upper_bound: int | None = None, clock: _Clock | None = None):
    """Largest multiset of ``walks`` with per-edge loads within integer ``caps``.

    ``edge_ends[eid]`` is the number of terminal endpoints of the edge; each
    walk needs at least two units of terminal-incident capacity, which gives
    the pruning bound.  Returns ``(count, chosen walks)``.
    """
    ws = sorted(walks, key=len)
    vecs = [list(w.edge_counts().items()) for w in ws]
    load = {e: 0 for e in caps}
    room = sum(int(caps[e]) * edge_ends.get(e, 0) for e in caps)
    best = [0, []]
    chosen: list[int] = []

    def fits(k):
        return all(load[e] + c <= caps[e] for e, c in vecs[k])

    def search(k, room_left):
        if clock:
            clock.tick()
        if len(chosen) > best[0]:
            best[0], best[1] = len(chosen), list(chosen)
        if upper_bound is not None and best[0] >= upper_bound:
            return True
        if len(chosen) + room_left // 2 <= best[0]:
            return False
        for j in range(k, len(ws)):
            if not fits(j):
                continue
            used = 0
            for e, c in vecs[j]:
                load[e] += c
                used += c * edge_ends.get(e, 0)
            chosen.append(j)
            done = search(j, room_left - used)
            chosen.pop()
            for e, c in vecs[j]:
                load[e] -= c
            if done:
                return True
        return False

    search(0, room)
    return best[0], [ws[j] for j in best[1]]


def _edge_ends(n_edges, terminals):
    tset = set(terminals)
    return {eid: (u in tset) + (v in tset) for eid, u, v in n_edges}


def _parallel_classes(n: Network):
    """Group parallel edges of equal capacity; returns ``(classes, edges)``.

    ``classes`` maps a class key to its member edge ids; ``edges`` lists
    ``(key, u, v)`` with one entry per class.
    """
    classes: dict = {}
    edges = []
    for e in n.graph.edges:
        key = (frozenset((e.u, e.v)), n.cap[e.id])
        if key not in classes:
            classes[key] = []
            edges.append((key, e.u, e.v))
        classes[key].append(e.id)
    return classes, edges


def _expand(walks: list[Walk], classes: dict) -> list[Walk]:
    """Assign member edges to class-level walks round-robin.

    Consecutive positions of the cyclic order go to one walk, so a walk
    using a class ``k <= mult * m`` times meets each member at most ``mult``
    times and every member ends up with at most its share of the load.
    """
    nxt = {key: 0 for key in classes}
    out = []
    for w in walks:
        steps = []
        for s in w.steps:
            members = classes[s.edge]
            eid = members[nxt[s.edge] % len(members)]
            nxt[s.edge] += 1
            steps.append(Step(eid, s.tail, s.head))
        out.append(Walk(tuple(steps)))
    return out


def max_trail_packing_exhaustive(n: Network, parity: str | None = "odd", family: str = "G",
                                 upper_bound: int | None = None,
                                 budget: OracleBudget | None = None) -> Packing:
    """Maximum integer packing of T-trails (``family="G"``) or of trails of the
    valence graph, i.e. walks using every edge at most twice (``"G12"``).

    Capacities must be integers.  Parallel edges of equal capacity are
    searched as one class.  ``upper_bound`` stops the search once a packing
    of that size is found.
    """
    budget = budget or OracleBudget.from_env()
    budget.check_network(n)
    clock = _Clock(budget.time)
    if any(c.denominator != 1 for c in n.cap.values()):
        raise ValueError("exhaustive packing needs integer capacities")
    per_walk = 1 if family == "G" else 2
    classes, edges = _parallel_classes(n)
    caps = {key: int(key[1]) * len(m) for key, m in classes.items()}
    mult = {key: min(per_walk, int(key[1])) * len(m) for key, m in classes.items()}
    walks = enumerate_walks(n.graph.vertices, edges, n.terminals, mult,
                            lambda a, b: True, parity, clock=clock)
    count, chosen = max_walk_packing(walks, caps, n.terminals, _edge_ends(edges, n.terminals),
                                     upper_bound, clock)
    return Packing(tuple(PackingItem(1, w) for w in _expand(chosen, classes))).normalized()


def max_multiflow_exhaustive(cover: Network, commodity, upper_bound: int | None = None,
                             budget: OracleBudget | None = None) -> Packing:
    """Maximum integer multiflow whose walks join the ends of commodity edges."""
    budget = budget or OracleBudget(vertices=16, edges=24, terminals=8)
    budget.check_network(cover)
    clock = _Clock(budget.time)
    if any(c.denominator != 1 for c in cover.cap.values()):
        raise ValueError("exhaustive multiflow needs integer capacities")
    edges = [(e.id, e.u, e.v) for e in cover.graph.edges]
    caps = {e.id: int(cover.cap[e.id]) for e in cover.graph.edges}
    walks = enumerate_walks(cover.graph.vertices, edges, cover.terminals, caps,
                            commodity.is_edge, None, clock=clock)
    count, chosen = max_walk_packing(walks, caps, cover.terminals,
                                     _edge_ends(edges, cover.terminals), upper_bound, clock)
    return Packing(tuple(PackingItem(1, w) for w in chosen)).normalized()


def max_bidirected_packing_exhaustive(bg, terminals, budget: OracleBudget | None = None) -> int:
    """Maximum number of edge-disjoint bidirected T-trails."""
    budget = budget or OracleBudget(vertices=10, edges=14, terminals=6)
    budget.check(len(bg.vertices), len(bg.edges), len(tuple(terminals)))
    clock = _Clock(budget.time)
    index = {e.id: e for e in bg.edges}

    def end_type(eid, x):
        e = index[eid]
        return e.at_u if x == e.u else e.at_v

    edges = [(e.id, e.u, e.v) for e in bg.edges]
    caps = {e.id: 1 for e in bg.edges}
    walks = enumerate_walks(bg.vertices, edges, terminals, caps, lambda a, b: True, None,
                            lambda a, b, x: end_type(a, x) != end_type(b, x), clock)
    count, _ = max_walk_packing(walks, caps, terminals, _edge_ends(edges, terminals), None, clock)
    return count


# ---------------------------------------------------------------- certification

@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    value: Fraction
    capacity: Fraction | None
    problems: tuple = field(default=())

    @property
    def gap(self):
        return None if self.capacity is None else self.capacity - self.value


def certify(n: Network, packing: Packing, barrier=None) -> CertificateReport:
    """Check a packing (and optionally a barrier) and their value equality."""
    problems = []
    try:
        report = validate_packing(n, packing)
    except (KeyError, ValueError) as ex:
        return CertificateReport(False, packing.value, None, (f"malformed packing: {ex}",))
    for v in report.violations:
        problems.append(f"edge {v.edge}: load {v.load} exceeds capacity {v.cap}")
    for i, (_, w) in enumerate(packing):
        if len(w) % 2 == 0:
            problems.append(f"walk {i} has even length")
        if w.start == w.end or not (n.is_terminal(w.start) and n.is_terminal(w.end)):
            problems.append(f"walk {i} does not join two distinct terminals")
    capacity = None
    if barrier is not None:
        vs, es = barrier.vertices, barrier.edges
        if not all(t in vs for t in n.terminals):
            problems.append("barrier misses a terminal")
        bad = [eid for eid in es if not n.graph.has_edge(eid)
               or n.graph.edge(eid).u not in vs or n.graph.edge(eid).v not in vs]
        if bad:
            problems.append(f"barrier edge {bad[0]} is not inside the barrier")
        elif has_odd_t_walk(n, vs, es):
            problems.append("barrier contains an odd T-walk")
        capacity = (n.cap_of(n.graph.boundary(vs)) / 2
                    + n.cap_of([e for e in n.graph.inside(vs) if e.id not in es]))
        if capacity != packing.value:
            problems.append(f"value {packing.value} differs from barrier capacity {capacity}")
    return CertificateReport(not problems, packing.value, capacity, tuple(problems))
