"""Max-flow/min-cut, flow and Eulerian decompositions, splitting-off.

The max-flow routine is a plain shortest-augmenting-path scheme on integer
capacities (rationals are scaled by their common denominator first).  Arcs
are scanned in edge order, so flows and cuts are reproducible.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .graph import Edge, EdgeId, Multigraph, Step, Vertex, Walk


class FlowError(ValueError):
    pass


class ParityError(ValueError):
    """A non-terminal vertex of odd degree."""

    def __init__(self, vertex):
        super().__init__(f"vertex {vertex!r} has odd degree")
        self.vertex = vertex


# ---------------------------------------------------------------- max flow

class CutOracle:
    """Reusable integer max-flow structure over a fixed undirected graph.

    ``edges`` holds ``(u, v, capacity)`` triples with integer capacities.
    Each edge becomes a pair of opposite arcs sharing the capacity, the usual
    undirected residual encoding.
    """

    def __init__(self, vertices: Sequence, edges: Iterable[tuple]):
        self.index = {v: i for i, v in enumerate(vertices)}
        self.vertices = list(vertices)
        n = len(self.vertices)
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.head: list[int] = []
        self.cap0: list[int] = []
        for u, v, c in edges:
            iu, iv = self.index[u], self.index[v]
            if iu == iv:
                continue
            a = len(self.head)
            self.head += [iv, iu]
            self.cap0 += [c, c]
            self.adj[iu].append(a)
            self.adj[iv].append(a + 1)

    def run(self, sources: Iterable, sinks: Iterable):
        """Return ``(value, residual, reach)`` for a multi-source/sink flow."""
        idx = self.index
        src = {idx[s] for s in sources}
        snk = {idx[t] for t in sinks}
        if src & snk:
            raise FlowError("source and sink sets overlap")
        res = list(self.cap0)
        head, adj = self.head, self.adj
        n = len(adj)
        value = 0
        while True:
            parent = [-1] * n
            seen = [False] * n
            dq = deque()
            for s in sorted(src):
                seen[s] = True
                dq.append(s)
            found = -1
            while dq and found < 0:
                x = dq.popleft()
                for a in adj[x]:
                    if res[a] > 0:
                        y = head[a]
                        if not seen[y]:
                            seen[y] = True
                            parent[y] = a
                            if y in snk:
                                found = y
                                break
                            dq.append(y)
            if found < 0:
                return value, res, seen
            # bottleneck
            b = None
            y = found
            while parent[y] >= 0:
                a = parent[y]
                b = res[a] if b is None else min(b, res[a])
                y = head[a ^ 1]
            y = found
            while parent[y] >= 0:
                a = parent[y]
                res[a] -= b
                res[a ^ 1] += b
                y = head[a ^ 1]
            value += b

    def min_cut_value(self, sources, sinks) -> int:
        return self.run(sources, sinks)[0]

    def min_cut(self, sources, sinks):
        """Value and the inclusion-minimal source side of a minimum cut."""
        value, _, seen = self.run(sources, sinks)
        return value, frozenset(self.vertices[i] for i, s in enumerate(seen) if s)


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for x in values:
        d = math.lcm(d, Fraction(x).denominator)
    return d


@dataclass(frozen=True)
class CutResult:
    value: Fraction
    cut: frozenset
    flow: dict          # EdgeId -> signed amount along (edge.u -> edge.v)


def max_flow_min_cut(g: Multigraph, cap: Mapping[EdgeId, Fraction],
                     sources: Iterable[Vertex], sinks: Iterable[Vertex]) -> CutResult:
    """Maximum flow between two disjoint vertex sets and a minimum cut.

    The returned cut is the set reachable from ``sources`` in the final
    residual graph, i.e. the inclusion-minimal minimum cut.
    """
    S, T = set(sources), set(sinks)
    if not S or not T:
        raise FlowError("source and sink sets must be nonempty")
    if S & T:
        raise FlowError("source and sink sets overlap")
    d = common_denominator(cap[e.id] for e in g.edges)
    oracle = CutOracle(g.vertices, [(e.u, e.v, int(cap[e.id] * d)) for e in g.edges])
    value, res, seen = oracle.run(S, T)
    flow = {}
    for k, e in enumerate(g.edges):
        a = 2 * k
        flow[e.id] = Fraction(oracle.cap0[a] - res[a], d)
    cut = frozenset(oracle.vertices[i] for i, s in enumerate(seen) if s)
    return CutResult(Fraction(value, d), cut, flow)


def min_cut_value(g: Multigraph, cap: Mapping[EdgeId, Fraction], sources, sinks) -> Fraction:
    return max_flow_min_cut(g, cap, sources, sinks).value


# ---------------------------------------------------------------- decompositions

class FlowDecomposition(NamedTuple):
    paths: list          # (amount, Walk) from sources to sinks
    cycles: list         # (amount, Walk) closed walks carrying circulation


def decompose_flow(g: Multigraph, flow: Mapping[EdgeId, Fraction],
                   sources: Iterable[Vertex], sinks: Iterable[Vertex]) -> FlowDecomposition:
    """Split a flow into source-sink paths plus leftover circulation.

    Edge usage of ``paths`` and ``cycles`` together reproduces ``flow``
    exactly.  For an integral flow every amount is integral.
    """
    S, T = set(sources), set(sinks)
    rem: dict[EdgeId, Fraction] = {}
    out: dict[Vertex, list] = {v: [] for v in g.vertices}
    for e in g.edges:
        f = Fraction(flow.get(e.id, 0))
        if f == 0:
            continue
        rem[e.id] = abs(f)
        tail, head = (e.u, e.v) if f > 0 else (e.v, e.u)
        out[tail].append((e.id, head))
    excess = {v: Fraction(0) for v in g.vertices}
    for e in g.edges:
        f = Fraction(flow.get(e.id, 0))
        excess[e.u] -= f
        excess[e.v] += f
    for v, x in excess.items():
        if x != 0 and v not in S and v not in T:
            raise FlowError(f"flow is not conserved at {v!r}")

    def next_arc(v):
        for eid, h in out[v]:
            if rem[eid] > 0:
                return eid, h
        return None

    paths, cycles = [], []

    def peel(start, stop_at_sink):
        # follow positive arcs; cut off cycles as they close
        stack: list[Step] = []
        pos = {start: 0}
        v = start
        while True:
            if stop_at_sink and v in T and stack:
                amount = min(rem[s.edge] for s in stack)
                for s in stack:
                    rem[s.edge] -= amount
                paths.append((amount, Walk(tuple(stack))))
                return True
            arc = next_arc(v)
            if arc is None:
                return False
            eid, h = arc
            stack.append(Step(eid, v, h))
            if h in pos:
                k = pos[h]
                loop = stack[k:]
                amount = min(rem[s.edge] for s in loop)
                for s in loop:
                    rem[s.edge] -= amount
                cycles.append((amount, Walk(tuple(loop))))
                for s in loop:
                    pos.pop(s.head, None)
                del stack[k:]
                pos[h] = k
                v = h
                continue
            pos[h] = len(stack)
            v = h

    for s in g.vertices:
        if s not in S:
            continue
        while next_arc(s) is not None:
            if not peel(s, True):
                break
    # remaining flow is a circulation
    for v in g.vertices:
        while next_arc(v) is not None:
            peel(v, False)
    return FlowDecomposition(paths, cycles)


def eulerian_decompose(g: Multigraph, terminals: Iterable[Vertex]):
    """Cover ``g`` by edge-disjoint trails: terminal-ended ones and closed ones.

    Edge ends at every non-terminal are paired in incidence order; edge ends
    at terminals stay unpaired and become trail endpoints.  Returns
    ``(terminal_trails, cyclic_trails)``.
    """
    terms = set(terminals)
    mate: dict[tuple, tuple] = {}
    for v in g.vertices:
        if v in terms:
            continue
        ends = [(e.id, v) for e in g.incident(v)]
        if len(ends) % 2:
            raise ParityError(v)
        for a, b in zip(ends[0::2], ends[1::2]):
            mate[a] = b
            mate[b] = a
    used: set = set()

    def follow(eid, start):
        steps = []
        cur_e, cur_v = eid, start
        while True:
            used.add(cur_e)
            e = g.edge(cur_e)
            nxt = e.other(cur_v)
            steps.append(Step(cur_e, cur_v, nxt))
            if nxt in terms:
                return steps
            pe, _ = mate[(cur_e, nxt)]
            if pe in used:
                return steps
            cur_e, cur_v = pe, nxt

    t_trails = []
    for t in g.vertices:
        if t not in terms:
            continue
        for e in g.incident(t):
            if e.id not in used:
                t_trails.append(Walk(tuple(follow(e.id, t))))
    cycles = []
    for e in g.edges:
        if e.id not in used:
            cycles.append(Walk(tuple(follow(e.id, e.u))))
    return t_trails, cycles


# ---------------------------------------------------------------- splitting-off

@dataclass(frozen=True)
class SplitRecord:
    vertex: Vertex
    first: Edge
    second: Edge
    new_edge: EdgeId | None      # None when both ends coincide and the pair is dropped


def split_off(g: Multigraph, v: Vertex, e1: EdgeId, e2: EdgeId,
              new_id: EdgeId | None = None):
    """Replace ``av, vb`` by a single edge ``ab`` (dropped when ``a == b``)."""
    if e1 == e2:
        raise ValueError("split_off needs two distinct edges")
    f1, f2 = g.edge(e1), g.edge(e2)
    if v not in (f1.u, f1.v) or v not in (f2.u, f2.v):
        raise ValueError(f"edges {e1!r}, {e2!r} are not both incident to {v!r}")
    a, b = f1.other(v), f2.other(v)
    edges = [e for e in g.edges if e.id not in (e1, e2)]
    nid = None
    if a != b:
        nid = new_id if new_id is not None else ("split", e1, e2)
        if g.has_edge(nid):
            raise ValueError(f"edge id {nid!r} already present")
        edges.append(Edge(nid, a, b))
    return Multigraph(g.vertices, edges), SplitRecord(v, f1, f2, nid)


def unsplit(g: Multigraph, record: SplitRecord) -> Multigraph:
    edges = [e for e in g.edges if e.id != record.new_edge]
    edges += [record.first, record.second]
    return Multigraph(g.vertices, edges)


class SplittingStuck(RuntimeError):
    pass


class _End(NamedTuple):
    edge: int
    side: int            # 0 or 1


def pack_trails_by_splitting(vertices: Sequence, terminals: Sequence,
                             edges: Sequence[tuple],
                             typed: bool = False) -> list[Walk]:
    """Maximum packing of edge-disjoint T-trails by complete splitting-off.

    ``edges`` holds ``(id, u, v)`` for undirected graphs, or
    ``(id, u, v, type_at_u, type_at_v)`` when ``typed`` (bidirected graphs,
    types are +1 for an ingoing end and -1 for an outgoing end).  Pairs of
    edge ends at each non-terminal are split off while every
    ``lambda({t}, T - t)`` stays unchanged; in the bidirected case only an
    ingoing end may be paired with an outgoing one.  Each final
    terminal-terminal edge expands back into one trail of the input graph.
    """
    terms = list(terminals)
    tset = set(terms)
    # live edges: key -> [end0 vertex, end1 vertex, type0, type1, expansion]
    live: dict[int, list] = {}
    counter = 0
    for raw in edges:
        eid, u, v = raw[0], raw[1], raw[2]
        t0, t1 = (raw[3], raw[4]) if typed else (0, 0)
        live[counter] = [u, v, t0, t1, (Step(eid, u, v),)]
        counter += 1
    inc: dict = {v: {} for v in vertices}
    for k, rec in live.items():
        inc[rec[0]][_End(k, 0)] = None
        inc[rec[1]][_End(k, 1)] = None

    def graph_triples(extra_drop=(), extra_add=()):
        out = [(r[0], r[1], 1) for k, r in live.items()
               if k not in extra_drop and r[0] != r[1]]
        out += [(a, b, 1) for a, b in extra_add if a != b]
        return out

    def lambdas(triples):
        if len(terms) < 2:
            return [0] * len(terms)
        oracle = CutOracle(vertices, triples)
        return [oracle.min_cut_value([t], [s for s in terms if s != t]) for t in terms]

    target = lambdas(graph_triples())

    def traverse(k, from_side):
        exp = live[k][4]
        if from_side == 0:
            return exp
        return tuple(Step(s.edge, s.head, s.tail) for s in reversed(exp))

    def remove(k):
        rec = live.pop(k)
        inc[rec[0]].pop(_End(k, 0), None)
        inc[rec[1]].pop(_End(k, 1), None)

    def add(rec):
        nonlocal counter
        k = counter
        counter += 1
        live[k] = rec
        inc[rec[0]][_End(k, 0)] = None
        inc[rec[1]][_End(k, 1)] = None

    def drop_useless_loops(v):
        for end in list(inc[v]):
            if end not in inc[v]:
                continue
            rec = live[end.edge]
            if rec[0] == rec[1] and (not typed or rec[2] != rec[3]):
                remove(end.edge)

    def candidate(v, x: _End, y: _End):
        """New edge record for pairing ends x, y at v, or None if dropped."""
        rx, ry = live[x.edge], live[y.edge]
        if x.edge == y.edge:
            # both ends of one loop: only a consistent loop may vanish
            return None
        far_x, far_y = 1 - x.side, 1 - y.side
        a, ta = rx[far_x], rx[2 + far_x]
        b, tb = ry[far_y], ry[2 + far_y]
        exp = traverse(x.edge, far_x) + traverse(y.edge, y.side)
        return [a, b, ta, tb, exp]

    for v in vertices:
        if v in tset:
            continue
        drop_useless_loops(v)
        while inc[v]:
            ends = list(inc[v])
            done = False
            for x in ends:
                tx = live[x.edge][2 + x.side]
                for y in ends:
                    if y == x:
                        continue
                    ty = live[y.edge][2 + y.side]
                    if typed and tx == ty:
                        continue
                    if y.edge == x.edge:
                        # a loop at v with ends of opposite types
                        remove(x.edge)
                        done = True
                        break
                    rec = candidate(v, x, y)
                    trial = graph_triples({x.edge, y.edge}, [(rec[0], rec[1])])
                    if lambdas(trial) != target:
                        continue
                    remove(x.edge)
                    remove(y.edge)
                    if rec[0] != rec[1] or (typed and rec[2] == rec[3]):
                        add(rec)
                    done = True
                    break
                if done:
                    break
            if not done:
                raise SplittingStuck(f"no admissible pair at {v!r}")
            drop_useless_loops(v)
    trails = []
    for k, rec in live.items():
        if rec[0] == rec[1]:
            continue
        if rec[0] not in tset or rec[1] not in tset:
            raise SplittingStuck("non-terminal edge left after splitting")
        trails.append(Walk(rec[4]))
    if 2 * len(trails) != sum(target):
        raise SplittingStuck("splitting lost trails")
    return trails
