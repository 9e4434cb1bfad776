"""Odd T-walk packings, barriers, slices and certificate conversions.

A barrier is a subgraph ``B`` containing every terminal and no odd T-walk.
Edges leaving ``V(B)`` form ``I(B)`` and edges spanned by ``V(B)`` but absent
from ``B`` form ``U(B)``; the capacity ``cap(I)/2 + cap(U)`` bounds every odd
T-walk packing from above, and the bound is attained.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cover import DoubleCover, Prime, build_commodity_graph, build_double_cover, is_primed, unprime
from .flow import CutOracle, common_denominator
from .graph import Network, Packing, validate_packing
from .multiflow import ProperPartition, check_normalized, max_multiflow_fractional


class BarrierError(ValueError):
    pass


@dataclass(frozen=True)
class Barrier:
    vertices: frozenset
    edges: frozenset          # edge ids, all inside ``vertices``

    @classmethod
    def of(cls, vertices: Iterable, edges: Iterable = ()) -> "Barrier":
        return cls(frozenset(vertices), frozenset(edges))

    def inner_edges(self, n: Network) -> list:
        """I(B): edges with exactly one endpoint in V(B)."""
        return [e.id for e in n.graph.boundary(self.vertices)]

    def unused_edges(self, n: Network) -> list:
        """U(B): edges spanned by V(B) that B does not contain."""
        return [e.id for e in n.graph.inside(self.vertices) if e.id not in self.edges]

    def capacity(self, n: Network) -> Fraction:
        return barrier_capacity(n, self)


def _components(vertices, edges):
    """Connected components of a graph given by vertices and ``(u, v)`` pairs."""
    adj = {v: [] for v in vertices}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen, comps = set(), []
    for s in vertices:
        if s in seen:
            continue
        comp, dq = [s], deque([s])
        seen.add(s)
        while dq:
            x = dq.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    dq.append(y)
        comps.append(comp)
    return comps, adj


def _two_colouring(comp, adj):
    colour = {comp[0]: 0}
    dq = deque([comp[0]])
    while dq:
        x = dq.popleft()
        for y in adj[x]:
            if y not in colour:
                colour[y] = 1 - colour[x]
                dq.append(y)
            elif colour[y] == colour[x]:
                return None
    return colour


def _check_shape(n: Network, b: Barrier) -> None:
    missing = [t for t in n.terminals if t not in b.vertices]
    if missing:
        raise BarrierError(f"terminal {missing[0]!r} is outside the barrier")
    for eid in b.edges:
        e = n.graph.edge(eid)
        if e.u not in b.vertices or e.v not in b.vertices:
            raise BarrierError(f"barrier edge {eid!r} leaves the barrier vertex set")


def barrier_components(n: Network, b: Barrier) -> list[tuple[list, dict | None]]:
    """Components of ``B`` with a 2-colouring (None when not bipartite)."""
    pairs = [(n.graph.edge(eid).u, n.graph.edge(eid).v) for eid in b.edges]
    order = [v for v in n.graph.vertices if v in b.vertices]
    comps, adj = _components(order, pairs)
    return [(c, _two_colouring(c, adj)) for c in comps]


def barrier_check(n: Network, b: Barrier) -> bool:
    """True iff ``B`` contains no odd T-walk.

    Each component must be terminal-free, hold a single terminal, or be
    bipartite with all its terminals on one side.
    """
    _check_shape(n, b)
    terms = n.terminal_set
    for comp, colour in barrier_components(n, b):
        ts = [v for v in comp if v in terms]
        if len(ts) <= 1:
            continue
        if colour is None or len({colour[t] for t in ts}) > 1:
            return False
    return True


def barrier_capacity(n: Network, b: Barrier) -> Fraction:
    return n.cap_of(b.inner_edges(n)) / 2 + n.cap_of(b.unused_edges(n))


def slice_of(n: Network, vertices: Iterable, edges: Iterable) -> dict:
    """The slice ``S[H]``: 1 on U(H), 1/2 on I(H), 0 elsewhere."""
    vs = set(vertices)
    es = set(edges)
    out = {}
    for e in n.graph.edges:
        inside_u, inside_v = e.u in vs, e.v in vs
        if inside_u and inside_v:
            out[e.id] = Fraction(0) if e.id in es else Fraction(1)
        elif inside_u or inside_v:
            out[e.id] = Fraction(1, 2)
        else:
            out[e.id] = Fraction(0)
    return out


def normalize_barrier(n: Network, b: Barrier) -> Barrier:
    """Drop components of ``B`` that hold no terminal."""
    terms = n.terminal_set
    keep = set()
    for comp, _ in barrier_components(n, b):
        if any(v in terms for v in comp):
            keep.update(comp)
    return Barrier.of(keep, [eid for eid in b.edges
                             if n.graph.edge(eid).u in keep])


# ---------------------------------------------------------------- certificate conversions

def partition_to_barrier(dc: DoubleCover, x: ProperPartition) -> Barrier:
    """Barrier assembled from the cuts of a normalized proper partition."""
    problems = check_normalized(x)
    if problems:
        raise BarrierError("partition is not normalized: " + "; ".join(problems))
    n = dc.base
    g = n.graph
    verts: set = set()
    edges: set = set()
    done_pair = False
    for part, cut in zip(x.parts, x.cuts):
        if x.nonsingular_part(part):
            if done_pair:
                continue
            done_pair = True
            y = next(c for p, c in zip(x.parts, x.cuts)
                     if x.nonsingular_part(p) and not any(is_primed(t) for t in p))
            left = {v for v in y if not is_primed(v)}
            right = {unprime(v) for v in y if is_primed(v)}
            assert not left & right
            verts |= left | right
            edges |= {e.id for e in g.edges
                      if (e.u in left and e.v in right) or (e.v in left and e.u in right)}
        else:
            c = {unprime(v) for v in cut}
            verts |= c
            edges |= {e.id for e in g.inside(c)}
    verts |= set(n.terminals)
    b = normalize_barrier(n, Barrier.of(verts, edges))
    if not barrier_check(n, b):
        raise BarrierError("assembled subgraph contains an odd T-walk")
    if barrier_capacity(n, b) > x.capacity:
        raise BarrierError("barrier capacity exceeds the partition capacity")
    return b


def barrier_to_partition(dc: DoubleCover, b: Barrier) -> ProperPartition:
    """Proper partition of ``T u T'`` read off the components of a barrier.

    Parts of several bipartite components are merged into a single pair
    ``(S, S')``, which never increases capacity.  Cuts are the minimal
    minimum cuts of the parts, so the result is normalized.
    """
    n = dc.base
    if not barrier_check(n, b):
        raise BarrierError("not a barrier")
    terms = n.terminal_set
    s_side: list = []
    singles: list = []
    construction = Fraction(0)
    for comp, colour in barrier_components(n, b):
        ts = [v for v in comp if v in terms]
        if not ts:
            continue
        cset = set(comp)
        if len(ts) == 1:
            singles.append(ts[0])
            construction += _cover_cut(dc, cset | {Prime(v) for v in cset})
        else:
            side = colour[ts[0]]
            left = {v for v in comp if colour[v] == side}
            right = cset - left
            s_side += ts
            construction += _cover_cut(dc, left | {Prime(v) for v in right})
            construction += _cover_cut(dc, right | {Prime(v) for v in left})
    if construction / 2 > barrier_capacity(n, b):
        raise AssertionError("component cuts exceed the barrier capacity")
    order = {t: i for i, t in enumerate(n.terminals)}
    s_side.sort(key=order.__getitem__)
    parts = []
    if s_side:
        parts.append(frozenset(s_side))
        parts.append(frozenset(Prime(t) for t in s_side))
    parts += [frozenset({t, Prime(t)}) for t in n.terminals if t in singles]
    x = _partition_from_parts(dc, parts, tuple(s_side))
    if x.capacity > barrier_capacity(n, b):
        raise BarrierError("partition capacity exceeds the barrier capacity")
    return x


def _cover_cut(dc: DoubleCover, y: set) -> Fraction:
    return dc.cover.cut_capacity(y)


def _partition_from_parts(dc: DoubleCover, parts, s: tuple) -> ProperPartition:
    cover = dc.cover
    d = common_denominator(cover.cap.values())
    oracle = CutOracle(cover.graph.vertices,
                       [(e.u, e.v, int(cover.cap[e.id] * d)) for e in cover.graph.edges])
    all_terms = frozenset(cover.terminals)
    cuts, lams = [], []
    for p in parts:
        rest = all_terms - p
        if rest:
            value, cut = oracle.min_cut(p, rest)
        else:
            value, cut = 0, frozenset(p)
        cuts.append(cut)
        lams.append(Fraction(value, d))
    return ProperPartition(tuple(parts), tuple(cuts), tuple(lams), sum(lams, Fraction(0)) / 2, s)


# ---------------------------------------------------------------- packing

@dataclass(frozen=True)
class OddWalkResult:
    packing: Packing
    barrier: Barrier
    value: Fraction
    capacity: Fraction


def max_odd_walk_packing(n: Network) -> OddWalkResult:
    """Maximum fractional odd T-walk packing with a minimum barrier.

    The packing is read off a maximum multiflow in the double cover,
    symmetrized and projected; the barrier comes from the minimum proper
    partition that certifies the multiflow.
    """
    if len(n.terminals) < 2:
        whole = Barrier.of(n.graph.vertices, [e.id for e in n.graph.edges])
        return OddWalkResult(Packing(), whole, Fraction(0), Fraction(0))
    from .cover import project_packing, symmetrize

    dc = build_double_cover(n)
    h, _ = build_commodity_graph(n.terminals)
    mf = max_multiflow_fractional(dc.cover, h)
    packing = project_packing(dc, symmetrize(dc, mf.packing))
    barrier = partition_to_barrier(dc, mf.certificate)
    report = validate_packing(n, packing)
    if not report.ok:
        raise AssertionError(f"projected packing overloads {report.violations[0].edge!r}")
    for _, w in packing:
        if len(w) % 2 == 0 or w.start == w.end or not (n.is_terminal(w.start) and n.is_terminal(w.end)):
            raise AssertionError("projected walk is not an odd T-walk")
    cap = barrier_capacity(n, barrier)
    if packing.value != cap:
        raise AssertionError(f"packing value {packing.value} differs from barrier capacity {cap}")
    return OddWalkResult(packing, barrier, packing.value, cap)


@dataclass(frozen=True)
class ParityReport:
    condition: str        # "none", "even-caps" or "even-caps-mod4"
    holds: bool
    detail: str


def value_parity_check(n: Network, value: Fraction) -> ParityReport:
    """Integrality (even capacities) and evenness (loads divisible by 4)."""
    value = Fraction(value)
    if not all(c.denominator == 1 and c % 2 == 0 for c in n.cap.values()):
        return ParityReport("none", True, "capacities are not all even integers")
    mod4 = all(n.vertex_load(v) % 4 == 0 for v in n.graph.vertices if not n.is_terminal(v))
    if mod4:
        ok = value.denominator == 1 and value % 2 == 0
        return ParityReport("even-caps-mod4", ok, f"value {value} must be an even integer")
    ok = value.denominator == 1
    return ParityReport("even-caps", ok, f"value {value} must be an integer")
