"""Maximum multiflows for the commodity graph ``H_T`` and their certificates.

The dual side is a proper partition of ``T u T'``.  Merging parts that lie in
one maximal anticlique never increases capacity, so a minimum partition may be
taken of the form ``{S, S'} u {{t, t'} : t not in S}`` with ``S`` empty or
``|S| >= 2``; that holds for any graph, symmetric or not, and is what the
enumeration below scans.

Integer multiflows are built by splitting off capacity at one vertex at a
time, keeping the optimum (the minimum partition capacity) unchanged.  Under
the parity hypothesis an integer optimum always exists, so at a non-terminal
the edge ends used by some optimal flow give a value-preserving pair and the
greedy search never stalls there.  Once only terminals carry edges, pairs at
terminals are split while the value allows it; after that no optimal flow
passes through a terminal, so every remaining ``t_i t_j'`` edge is a flow
path on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .cover import CommodityGraph, DoubleCover, Prime, is_primed, prime, unprime
from .flow import CutOracle, SplittingStuck, common_denominator, pack_trails_by_splitting
from .graph import Network, Packing, PackingItem, Step, Walk, is_inner_eulerian


class MultiflowError(ValueError):
    pass


@dataclass(frozen=True)
class ProperPartition:
    parts: tuple            # frozensets of cover terminals
    cuts: tuple             # frozensets of cover vertices, one per part
    lambdas: tuple          # minimum cut value of every part
    capacity: Fraction
    nonsingular: tuple = () # the set S (sorted) of the pair {S, S'}, if any

    def singular_parts(self):
        return [(x, y) for x, y in zip(self.parts, self.cuts) if len(x) == 2
                and not self.nonsingular_part(x)]

    def nonsingular_part(self, x) -> bool:
        s = set(self.nonsingular)
        return bool(s) and (set(x) == s or set(x) == {Prime(t) for t in s})


@dataclass(frozen=True)
class MultiflowResult:
    packing: Packing
    certificate: ProperPartition

    @property
    def value(self) -> Fraction:
        return self.packing.value


def _candidates(terminals) -> list[tuple]:
    names = sorted(terminals, key=str)
    cands = [()]
    for r in range(2, len(names) + 1):
        cands += list(combinations(names, r))
    cands.sort(key=lambda s: tuple(str(x) for x in s))
    return cands


def _parts(terminals, s: tuple) -> list[frozenset]:
    parts = []
    if s:
        parts.append(frozenset(s))
        parts.append(frozenset(Prime(t) for t in s))
    parts += [frozenset({t, Prime(t)}) for t in terminals if t not in s]
    return parts


class _PartitionEvaluator:
    """Minimum proper partition value on a graph given as integer triples."""

    def __init__(self, terminals):
        self.terminals = tuple(terminals)
        self.all_terms = frozenset(self.terminals) | {Prime(t) for t in self.terminals}
        self.cands = _candidates(self.terminals)
        self.order = list(range(len(self.cands)))

    def lam(self, oracle, cache, part):
        if part not in cache:
            cache[part] = oracle.min_cut_value(part, self.all_terms - part)
        return cache[part]

    def minimum(self, vertices, triples):
        """``(2 * capacity, S)`` of a minimum partition."""
        oracle = CutOracle(vertices, triples)
        cache: dict = {}
        best = None
        for s in self.cands:
            total = sum(self.lam(oracle, cache, p) for p in _parts(self.terminals, s))
            if best is None or total < best[0]:
                best = (total, s)
        return best

    def at_least(self, vertices, triples, bound) -> bool:
        """True iff every candidate partition has doubled capacity >= bound."""
        oracle = CutOracle(vertices, triples)
        cache: dict = {}
        for pos, ci in enumerate(self.order):
            total = sum(self.lam(oracle, cache, p)
                        for p in _parts(self.terminals, self.cands[ci]))
            if total < bound:
                # failing candidates are likely to fail again; test them first
                self.order.insert(0, self.order.pop(pos))
                return False
        return True


def partition_capacity(n: Network, terminals, s: tuple) -> Fraction:
    """Capacity of the partition ``{S, S'} u {{t,t'}}`` in a cover-like network."""
    d = common_denominator(n.cap.values())
    oracle = CutOracle(n.graph.vertices,
                       [(e.u, e.v, int(n.cap[e.id] * d)) for e in n.graph.edges])
    all_terms = frozenset(terminals) | {Prime(t) for t in terminals}
    total = sum(oracle.min_cut_value(p, all_terms - p) for p in _parts(terminals, s))
    return Fraction(total, 2 * d)


def min_proper_partition(n: Network, h: CommodityGraph) -> ProperPartition:
    """Minimum proper partition with inclusion-minimal minimum cuts.

    Ties are broken towards the lexicographically smallest ``S`` (the
    all-singular partition, ``S`` empty, comes first).
    """
    terms = tuple(h.terminals)
    if len(terms) < 2:
        parts = tuple(frozenset({t, Prime(t)}) for t in terms)
        return ProperPartition(parts, parts, (Fraction(0),) * len(parts), Fraction(0))
    d = common_denominator(n.cap.values())
    triples = [(e.u, e.v, int(n.cap[e.id] * d)) for e in n.graph.edges]
    ev = _PartitionEvaluator(terms)
    total, s = ev.minimum(n.graph.vertices, triples)
    oracle = CutOracle(n.graph.vertices, triples)
    parts, cuts, lams = [], [], []
    for p in _parts(terms, s):
        value, cut = oracle.min_cut(p, ev.all_terms - p)
        parts.append(p)
        cuts.append(cut)
        lams.append(Fraction(value, d))
    cap = Fraction(total, 2 * d)
    assert sum(lams) / 2 == cap
    return ProperPartition(tuple(parts), tuple(cuts), tuple(lams), cap, tuple(s))


def check_normalized(x: ProperPartition) -> list[str]:
    """Problems preventing the partition-to-barrier construction (empty if none)."""
    problems = []
    for i, (p, y) in enumerate(zip(x.parts, x.cuts)):
        if not x.nonsingular_part(p):
            if {prime(v) for v in y} != set(y):
                problems.append(f"cut of part {i} is not self-symmetric")
    if x.nonsingular:
        y1, y2 = x.cuts[0], x.cuts[1]
        if {prime(v) for v in y1} != set(y2):
            problems.append("cuts of S and S' are not mirror images")
    for (i, a), (j, b) in combinations(enumerate(x.cuts), 2):
        if a & b:
            problems.append(f"cuts {i} and {j} intersect")
    return problems


# ---------------------------------------------------------------- integer multiflow

def _parity_violations(n: Network) -> list:
    terms = n.terminal_set
    return [v for v in n.graph.vertices
            if v not in terms and n.vertex_load(v) % 2]


class _Splitter:
    """Capacitated splitting-off that keeps the multiflow optimum fixed."""

    def __init__(self, n: Network, h: CommodityGraph, caps: dict):
        self.terms = tuple(h.terminals)
        self.tset = frozenset(n.terminals)
        self.vertices = list(n.graph.vertices)
        self.live: dict[int, list] = {}
        self.inc = {v: {} for v in self.vertices}
        self.counter = 0
        for e in n.graph.edges:
            c = caps[e.id]
            if c:
                self._add([e.u, e.v, c, (Step(e.id, e.u, e.v),)])
        self.ev = _PartitionEvaluator(self.terms)
        self.target = self.ev.minimum(self.vertices, self._triples())[0]

    def _add(self, rec):
        k = self.counter
        self.counter += 1
        self.live[k] = rec
        self.inc[rec[0]][k] = None
        self.inc[rec[1]][k] = None

    def _reduce(self, k, amount):
        rec = self.live[k]
        rec[2] -= amount
        if rec[2] == 0:
            del self.live[k]
            self.inc[rec[0]].pop(k, None)
            self.inc[rec[1]].pop(k, None)

    def _triples(self, change=None):
        out = []
        if change is None:
            return [(r[0], r[1], r[2]) for r in self.live.values()]
        x, y, m, a, b = change
        for k, r in self.live.items():
            c = r[2]
            if k == x:
                c -= m
            if k == y:
                c -= m
            if c:
                out.append((r[0], r[1], c))
        if a != b:
            out.append((a, b, m))
        return out

    def _far(self, k, v):
        r = self.live[k]
        return r[1] if r[0] == v else r[0]

    def _oriented(self, k, start):
        r = self.live[k]
        if r[0] == start:
            return r[3]
        return tuple(Step(s.edge, s.head, s.tail) for s in reversed(r[3]))

    def _ok(self, v, x, y, m):
        a, b = self._far(x, v), self._far(y, v)
        return self.ev.at_least(self.vertices, self._triples((x, y, m, a, b)), self.target)

    def _commit(self, v, x, y, m):
        a, b = self._far(x, v), self._far(y, v)
        exp = self._oriented(x, a) + self._oriented(y, v)
        self._reduce(x, m)
        self._reduce(y, m)
        if a != b:
            self._add([a, b, m, exp])

    def _try_pair(self, v, x, y) -> bool:
        cx = self.live[x][2]
        mmax = cx // 2 if x == y else min(cx, self.live[y][2])
        if mmax < 1 or not self._ok(v, x, y, 1):
            return False
        lo, hi = 1, mmax
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._ok(v, x, y, mid):
                lo = mid
            else:
                hi = mid - 1
        self._commit(v, x, y, lo)
        return True

    def run(self) -> list[tuple[int, Walk]]:
        if self.target == 0:
            return []
        for v in self.vertices:
            if v in self.tset:
                continue
            while self.inc[v]:
                keys = list(self.inc[v])
                if not any(self._try_pair(v, x, y) for x in keys[:1] for y in keys):
                    # should not happen under the parity hypothesis
                    if not any(self._try_pair(v, x, y) for x in keys for y in keys):
                        raise SplittingStuck(f"no value-preserving pair at {v!r}")
        progress = True
        while progress:
            progress = False
            for t in self.vertices:
                if t not in self.tset:
                    continue
                keys = list(self.inc[t])
                tried = set()
                for x, y in combinations(keys, 2):
                    a, b = self._far(x, t), self._far(y, t)
                    if a == b or frozenset((a, b)) in tried:
                        continue
                    tried.add(frozenset((a, b)))
                    if self._try_pair(t, x, y):
                        progress = True
                        break
                if progress:
                    break
        flows = []
        for r in self.live.values():
            a, b = r[0], r[1]
            if is_primed(a) != is_primed(b) and unprime(a) != unprime(b):
                walk = Walk(r[3])
                if is_primed(a):
                    walk = walk.reversed()
                flows.append((r[2], walk))
        if 2 * sum(c for c, _ in flows) != self.target:
            raise SplittingStuck("terminal edges do not realize the optimum")
        return flows


def max_multiflow_integer(n: Network, h: CommodityGraph) -> MultiflowResult:
    """Integer maximum multiflow, certified by a minimum proper partition.

    Requires integer capacities and even ``cap(delta(v))`` at non-terminals.
    """
    for c in n.cap.values():
        if c.denominator != 1:
            raise MultiflowError("integer multiflow needs integer capacities")
    bad = _parity_violations(n)
    if bad:
        raise MultiflowError(f"cap(delta(v)) is odd at non-terminal {bad[0]}")
    cert = min_proper_partition(n, h)
    if len(h.terminals) < 2:
        return MultiflowResult(Packing(), cert)
    flows = _Splitter(n, h, {k: int(c) for k, c in n.cap.items()}).run()
    packing = Packing(tuple(PackingItem(Fraction(c), w) for c, w in flows)).normalized()
    if packing.value != cert.capacity:
        raise MultiflowError("multiflow value differs from the partition capacity")
    return MultiflowResult(packing, cert)


def max_multiflow_fractional(n: Network, h: CommodityGraph) -> MultiflowResult:
    """Maximum fractional multiflow via an integer flow on scaled capacities.

    Capacities are scaled to integers; when the parity hypothesis fails they
    are doubled as well, and the integer result is scaled back.
    """
    cert = min_proper_partition(n, h)
    if len(h.terminals) < 2:
        return MultiflowResult(Packing(), cert)
    k = common_denominator(n.cap.values())
    scaled = n.scaled(k)
    if _parity_violations(scaled):
        k *= 2
        scaled = n.scaled(k)
    flows = _Splitter(scaled, h, {e: int(c) for e, c in scaled.cap.items()}).run()
    packing = Packing(tuple(PackingItem(Fraction(c, k), w) for c, w in flows)).normalized()
    if packing.value != cert.capacity:
        raise MultiflowError("multiflow value differs from the partition capacity")
    return MultiflowResult(packing, cert)


# ---------------------------------------------------------------- T-trails

def half_sum_of_lambdas(n: Network) -> Fraction:
    """``1/2 * sum_t lambda({t}, T - {t})``."""
    terms = list(n.terminals)
    if len(terms) < 2:
        return Fraction(0)
    d = common_denominator(n.cap.values())
    oracle = CutOracle(n.graph.vertices,
                       [(e.u, e.v, int(n.cap[e.id] * d)) for e in n.graph.edges])
    total = sum(oracle.min_cut_value([t], [s for s in terms if s != t]) for t in terms)
    return Fraction(total, 2 * d)


def lc_trail_packing(n: Network) -> Packing:
    """Maximum packing of edge-disjoint T-trails in an inner Eulerian graph
    with unit capacities."""
    if any(c != 1 for c in n.cap.values()):
        raise MultiflowError("T-trail packing needs unit capacities")
    if not is_inner_eulerian(n):
        raise MultiflowError("graph is not inner Eulerian")
    if len(n.terminals) < 2:
        return Packing()
    trails = pack_trails_by_splitting(
        n.graph.vertices, n.terminals, [(e.id, e.u, e.v) for e in n.graph.edges])
    p = Packing(tuple(PackingItem(Fraction(1), w) for w in trails))
    assert p.value == half_sum_of_lambdas(n)
    return p
