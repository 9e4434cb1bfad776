"""Valence graphs, signings, alternating trails and bidirected graphs.

Every edge ``e`` of a graph carries two unit valencies ``Valence(e, 1)`` and
``Valence(e, 2)``.  A signing puts ``+1`` or ``-1`` on each valence; a trail
in the valence graph is alternating when consecutive signs differ.  Turning
``+`` valencies into positive bidirected edges (ingoing at both ends) and
``-`` valencies into negative ones turns alternating trails into bidirected
trails, which is how alternating packings are produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .flow import CutOracle, SplittingStuck, pack_trails_by_splitting
from .graph import Multigraph, Walk

PLUS, MINUS = 1, -1


class SigningError(ValueError):
    pass


class Valence(NamedTuple):
    edge: object
    k: int            # 1 or 2

    def __str__(self):
        return f"{self.edge}^{self.k}"


def valencies(eid) -> tuple[Valence, Valence]:
    return Valence(eid, 1), Valence(eid, 2)


@dataclass(frozen=True)
class ValenceGraph:
    base: Multigraph

    @property
    def graph(self) -> Multigraph:
        edges = []
        for e in self.base.edges:
            for val in valencies(e.id):
                edges.append((val, e.u, e.v))
        return Multigraph(self.base.vertices, edges)


def sign_char(s: int) -> str:
    return "+" if s > 0 else "-"


@dataclass(frozen=True)
class SignedValenceNetwork:
    """Valence graph of ``base`` with a signing and a terminal set.

    ``p``, ``q`` and ``witness`` record (p, q)-tightness when known: the
    witness is a packing of ``p + q`` valence-disjoint T-trails.
    """

    base: Multigraph
    terminals: tuple
    sign: dict                      # Valence -> +1 / -1
    p: int | None = None
    q: int | None = None
    witness: tuple = field(default=())

    def __post_init__(self):
        for e in self.base.edges:
            for val in valencies(e.id):
                if self.sign.get(val) not in (PLUS, MINUS):
                    raise SigningError(f"valence {val} is unsigned")

    @property
    def terminal_set(self) -> frozenset:
        return frozenset(self.terminals)

    @property
    def valence_graph(self) -> Multigraph:
        return ValenceGraph(self.base).graph

    def endpoints(self, val: Valence) -> tuple:
        e = self.base.edge(val.edge)
        return e.u, e.v

    def incident_valencies(self, v) -> list[Valence]:
        out = []
        for e in self.base.incident(v):
            out += valencies(e.id)
        return out


def is_inner_balanced(svn: SignedValenceNetwork) -> bool:
    return not unbalanced_vertices(svn)


def unbalanced_vertices(svn: SignedValenceNetwork) -> list:
    terms = svn.terminal_set
    return [v for v in svn.base.vertices if v not in terms
            and sum(svn.sign[x] for x in svn.incident_valencies(v)) != 0]


def signs_alternate(signs: Sequence[int]) -> bool:
    return all(a != b for a, b in zip(signs, signs[1:]))


def is_alternating(w: Walk, sign: dict) -> bool:
    return signs_alternate([sign[s.edge] for s in w.steps])


def count_minus_at_terminals(svn: SignedValenceNetwork) -> int:
    """Number of ``-`` valencies at terminals, once per terminal endpoint."""
    terms = svn.terminal_set
    total = 0
    for e in svn.base.edges:
        ends = (e.u in terms) + (e.v in terms)
        if ends:
            total += ends * sum(1 for val in valencies(e.id) if svn.sign[val] == MINUS)
    return total


# ---------------------------------------------------------------- bidirected graphs

IN, OUT = 1, -1


class BidirectedEdge(NamedTuple):
    id: object
    u: object
    v: object
    at_u: int          # IN or OUT
    at_v: int

    @property
    def mark(self) -> str:
        if self.at_u == IN and self.at_v == IN:
            return "pos"
        if self.at_u == OUT and self.at_v == OUT:
            return "neg"
        return f"dir({self.u}->{self.v})" if self.at_u == OUT else f"dir({self.v}->{self.u})"


@dataclass(frozen=True)
class BidirectedGraph:
    vertices: tuple
    edges: tuple        # BidirectedEdge

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable) -> "BidirectedGraph":
        verts = tuple(dict.fromkeys(vertices))
        vs = set(verts)
        out = []
        for raw in edges:
            e = BidirectedEdge(*raw)
            if e.u not in vs or e.v not in vs:
                raise ValueError(f"edge {e.id!r} uses an unknown vertex")
            if e.u == e.v:
                raise ValueError(f"edge {e.id!r} is a loop")
            if e.at_u not in (IN, OUT) or e.at_v not in (IN, OUT):
                raise ValueError(f"edge {e.id!r} has a bad end type")
            out.append(e)
        return cls(verts, tuple(out))

    def imbalance(self, v) -> int:
        total = 0
        for e in self.edges:
            if e.u == v:
                total += e.at_u
            if e.v == v:
                total += e.at_v
        return total

    def is_inner_eulerian(self, terminals: Iterable) -> bool:
        terms = set(terminals)
        return all(self.imbalance(v) == 0 for v in self.vertices if v not in terms)

    def underlying(self) -> Multigraph:
        return Multigraph(self.vertices, [(e.id, e.u, e.v) for e in self.edges])


def to_bidirected(svn: SignedValenceNetwork) -> BidirectedGraph:
    """``+`` valencies become positive edges, ``-`` valencies negative ones."""
    bad = unbalanced_vertices(svn)
    if bad:
        raise SigningError(f"signing is not balanced at {bad[0]!r}")
    edges = []
    for e in svn.base.edges:
        for val in valencies(e.id):
            t = IN if svn.sign[val] == PLUS else OUT
            edges.append((val, e.u, e.v, t, t))
    return BidirectedGraph.build(svn.base.vertices, edges)


def is_bidirected_trail(bg: BidirectedGraph, w: Walk) -> bool:
    """Consecutive edges are ingoing/outgoing in turn at every inner vertex."""
    index = {e.id: e for e in bg.edges}

    def end_type(eid, x):
        e = index[eid]
        return e.at_u if x == e.u else e.at_v

    for a, b in zip(w.steps, w.steps[1:]):
        if end_type(a.edge, a.head) == end_type(b.edge, a.head):
            return False
    return len(set(w.edge_ids)) == len(w)


def lambda_sum(vertices, terminals, pairs) -> int:
    """``sum_t lambda({t}, T - t)`` on a unit-capacity graph (not halved)."""
    terms = list(terminals)
    if len(terms) < 2:
        return 0
    oracle = CutOracle(vertices, [(u, v, 1) for u, v in pairs])
    return sum(oracle.min_cut_value([t], [s for s in terms if s != t]) for t in terms)


def bidirected_trail_packing(bg: BidirectedGraph, terminals: Iterable) -> list[Walk]:
    """Maximum packing of edge-disjoint bidirected T-trails.

    Its size is ``1/2 sum_t lambda({t}, T - t)`` on the underlying
    undirected graph; the splitting engine asserts that.
    """
    terms = tuple(dict.fromkeys(terminals))
    if not bg.is_inner_eulerian(terms):
        bad = next(v for v in bg.vertices if v not in terms and bg.imbalance(v))
        raise SigningError(f"bidirected graph is not inner Eulerian at {bad!r}")
    if len(terms) < 2:
        return []
    return pack_trails_by_splitting(
        bg.vertices, terms, [(e.id, e.u, e.v, e.at_u, e.at_v) for e in bg.edges], typed=True)


# ---------------------------------------------------------------- alternating packings

def split_at_terminals(w: Walk, terminals: frozenset) -> list[Walk]:
    """Cut a trail at inner terminals; pieces closed at a terminal are dropped."""
    pieces, cur = [], []
    for s in w.steps:
        cur.append(s)
        if s.head in terminals:
            pieces.append(Walk(tuple(cur)))
            cur = []
    if cur:
        pieces.append(Walk(tuple(cur)))
    return [p for p in pieces if p.start != p.end]


def alternating_packing(svn: SignedValenceNetwork) -> tuple[list[Walk], list[Walk]]:
    """Alternating T-trails ``(P, Q)``: odd ones and even ones.

    A witness that already alternates is reused after splitting at inner
    terminals.  Otherwise a maximum bidirected trail packing of the
    associated bidirected graph is taken, which has at least ``p + q``
    trails.  ``|P| >= p`` and ``|Q| <= q`` are asserted when tightness data
    is present.
    """
    terms = svn.terminal_set
    witness = list(svn.witness)
    if witness and all(is_alternating(w, svn.sign) for w in witness):
        trails = []
        for w in witness:
            trails += split_at_terminals(w, terms)
    elif svn.p is not None and svn.p + svn.q == 0:
        trails = []
    else:
        trails = []
        for w in bidirected_trail_packing(to_bidirected(svn), svn.terminals):
            trails += split_at_terminals(w, terms)
    for w in trails:
        if not is_alternating(w, svn.sign):
            raise AssertionError("packing trail is not alternating")
    odd = [w for w in trails if len(w) % 2]
    even = [w for w in trails if len(w) % 2 == 0]
    if svn.p is not None:
        if len(trails) < svn.p + svn.q:
            raise SplittingStuck(
                f"only {len(trails)} alternating trails, {svn.p + svn.q} needed")
        if len(even) > count_minus_at_terminals(svn):
            raise AssertionError("more even trails than '-' valencies at terminals")
        if len(odd) < svn.p:
            raise AssertionError(f"{len(odd)} odd trails, at least {svn.p} expected")
    return odd, even
