"""The bipartite double cover of a network and its commodity graph.

Every vertex ``v`` gets a mirror ``Prime(v)``; every base edge ``e = uv``
becomes the two cover edges ``CoverEdge(e, 0) = u v'`` and
``CoverEdge(e, 1) = u' v``, each with half the base capacity.  Odd walks
between two terminals of the base lift to walks from the unprimed side to the
primed side, and the mirror map swaps the two lifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple

from .graph import Multigraph, Network, Packing, PackingItem, Step, Vertex, Walk


class Prime(NamedTuple):
    v: object

    def __str__(self):
        return f"{self.v}'"


class CoverEdge(NamedTuple):
    base: object
    k: int

    def __str__(self):
        return f"{self.base}#{self.k}"


def prime(x):
    """The mirror image of a cover vertex (``v'' = v``)."""
    return x.v if isinstance(x, Prime) else Prime(x)


def unprime(x):
    return x.v if isinstance(x, Prime) else x


def is_primed(x) -> bool:
    return isinstance(x, Prime)


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class DoubleCover:
    base: Network
    cover: Network

    def mirror_vertex(self, x):
        return prime(x)

    def mirror_edge(self, ce: CoverEdge) -> CoverEdge:
        return CoverEdge(ce.base, 1 - ce.k)

    def mirror_walk(self, w: Walk) -> Walk:
        return Walk(tuple(Step(self.mirror_edge(s.edge), prime(s.tail), prime(s.head))
                          for s in w.steps))

    def symmetry_table(self) -> dict:
        """String map of the involution, for debugging dumps."""
        table = {str(v): str(prime(v)) for v in self.cover.graph.vertices}
        table.update({str(e.id): str(self.mirror_edge(e.id)) for e in self.cover.graph.edges})
        return table


def build_double_cover(n: Network) -> DoubleCover:
    base = n.graph
    verts = list(base.vertices) + [Prime(v) for v in base.vertices]
    edges, caps = [], {}
    for e in base.edges:
        half = n.cap[e.id] / 2
        for k, (a, b) in enumerate(((e.u, Prime(e.v)), (Prime(e.u), e.v))):
            ce = CoverEdge(e.id, k)
            edges.append((ce, a, b))
            caps[ce] = half
    terminals = list(n.terminals) + [Prime(t) for t in n.terminals]
    cover = Network(Multigraph(verts, edges), tuple(terminals), caps)
    return DoubleCover(n, cover)


# ---------------------------------------------------------------- commodity graph

@dataclass(frozen=True)
class CommodityGraph:
    """Complete bipartite graph between ``T`` and ``T'`` minus ``{t t'}``."""

    terminals: tuple

    @property
    def vertices(self) -> tuple:
        return tuple(self.terminals) + tuple(Prime(t) for t in self.terminals)

    @property
    def edges(self) -> list[tuple]:
        return [(a, Prime(b)) for a in self.terminals for b in self.terminals if a != b]

    def is_edge(self, x, y) -> bool:
        if is_primed(x) == is_primed(y):
            return False
        return unprime(x) != unprime(y)

    def is_anticlique(self, xs: Iterable) -> bool:
        xs = list(xs)
        return not any(self.is_edge(a, b) for a, b in combinations(xs, 2))


@dataclass(frozen=True)
class AnticliqueFamilies:
    first: tuple        # (T, T')
    second: tuple       # {t, t'} for every t


def build_commodity_graph(terminals) -> tuple[CommodityGraph, AnticliqueFamilies]:
    terms = tuple(terminals)
    if len(terms) < 2:
        raise CoverError("the commodity graph needs at least two terminals")
    h = CommodityGraph(terms)
    fams = AnticliqueFamilies(
        (frozenset(terms), frozenset(Prime(t) for t in terms)),
        tuple(frozenset({t, Prime(t)}) for t in terms))
    return h, fams


# ---------------------------------------------------------------- walk maps

def lift_walk(dc: DoubleCover, w: Walk) -> Walk:
    """Lift an odd walk of the base, starting on the unprimed side."""
    if len(w) % 2 == 0:
        raise CoverError("only odd walks lift to unprimed-primed walks")
    steps = []
    side = False       # False: currently on the unprimed side
    for s in w.steps:
        e = dc.base.graph.edge(s.edge)
        tail = Prime(s.tail) if side else s.tail
        head = s.head if side else Prime(s.head)
        # CoverEdge(e, 0) joins u and v'; CoverEdge(e, 1) joins u' and v
        if not side:
            k = 0 if s.tail == e.u else 1
        else:
            k = 1 if s.tail == e.u else 0
        steps.append(Step(CoverEdge(s.edge, k), tail, head))
        side = not side
    return Walk(tuple(steps))


def project_walk(w: Walk) -> Walk:
    return Walk(tuple(Step(s.edge.base, unprime(s.tail), unprime(s.head)) for s in w.steps))


def project_packing(dc: DoubleCover, q: Packing) -> Packing:
    """Preimages of cover walks joining ``t1`` and ``t2'`` with ``t1 != t2``."""
    items = []
    for w, walk in q.items:
        a, b = walk.start, walk.end
        if is_primed(a) == is_primed(b) or unprime(a) == unprime(b):
            raise CoverError(f"cover walk {str(a)}-{str(b)} is not a commodity pair")
        items.append(PackingItem(w, project_walk(walk)))
    return Packing(tuple(items)).normalized()


def symmetrize(dc: DoubleCover, q: Packing) -> Packing:
    """Average a cover packing with its mirror image."""
    half = Fraction(1, 2)
    items = []
    for w, walk in q.items:
        items.append(PackingItem(w * half, walk))
        items.append(PackingItem(w * half, dc.mirror_walk(walk)))
    return Packing(tuple(items)).normalized()
