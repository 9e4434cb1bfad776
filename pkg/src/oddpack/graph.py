"""Multigraphs, networks, walks and weighted walk packings.

Everything here works over :class:`fractions.Fraction`; no floating point is
used anywhere in the package.  Vertices and edge ids are arbitrary hashable
values (strings for user input, small named tuples for derived objects), and
all iteration orders are insertion orders so results are reproducible.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

Vertex = Hashable
EdgeId = Hashable


class MalformedWalkError(ValueError):
    """A walk whose consecutive steps do not fit together."""

    def __init__(self, index: int, message: str):
        super().__init__(f"step {index}: {message}")
        self.index = index


class Edge(NamedTuple):
    id: EdgeId
    u: Vertex
    v: Vertex

    def other(self, x: Vertex) -> Vertex:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise ValueError(f"{x!r} is not an endpoint of edge {self.id!r}")


class Multigraph:
    """Undirected loopless multigraph; parallel edges have distinct ids."""

    __slots__ = ("_vertices", "_edges", "_index", "_incident")

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Sequence]):
        verts = list(dict.fromkeys(vertices))
        vset = set(verts)
        index: dict[EdgeId, Edge] = {}
        for raw in edges:
            e = Edge(*raw)
            if e.id in index:
                raise ValueError(f"duplicate edge id {e.id!r}")
            if e.u == e.v:
                raise ValueError(f"edge {e.id!r} is a loop")
            for x in (e.u, e.v):
                if x not in vset:
                    raise ValueError(f"edge {e.id!r} uses unknown vertex {x!r}")
            index[e.id] = e
        incident: dict[Vertex, list[Edge]] = {v: [] for v in verts}
        for e in index.values():
            incident[e.u].append(e)
            incident[e.v].append(e)
        self._vertices = tuple(verts)
        self._edges = tuple(index.values())
        self._index = index
        self._incident = {v: tuple(es) for v, es in incident.items()}

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def edge(self, eid: EdgeId) -> Edge:
        try:
            return self._index[eid]
        except KeyError:
            raise KeyError(f"unknown edge {eid!r}") from None

    def has_edge(self, eid: EdgeId) -> bool:
        return eid in self._index

    def has_vertex(self, v: Vertex) -> bool:
        return v in self._incident

    def incident(self, v: Vertex) -> tuple[Edge, ...]:
        return self._incident[v]

    def degree(self, v: Vertex) -> int:
        return len(self._incident[v])

    def boundary(self, vertex_set: Iterable[Vertex]) -> list[Edge]:
        """Edges with exactly one endpoint in ``vertex_set`` (delta)."""
        s = set(vertex_set)
        return [e for e in self._edges if (e.u in s) != (e.v in s)]

    def inside(self, vertex_set: Iterable[Vertex]) -> list[Edge]:
        """Edges with both endpoints in ``vertex_set`` (gamma)."""
        s = set(vertex_set)
        return [e for e in self._edges if e.u in s and e.v in s]

    def subgraph_edges(self, eids: Iterable[EdgeId]) -> "Multigraph":
        """Spanning subgraph keeping only ``eids``."""
        keep = set(eids)
        return Multigraph(self._vertices, [e for e in self._edges if e.id in keep])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return (set(self._vertices) == set(other._vertices)
                and set(self._edges) == set(other._edges))

    def __hash__(self):
        return hash((frozenset(self._vertices), frozenset(self._edges)))

    def __repr__(self) -> str:
        return f"Multigraph({len(self._vertices)} vertices, {len(self._edges)} edges)"


def as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use 'p/q' strings")
    return Fraction(x)


@dataclass(frozen=True)
class Network:
    """A multigraph with terminals and non-negative rational capacities."""

    graph: Multigraph
    terminals: tuple
    cap: Mapping[EdgeId, Fraction]

    def __post_init__(self):
        terms = tuple(dict.fromkeys(self.terminals))
        for t in terms:
            if not self.graph.has_vertex(t):
                raise ValueError(f"terminal {t!r} is not a vertex")
        caps = {}
        for e in self.graph.edges:
            if e.id not in self.cap:
                raise ValueError(f"edge {e.id!r} has no capacity")
            c = as_fraction(self.cap[e.id])
            if c < 0:
                raise ValueError(f"edge {e.id!r} has negative capacity")
            caps[e.id] = c
        object.__setattr__(self, "terminals", terms)
        object.__setattr__(self, "cap", caps)

    @classmethod
    def build(cls, vertices, terminals, edges) -> "Network":
        """``edges`` holds ``(id, u, v, cap)`` tuples."""
        edges = list(edges)
        g = Multigraph(vertices, [(e[0], e[1], e[2]) for e in edges])
        return cls(g, tuple(terminals), {e[0]: as_fraction(e[3]) for e in edges})

    @property
    def terminal_set(self) -> frozenset:
        return frozenset(self.terminals)

    def is_terminal(self, v: Vertex) -> bool:
        return v in self.terminal_set

    def cap_of(self, edges: Iterable) -> Fraction:
        total = Fraction(0)
        for e in edges:
            total += self.cap[e.id if isinstance(e, Edge) else e]
        return total

    def cut_capacity(self, vertex_set: Iterable[Vertex]) -> Fraction:
        return self.cap_of(self.graph.boundary(vertex_set))

    def vertex_load(self, v: Vertex) -> Fraction:
        """cap(delta(v))."""
        return self.cap_of(self.graph.incident(v))

    def with_caps(self, cap: Mapping[EdgeId, Fraction]) -> "Network":
        return Network(self.graph, self.terminals, dict(cap))

    def scaled(self, factor) -> "Network":
        f = as_fraction(factor)
        return self.with_caps({k: c * f for k, c in self.cap.items()})


def is_inner_eulerian(n: Network) -> bool:
    """True iff every non-terminal has even degree (parallel edges counted)."""
    return not odd_inner_vertices(n)


def odd_inner_vertices(n: Network) -> list:
    terms = n.terminal_set
    return [v for v in n.graph.vertices
            if v not in terms and n.graph.degree(v) % 2]


# ---------------------------------------------------------------- walks

class Step(NamedTuple):
    edge: EdgeId
    tail: Vertex
    head: Vertex


@dataclass(frozen=True)
class Walk:
    """A sequence of edge traversals; each step records its direction."""

    steps: tuple[Step, ...]

    def __post_init__(self):
        steps = tuple(Step(*s) for s in self.steps)
        if not steps:
            raise MalformedWalkError(0, "a walk has at least one edge")
        for i in range(1, len(steps)):
            if steps[i].tail != steps[i - 1].head:
                raise MalformedWalkError(
                    i, f"starts at {steps[i].tail!r} but previous step ends at "
                       f"{steps[i - 1].head!r}")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def along(cls, graph: Multigraph, start: Vertex, eids: Iterable[EdgeId]) -> "Walk":
        """Build a walk from a start vertex and a list of edge ids."""
        steps = []
        cur = start
        for i, eid in enumerate(eids):
            e = graph.edge(eid)
            if cur not in (e.u, e.v):
                raise MalformedWalkError(i, f"edge {eid!r} is not incident to {cur!r}")
            nxt = e.other(cur)
            steps.append(Step(eid, cur, nxt))
            cur = nxt
        return cls(tuple(steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)

    @property
    def start(self) -> Vertex:
        return self.steps[0].tail

    @property
    def end(self) -> Vertex:
        return self.steps[-1].head

    @property
    def vertices(self) -> list:
        return [self.steps[0].tail] + [s.head for s in self.steps]

    @property
    def edge_ids(self) -> list:
        return [s.edge for s in self.steps]

    def reversed(self) -> "Walk":
        return Walk(tuple(Step(s.edge, s.head, s.tail) for s in reversed(self.steps)))

    def edge_counts(self) -> Counter:
        return Counter(s.edge for s in self.steps)

    def check_in(self, graph: Multigraph) -> None:
        for i, s in enumerate(self.steps):
            if not graph.has_edge(s.edge):
                raise MalformedWalkError(i, f"unknown edge {s.edge!r}")
            e = graph.edge(s.edge)
            if {s.tail, s.head} != {e.u, e.v}:
                raise MalformedWalkError(
                    i, f"edge {s.edge!r} does not join {s.tail!r} and {s.head!r}")

    def canonical(self) -> "Walk":
        """The walk or its reverse, whichever has the smaller string key."""
        rev = self.reversed()
        return self if _walk_key(self) <= _walk_key(rev) else rev


def _walk_key(w: Walk) -> tuple:
    return tuple((str(s.edge), str(s.tail), str(s.head)) for s in w.steps)


def walk_parity(w: Walk) -> str:
    return "odd" if len(w) % 2 else "even"


@dataclass(frozen=True)
class WalkKind:
    kind: str            # "walk", "trail" or "path"
    t_walk: bool
    cyclic: bool


def classify_walk(w: Walk, terminals: Iterable[Vertex], graph: Multigraph | None = None) -> WalkKind:
    if graph is not None:
        w.check_in(graph)
    terms = set(terminals)
    verts = w.vertices
    if len(set(verts)) == len(verts):
        kind = "path"
    elif len(set(w.edge_ids)) == len(w):
        kind = "trail"
    else:
        kind = "walk"
    cyclic = w.start == w.end
    return WalkKind(kind, (not cyclic) and w.start in terms and w.end in terms, cyclic)


def is_trail(w: Walk) -> bool:
    return len(set(w.edge_ids)) == len(w)


# ---------------------------------------------------------------- packings

class PackingItem(NamedTuple):
    weight: Fraction
    walk: Walk


@dataclass(frozen=True)
class Packing:
    items: tuple[PackingItem, ...] = ()

    def __post_init__(self):
        items = []
        for w, walk in self.items:
            w = as_fraction(w)
            if w <= 0:
                raise ValueError("packing weights must be positive")
            items.append(PackingItem(w, walk))
        object.__setattr__(self, "items", tuple(items))

    @classmethod
    def of(cls, pairs: Iterable) -> "Packing":
        return cls(tuple(PackingItem(as_fraction(w), walk) for w, walk in pairs if w))

    @property
    def value(self) -> Fraction:
        return sum((it.weight for it in self.items), Fraction(0))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __add__(self, other: "Packing") -> "Packing":
        return Packing(self.items + other.items)

    def scale(self, factor) -> "Packing":
        f = as_fraction(factor)
        if f == 0:
            return Packing()
        return Packing(tuple(PackingItem(w * f, walk) for w, walk in self.items))

    def loads(self) -> dict:
        load: dict = {}
        for w, walk in self.items:
            for eid, k in walk.edge_counts().items():
                load[eid] = load.get(eid, Fraction(0)) + w * k
        return load

    def normalized(self) -> "Packing":
        """Merge walks equal up to reversal; order by first appearance."""
        merged: dict[tuple, list] = {}
        for w, walk in self.items:
            c = walk.canonical()
            key = _walk_key(c)
            if key in merged:
                merged[key][0] += w
            else:
                merged[key] = [w, c]
        return Packing(tuple(PackingItem(w, c) for w, c in merged.values()))

    def is_integer(self) -> bool:
        return all(w.denominator == 1 for w, _ in self.items)

    def is_half_integer(self) -> bool:
        return all((2 * w).denominator == 1 for w, _ in self.items)


@dataclass(frozen=True)
class Violation:
    edge: EdgeId
    load: Fraction
    cap: Fraction


@dataclass(frozen=True)
class PackingReport:
    ok: bool
    value: Fraction
    violations: tuple[Violation, ...] = ()
    loads: dict = field(default_factory=dict)


def validate_packing(n: Network, p: Packing) -> PackingReport:
    """Check every walk lives in ``n`` and every load is within capacity."""
    for _, walk in p.items:
        walk.check_in(n.graph)
    loads = p.loads()
    violations = tuple(Violation(eid, load, n.cap[eid])
                       for eid, load in loads.items() if load > n.cap[eid])
    return PackingReport(not violations, p.value, violations, loads)
