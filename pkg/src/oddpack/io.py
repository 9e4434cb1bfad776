"""JSON reading and writing for instances, packings and certificates.

Rationals are always written as strings (``"3/2"``).  Vertices of the double
cover are written as ``[name, side]`` with side 1 for primed copies, and
cover edges as ``[edge, k]``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cover import CoverEdge, Prime, is_primed, unprime
from .graph import Network, Packing, PackingItem, Step, Walk
from .multiflow import ProperPartition
from .oddwalk import Barrier, barrier_capacity


class InputError(ValueError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def loads(text: str, what: str = "input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as ex:
        raise InputError(f"{what}: {ex.msg} at line {ex.lineno} column {ex.colno}") from None


def read_json(path: str, what: str | None = None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as ex:
        raise InputError(f"cannot read {path}: {ex.strerror}") from None
    return loads(text, what or path)


def parse_rational(x, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"{where}: use an integer or a 'p/q' string, not {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise InputError(f"{where}: {x!r} is not a rational number")


def _need(obj: dict, key: str, kind, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing key {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        raise InputError(f"{where}: {key!r} has the wrong type")
    return val


# ---------------------------------------------------------------- instances

def parse_instance(obj) -> Network:
    if isinstance(obj, str):
        obj = loads(obj, "instance")
    verts = _need(obj, "vertices", list, "instance")
    terms = _need(obj, "terminals", list, "instance")
    edges = _need(obj, "edges", list, "instance")
    for v in verts + terms:
        if not isinstance(v, str):
            raise InputError(f"instance: vertex names must be strings, got {v!r}")
    if len(set(verts)) != len(verts):
        raise InputError("instance: duplicate vertex names")
    vset = set(verts)
    for t in terms:
        if t not in vset:
            raise InputError(f"instance: terminal {t!r} is not a vertex")
    raw = []
    for i, e in enumerate(edges):
        where = f"instance edge {i}"
        eid = _need(e, "id", str, where)
        u = _need(e, "u", str, where)
        v = _need(e, "v", str, where)
        if "cap" not in e:
            raise InputError(f"{where}: missing key 'cap'")
        cap = parse_rational(e["cap"], where)
        if cap < 0:
            raise InputError(f"{where}: negative capacity")
        if u not in vset or v not in vset:
            raise InputError(f"{where}: unknown endpoint")
        if u == v:
            raise InputError(f"{where}: loops are not allowed")
        raw.append((eid, u, v, cap))
    if len({r[0] for r in raw}) != len(raw):
        raise InputError("instance: duplicate edge ids")
    return Network.build(verts, terms, raw)


def instance_to_json(n: Network) -> dict:
    return {
        "vertices": list(n.graph.vertices),
        "terminals": list(n.terminals),
        "edges": [{"id": e.id, "u": e.u, "v": e.v, "cap": str(n.cap[e.id])}
                  for e in n.graph.edges],
    }


# ---------------------------------------------------------------- packings

def _plain(x):
    return x if isinstance(x, str) else str(x)


def packing_to_json(p: Packing) -> dict:
    return {
        "value": str(p.value),
        "items": [{"weight": str(w),
                   "edges": [[_plain(s.edge), _plain(s.tail), _plain(s.head)] for s in walk.steps]}
                  for w, walk in p.items],
    }


def parse_packing(obj, n: Network | None = None) -> Packing:
    if isinstance(obj, str):
        obj = loads(obj, "packing")
    items = _need(obj, "items", list, "packing")
    out = []
    for i, it in enumerate(items):
        where = f"packing item {i}"
        w = parse_rational(_need(it, "weight", (str, int), where), where)
        if w <= 0:
            raise InputError(f"{where}: weight must be positive")
        steps = _need(it, "edges", list, where)
        try:
            walk = Walk(tuple(Step(*s) for s in steps))
            if n is not None:
                walk.check_in(n.graph)
        except (TypeError, ValueError, KeyError) as ex:
            raise InputError(f"{where}: {ex}") from None
        out.append(PackingItem(w, walk))
    return Packing(tuple(out))


# ---------------------------------------------------------------- barriers

def barrier_to_json(n: Network, b: Barrier) -> dict:
    return {
        "vertices": [v for v in n.graph.vertices if v in b.vertices],
        "edges": [e.id for e in n.graph.edges if e.id in b.edges],
        "I": b.inner_edges(n),
        "U": b.unused_edges(n),
        "capacity": str(barrier_capacity(n, b)),
    }


def parse_barrier(obj) -> Barrier:
    if isinstance(obj, str):
        obj = loads(obj, "barrier")
    if isinstance(obj, dict) and "barrier" in obj:
        obj = obj["barrier"]
    verts = _need(obj, "vertices", list, "barrier")
    edges = _need(obj, "edges", list, "barrier")
    return Barrier.of(verts, edges)


# ---------------------------------------------------------------- cover objects

def cover_vertex_to_json(x) -> list:
    return [unprime(x), 1 if is_primed(x) else 0]


def cover_vertex_from_json(x):
    if not (isinstance(x, list) and len(x) == 2 and x[1] in (0, 1)):
        raise InputError(f"bad cover vertex {x!r}")
    return Prime(x[0]) if x[1] else x[0]


def _cover_key(x):
    return (str(unprime(x)), 1 if is_primed(x) else 0)


def partition_to_json(x: ProperPartition) -> dict:
    def vs(s):
        return [cover_vertex_to_json(v) for v in sorted(s, key=_cover_key)]
    return {
        "S": list(x.nonsingular),
        "parts": [vs(p) for p in x.parts],
        "cuts": [vs(c) for c in x.cuts],
        "lambdas": [str(v) for v in x.lambdas],
        "capacity": str(x.capacity),
    }


def parse_partition(obj) -> ProperPartition:
    if isinstance(obj, str):
        obj = loads(obj, "partition")
    parts = [frozenset(cover_vertex_from_json(v) for v in p)
             for p in _need(obj, "parts", list, "partition")]
    cuts = [frozenset(cover_vertex_from_json(v) for v in c)
            for c in _need(obj, "cuts", list, "partition")]
    lams = [parse_rational(v, "partition") for v in _need(obj, "lambdas", list, "partition")]
    cap = parse_rational(_need(obj, "capacity", (str, int), "partition"), "partition")
    return ProperPartition(tuple(parts), tuple(cuts), tuple(lams), cap,
                           tuple(obj.get("S", [])))


def cover_packing_to_json(p: Packing) -> dict:
    def edge(e):
        return [e.base, e.k] if isinstance(e, CoverEdge) else e
    return {
        "value": str(p.value),
        "items": [{"weight": str(w),
                   "edges": [[edge(s.edge), cover_vertex_to_json(s.tail), cover_vertex_to_json(s.head)]
                             for s in walk.steps]}
                  for w, walk in p.items],
    }
