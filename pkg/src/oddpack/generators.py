"""Seeded random instances.

Graphs are connected multigraphs: a random spanning tree plus extra random
edges (parallel edges allowed).  The inner Eulerian option adds a matching on
the odd-degree non-terminals, using a terminal to absorb a leftover vertex.
"""

from __future__ import annotations

import random

from .graph import Network


def random_instance(seed: int, max_vertices: int = 7, max_edges: int = 10,
                    terminals: tuple[int, int] = (2, 4), caps=(2, 4),
                    eulerian: bool = False, attempts: int = 200) -> Network:
    """A deterministic random network for ``seed``.

    ``caps`` is the tuple of allowed capacity values.  Vertices are named
    ``v0, v1, ...`` and terminals are the first few of them in shuffled order.
    """
    rng = random.Random(seed)
    for _ in range(attempts):
        n = _attempt(rng, max_vertices, max_edges, terminals, caps, eulerian)
        if n is not None:
            return n
    raise RuntimeError(f"no instance within bounds for seed {seed}")


def _attempt(rng, max_vertices, max_edges, terminals, caps, eulerian):
    lo, hi = terminals
    nv = rng.randint(min(max(lo, 3), max_vertices), max_vertices)
    verts = [f"v{i}" for i in range(nv)]
    nt = rng.randint(lo, min(hi, nv))
    order = verts[:]
    rng.shuffle(order)
    terms = sorted(order[:nt], key=lambda x: int(x[1:]))
    pairs = []
    for i in range(1, nv):
        pairs.append((verts[rng.randrange(i)], verts[i]))
    budget = max_edges - len(pairs)
    if budget < 0:
        return None
    extra = rng.randint(0, min(budget, nv))
    for _ in range(extra):
        a, b = rng.sample(verts, 2)
        pairs.append((a, b))
    if eulerian:
        deg = {v: 0 for v in verts}
        for a, b in pairs:
            deg[a] += 1
            deg[b] += 1
        odd = [v for v in verts if v not in terms and deg[v] % 2]
        rng.shuffle(odd)
        while len(odd) >= 2:
            pairs.append((odd.pop(), odd.pop()))
        if odd:
            pairs.append((odd.pop(), rng.choice(terms)))
        if len(pairs) > max_edges:
            return None
    edges = [(f"e{i + 1}", a, b, rng.choice(caps)) for i, (a, b) in enumerate(pairs)]
    return Network.build(verts, terms, edges)


def walk_suite(count: int = 200, base_seed: int = 0) -> list[Network]:
    """Instances with even capacities in {2, 4}."""
    return [random_instance(base_seed + i) for i in range(count)]


def trail_suite(count: int = 200, base_seed: int = 10_000) -> list[Network]:
    """Inner Eulerian instances with capacity 2 on every edge."""
    return [random_instance(base_seed + i, caps=(2,), eulerian=True) for i in range(count)]
