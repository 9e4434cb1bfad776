"""Walk through the bundled fixtures: packing, barrier, certificate."""

from oddpack import fixtures
from oddpack.oddwalk import max_odd_walk_packing
from oddpack.oracle import certify

for name in fixtures.NAMES:
    n = fixtures.load(name)
    r = max_odd_walk_packing(n)
    print(f"{name}: terminals {list(n.terminals)}, {len(n.graph.edges)} edges")
    for w, walk in r.packing.items:
        print(f"  {w} x {' '.join(s.edge for s in walk.steps)}  ({walk.start} -> {walk.end})")
    print(f"  barrier vertices {sorted(r.barrier.vertices)}, edges {sorted(r.barrier.edges)}")
    cert = certify(n, r.packing, r.barrier)
    print(f"  value {r.value}, barrier capacity {cert.capacity}, certified {cert.ok}")
