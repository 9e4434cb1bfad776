"""Compare the fast solver with brute force on a handful of random instances."""

import sys

from oddpack.generators import walk_suite
from oddpack.oddwalk import max_odd_walk_packing
from oddpack.oracle import min_barrier_exhaustive

count = int(sys.argv[1]) if len(sys.argv) > 1 else 20
agree = 0
for i, n in enumerate(walk_suite(count)):
    value = max_odd_walk_packing(n).value
    _, _, cap = min_barrier_exhaustive(n)
    agree += value == cap
    print(f"#{i:3d}  |V|={len(n.graph.vertices)} |E|={len(n.graph.edges)} "
          f"|T|={len(n.terminals)}  packing {value}  brute-force barrier {cap}")
print(f"{agree}/{count} agree")
