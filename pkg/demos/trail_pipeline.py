"""Run the trail pipeline on one instance and summarise its trace."""

import sys
from collections import Counter

from oddpack.generators import random_instance
from oddpack.pipeline import PipelineTrace, run_pipeline

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 20477
n = random_instance(seed, max_vertices=6, caps=(2,), eulerian=True)
trace = PipelineTrace()
r = run_pipeline(n, trace)

print(f"seed {seed}: {len(n.graph.vertices)} vertices, terminals {list(n.terminals)}")
print("steps:", dict(Counter(rec.kind for rec in trace.records)))
for rec in trace.of_kind("regularization"):
    print(f"  case {rec.case}: measure {rec.measure_before} -> {rec.measure_after}")
print(f"{r.value} odd trails, each edge used at most twice:")
for k, w in r.packing.items:
    print(f"  {k} x", " ".join(s.edge for s in w.steps))
