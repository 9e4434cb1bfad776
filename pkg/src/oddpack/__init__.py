"""Maximum packings of odd T-walks and odd T-trails with exact certificates."""

from .graph import (MalformedWalkError, Multigraph, Network, Packing, PackingItem, Step, Walk,
                    classify_walk, is_inner_eulerian, validate_packing)
from .flow import max_flow_min_cut, eulerian_decompose
from .cover import build_commodity_graph, build_double_cover
from .multiflow import (ProperPartition, lc_trail_packing, max_multiflow_fractional,
                        max_multiflow_integer, min_proper_partition)
from .oddwalk import (Barrier, barrier_capacity, barrier_check, barrier_to_partition,
                      max_odd_walk_packing, partition_to_barrier)
from .pipeline import PipelineInputError, PipelineTrace, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "Barrier", "MalformedWalkError", "Multigraph", "Network", "Packing", "PackingItem",
    "PipelineInputError", "PipelineTrace", "ProperPartition", "Step", "Walk",
    "barrier_capacity", "barrier_check", "barrier_to_partition", "build_commodity_graph",
    "build_double_cover", "classify_walk", "eulerian_decompose", "is_inner_eulerian",
    "lc_trail_packing", "max_flow_min_cut", "max_multiflow_fractional", "max_multiflow_integer",
    "max_odd_walk_packing", "min_proper_partition", "partition_to_barrier", "run_pipeline",
    "validate_packing",
]
