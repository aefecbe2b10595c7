"""Batch enumeration of hop-constrained s-t simple paths.

Answers a set of path queries on a directed graph together, detecting
single-source sub-queries whose results several queries can reuse, next to a
bidirectional single-query baseline and a brute-force oracle.
"""

from .cluster import (NeighborProfile, cluster_queries, group_similarity,
                      hop_neighbors, pairwise_similarity, query_similarity)
from .engine import (BatchResult, EngineStats, MemoryGuardExceeded, ResultCache,
                     basic_enumerate, batch_enumerate, search_with_reuse)
from .graph import DirectedGraph, GraphParseError, induce_sample, load_edge_list
from .index import (BACKWARD, FORWARD, INF, BatchIndex, DistanceMap, Query,
                    build_batch_index, dump_index, load_index)
from .oracle import (GenerationError, GenSpec, brute_force_paths,
                     generate_queries, random_graph, truncated_bfs)
from .paths import (PathStore, concat_paths, enumerate_single, half_budgets,
                    join_halves, reoriented, search_half)
from .sharing import (DETECTED, INITIAL, DetectStats, HcsNode, HcstNode,
                      InvariantError, SharingGraph, build_sharing_graph,
                      detect_common_queries, dominates)

__version__ = "0.1.0"

__all__ = [
    "BACKWARD", "BatchIndex", "BatchResult", "DETECTED", "DetectStats",
    "DirectedGraph", "DistanceMap", "EngineStats", "FORWARD", "GenSpec",
    "GenerationError", "GraphParseError", "HcsNode", "HcstNode", "INF",
    "INITIAL", "InvariantError", "MemoryGuardExceeded", "NeighborProfile",
    "PathStore", "Query", "ResultCache", "SharingGraph", "basic_enumerate",
    "batch_enumerate", "brute_force_paths", "build_batch_index",
    "build_sharing_graph", "cluster_queries", "concat_paths",
    "detect_common_queries", "dominates", "dump_index", "enumerate_single",
    "generate_queries", "group_similarity", "half_budgets", "hop_neighbors",
    "induce_sample", "join_halves", "load_edge_list", "load_index",
    "pairwise_similarity", "query_similarity", "random_graph", "reoriented",
    "search_half", "search_with_reuse", "truncated_bfs",
]
