"""Batch execution: cluster, detect, then enumerate shared nodes in topological
order with cached reuse and consumer-count eviction."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .cluster import cluster_queries, hop_neighbors
from .graph import DirectedGraph
from .index import BACKWARD, FORWARD, INF, BatchIndex, Query, build_batch_index
from .paths import (PathStore, enumerate_single, half_budgets, join_halves,
                    reoriented)
from .sharing import (DetectStats, HcsNode, InvariantError, SharingGraph,
                      build_sharing_graph)


class MemoryGuardExceeded(InvariantError):
    """Cached path volume crossed the configured cap; group degrades to the
    per-query baseline."""


@dataclass
class EngineStats:
    """Instrumentation counters and per-phase wall-clock times."""

    expansions: int = 0
    concat_ops: int = 0
    detect_touches: int = 0
    detected_nodes: int = 0
    group_count: int = 0
    fallbacks: int = 0
    cache_peak_entries: int = 0
    cache_peak_paths: int = 0
    cache_peak_vertices: int = 0
    cache_end_entries: int = 0
    build_index_s: float = 0.0
    cluster_s: float = 0.0
    detect_s: float = 0.0
    enumerate_s: float = 0.0
    total_s: float = 0.0

    def merge(self, other: "EngineStats") -> None:
        self.expansions += other.expansions
        self.concat_ops += other.concat_ops
        self.detect_touches += other.detect_touches
        self.detected_nodes += other.detected_nodes
        self.fallbacks += other.fallbacks
        self.cache_peak_entries = max(self.cache_peak_entries, other.cache_peak_entries)
        self.cache_peak_paths = max(self.cache_peak_paths, other.cache_peak_paths)
        self.cache_peak_vertices = max(self.cache_peak_vertices, other.cache_peak_vertices)
        self.cache_end_entries += other.cache_end_entries
        self.detect_s += other.detect_s
        self.enumerate_s += other.enumerate_s


@dataclass
class BatchResult:
    """Per-query outputs, aligned with the input query list."""

    results: list
    stats: EngineStats
    count_only: bool = False


class ResultCache:
    """Stores of finished sub-query nodes, dropped once every consumer ran."""

    def __init__(self, stats: EngineStats, cap_vertices: int | None = None):
        self.entries: dict[int, PathStore] = {}
        self.pending: dict[int, int] = {}
        self.stats = stats
        self.cap_vertices = cap_vertices
        self.total_vertices = 0
        self.total_paths = 0

    def put(self, node: HcsNode, store: PathStore, consumers: int) -> None:
        self.entries[node.uid] = store
        self.pending[node.uid] = consumers
        self.total_vertices += store.total_vertices
        self.total_paths += store.count
        st = self.stats
        st.cache_peak_entries = max(st.cache_peak_entries, len(self.entries))
        st.cache_peak_paths = max(st.cache_peak_paths, self.total_paths)
        st.cache_peak_vertices = max(st.cache_peak_vertices, self.total_vertices)
        if self.cap_vertices is not None and self.total_vertices > self.cap_vertices:
            raise MemoryGuardExceeded(f"cached vertices exceed cap {self.cap_vertices}")

    def get(self, node: HcsNode) -> PathStore:
        try:
            return self.entries[node.uid]
        except KeyError:
            raise InvariantError(f"missing cache entry for node {node.uid}") from None

    def release(self, node: HcsNode) -> None:
        self.pending[node.uid] -= 1
        if self.pending[node.uid] == 0:
            store = self.entries.pop(node.uid)
            self.total_vertices -= store.total_vertices
            self.total_paths -= store.count


def _node_prune_targets(node: HcsNode, consumers: set[int], queries: Sequence[Query],
                        index: BatchIndex):
    """Distance-based admission bounds, one per consumer s-t query: the offset is
    the hops the consumer has already spent reaching this node's anchor."""
    chosen: dict[tuple[int, int], int] = {}
    for pos in consumers:
        q = queries[pos]
        fb, bb = half_budgets(q.k)
        if node.side == FORWARD:
            far, off = q.t, fb - node.budget
        else:
            far, off = q.s, bb - node.budget
        key = (far, q.k)
        if key not in chosen or off < chosen[key]:
            chosen[key] = off
    opposite = index.backward if node.side == FORWARD else index.forward
    return [(opposite[far].entries, k, off) for (far, k), off in sorted(chosen.items())]


def search_with_reuse(g: DirectedGraph, node: HcsNode, suppliers: dict[int, PathStore],
                      prune_targets, stats: EngineStats) -> PathStore:
    """Like the half search, but a step onto a supplier's anchor is never
    recursed: the supplier's cached paths, truncated to the remaining budget,
    are concatenated in instead (non-simple concatenations dropped)."""
    own = suppliers.get(node.anchor)
    if own is not None:
        return own.truncated(node.budget)
    adj = g.out_adj if node.side == FORWARD else g.in_adj
    budget = node.budget
    store = PathStore(node.side, budget, node.anchor)
    on_path = bytearray(g.vertex_count)
    on_path[node.anchor] = 1
    path = [node.anchor]

    def descend():
        prefix = tuple(path)
        store.add(prefix)
        depth = len(path) - 1
        if depth == budget:
            return
        nd = depth + 1
        for w in adj[path[-1]]:
            if on_path[w]:
                continue
            if prune_targets and not any(
                    off + nd + dmap.get(w, INF) <= k for dmap, k, off in prune_targets):
                continue
            cached = suppliers.get(w)
            if cached is not None:
                remaining = budget - nd
                for hops in range(remaining + 1):
                    for suffix in cached.by_len.get(hops, ()):
                        stats.concat_ops += 1
                        if any(on_path[x] for x in suffix):
                            continue
                        store.add(prefix + suffix)
                continue
            stats.expansions += 1
            on_path[w] = 1
            path.append(w)
            descend()
            path.pop()
            on_path[w] = 0

    descend()
    return store


def _process_group(g: DirectedGraph, index: BatchIndex, queries: Sequence[Query],
                   members: Sequence[int], count_only: bool,
                   memory_cap: int | None, dot_sink=None):
    """Returns ({position: result}, EngineStats) for one group, degrading to
    the per-query baseline if any sharing invariant breaks."""
    stats = EngineStats()
    group_queries = [queries[i] for i in members]
    if len(members) == 1:
        # No sharing possible; skip the detection and cache machinery.
        t0 = time.perf_counter()
        out = {members[0]: enumerate_single(g, index, group_queries[0], stats,
                                            count_only=count_only)}
        stats.enumerate_s = time.perf_counter() - t0
        return out, stats
    try:
        t0 = time.perf_counter()
        dstats = DetectStats()
        graph = build_sharing_graph(g, group_queries, dstats)
        stats.detect_touches = dstats.touches
        stats.detected_nodes = dstats.detected
        order = graph.topological_order()
        consumers = graph.consumer_closure(order)
        stats.detect_s = time.perf_counter() - t0
        if dot_sink is not None:
            dot_sink(graph)

        t0 = time.perf_counter()
        cache = ResultCache(stats, memory_cap)
        hcs_order = [n for n in order if isinstance(n, HcsNode) and n.side == FORWARD]
        hcs_order += [n for n in order if isinstance(n, HcsNode) and n.side == BACKWARD]
        for node in hcs_order:
            sups = graph.suppliers(node)
            sup_stores = {s.anchor: cache.get(s) for s in sups}
            if len(sup_stores) != len(sups):
                raise InvariantError("two suppliers anchored at one vertex")
            targets = _node_prune_targets(node, consumers[node.uid], group_queries, index)
            store = search_with_reuse(g, node, sup_stores, targets, stats)
            cache.put(node, store, len(graph.out_edges[node.uid]))
            for s in sups:
                cache.release(s)
        out = {}
        join_memo: dict = {}  # duplicate queries share one join evaluation
        for hq in graph.hcst:
            q = hq.query
            fb, bb = half_budgets(q.k)
            fwd = graph.initial[(FORWARD, q.s, fb)]
            bwd = graph.initial[(BACKWARD, q.t, bb)]
            memo_key = (fwd.uid, bwd.uid, q.k)
            joined = join_memo.get(memo_key)
            if joined is None:
                joined = join_halves(cache.get(fwd), reoriented(cache.get(bwd)), q.k,
                                     count_only=count_only)
                join_memo[memo_key] = joined
            out[members[hq.pos]] = joined if count_only else list(joined)
            for s in graph.suppliers(hq):
                cache.release(s)
        stats.cache_end_entries = len(cache.entries)
        if cache.entries:
            raise InvariantError("cache not empty after group")
        stats.enumerate_s = time.perf_counter() - t0
        return out, stats
    except InvariantError:
        stats.fallbacks += 1
        t0 = time.perf_counter()
        out = {}
        for pos in members:
            out[pos] = enumerate_single(g, index, queries[pos], stats, count_only=count_only)
        stats.enumerate_s += time.perf_counter() - t0
        return out, stats


def batch_enumerate(g: DirectedGraph, queries: Sequence[Query], gamma: float = 0.5,
                    *, count_only: bool = False, threads: int = 1,
                    memory_cap_vertices: int | None = None,
                    dot_sink: Callable[[SharingGraph], None] | None = None,
                    index: BatchIndex | None = None) -> BatchResult:
    """Answer a whole query batch, sharing dominated sub-queries within groups."""
    stats = EngineStats()
    t_start = time.perf_counter()
    if not queries:
        stats.total_s = time.perf_counter() - t_start
        return BatchResult([], stats, count_only)

    t0 = time.perf_counter()
    if index is None:
        index = build_batch_index(g, queries)
    stats.build_index_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    profile_cache: dict = {}
    profiles = [hop_neighbors(index, q, profile_cache) for q in queries]
    groups = cluster_queries(profiles, gamma)
    stats.cluster_s = time.perf_counter() - t0
    stats.group_count = len(groups)

    def run(members):
        return _process_group(g, index, queries, members, count_only,
                              memory_cap_vertices, dot_sink)

    if threads > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, groups))
    else:
        outcomes = [run(members) for members in groups]

    results: list = [None] * len(queries)
    for out, gstats in outcomes:
        stats.merge(gstats)
        for pos, val in out.items():
            results[pos] = val
    stats.total_s = time.perf_counter() - t_start
    return BatchResult(results, stats, count_only)


def basic_enumerate(g: DirectedGraph, queries: Sequence[Query], *,
                    count_only: bool = False,
                    index: BatchIndex | None = None) -> BatchResult:
    """Baseline: one shared index build, then every query answered separately."""
    stats = EngineStats()
    t_start = time.perf_counter()
    if not queries:
        stats.total_s = time.perf_counter() - t_start
        return BatchResult([], stats, count_only)
    t0 = time.perf_counter()
    if index is None:
        index = build_batch_index(g, queries)
    stats.build_index_s = time.perf_counter() - t0
    stats.group_count = len(queries)
    t0 = time.perf_counter()
    results = [enumerate_single(g, index, q, stats, count_only=count_only) for q in queries]
    stats.enumerate_s = time.perf_counter() - t0
    stats.total_s = time.perf_counter() - t_start
    return BatchResult(results, stats, count_only)
