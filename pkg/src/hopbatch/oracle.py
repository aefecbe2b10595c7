"""Independent brute-force enumerator and random instance/query generation.

The brute-force path enumerator deliberately shares no traversal code with the
engine: plain DFS over the raw adjacency, no distance index, no bidirectional
split.  It is the ground truth the engine is tested against.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .graph import DirectedGraph
from .index import Query
from .paths import Path


class GenerationError(RuntimeError):
    """Raised when no reachable (s, t) pair can be drawn."""


def brute_force_paths(g: DirectedGraph, s: int, t: int, k: int) -> list[Path]:
    """All simple s-to-t paths with at most k hops, in lexicographic order."""
    if s >= g.vertex_count or t >= g.vertex_count:
        raise IndexError("endpoint out of range")
    out: list[Path] = []
    adj = g.out_adj
    path = [s]
    visited = {s}

    def walk():
        v = path[-1]
        if v == t and len(path) > 1:
            out.append(tuple(path))
            return  # a simple path can never come back to t
        if len(path) - 1 == k:
            return
        for w in adj[v]:
            if w in visited:
                continue
            visited.add(w)
            path.append(w)
            walk()
            path.pop()
            visited.remove(w)

    walk()
    return out


def truncated_bfs(adj, start: int, cap: int) -> dict[int, int]:
    """Plain single-source BFS distances up to cap hops (test oracle)."""
    dist = {start: 0}
    frontier = [start]
    for d in range(1, cap + 1):
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in dist:
                    dist[w] = d
                    nxt.append(w)
        frontier = nxt
    return dist


@dataclass
class GenSpec:
    """Reproducible query-set recipe; dup_fraction forces high similarity by
    repeating one base query (stand-in for a controlled-similarity sweep)."""

    count: int
    k_min: int = 4
    k_max: int = 7
    seed: int = 0
    dup_fraction: float = 0.0

    def __post_init__(self):
        if not 1 <= self.k_min <= self.k_max <= 15:
            raise ValueError(f"k range [{self.k_min}, {self.k_max}] outside [1, 15]")
        if not 0.0 <= self.dup_fraction <= 1.0:
            raise ValueError(f"dup_fraction {self.dup_fraction} outside [0, 1]")


def generate_queries(g: DirectedGraph, spec: GenSpec) -> list[Query]:
    """Draw (s, t, k) uniformly such that t is reachable from s within k hops."""
    if spec.count == 0:
        return []
    if g.vertex_count == 0:
        raise GenerationError("empty graph")
    rng = random.Random(spec.seed)
    max_attempts = 200 * spec.count + 200

    def draw() -> tuple[int, int, int]:
        for _ in range(max_attempts):
            s = rng.randrange(g.vertex_count)
            k = rng.randint(spec.k_min, spec.k_max)
            reach = truncated_bfs(g.out_adj, s, k)
            targets = sorted(v for v in reach if v != s)
            if targets:
                return s, rng.choice(targets), k
        raise GenerationError("could not find a reachable (s, t) pair")

    queries: list[Query] = []
    n_dup = math.ceil(spec.dup_fraction * spec.count)
    if n_dup:
        bs, bt, bk = draw()
        queries = [Query(i, bs, bt, bk) for i in range(n_dup)]
    while len(queries) < spec.count:
        s, t, k = draw()
        queries.append(Query(len(queries), s, t, k))
    return queries


def random_graph(n: int, avg_out_degree: float, seed: int, model: str = "er") -> DirectedGraph:
    """Seeded random digraph as a desk-scale stand-in for real graphs.

    Models: "er" uniform edges; "pa" skewed degrees via preferential
    attachment; "local" preferential attachment restricted to a sliding
    window, giving skewed degrees plus locality (hop-balls that stay small
    relative to the whole graph, like large real-world networks).
    """
    rng = random.Random(seed)
    m_target = int(round(n * avg_out_degree))
    edges: set[tuple[int, int]] = set()
    if model == "er":
        attempts = 0
        while len(edges) < m_target and attempts < 20 * m_target + 100:
            u = rng.randrange(n)
            v = rng.randrange(n)
            attempts += 1
            if u != v:
                edges.add((u, v))
    elif model == "pa":
        # Degree-biased endpoint pool with capped multiplicity: skewed degrees
        # without the runaway hubs that make desk-scale path counts explode.
        cap_mult = 64
        pool = list(range(min(n, 8)))
        mult = {v: 1 for v in pool}
        per_node = max(1, int(round(avg_out_degree)))
        for v in range(1, n):
            for _ in range(per_node):
                u = pool[rng.randrange(len(pool))]
                if u == v:
                    continue
                if rng.random() < 0.5:
                    edges.add((v, u))
                else:
                    edges.add((u, v))
                if mult.get(u, 0) < cap_mult:
                    pool.append(u)
                    mult[u] = mult.get(u, 0) + 1
            if mult.get(v, 0) < cap_mult:
                pool.append(v)
                mult[v] = mult.get(v, 0) + 1
        extra = 0
        while len(edges) < m_target and extra < 20 * m_target:
            u = rng.randrange(n)
            v = pool[rng.randrange(len(pool))]
            extra += 1
            if u != v:
                edges.add((u, v))
    elif model == "local":
        # Degree-biased attachment hard-banded to a sliding id window: skewed
        # local degrees, and k-hop balls that stay small against the graph.
        per_node = max(1, int(round(avg_out_degree)))
        window = max(16, n // 3000)
        ring = [0] * (window * (per_node + 1))
        ring_len = 0
        ring_pos = 0

        def push(x):
            nonlocal ring_len, ring_pos
            if ring_len < len(ring):
                ring[ring_len] = x
                ring_len += 1
            else:
                ring[ring_pos] = x
                ring_pos = (ring_pos + 1) % len(ring)

        push(0)
        for v in range(1, n):
            lo = max(0, v - window)
            for _ in range(per_node):
                u = ring[rng.randrange(ring_len)]
                if u < lo or u >= v:
                    u = rng.randrange(lo, v)
                if rng.random() < 0.5:
                    edges.add((v, u))
                else:
                    edges.add((u, v))
                push(u)
            push(v)
        attempts = 0
        while len(edges) < m_target and attempts < 20 * m_target:
            v = rng.randrange(1, n)
            u = max(0, v - rng.randrange(1, window + 1))
            attempts += 1
            if u != v:
                edges.add((v, u) if rng.random() < 0.5 else (u, v))
    else:
        raise ValueError(f"unknown model {model!r}")
    return DirectedGraph(n, edges)
