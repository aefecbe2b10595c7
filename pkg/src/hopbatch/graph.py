"""Immutable directed-graph storage with forward and reverse adjacency views."""
from __future__ import annotations

import math
import random
from typing import Iterable, Iterator, Sequence


class GraphParseError(ValueError):
    """Raised when an edge-list stream cannot be parsed."""


class DirectedGraph:
    """Dense-id directed graph exposing both out- and in-neighbor lists.

    Neighbor lists are sorted and duplicate-free: parallel edges collapse
    (a path is a vertex sequence, so multi-edges add nothing) and traversal
    order is deterministic.  Instances are immutable after construction and
    safe for unsynchronized shared reads.
    """

    __slots__ = ("vertex_count", "out_adj", "in_adj", "labels", "_label_to_id", "edge_count")

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int]],
                 labels: Sequence[int] | None = None):
        out: list[set[int]] = [set() for _ in range(vertex_count)]
        rev: list[set[int]] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValueError(f"edge ({u}, {v}) out of range for n={vertex_count}")
            out[u].add(v)
            rev[v].add(u)
        self.vertex_count = vertex_count
        self.out_adj: list[tuple[int, ...]] = [tuple(sorted(s)) for s in out]
        self.in_adj: list[tuple[int, ...]] = [tuple(sorted(s)) for s in rev]
        self.edge_count = sum(len(s) for s in self.out_adj)
        if labels is None:
            labels = range(vertex_count)
        self.labels: tuple[int, ...] = tuple(labels)
        if len(self.labels) != vertex_count:
            raise ValueError("labels length must equal vertex_count")
        self._label_to_id = {lab: i for i, lab in enumerate(self.labels)}

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        if not 0 <= v < self.vertex_count:
            raise IndexError(f"vertex {v} out of range [0, {self.vertex_count})")
        return self.out_adj[v]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        if not 0 <= v < self.vertex_count:
            raise IndexError(f"vertex {v} out of range [0, {self.vertex_count})")
        return self.in_adj[v]

    def id_of_label(self, label: int) -> int:
        try:
            return self._label_to_id[label]
        except KeyError:
            raise KeyError(f"unknown vertex label {label}") from None

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self.out_adj):
            for v in nbrs:
                yield u, v

    def to_edge_lines(self) -> list[str]:
        """Serialize back to edge-list lines using the original labels."""
        return [f"{self.labels[u]} {self.labels[v]}" for u, v in self.edges()]


def _parse_rows(lines: Iterable[str]) -> list[tuple[int, int, int]]:
    rows = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"line {lineno}: expected two integers, got {line!r}") from None
        if u < 0 or v < 0:
            raise GraphParseError(f"line {lineno}: negative vertex id in {line!r}")
        rows.append((lineno, u, v))
    return rows


def load_edge_list(stream: Iterable[str]) -> DirectedGraph:
    """Parse an edge-list text stream into a graph.

    Lines starting with ``#`` or ``%`` are comments.  The first data line is
    taken as an ``n m`` header when its second value equals the number of
    remaining data lines and its first value covers every id that follows;
    ids are then used as-is (allowing trailing isolated vertices).  Without a
    header, sparse input ids are remapped to dense ids in sorted order and the
    original labels are retained for output.
    """
    rows = _parse_rows(stream)
    if not rows:
        return DirectedGraph(0, [])
    first = rows[0]
    body = rows[1:]
    max_body = max((max(u, v) for _, u, v in body), default=-1)
    if first[2] == len(body) and first[1] >= max_body + 1:
        n = first[1]
        return DirectedGraph(n, [(u, v) for _, u, v in body])
    ids = sorted({x for _, u, v in rows for x in (u, v)})
    remap = {lab: i for i, lab in enumerate(ids)}
    return DirectedGraph(len(ids), [(remap[u], remap[v]) for _, u, v in rows], labels=ids)


def induce_sample(g: DirectedGraph, fraction: float, seed: int) -> DirectedGraph:
    """Keep a seeded uniform sample of ceil(fraction*n) vertices and all edges
    between them, relabeled densely in old-id order."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = g.vertex_count
    count = math.ceil(fraction * n)
    rng = random.Random(seed)
    kept = sorted(rng.sample(range(n), count))
    remap = {old: new for new, old in enumerate(kept)}
    edges = [(remap[u], remap[v]) for u, v in g.edges() if u in remap and v in remap]
    return DirectedGraph(count, edges, labels=[g.labels[v] for v in kept])
