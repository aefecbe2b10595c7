"""Hop-distance index built by one shared multi-source BFS sweep per direction."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Sequence

from .graph import DirectedGraph

#: Sentinel for "farther than any cap"; strictly greater than any admissible k.
INF = 1 << 30

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class Query:
    """One hop-constrained s-t enumeration query over dense vertex ids."""

    id: int
    s: int
    t: int
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"query {self.id}: hop constraint must be >= 1, got {self.k}")
        if self.s < 0 or self.t < 0:
            raise ValueError(f"query {self.id}: negative endpoint")


class DistanceMap:
    """Truncated BFS distances from one anchor; absent entries mean > cap."""

    __slots__ = ("anchor", "direction", "cap", "entries")

    def __init__(self, anchor: int, direction: str, cap: int, entries: dict[int, int]):
        self.anchor = anchor
        self.direction = direction
        self.cap = cap
        self.entries = entries

    def lookup(self, v: int) -> int:
        return self.entries.get(v, INF)


class BatchIndex:
    """Per-anchor forward and backward distance maps for a query batch."""

    __slots__ = ("forward", "backward", "k_max", "rounds")

    def __init__(self, forward: dict[int, DistanceMap], backward: dict[int, DistanceMap],
                 k_max: int, rounds: dict[str, int] | None = None):
        self.forward = forward
        self.backward = backward
        self.k_max = k_max
        self.rounds = rounds or {}


def _shared_truncated_bfs(adj: Sequence[Sequence[int]], caps: dict[int, int],
                          k_max: int) -> tuple[dict[int, dict[int, int]], int]:
    """Run one k_max-round frontier sweep serving every anchor at once.

    Anchors ride the sweep as bits of a per-vertex mask.  An anchor whose cap
    is below the remaining round budget joins late (at round k_max - cap), so
    each propagates exactly cap rounds and its map is the truncated BFS.
    """
    anchors = sorted(caps)
    anchor_of = list(anchors)
    start_round = {a: k_max - caps[a] for a in anchors}
    dist: dict[int, dict[int, int]] = {a: {a: 0} for a in anchors}
    seen = [0] * len(adj)
    frontier: dict[int, int] = {}
    rounds_run = 0
    for r in range(k_max):
        rounds_run += 1
        for i, a in enumerate(anchors):
            if start_round[a] == r:
                seen[a] |= 1 << i
                frontier[a] = frontier.get(a, 0) | (1 << i)
        nxt: dict[int, int] = {}
        nxt_get = nxt.get
        for v, mask in frontier.items():
            for w in adj[v]:
                new = mask & ~seen[w]
                if new:
                    seen[w] |= new
                    nxt[w] = nxt_get(w, 0) | new
                    while new:
                        low = new & -new
                        a = anchor_of[low.bit_length() - 1]
                        dist[a][w] = r + 1 - start_round[a]
                        new ^= low
        frontier = nxt
    return dist, rounds_run


def build_batch_index(g: DirectedGraph, queries: Iterable[Query]) -> BatchIndex:
    """Build forward maps for every distinct source and backward maps for every
    distinct target, each capped at the largest k anchored there."""
    caps_f: dict[int, int] = {}
    caps_b: dict[int, int] = {}
    k_max = 0
    for q in queries:
        if q.s >= g.vertex_count or q.t >= g.vertex_count:
            raise IndexError(f"query {q.id}: endpoint out of range")
        caps_f[q.s] = max(caps_f.get(q.s, 0), q.k)
        caps_b[q.t] = max(caps_b.get(q.t, 0), q.k)
        k_max = max(k_max, q.k)
    fdist, fr = _shared_truncated_bfs(g.out_adj, caps_f, k_max)
    bdist, br = _shared_truncated_bfs(g.in_adj, caps_b, k_max)
    forward = {a: DistanceMap(a, FORWARD, caps_f[a], fdist[a]) for a in caps_f}
    backward = {a: DistanceMap(a, BACKWARD, caps_b[a], bdist[a]) for a in caps_b}
    return BatchIndex(forward, backward, k_max, {FORWARD: fr, BACKWARD: br})


_MAGIC = b"HBX"
_VERSION = 1


def dump_index(index: BatchIndex, fp: BinaryIO) -> None:
    """Binary dump: magic, version byte, k_max, then both direction tables."""
    fp.write(_MAGIC)
    fp.write(struct.pack("<BH", _VERSION, index.k_max))
    for table in (index.forward, index.backward):
        fp.write(struct.pack("<I", len(table)))
        for anchor in sorted(table):
            dmap = table[anchor]
            items = sorted(dmap.entries.items())
            fp.write(struct.pack("<IHI", anchor, dmap.cap, len(items)))
            for v, h in items:
                fp.write(struct.pack("<IH", v, h))


def load_index(fp: BinaryIO) -> BatchIndex:
    if fp.read(3) != _MAGIC:
        raise ValueError("not a hop-distance index dump")
    version, k_max = struct.unpack("<BH", fp.read(3))
    if version != _VERSION:
        raise ValueError(f"unsupported index dump version {version}")
    tables = []
    for direction in (FORWARD, BACKWARD):
        (count,) = struct.unpack("<I", fp.read(4))
        table = {}
        for _ in range(count):
            anchor, cap, n_entries = struct.unpack("<IHI", fp.read(10))
            entries = {}
            for _ in range(n_entries):
                v, h = struct.unpack("<IH", fp.read(6))
                entries[v] = h
            table[anchor] = DistanceMap(anchor, direction, cap, entries)
        tables.append(table)
    return BatchIndex(tables[0], tables[1], k_max)
