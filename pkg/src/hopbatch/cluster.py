"""Phase 1: group queries likely to share computation.

Similarity is the harmonic mean of the overlap coefficients of the forward and
backward hop-constrained neighborhoods, read straight from the distance index
(no extra traversal).  Groups are merged agglomeratively (average linkage)
until no pair exceeds the threshold gamma.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .index import BatchIndex, Query


@dataclass(frozen=True)
class NeighborProfile:
    """Hop-constrained neighborhoods of one query."""

    key: tuple[int, int, int]  # (s, t, k); equal queries share similarity
    gamma_fwd: frozenset[int]
    gamma_bwd: frozenset[int]


def hop_neighbors(index: BatchIndex, q: Query,
                  _cache: dict | None = None) -> NeighborProfile:
    """Vertices within q.k hops of q.s (forward) and of q.t (backward).

    Read straight from the distance maps; an optional cache deduplicates the
    set construction across queries sharing an (anchor, k) pair.
    """
    try:
        fwd = index.forward[q.s]
        bwd = index.backward[q.t]
    except KeyError:
        raise LookupError(f"index does not cover query {q.id}") from None
    if fwd.cap < q.k or bwd.cap < q.k:
        raise LookupError(f"index cap too small for query {q.id}")
    if _cache is None:
        _cache = {}
    fkey = ("f", q.s, q.k)
    if fkey not in _cache:
        _cache[fkey] = (frozenset(fwd.entries) if q.k >= fwd.cap else
                        frozenset(v for v, d in fwd.entries.items() if d <= q.k))
    bkey = ("b", q.t, q.k)
    if bkey not in _cache:
        _cache[bkey] = (frozenset(bwd.entries) if q.k >= bwd.cap else
                        frozenset(v for v, d in bwd.entries.items() if d <= q.k))
    return NeighborProfile((q.s, q.t, q.k), _cache[fkey], _cache[bkey])


def query_similarity(pa: NeighborProfile, pb: NeighborProfile) -> float:
    """Similarity in [0, 1]; 1 when each smaller neighborhood is contained in
    the other, 0 when either side's neighborhoods are disjoint."""
    inter_f = len(pa.gamma_fwd & pb.gamma_fwd)
    if inter_f == 0:
        return 0.0
    inter_b = len(pa.gamma_bwd & pb.gamma_bwd)
    if inter_b == 0:
        return 0.0
    den = (min(len(pa.gamma_fwd), len(pb.gamma_fwd)) / inter_f
           + min(len(pa.gamma_bwd), len(pb.gamma_bwd)) / inter_b)
    return min(1.0, 2.0 / den)


def pairwise_similarity(profiles: Sequence[NeighborProfile]) -> list[list[float]]:
    """Full mu table; repeated (s, t, k) triples are computed once."""
    n = len(profiles)
    cache: dict[tuple, float] = {}
    table = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            key = (profiles[i].key, profiles[j].key)
            if key not in cache:
                cache[key] = query_similarity(profiles[i], profiles[j])
                cache[(key[1], key[0])] = cache[key]
            table[i][j] = table[j][i] = cache[key]
    return table


def group_similarity(group_a: Sequence[int], group_b: Sequence[int],
                     mu: Sequence[Sequence[float]]) -> float:
    """Average linkage: mean mu over all cross pairs."""
    total = 0.0
    for i in group_a:
        row = mu[i]
        for j in group_b:
            total += row[j]
    return total / (len(group_a) * len(group_b))


def cluster_queries(profiles: Sequence[NeighborProfile], gamma: float,
                    mu: Sequence[Sequence[float]] | None = None) -> list[list[int]]:
    """Agglomerative merge loop: repeatedly join the first pair of groups with
    the maximum average similarity while it exceeds gamma.

    Returns groups of positions into the profile list, partitioning it.
    Cross-pair sums are carried across merges so the whole loop costs
    O(|Q|^2) beyond the mu table.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma {gamma} outside [0, 1]")
    n = len(profiles)
    if n == 0:
        return []
    if mu is None:
        mu = pairwise_similarity(profiles)
    members: list[list[int]] = [[i] for i in range(n)]
    order = list(range(n))
    sums: dict[tuple[int, int], float] = {}
    for ii in range(n):
        for jj in range(ii + 1, n):
            sums[(ii, jj)] = mu[ii][jj]

    def key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    while True:
        best = 0.0
        pair = None
        for ii in range(len(order)):
            a = order[ii]
            for jj in range(ii + 1, len(order)):
                b = order[jj]
                d = sums[key(a, b)] / (len(members[a]) * len(members[b]))
                if d > best:
                    best = d
                    pair = (a, b)
        if pair is None or best <= gamma:
            break
        a, b = pair
        for c in order:
            if c != a and c != b:
                sums[key(a, c)] = sums[key(a, c)] + sums.pop(key(b, c))
        sums.pop(key(a, b))
        members[a] = members[a] + members[b]
        order.remove(b)
    return [members[h] for h in order]
