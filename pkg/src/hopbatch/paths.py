"""Bidirectional single-query enumeration and the path-concatenation join."""
from __future__ import annotations

from typing import Iterable, Sequence

from .graph import DirectedGraph
from .index import BACKWARD, FORWARD, INF, BatchIndex, Query

Path = tuple[int, ...]

#: Pruning target: (far endpoint, full hop constraint, consumed-hop offset).
PruneTarget = tuple[int, int, int]


def half_budgets(k: int) -> tuple[int, int]:
    """Forward/backward search depths for hop constraint k: ceil, floor of k/2."""
    return (k + 1) // 2, k // 2


class PathStore:
    """Paths from one root in search orientation, every prefix included.

    Grouped by ending vertex (the hash-join boundary) and by length (for
    budget-truncated reuse).  Backward-side stores hold reverse-graph
    orientation; they are reoriented exactly once at join time.
    """

    __slots__ = ("side", "budget", "root", "by_end", "by_len", "count", "total_vertices")

    def __init__(self, side: str, budget: int, root: int):
        self.side = side
        self.budget = budget
        self.root = root
        self.by_end: dict[int, list[Path]] = {}
        self.by_len: dict[int, list[Path]] = {}
        self.count = 0
        self.total_vertices = 0

    def add(self, path: Path) -> None:
        hops = len(path) - 1
        if hops > self.budget:
            raise AssertionError(f"path of length {hops} exceeds store budget {self.budget}")
        self.by_end.setdefault(path[-1], []).append(path)
        self.by_len.setdefault(hops, []).append(path)
        self.count += 1
        self.total_vertices += len(path)

    def paths(self) -> Iterable[Path]:
        for hops in sorted(self.by_len):
            yield from self.by_len[hops]

    def truncated(self, budget: int) -> "PathStore":
        """New store keeping only paths of length <= budget (prefixes survive)."""
        out = PathStore(self.side, budget, self.root)
        for hops in range(min(budget, self.budget) + 1):
            for p in self.by_len.get(hops, ()):
                out.add(p)
        return out


def concat_paths(a_paths: Iterable[Path], b_paths: Iterable[Path]) -> list[Path]:
    """Hash-join concatenation: pairs with last(a) == first(b), the shared
    vertex written once.  No simplicity filtering here."""
    by_first: dict[int, list[Path]] = {}
    for p in b_paths:
        by_first.setdefault(p[0], []).append(p)
    out = []
    for pa in a_paths:
        for pb in by_first.get(pa[-1], ()):
            out.append(pa + pb[1:])
    return out


def search_half(g: DirectedGraph, side: str, start: int, budget: int,
                prune_targets: Sequence[PruneTarget], index: BatchIndex,
                stats=None) -> PathStore:
    """Depth-first enumeration of simple paths from start up to budget hops.

    A neighbor is expanded only when the step fits the budget, keeps the path
    simple, and some prune target (far, k, offset) admits it:
    offset + |p| + 1 + dist(neighbor, far) <= k, distances read from the
    opposite direction's maps.  An empty target list disables pruning, which
    makes this the plain evaluator for a single-source hop-limited query.
    """
    adj = g.out_adj if side == FORWARD else g.in_adj
    opposite = index.backward if side == FORWARD else index.forward
    targets = [(opposite[far].entries, k, off) for far, k, off in prune_targets]
    store = PathStore(side, budget, start)
    on_path = bytearray(g.vertex_count)
    on_path[start] = 1
    path = [start]

    def descend():
        store.add(tuple(path))
        depth = len(path) - 1
        if depth == budget:
            return
        nd = depth + 1
        for w in adj[path[-1]]:
            if on_path[w]:
                continue
            if targets and not any(off + nd + dmap.get(w, INF) <= k for dmap, k, off in targets):
                continue
            if stats is not None:
                stats.expansions += 1
            on_path[w] = 1
            path.append(w)
            descend()
            path.pop()
            on_path[w] = 0

    descend()
    return store


def reoriented(store: PathStore) -> list[Path]:
    """Backward store re-expressed in forward orientation (paths end at root)."""
    return [tuple(reversed(p)) for p in store.paths()]


def join_halves(forward_store: PathStore, backward_reversed: Sequence[Path], k: int,
                count_only: bool = False):
    """Canonical-split join of the two halves of a hop constraint k query.

    A pair is accepted iff the forward part has length exactly ceil(k/2), or
    the backward part is the zero-length path and the forward part already
    ends at the target.  Every result path gets exactly one decomposition, so
    nothing is emitted twice; non-simple concatenations are dropped.
    """
    fb = (k + 1) // 2
    target = None
    by_first: dict[int, list[Path]] = {}
    for p in backward_reversed:
        by_first.setdefault(p[0], []).append(p)
        if len(p) == 1:
            target = p[0]
    results: list[Path] = []
    n_found = 0
    for pf in forward_store.by_len.get(fb, ()):
        matches = by_first.get(pf[-1])
        if not matches:
            continue
        seen = set(pf)
        for pb in matches:
            tail = pb[1:]
            if any(v in seen for v in tail):
                continue
            n_found += 1
            if not count_only:
                results.append(pf + tail)
    if target is not None:
        for hops in range(1, fb):
            for pf in forward_store.by_len.get(hops, ()):
                if pf[-1] == target:
                    n_found += 1
                    if not count_only:
                        results.append(pf)
    return n_found if count_only else results


def enumerate_single(g: DirectedGraph, index: BatchIndex, q: Query,
                     stats=None, count_only: bool = False):
    """Baseline bidirectional enumeration of one query: two pruned half
    searches joined by the canonical split."""
    if q.s not in index.forward or q.t not in index.backward:
        raise KeyError(f"index does not cover query {q.id} ({q.s} -> {q.t})")
    fb, bb = half_budgets(q.k)
    p_f = search_half(g, FORWARD, q.s, fb, [(q.t, q.k, 0)], index, stats)
    p_b = search_half(g, BACKWARD, q.t, bb, [(q.s, q.k, 0)], index, stats)
    return join_halves(p_f, reoriented(p_b), q.k, count_only=count_only)
