"""Phase 2: detect dominating single-source sub-queries and build the sharing DAG.

Each query contributes one initial half node per direction (source side on the
forward graph, target side on the reverse graph).  A synchronous frontier sweep
walks all halves of a group together, one consumed hop per round; when several
nodes reach the same vertex with the same remaining budget, that remainder
becomes a detected node enumerated once and reused by all of them.  Edges run
supplier -> consumer, so a topological walk always caches suppliers first.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

from .graph import DirectedGraph
from .index import BACKWARD, FORWARD, INF, Query
from .paths import half_budgets

INITIAL = "initial"
DETECTED = "detected"


class InvariantError(RuntimeError):
    """A structural invariant of the sharing graph failed; callers degrade the
    affected group to per-query enumeration."""


@dataclass(eq=False)
class HcsNode:
    """A single-source hop-limited path query: the unit of shared computation."""

    uid: int
    side: str
    anchor: int
    budget: int
    origin: str


@dataclass(eq=False)
class HcstNode:
    """The s-t query itself; consumes its two half nodes at join time."""

    uid: int
    pos: int
    query: Query


def dominates(qa: HcsNode, qb: HcsNode, dist_between: Callable[[int, int], int]) -> bool:
    """True when qa's results are reusable segments of qb's: qa's budget fits
    inside qb's remainder at qa's anchor.  dist_between(from_anchor, to_anchor)
    reads hop distance on the shared side's graph, INF when unknown."""
    if qa.side != qb.side:
        return False
    d = dist_between(qb.anchor, qa.anchor)
    return qa.budget <= qb.budget - d


class SharingGraph:
    """DAG of half-query nodes and s-t query nodes for one group."""

    def __init__(self):
        self.nodes: list[HcsNode | HcstNode] = []
        self.out_edges: dict[int, list[int]] = {}
        self.in_edges: dict[int, list[int]] = {}
        self._edge_set: set[tuple[int, int]] = set()
        self.hcst: list[HcstNode] = []
        self.initial: dict[tuple[str, int, int], HcsNode] = {}
        self.detected_at: dict[tuple[str, int], HcsNode] = {}

    def _register(self, node) -> None:
        self.nodes.append(node)
        self.out_edges[node.uid] = []
        self.in_edges[node.uid] = []

    def add_hcst(self, pos: int, query: Query) -> HcstNode:
        node = HcstNode(len(self.nodes), pos, query)
        self._register(node)
        self.hcst.append(node)
        return node

    def initial_node(self, side: str, anchor: int, budget: int) -> HcsNode:
        key = (side, anchor, budget)
        node = self.initial.get(key)
        if node is None:
            node = HcsNode(len(self.nodes), side, anchor, budget, INITIAL)
            self._register(node)
            self.initial[key] = node
        return node

    def new_detected(self, side: str, anchor: int, budget: int) -> HcsNode:
        if (side, anchor) in self.detected_at:
            raise InvariantError(f"second detected node at vertex {anchor} ({side})")
        node = HcsNode(len(self.nodes), side, anchor, budget, DETECTED)
        self._register(node)
        self.detected_at[(side, anchor)] = node
        return node

    def add_edge(self, supplier, consumer) -> None:
        if supplier is consumer:
            raise InvariantError("self-edge in sharing graph")
        key = (supplier.uid, consumer.uid)
        if key in self._edge_set:
            return
        self._edge_set.add(key)
        self.out_edges[supplier.uid].append(consumer.uid)
        self.in_edges[consumer.uid].append(supplier.uid)

    def suppliers(self, node) -> list[HcsNode]:
        return [self.nodes[u] for u in self.in_edges[node.uid]]

    def hcs_nodes(self, side: str | None = None) -> list[HcsNode]:
        return [n for n in self.nodes
                if isinstance(n, HcsNode) and (side is None or n.side == side)]

    def _rank(self, uid: int) -> tuple[int, int]:
        # Among ready nodes prefer detected suppliers, then initial halves,
        # then s-t query nodes; uid breaks remaining ties deterministically.
        node = self.nodes[uid]
        if isinstance(node, HcstNode):
            return (2, uid)
        return (0 if node.origin == DETECTED else 1, uid)

    def topological_order(self) -> list:
        """Kahn's algorithm with a deterministic heap: suppliers always first."""
        indeg = {n.uid: len(self.in_edges[n.uid]) for n in self.nodes}
        ready = [self._rank(uid) for uid, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            _, uid = heapq.heappop(ready)
            order.append(self.nodes[uid])
            for w in self.out_edges[uid]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(ready, self._rank(w))
        if len(order) != len(self.nodes):
            raise InvariantError("cycle in sharing graph")
        return order

    def consumer_closure(self, order: Sequence | None = None) -> dict[int, set[int]]:
        """Per node, the positions of every s-t query transitively downstream."""
        if order is None:
            order = self.topological_order()
        closure: dict[int, set[int]] = {}
        for node in reversed(order):
            if isinstance(node, HcstNode):
                closure[node.uid] = {node.pos}
            else:
                acc: set[int] = set()
                for w in self.out_edges[node.uid]:
                    acc |= closure[w]
                closure[node.uid] = acc
        return closure

    def to_dot(self, name: str = "sharing") -> str:
        lines = [f"digraph {name} {{"]
        for node in self.nodes:
            if isinstance(node, HcstNode):
                q = node.query
                lines.append(f'  n{node.uid} [shape=box, label="q{q.id}({q.s},{q.t},{q.k})"];')
            else:
                mark = "*" if node.origin == DETECTED else ""
                lines.append(
                    f'  n{node.uid} [label="{mark}{node.side[0]}:{node.anchor}/{node.budget}"];')
        for a, b in sorted(self._edge_set):
            lines.append(f"  n{a} -> n{b};")
        lines.append("}")
        return "\n".join(lines)


@dataclass
class DetectStats:
    touches: int = 0
    detected: int = 0


def build_sharing_graph(g: DirectedGraph, queries: Sequence[Query],
                        stats: DetectStats | None = None) -> SharingGraph:
    """Initial nodes plus detection on both directions for one query group."""
    graph = SharingGraph()
    for pos, q in enumerate(queries):
        graph.add_hcst(pos, q)
    for side in (FORWARD, BACKWARD):
        for pos, q in enumerate(queries):
            fb, bb = half_budgets(q.k)
            anchor, budget = (q.s, fb) if side == FORWARD else (q.t, bb)
            graph.add_edge(graph.initial_node(side, anchor, budget), graph.hcst[pos])
        detect_common_queries(g, graph, side, stats)
    return graph


def _reaches(graph: SharingGraph, start: HcsNode, target: HcsNode) -> bool:
    """True when target is transitively downstream of start in the DAG."""
    if start is target:
        return True
    stack = [start.uid]
    seen = {start.uid}
    while stack:
        for w in graph.out_edges[stack.pop()]:
            if w == target.uid:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def detect_common_queries(g: DirectedGraph, graph: SharingGraph, side: str,
                          stats: DetectStats | None = None) -> None:
    """Sweep consumed-hop levels, gathering nodes that reach a vertex with equal
    remaining budget.

    Two or more arrivals spawn a detected node feeding all of them; a lone
    arrival keeps walking.  A vertex that already hosts a node with a larger
    recorded budget absorbs arrivals instead: they are wired underneath it and
    stop, since its cached paths cover their remainder by length truncation.
    Absorption that would make a node its own transitive supplier is skipped
    (the arrival just keeps walking).  Propagation is a per-node breadth-first
    wave (each node touches a vertex at most once), so a detected node's budget
    always matches the first — deepest — remainder any consumer's own search
    could carry to its anchor.
    """
    if stats is None:
        stats = DetectStats()
    adj = g.out_adj if side == FORWARD else g.in_adj
    seeds = [node for (s, _, _), node in sorted(graph.initial.items(), key=lambda kv: kv[1].uid)
             if s == side and node.budget >= 1]
    if not seeds:
        return
    k_half = max(node.budget for node in seeds)
    rounds: list[dict[int, list[HcsNode]]] = [dict() for _ in range(k_half + 1)]
    visited: dict[int, set[int]] = {}
    at_anchor: dict[int, HcsNode] = {}
    for node in seeds:
        rounds[k_half - node.budget].setdefault(node.anchor, []).append(node)
        visited[node.uid] = {node.anchor}

    for r in range(k_half):
        rem = k_half - r
        propagate: list[tuple[int, HcsNode]] = []
        for v in sorted(rounds[r]):
            arrivals = sorted(rounds[r][v], key=lambda n: n.uid)
            host = at_anchor.get(v)
            if host is not None:
                if host.budget < rem:
                    raise InvariantError("anchored node with smaller budget than arrival")
                if any(_reaches(graph, c, host) for c in arrivals):
                    host = None  # absorbing would close a supply cycle
            seed = next((c for c in arrivals if c.anchor == v and c.budget == rem), None)
            base = seed
            if base is None and len(arrivals) >= 2 and (side, v) not in graph.detected_at:
                base = graph.new_detected(side, v, rem)
                stats.detected += 1
            if host is not None:
                # Every arrival's remainder fits inside the host's cached paths.
                if base is None:
                    for c in arrivals:
                        graph.add_edge(host, c)
                else:
                    graph.add_edge(host, base)
                    for c in arrivals:
                        if c is not base:
                            graph.add_edge(base, c)
                    at_anchor[v] = base
                continue
            if base is not None:
                for c in arrivals:
                    if c is not base:
                        graph.add_edge(base, c)
                at_anchor[v] = base
                propagate.append((v, base))
            else:
                for c in arrivals:
                    propagate.append((v, c))
        if rem == 1:
            continue  # extensions would carry zero budget
        for v, node in propagate:
            vis = visited.setdefault(node.uid, {node.anchor})
            nxt = rounds[r + 1]
            for w in adj[v]:
                stats.touches += 1
                if w in vis:
                    continue
                vis.add(w)
                nxt.setdefault(w, []).append(node)
