import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopbatch import (INF, DirectedGraph, Query, build_batch_index, dump_index,
                      load_index, random_graph, truncated_bfs)


def test_backward_map_demo_values(demo_graph, demo_queries):
    index = build_batch_index(demo_graph, [demo_queries[3]])  # q3(4, 14, 4)
    dmap = index.backward[14]
    assert dmap.lookup(6) == 1
    assert dmap.lookup(3) == 2
    assert dmap.lookup(15) == 2
    assert dmap.lookup(8) == INF


def test_anchor_distance_zero(demo_index):
    for dmap in list(demo_index.forward.values()) + list(demo_index.backward.values()):
        assert dmap.lookup(dmap.anchor) == 0


def test_cap_truncates_reachable_vertex(demo_graph):
    # dist(0, 12) is 4 via 1,7,10; a cap-3 map must treat it as unreachable.
    index = build_batch_index(demo_graph, [Query(0, 0, 11, 3)])
    assert index.forward[0].lookup(12) == INF
    assert index.forward[0].lookup(10) == 3


def test_cap_is_max_k_per_anchor(demo_graph):
    index = build_batch_index(demo_graph, [Query(0, 0, 11, 2), Query(1, 0, 13, 5)])
    assert index.forward[0].cap == 5
    assert index.backward[11].cap == 2
    assert index.backward[13].cap == 5


def _assert_matches_plain_bfs(g, queries):
    index = build_batch_index(g, queries)
    for anchor, dmap in index.forward.items():
        assert dmap.entries == truncated_bfs(g.out_adj, anchor, dmap.cap)
    for anchor, dmap in index.backward.items():
        assert dmap.entries == truncated_bfs(g.in_adj, anchor, dmap.cap)


def test_equals_single_source_bfs_fixture(demo_graph, demo_queries):
    _assert_matches_plain_bfs(demo_graph, demo_queries)


def test_equals_single_source_bfs_random():
    rng = random.Random(2024)
    for _ in range(40):
        n = rng.randint(4, 200)
        g = random_graph(n, rng.uniform(0.5, 6.0), seed=rng.randrange(1 << 30),
                         model=rng.choice(["er", "pa"]))
        queries = [Query(i, rng.randrange(n), rng.randrange(n), rng.randint(1, 7))
                   for i in range(rng.randint(1, 12))]
        _assert_matches_plain_bfs(g, queries)


@given(st.lists(st.tuples(st.integers(0, 14), st.integers(0, 14)), max_size=50),
       st.lists(st.tuples(st.integers(0, 14), st.integers(0, 14), st.integers(1, 6)),
                min_size=1, max_size=6))
@settings(max_examples=50, deadline=None)
def test_equals_single_source_bfs_property(edges, triples):
    g = DirectedGraph(15, edges)
    queries = [Query(i, s, t, k) for i, (s, t, k) in enumerate(triples)]
    _assert_matches_plain_bfs(g, queries)


def test_round_count_is_k_max(demo_graph, demo_queries):
    index = build_batch_index(demo_graph, demo_queries)
    assert index.rounds == {"forward": 5, "backward": 5}


def test_edge_relaxation(demo_graph, demo_index):
    for dmap in demo_index.forward.values():
        for u, du in dmap.entries.items():
            for v in demo_graph.out_neighbors(u):
                if du + 1 <= dmap.cap:
                    assert dmap.lookup(v) <= du + 1


def test_dump_load_round_trip(demo_graph, demo_queries):
    index = build_batch_index(demo_graph, demo_queries)
    buf = io.BytesIO()
    dump_index(index, buf)
    buf.seek(0)
    loaded = load_index(buf)
    assert loaded.k_max == index.k_max
    for table, orig in ((loaded.forward, index.forward), (loaded.backward, index.backward)):
        assert table.keys() == orig.keys()
        for anchor in table:
            assert table[anchor].entries == orig[anchor].entries
            assert table[anchor].cap == orig[anchor].cap


def test_load_rejects_garbage():
    with pytest.raises(ValueError):
        load_index(io.BytesIO(b"not an index"))


def test_query_validation():
    with pytest.raises(ValueError):
        Query(0, 1, 2, 0)
    with pytest.raises(ValueError):
        Query(0, -1, 2, 3)


def test_endpoint_out_of_range_rejected(demo_graph):
    with pytest.raises(IndexError):
        build_batch_index(demo_graph, [Query(0, 0, 99, 3)])
