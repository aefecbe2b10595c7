import random

from hopbatch import (FORWARD, DirectedGraph, EngineStats, PathStore, Query, ResultCache,
                      basic_enumerate, batch_enumerate, brute_force_paths,
                      build_batch_index, enumerate_single, generate_queries,
                      GenSpec, random_graph, search_with_reuse)
from hopbatch.sharing import HcsNode


def test_fixture_batch_results(demo_graph, demo_queries):
    result = batch_enumerate(demo_graph, demo_queries, 0.8)
    assert result.stats.group_count == 2
    assert result.stats.fallbacks == 0
    assert sorted(result.results[0]) == [
        (0, 1, 7, 10, 12, 11),
        (0, 4, 9, 3, 6, 11),
        (0, 4, 9, 15, 6, 11),
    ]
    assert sorted(result.results[1]) == [
        (2, 1, 7, 10, 12, 13),
        (2, 4, 9, 3, 6, 13),
        (2, 4, 9, 15, 6, 13),
    ]


def test_single_query_equals_baseline(demo_graph, demo_queries, demo_index):
    for q in demo_queries:
        batch = batch_enumerate(demo_graph, [q])
        single = enumerate_single(demo_graph, demo_index, q)
        assert sorted(batch.results[0]) == sorted(single)


def test_random_batches_match_oracle():
    rng = random.Random(60)
    for _ in range(40):
        n = rng.randint(5, 80)
        g = random_graph(n, rng.uniform(0.5, 5.0), seed=rng.randrange(1 << 30),
                         model=rng.choice(["er", "pa", "local"]))
        queries = [Query(i, rng.randrange(n), rng.randrange(n), rng.randint(1, 6))
                   for i in range(rng.randint(1, 20))]
        result = batch_enumerate(g, queries, rng.choice([0.0, 0.5, 0.8, 1.0]))
        assert result.stats.fallbacks == 0
        for q, got in zip(queries, result.results):
            assert sorted(got) == sorted(brute_force_paths(g, q.s, q.t, q.k))
            assert len(got) == len(set(got))


def test_duplicate_queries_enumerated_once():
    g = random_graph(120, 4.0, seed=9, model="pa")
    base = generate_queries(g, GenSpec(count=1, k_min=6, k_max=6, seed=2))[0]
    copies = [Query(i, base.s, base.t, base.k) for i in range(25)]
    one = batch_enumerate(g, [base])
    many = batch_enumerate(g, copies)
    plain = basic_enumerate(g, copies)
    assert many.stats.expansions == one.stats.expansions
    assert plain.stats.expansions == 25 * one.stats.expansions
    for got in many.results:
        assert sorted(got) == sorted(many.results[0])


def test_search_with_reuse_no_suppliers_matches_half(demo_graph, demo_queries):
    from hopbatch import search_half
    index = build_batch_index(demo_graph, [demo_queries[3]])
    node = HcsNode(0, FORWARD, 4, 2, "initial")
    targets = [(index.backward[14].entries, 4, 0)]
    got = search_with_reuse(demo_graph, node, {}, targets, EngineStats())
    want = search_half(demo_graph, FORWARD, 4, 2, [(14, 4, 0)], index)
    assert set(got.paths()) == set(want.paths())


def test_search_with_reuse_truncates_own_anchor_supplier(demo_graph):
    big = PathStore(FORWARD, 2, 12)
    for p in [(12,), (12, 10), (12, 10, 7)]:
        big.add(p)
    node = HcsNode(1, FORWARD, 12, 1, "detected")
    store = search_with_reuse(demo_graph, node, {12: big}, [], EngineStats())
    assert set(store.paths()) == {(12,), (12, 10)}


def test_search_with_reuse_substitutes_cached_suffixes(demo_graph, demo_index):
    cached = PathStore(FORWARD, 2, 4)
    for p in [(4,), (4, 9), (4, 9, 3), (4, 9, 8), (4, 9, 15)]:
        cached.add(p)
    node = HcsNode(2, FORWARD, 0, 3, "initial")
    stats = EngineStats()
    store = search_with_reuse(demo_graph, node, {4: cached}, [], stats)
    assert (0, 4, 9, 15) in set(store.paths())
    assert stats.concat_ops > 0
    # the subtree behind vertex 4 must come from the cache, not recursion
    assert (0, 4) in set(store.paths())


def test_cache_eviction_after_last_consumer():
    stats = EngineStats()
    cache = ResultCache(stats)
    node = HcsNode(0, FORWARD, 1, 2, "detected")
    store = PathStore(FORWARD, 2, 1)
    store.add((1,))
    cache.put(node, store, consumers=3)
    cache.release(node)
    cache.release(node)
    assert node.uid in cache.entries  # two of three consumers processed
    cache.release(node)
    assert not cache.entries


def test_cache_hygiene_and_peaks():
    rng = random.Random(61)
    for _ in range(20):
        n = rng.randint(10, 80)
        g = random_graph(n, rng.uniform(1.0, 5.0), seed=rng.randrange(1 << 30))
        queries = [Query(i, rng.randrange(n), rng.randrange(n), rng.randint(1, 6))
                   for i in range(rng.randint(2, 15))]
        result = batch_enumerate(g, queries, 0.5)
        st = result.stats
        assert st.cache_end_entries == 0
        # never more live stores than half-query nodes can exist
        assert st.cache_peak_entries <= 2 * len(queries) + st.detected_nodes


def test_count_only_matches_paths(demo_graph, demo_queries):
    paths = batch_enumerate(demo_graph, demo_queries, 0.8)
    counts = batch_enumerate(demo_graph, demo_queries, 0.8, count_only=True)
    assert counts.results == [len(r) for r in paths.results]


def test_memory_guard_degrades_to_fallback(demo_graph, demo_queries):
    result = batch_enumerate(demo_graph, demo_queries, 0.8, memory_cap_vertices=1)
    assert result.stats.fallbacks >= 1
    for q, got in zip(demo_queries, result.results):
        assert sorted(got) == sorted(brute_force_paths(demo_graph, q.s, q.t, q.k))


def test_threads_do_not_change_results():
    g = random_graph(100, 4.0, seed=3, model="local")
    queries = generate_queries(g, GenSpec(count=30, k_min=2, k_max=6, seed=4))
    base = batch_enumerate(g, queries, 0.5, threads=1)
    for threads in (2, 4):
        other = batch_enumerate(g, queries, 0.5, threads=threads)
        assert [sorted(r) for r in other.results] == [sorted(r) for r in base.results]


def test_self_loops_do_not_break_enumeration():
    g = DirectedGraph(3, [(0, 0), (0, 1), (1, 1), (1, 2)])
    queries = [Query(0, 0, 2, 3), Query(1, 0, 2, 3)]
    result = batch_enumerate(g, queries, 0.5)
    for got in result.results:
        assert sorted(got) == sorted(brute_force_paths(g, 0, 2, 3)) == [(0, 1, 2)]


def test_batch_with_degenerate_and_k1_queries(demo_graph):
    queries = [Query(0, 0, 0, 4), Query(1, 0, 1, 1), Query(2, 0, 11, 1),
               Query(3, 0, 11, 5)]
    result = batch_enumerate(demo_graph, queries, 0.5)
    assert result.results[0] == []
    assert result.results[1] == [(0, 1)]
    assert result.results[2] == []
    assert len(result.results[3]) == 3


def test_empty_batch():
    g = random_graph(10, 2.0, seed=1)
    result = batch_enumerate(g, [], 0.5)
    assert result.results == []


def test_dot_sink_receives_groups(demo_graph, demo_queries):
    dots = []
    batch_enumerate(demo_graph, demo_queries, 0.8, dot_sink=lambda sg: dots.append(sg.to_dot()))
    assert len(dots) == 2
    assert all(d.startswith("digraph") for d in dots)


def test_basic_enumerate_matches_batch(demo_graph, demo_queries):
    a = basic_enumerate(demo_graph, demo_queries)
    b = batch_enumerate(demo_graph, demo_queries, 0.8)
    assert [sorted(r) for r in a.results] == [sorted(r) for r in b.results]
