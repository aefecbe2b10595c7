import pytest

from hopbatch import DirectedGraph, Query, build_batch_index

# Shared demo fixture: a small directed graph (16 vertices, 21 edges) and
# five queries exercised across the test modules.  Expected values asserted
# against it are frozen from independent recomputation.
FIXTURE_EDGES = [
    (0, 1), (0, 4),
    (1, 7), (1, 8),
    (2, 1), (2, 4),
    (3, 6),
    (4, 9),
    (5, 1),
    (6, 11), (6, 13), (6, 14),
    (7, 8), (7, 10),
    (9, 3), (9, 8), (9, 15),
    (10, 12),
    (12, 11), (12, 13),
    (15, 6),
]

# The five demo queries: (id, s, t, k).
FIXTURE_QUERIES = [
    (0, 0, 11, 5),
    (1, 2, 13, 5),
    (2, 5, 12, 5),
    (3, 4, 14, 4),
    (4, 9, 14, 3),
]


@pytest.fixture(scope="session")
def demo_graph() -> DirectedGraph:
    return DirectedGraph(16, FIXTURE_EDGES)


@pytest.fixture(scope="session")
def demo_queries() -> list[Query]:
    return [Query(*row) for row in FIXTURE_QUERIES]


@pytest.fixture(scope="session")
def demo_index(demo_graph, demo_queries):
    return build_batch_index(demo_graph, demo_queries)
