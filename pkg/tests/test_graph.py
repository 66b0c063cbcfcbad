from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from hublab.generators import (
    gen_complete,
    gen_cycle,
    gen_grid,
    gen_partial_ktree,
    gen_path,
    gen_random_strong,
    gen_split,
    gen_star,
    reweight,
)
from hublab.graph import (
    INF,
    DistanceMode,
    Graph,
    GraphError,
    OracleLimitError,
    check_strongly_connected,
    dijkstra,
    format_graph,
    mode_value,
    oracle_all_pairs,
    oracle_ecc_dsum,
    parse_graph,
)
from hublab.sparse import bfs_diameter
from hublab.treedec import validate_td

from conftest import tri


def test_dijkstra_examples(triangle):
    assert dijkstra(triangle, 0, "out") == [0, 1, 3]
    assert dijkstra(triangle, 0, "in") == [0, 5, 3]
    assert dijkstra(Graph(1, [], directed=True, weighted=True), 0) == [0]


def test_unreachable_is_inf():
    g = Graph(2, [(0, 1, 1)], directed=True, weighted=True)
    assert dijkstra(g, 1) == [INF, 0]


def test_strong_connectivity():
    assert check_strongly_connected(tri())
    assert not check_strongly_connected(Graph(2, [(0, 1, 1)], directed=True, weighted=True))
    assert check_strongly_connected(gen_path(3))


def test_oracle_examples(triangle):
    assert oracle_all_pairs(gen_path(3))[0][2] == 2
    assert oracle_all_pairs(triangle)[1][0] == 5
    d = oracle_all_pairs(gen_complete(2))
    assert d[0][1] == d[1][0] == 1


def test_oracle_limit():
    with pytest.raises(OracleLimitError):
        oracle_all_pairs(gen_path(30), limit=10)


def test_mode_value_examples():
    assert mode_value(1, 5, DistanceMode.ROUNDTRIP) == 6
    assert mode_value(1, 5, DistanceMode.MIN) == 1
    assert mode_value(7, 7, DistanceMode.MAX) == 7
    assert mode_value(1, 5, DistanceMode.SOURCE) == 1
    with pytest.raises(OverflowError):
        mode_value(1 << 62, 1, DistanceMode.ROUNDTRIP)


def test_oracle_ecc_dsum_triangle(triangle):
    ecc, dsum = oracle_ecc_dsum(triangle, "source")
    assert ecc == [3, 5, 4] and dsum == [4, 7, 7]
    ecc, dsum = oracle_ecc_dsum(triangle, "roundtrip")
    assert ecc == [6, 6, 6] and dsum == [12, 12, 12]


def test_generators_examples():
    p3 = gen_path(3)
    assert p3.n == 3 and p3.m == 2
    g, K = gen_split(2, 2, 1.0, 5)
    assert sorted(K) == [0, 1] and bfs_diameter(g) == 2
    g, td = gen_partial_ktree(50, 3, 0.5, 11)
    assert validate_td(g, td).ok and td.width <= 3
    assert gen_cycle(5).m == 5 and gen_star(5).m == 4 and gen_grid(3).n == 9


def test_generators_deterministic():
    a = gen_random_strong(40, 100, 9, 7)
    b = gen_random_strong(40, 100, 9, 7)
    assert format_graph(a) == format_graph(b)
    assert check_strongly_connected(a) and a.m == 100


def test_generator_refusals():
    with pytest.raises(GraphError):
        gen_random_strong(10, 5, 3, 1)
    with pytest.raises(GraphError):
        gen_cycle(2)


def test_format_roundtrip():
    for g in (tri(), gen_path(4), reweight(gen_star(6), 9, 3)):
        h = parse_graph(format_graph(g))
        assert format_graph(h) == format_graph(g)


@pytest.mark.parametrize("text", ["", "p 2 1 directed weighted\n0 1\n", "p 2 1 directed weighted\n0 5 1\n",
                                  "p 2 2 directed weighted\n0 1 1\n", "p 2 1 sideways weighted\n0 1 1\n"])
def test_parse_errors(text):
    with pytest.raises(GraphError):
        parse_graph(text)


@given(st.integers(2, 25), st.integers(0, 40), st.integers(1, 9), st.integers(0, 2**63))
def test_in_out_duality(n, extra, wmax, seed):
    g = gen_random_strong(n, min(n * (n - 1), 2 * (n - 1) + extra), wmax, seed)
    d = oracle_all_pairs(g)
    for s in range(0, n, max(1, n // 4)):
        assert dijkstra(g, s, "in") == [d[v][s] for v in range(n)]
