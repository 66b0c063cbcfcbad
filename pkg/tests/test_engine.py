from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, strategies as st

from hublab.engine import (
    BiEngine,
    CapExceededError,
    Engine,
    Side,
    SimpleEngine,
    WitnessTuple,
    build_engine,
    build_uniform_engine,
    uniform_labels,
)
from hublab.forest import EliminationForest
from hublab.generators import gen_path, gen_random_strong, gen_sparse, gen_star
from hublab.graph import ALL_MODES, DistanceMode, Graph, ecc_dsum_from_matrix, mode_value, oracle_all_pairs, oracle_ecc_dsum
from hublab.labeling import HubLabeling, build_elimination, build_pruned
from hublab.sparse import heuristic_forest

from conftest import tri

S, RT = DistanceMode.SOURCE, DistanceMode.ROUNDTRIP


def full_labels(g: Graph) -> HubLabeling:
    d = oracle_all_pairs(g)
    return HubLabeling([{h: d[v][h] for h in range(g.n)} for v in range(g.n)],
                       [{h: d[h][v] for h in range(g.n)} for v in range(g.n)])


def p3_labels() -> HubLabeling:
    lab = [{0: 0, 1: 1}, {1: 0}, {1: 1, 2: 0}]
    return HubLabeling(lab, lab)


def test_bank_layout():
    E = Engine(gen_path(3), p3_labels())
    assert E.bank_sizes()[(2, 2)] == 2
    for s in range(2):
        for t in range(2):
            assert E.points(2, 2, s, t).shape[0] == 2
    one = Engine(None, HubLabeling([{0: 0}], [{0: 0}]))
    assert one.points(1, 1, 0, 0).shape == (1, 3)


def test_cap_refusal():
    lab = [{h: 1 for h in range(13)} | {v: 0} for v in range(13)]
    with pytest.raises(CapExceededError, match="2\\^O\\(k\\)"):
        Engine(None, HubLabeling(lab, lab))


def test_triangle_examples(triangle):
    E = build_engine(triangle, full_labels(triangle))
    assert E.ecc(0, S) == (3, 2)
    assert E.ecc(0, RT)[0] == 6
    assert E.dsum(0, S) == 4 and E.dsum(0, RT) == 12
    assert E.diameter(RT)[0] == E.radius(RT)[0] == 6


def test_stats_on_p3_and_star():
    E = Engine(gen_path(3), p3_labels())
    assert E.diameter(S)[0] == 2 and E.radius(S) == (1, 1)
    assert E.median(S) == (2, [1]) and E.wiener(S) == 8
    star = gen_star(5)
    assert Engine(star, build_pruned(star)).median(S)[1] == [0]


def _least(hubs, cost):
    return min(hubs, key=lambda h: (cost(h), h))


def test_boxes_for_partition_by_witness():
    g = gen_random_strong(14, 32, 6, 3)
    L = build_pruned(g)
    d = oracle_all_pairs(g)
    E = Engine(g, L, cap=20)
    for u in range(0, g.n, 3):
        expected = Counter()
        for v in range(g.n):
            X = tuple(sorted(set(L.out_hubs[u]) & set(L.in_hubs[v])))
            Y = tuple(sorted(set(L.in_hubs[u]) & set(L.out_hubs[v])))
            if not X or not Y:
                continue
            x = _least(X, lambda h: L.estimate(u, h) + L.estimate(h, v))
            y = _least(Y, lambda h: L.estimate(v, h) + L.estimate(h, u))
            side = Side.LE if d[u][v] <= d[v][u] else Side.GT
            phi = WitnessTuple(len(L.in_hubs[v]), len(L.out_hubs[v]), X, Y, x, y)
            expected[(phi, side)] += 1
        for (phi, side), want in expected.items():
            cls = E.classes[(phi.i, phi.j)]
            got = sum(cls.tree(*key).count_query(box) for key, box in E.boxes_for(u, phi, side))
            assert got == want


@given(st.integers(2, 28), st.integers(0, 20), st.integers(1, 9), st.integers(0, 2**63),
       st.sampled_from(["grouped", "pruned", "exhaustive"]))
def test_engine_matches_oracle(n, extra, wmax, seed, strategy):
    g = gen_random_strong(n, min(n * (n - 1), 2 * (n - 1) + extra), wmax, seed)
    L = build_pruned(g)
    E = Engine(g, L, cap=32, strategy=strategy)
    d = oracle_all_pairs(g)
    for m in ALL_MODES:
        ecc, dsum = ecc_dsum_from_matrix(d, m)
        assert E.all_ecc(m) == ecc
        assert E.all_dsum(m) == dsum
        for u in range(n):
            e, w = E.ecc(u, m)
            assert mode_value(d[u][w], d[w][u], m) == e
    assert all(E.partition_count(u) == n for u in range(n))


@given(st.integers(2, 20), st.integers(0, 2**63))
def test_partition_audit(n, seed):
    g = gen_random_strong(n, min(n * (n - 1), 2 * (n - 1) + n // 2), 5, seed)
    E = Engine(g, build_pruned(g), cap=32)
    assert all(E.audit_partition(u) == n for u in range(n))


@given(st.integers(2, 30), st.integers(0, 10), st.integers(0, 2**63))
def test_admissible_labels_follow_estimates(n, extra, seed):
    g = gen_sparse(n, min(extra, n * (n - 1) // 2 - (n - 1)), seed)
    L = build_elimination(g, heuristic_forest(g))
    est = [[L.estimate(u, v) for v in range(n)] for u in range(n)]
    E = Engine(None, L, cap=32)
    for m in ALL_MODES:
        ecc, dsum = ecc_dsum_from_matrix(est, m)
        assert E.all_ecc(m) == ecc and E.all_dsum(m) == dsum


@given(st.integers(1, 40), st.integers(0, 10), st.integers(0, 2**63), st.integers(1, 3))
def test_simple_engine_sums(n, extra, seed, alpha):
    g = gen_sparse(n, min(extra, n * (n - 1) // 2 - (n - 1)), seed)
    L = build_pruned(g)
    d = oracle_all_pairs(g)
    E = SimpleEngine(L, cap=64, alpha=alpha)
    for u in range(n):
        r = E.query(u)
        assert r.ecc == max(d[u]) and r.count == n
        assert r.powers[1:] == [sum(x**a for x in d[u]) for a in range(1, alpha + 1)]


def test_uniform_engine_examples(triangle):
    to_h, from_h = uniform_labels(triangle, [0, 1, 2])
    B = build_uniform_engine([0, 1, 2], [0, 1, 2], [0, 1, 2], to_h, from_h, ALL_MODES)
    for m in ALL_MODES:
        ecc, dsum = oracle_ecc_dsum(triangle, m)
        assert [B.ecc_bi(a, m)[0] for a in range(3)] == ecc
        assert [B.dsum_bi(a, m) for a in range(3)] == dsum
    to_h, from_h = uniform_labels(triangle, [0])
    empty = BiEngine([0], [0], [], to_h, from_h)
    assert empty.ecc_bi(0)[0] is None


def test_uniform_engine_single_hub():
    g = gen_star(6)
    to_h, from_h = uniform_labels(g, [0])
    B = BiEngine([0], [1, 2], [3, 4, 5], to_h, from_h, [S])
    assert B.ecc_bi(1, S)[0] == 2 and B.dsum_bi(1, S) == 6


def test_uniform_engine_refuses_ragged_labels(triangle):
    to_h, from_h = uniform_labels(triangle, [0, 1])
    to_h[2] = to_h[2][:1]
    with pytest.raises(Exception, match="uniform"):
        BiEngine([0, 1], [0], [2], to_h, from_h)


def test_threads_give_same_answers():
    g = gen_random_strong(40, 90, 5, 1)
    L = build_pruned(g)
    one = Engine(g, L, cap=32).all_dsum(RT)
    four = Engine(g, L, cap=32, threads=4).all_dsum(RT)
    assert one == four
