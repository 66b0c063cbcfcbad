from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from hublab.forest import EliminationForest, ForestError
from hublab.generators import gen_complete, gen_cycle, gen_path, gen_random_strong, gen_sparse, gen_split, gen_star
from hublab.graph import Graph, oracle_all_pairs
from hublab.labeling import (
    Flavor,
    HubLabeling,
    LabelingError,
    LabelParseError,
    build_elimination,
    build_pruned,
    build_split,
    concat,
    format_labeling,
    parse_labeling,
    tighten,
    validate,
)
from hublab.sparse import heuristic_forest

from conftest import tri


def sym(labels):
    return HubLabeling(labels, labels)


def test_validate_hand_labels():
    g = gen_path(3)
    good = sym([{0: 0, 1: 1}, {1: 0}, {1: 1, 2: 0}])
    assert validate(g, good).ok
    bad = sym([{0: 0}, {1: 0}, {1: 1, 2: 0}])
    rep = validate(g, bad)
    assert not rep.ok and (0, 2) in rep.uncovered


def test_validate_flags_undercut_entry():
    g = gen_path(3)
    L = HubLabeling([{0: 0, 1: 0}, {1: 0}, {1: 1, 2: 0}], [{0: 0, 1: 1}, {1: 0}, {1: 1, 2: 0}], Flavor.ADMISSIBLE)
    rep = validate(g, L, check_exactness=True)
    assert ("out", 0, 1) in rep.inexact


def test_pruned_examples():
    L = build_pruned(gen_star(5))
    assert L.k == 2 and validate(gen_star(5), L).ok
    one = build_pruned(Graph(1, [], directed=True, weighted=True))
    assert one.out_label(0) == [(0, 0)] and one.in_label(0) == [(0, 0)]


def test_split_examples():
    # K = {0, 1}, S = {2, 3}; edges 2-0 and 3-1
    g = Graph(4, [(0, 1), (2, 0), (3, 1)], directed=False, weighted=False)
    L = build_split(g, [0, 1])
    assert L.estimate(2, 3) == 3 and validate(g, L).ok
    g, K = gen_split(3, 4, 1.0, 1)
    L = build_split(g, K)
    assert all(d == 1 for v in range(3, 7) for h, d in L.out_label(v) if h in K)
    L = build_split(gen_complete(4), [0, 1, 2, 3])
    assert all(L.estimate(u, v) == 1 for u in range(4) for v in range(4) if u != v)


def test_split_refusals():
    with pytest.raises(LabelingError):
        build_split(gen_path(4), [0, 2])  # not a clique
    with pytest.raises(LabelingError):
        build_split(gen_path(4), [0, 1])  # 2-3 edge outside K


def test_elimination_examples():
    g = gen_path(3)
    L = build_elimination(g, EliminationForest([1, -1, 1]))
    assert L.out_label(0) == [(0, 0), (1, 1)] and L.estimate(0, 2) == 2
    L = build_elimination(gen_complete(3), EliminationForest([-1, 0, 1]))
    assert len(L.out_label(2)) == 3
    with pytest.raises(ForestError):
        build_elimination(g, EliminationForest([-1, -1, 1]))  # edge 0-1 spans two trees


def test_tighten_examples():
    g = gen_cycle(4)
    L = build_elimination(g, EliminationForest([-1, 0, 1, 2]))
    T = tighten(g, L)
    d = oracle_all_pairs(g)
    assert all(dist == d[v][h] for v in range(4) for h, dist in T.out_label(v))
    assert validate(g, T, check_exactness=True).ok
    E = build_pruned(g)
    assert format_labeling(tighten(g, E)) == format_labeling(E)
    assert all(dict(T.out_label(v))[v] == 0 for v in range(4))


def test_concat_examples():
    L = build_pruned(gen_path(3))
    C = concat([L])
    assert C.flavor is Flavor.ADMISSIBLE and C.out_hubs == L.out_hubs
    a = sym([{0: 0, 1: 5}, {1: 0}])
    b = sym([{0: 0, 1: 3}, {1: 0}])
    assert concat([a, b]).out_label(0) == [(0, 0), (1, 3)]
    a = sym([{0: 0, 1: 1}, {1: 0}, {2: 0}, {3: 0}])
    b = sym([{0: 0, 2: 1, 3: 1}, {1: 0}, {2: 0}, {3: 0}])
    assert len(concat([a, b]).out_label(0)) == 4


def test_format_roundtrip_and_errors():
    L = build_pruned(gen_path(3))
    assert format_labeling(parse_labeling(format_labeling(L))) == format_labeling(L)
    with pytest.raises(LabelParseError):
        parse_labeling("hl 2 2 exact\nout 0 1:1 0:0\nin 0 0:0\nout 1 1:0\nin 1 1:0\n")
    with pytest.raises(LabelParseError):
        parse_labeling("hl 2 1 exact\nout 0\nin 0 0:0\nout 1 1:0\nin 1 1:0\n")


@given(st.integers(2, 30), st.integers(0, 30), st.integers(0, 2**63))
def test_pruned_is_exact(n, extra, seed):
    g = gen_random_strong(n, min(n * (n - 1), 2 * (n - 1) + extra), 7, seed)
    assert validate(g, build_pruned(g), check_exactness=True).ok


@given(st.integers(1, 40), st.integers(0, 15), st.integers(0, 2**63))
def test_elimination_then_tighten(n, extra, seed):
    g = gen_sparse(n, min(extra, n * (n - 1) // 2 - (n - 1)), seed)
    L = build_elimination(g, heuristic_forest(g))
    assert validate(g, L).ok
    T = tighten(g, L)
    assert validate(g, T, check_exactness=True).ok
    assert T.k == L.k
