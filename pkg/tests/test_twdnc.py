from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from hublab.generators import gen_cycle, gen_partial_ktree, gen_path, gen_random_tree, gen_star
from hublab.graph import ALL_MODES, DistanceMode, Graph, GraphError, oracle_ecc_dsum
from hublab.treedec import (
    TDParseError,
    TreeDecomposition,
    balanced_separator,
    format_td,
    heuristic_td,
    parse_td,
    separator_balanced,
    validate_td,
)
from hublab.twdnc import compress_td, dnc_roundtrip

from conftest import tri

RT = DistanceMode.ROUNDTRIP


def p3_td():
    return TreeDecomposition([[0, 1], [1, 2]], [(0, 1)], 3)


def test_validate_examples():
    rep = validate_td(gen_path(3), p3_td())
    assert rep.ok and p3_td().width == 1
    rep = validate_td(gen_path(3), TreeDecomposition([[0, 1], [2]], [(0, 1)], 3))
    assert not rep.ok and any("edge" in v for v in rep.violations)
    split = TreeDecomposition([[0, 1], [1, 2], [0, 2]], [(0, 1), (1, 2)], 3)
    rep = validate_td(gen_cycle(3), split)
    assert not rep.ok and any("connected" in v or "subtree" in v for v in rep.violations)


def test_td_format_roundtrip_and_errors():
    td = p3_td()
    back = parse_td(format_td(td))
    assert back.bags == td.bags and back.tree_edges == td.tree_edges and back.n == 3
    with pytest.raises(TDParseError):
        parse_td("s td 2 2 3\nb 1 1 2\n1 2\n")
    with pytest.raises(TDParseError):
        parse_td("b 1 1 2\n")


def test_heuristic_widths():
    assert heuristic_td(gen_random_tree(40, 3)).width == 1
    assert heuristic_td(gen_cycle(5)).width == 2
    g, _ = gen_partial_ktree(80, 3, 0.5, 2)
    td = heuristic_td(g)
    assert validate_td(g, td).ok and td.width <= 3


def test_separator_examples():
    s = balanced_separator(gen_path(3), p3_td())
    assert 1 in s.C and max(len(s.A), len(s.B)) <= 2
    star = gen_star(7)
    s = balanced_separator(star, heuristic_td(star))
    assert 0 in s.C and abs(len(s.A) - len(s.B)) <= 1
    g, td = gen_partial_ktree(200, 3, 0.5, 5)
    s = balanced_separator(g, td)
    assert max(len(s.A), len(s.B)) <= 134 and separator_balanced(s, 200)


def test_base_case_triangle(triangle):
    res = dnc_roundtrip(triangle, TreeDecomposition([[0, 1, 2]], [], 3))
    assert res.vectors() == tuple(oracle_ecc_dsum(triangle, RT))


def test_path_roundtrip_formula():
    n = 90
    res = dnc_roundtrip(gen_path(n), heuristic_td(gen_path(n)), base_size=4, audit=True)
    ecc, _ = res.vectors()
    assert ecc == [2 * max(v, n - 1 - v) for v in range(n)]
    assert res.nodes > 1


def test_rejects_bad_input():
    g, td = gen_partial_ktree(30, 2, 0.5, 1)
    with pytest.raises(GraphError):
        dnc_roundtrip(g, TreeDecomposition([[0]], [], 30))
    with pytest.raises(GraphError):
        dnc_roundtrip(g, td, width_cap=1)
    with pytest.raises(GraphError):
        dnc_roundtrip(Graph(2, [(0, 1, 1)], directed=True, weighted=True), TreeDecomposition([[0, 1]], [], 2))


def test_compress_td_drops_empty_bags():
    td = TreeDecomposition([[0, 1], [], [1, 2]], [(0, 1), (1, 2)], 3)
    c = compress_td(td)
    assert [b for b in c.bags] == [[0, 1], [1, 2]] and len(c.tree_edges) == 1
    assert validate_td(gen_path(3), c).ok


@given(st.integers(5, 120), st.sampled_from([1, 2, 3]), st.floats(0.2, 1.0), st.integers(0, 2**63),
       st.booleans())
def test_dnc_matches_oracle_all_modes(n, k, p, seed, directed):
    g, td = gen_partial_ktree(n, k, p, seed, directed=directed, wmax=9 if directed else 1)
    res = dnc_roundtrip(g, td, ALL_MODES, base_size=6, audit=n <= 60, check_supergraph=n <= 40)
    for m in ALL_MODES:
        assert res.vectors(m) == tuple(oracle_ecc_dsum(g, m))
    assert res.max_depth <= 2 + math.log(n, 1.5)
