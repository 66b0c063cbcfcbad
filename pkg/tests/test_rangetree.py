from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hublab.rangetree import (
    FULL,
    Box,
    Interval,
    RangeTree,
    RangeTreeError,
    SingularityError,
    scan_aggregate,
)


def line():
    return RangeTree([[1], [5], [9]], [[10], [20], [30]], owners=[1, 5, 9], isw_channel=0)


def test_one_dimensional_examples():
    t = line()
    assert t.max_query(Box([Interval(2, 9)])) == (30, 9)
    full = Box([FULL])
    assert t.sum_query(full) == 60 and t.count_query(full) == 3
    half = Box([Interval(1, 5, hi_open=True)])
    assert t.sum_query(half) == 10 and t.count_query(half) == 1
    assert t.max_query(Box([Interval(10, 20)])) is None
    assert t.count_query(Box([Interval(6, 8)])) == 0


def test_empty_tree_is_neutral():
    t = RangeTree([], [], dim=2, n_channels=1)
    agg = t.aggregate(Box.full(2))
    assert (agg.count, agg.sums, agg.maxes) == (0, [0], [None])


def test_diagonal_full_count():
    t = RangeTree([[i, i] for i in range(17)], [[1]] * 17)
    assert t.count_query(Box.full(2)) == 17


def test_max_ties_prefer_smaller_owner():
    t = RangeTree([[0], [1]], [[7], [7]], owners=[4, 2])
    assert t.max_query(Box([FULL])) == (7, 2)


def test_refusals():
    with pytest.raises(RangeTreeError):
        RangeTree([[1], [1, 2]], [[0], [0]])
    with pytest.raises(RangeTreeError):
        line().max_query(Box([FULL]), channel=3)


def test_isw_examples():
    t = RangeTree([[0], [1]], [[1], [2]], isw_channel=0)
    assert t.isw_query(Box([FULL]), 1) == Fraction(5, 6)
    assert t.isw_query(Box([Interval(5, 6)]), 1) == 0
    bad = RangeTree([[0]], [[-1]], isw_channel=0)
    with pytest.raises(SingularityError):
        bad.isw_query(Box([FULL]), 1)


def test_isw_many_matches_single():
    t = RangeTree([[i] for i in range(30)], [[i % 7 + 1, i] for i in range(30)], isw_channel=(0, 1))
    box = Box([Interval(3, 25)])
    got = t.isw_many(box, [(2, 0), (5, 1)], positive=True)
    assert got == [t.isw_query(box, 2, 0), t.isw_query(box, 5, 1)]


def test_big_channel_values_stay_exact():
    big = (1 << 62) - 1
    t = RangeTree([[0], [1], [2]], [[big], [big], [big]])
    assert t.sum_query(Box([FULL])) == 3 * big


coord = st.integers(-6, 6)


@st.composite
def boxes(draw, d):
    ivs = []
    for _ in range(d):
        kind = draw(st.sampled_from(["full", "point", "range"]))
        if kind == "full":
            ivs.append(FULL)
        elif kind == "point":
            ivs.append(Interval.point(draw(coord)))
        else:
            a, b = sorted((draw(coord), draw(coord)))
            ivs.append(Interval(draw(st.sampled_from([a, None])), draw(st.sampled_from([b, None])),
                                draw(st.booleans()), draw(st.booleans())))
    return Box(ivs)


@given(st.data(), st.integers(1, 4), st.integers(0, 60), st.sampled_from([1, 3, 12]))
def test_matches_linear_scan(data, d, m, leaf):
    pts = data.draw(st.lists(st.lists(coord, min_size=d, max_size=d), min_size=m, max_size=m))
    ch = data.draw(st.lists(st.lists(st.integers(-9, 9), min_size=2, max_size=2), min_size=m, max_size=m))
    ch = [[a, abs(b) + 1] for a, b in ch]
    owners = list(range(m))
    t = RangeTree(pts, ch, owners, isw_channel=1, leaf_size=leaf, dim=d, n_channels=2)
    for _ in range(5):
        box = data.draw(boxes(d))
        got, want = t.aggregate(box), scan_aggregate(pts, ch, owners, box, 2)
        assert (got.count, got.sums, got.maxes) == (want.count, want.sums, want.maxes)
        assert t.count_query(box) == want.count
        idx = sorted(np.concatenate(t.canonical_nodes(box)).tolist()) if want.count else []
        assert idx == t.linear_scan(box).tolist()
        assert t.isw_query(box, 1) == sum((Fraction(1, 1 + ch[i][1]) for i in idx), Fraction(0))
