import itertools
import json
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pixelgraph.errors import Disconnected, LengthMismatch, LevelOutOfRange, ResourceCap, ShapeMismatch
from pixelgraph.pixel_graph import (
    DyadicInterval,
    PixelGraph,
    Rect,
    count_connected,
    enumerate_connected,
    is_refinement,
    new_graph,
    rectangles,
    value_interval,
)


def brute_connected(m, n):
    top = 2**n
    return [
        levels
        for levels in itertools.product(range(1, top + 1), repeat=2**m)
        if all(abs(a - b) <= 1 for a, b in zip(levels, levels[1:]))
    ]


@st.composite
def graphs(draw, max_m=4, max_n=3):
    m = draw(st.integers(0, max_m))
    n = draw(st.integers(1, max_n))
    top = 2**n
    levels = [draw(st.integers(1, top))]
    for _ in range(2**m - 1):
        prev = levels[-1]
        levels.append(draw(st.integers(max(1, prev - 1), min(top, prev + 1))))
    return new_graph(m, n, levels)


def test_new_graph_examples():
    assert new_graph(1, 1, [1, 2]).levels == (1, 2)
    assert new_graph(2, 1, [2, 2, 1, 1]).levels == (2, 2, 1, 1)
    with pytest.raises(Disconnected):
        new_graph(1, 2, [1, 3])


@pytest.mark.parametrize(
    "m, n, levels, exc",
    [
        (1, 1, [1], LengthMismatch),
        (1, 1, [1, 2, 1], LengthMismatch),
        (1, 1, [0, 1], LevelOutOfRange),
        (1, 1, [2, 3], LevelOutOfRange),
        (2, 3, [1, 2, 4, 3], Disconnected),
    ],
)
def test_new_graph_rejects(m, n, levels, exc):
    with pytest.raises(exc):
        new_graph(m, n, levels)


def test_rectangles_examples():
    assert rectangles(new_graph(0, 1, [2])) == [Rect(F(0), F(1), F(1, 2), F(1))]
    assert rectangles(new_graph(1, 1, [1, 2])) == [
        Rect(F(0), F(1, 2), F(0), F(1, 2)),
        Rect(F(1, 2), F(1), F(1, 2), F(1)),
    ]
    assert rectangles(new_graph(1, 2, [2, 3])) == [
        Rect(F(0), F(1, 2), F(1, 4), F(1, 2)),
        Rect(F(1, 2), F(1), F(1, 2), F(3, 4)),
    ]


@given(graphs())
def test_consecutive_rectangles_touch(g):
    rects = rectangles(g)
    assert len(rects) == 2**g.m
    assert all(a.intersects(b) for a, b in zip(rects, rects[1:]))


def test_count_examples():
    assert count_connected(2, 1) == 16
    assert count_connected(1, 2) == 10
    assert count_connected(0, 3) == 8


@pytest.mark.parametrize("m, n", [(m, n) for m in range(4) for n in range(1, 4) if (2**n) ** (2**m) <= 10**5])
def test_count_matches_brute_force(m, n):
    assert count_connected(m, n) == len(brute_connected(m, n))


@pytest.mark.parametrize("m", range(0, 9))
def test_count_n1_is_all_assignments(m):
    assert count_connected(m, 1) == 2 ** (2**m)


def test_count_vector_path_matches_matrix_path():
    # 2^7 rows takes the vector iteration branch
    direct = count_connected(3, 7)
    v = [1] * 128
    for _ in range(7):
        v = [(v[a - 1] if a else 0) + v[a] + (v[a + 1] if a < 127 else 0) for a in range(128)]
    assert direct == sum(v)


def test_count_is_exact_big_integer():
    assert count_connected(12, 1) == 2**4096


def test_count_cap(monkeypatch):
    monkeypatch.setenv("PIXELGRAPH_CAP", "16")
    with pytest.raises(ResourceCap):
        count_connected(5, 1)
    with pytest.raises(ResourceCap):
        count_connected(1, 5)


def test_enumerate_examples():
    assert [g.levels for g in enumerate_connected(1, 1)] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert [g.levels for g in enumerate_connected(0, 2)] == [(1,), (2,), (3,), (4,)]
    assert len(list(enumerate_connected(1, 2))) == 10


@pytest.mark.parametrize("m, n", [(2, 2), (3, 1), (2, 3), (3, 2)])
def test_enumerate_is_lexicographic_and_complete(m, n):
    got = [g.levels for g in enumerate_connected(m, n)]
    assert got == sorted(set(got))
    assert len(got) == count_connected(m, n)
    if (2**n) ** (2**m) <= 10**5:
        assert got == brute_connected(m, n)


def test_enumerate_cap(monkeypatch):
    monkeypatch.setenv("PIXELGRAPH_CAP", "100")
    with pytest.raises(ResourceCap):
        enumerate_connected(3, 1)


def test_value_interval_examples():
    g = new_graph(1, 1, [1, 2])
    assert value_interval(g, F(1, 4)) == (0, F(1, 2))
    assert value_interval(g, F(1, 2)) == (0, 1)
    assert value_interval(new_graph(2, 2, [2, 2, 3, 3]), "0.6") == (F(1, 2), F(3, 4))


def section_oracle(g, x):
    hits = [r for r in rectangles(g) if r.x_lo <= x <= r.x_hi]
    return min(r.y_lo for r in hits), max(r.y_hi for r in hits)


@given(graphs(), st.integers(0, 64))
def test_value_interval_matches_rectangle_section(g, k):
    x = F(k, 64)
    lo, hi = value_interval(g, x)
    assert (lo, hi) == section_oracle(g, x)
    assert hi - lo <= F(2, 2**g.n)
    if (x * 2**g.m).denominator != 1:
        assert hi - lo == F(1, 2**g.n)


def test_value_interval_outside():
    with pytest.raises(ValueError):
        value_interval(new_graph(0, 1, [1]), F(3, 2))


def test_is_refinement_examples():
    c = new_graph(1, 1, [1, 2])
    assert is_refinement(c, new_graph(2, 2, [1, 2, 3, 4]))
    assert not is_refinement(c, new_graph(2, 2, [1, 2, 2, 3]))
    assert is_refinement(new_graph(1, 1, [1, 1]), new_graph(2, 2, [1, 1, 1, 1]))
    with pytest.raises(ShapeMismatch):
        is_refinement(c, new_graph(1, 2, [1, 2]))
    with pytest.raises(ShapeMismatch):
        is_refinement(c, new_graph(2, 3, [1, 2, 3, 4]))


@given(graphs(max_m=2, max_n=2), st.integers(1, 2), st.data())
def test_is_refinement_agrees_with_geometry(coarse, extra, data):
    m = coarse.m + extra
    levels = [data.draw(st.integers(1, 2 ** (coarse.n + 1))) for _ in range(2**m)]
    # keep it connected by clamping steps
    for i in range(1, len(levels)):
        levels[i] = max(levels[i - 1] - 1, min(levels[i - 1] + 1, levels[i]))
    fine = new_graph(m, coarse.n + 1, levels)
    big = rectangles(coarse)
    geometric = all(any(b.contains(r) for b in big) for r in rectangles(fine))
    assert is_refinement(coarse, fine) == geometric


def test_json_round_trip():
    g = new_graph(2, 2, [2, 2, 3, 3])
    text = g.dumps()
    assert json.loads(text) == {"m": 2, "n": 2, "levels": [2, 2, 3, 3]}
    assert PixelGraph.from_json(json.loads(text)) == g


def test_dyadic_interval():
    iv = DyadicInterval(2, 3)
    assert (iv.lo, iv.hi) == (F(1, 2), F(3, 4))
    assert iv.contains_closed(F(1, 2)) and not iv.contains_open(F(1, 2))
    assert iv.contains_open(F(5, 8))
    with pytest.raises(ValueError):
        DyadicInterval(1, 3)
