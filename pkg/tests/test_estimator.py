import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st
from statsmodels.stats.proportion import proportion_confint

from pixelgraph.construction import LazyNested, Schedule, sample_nested
from pixelgraph.errors import ResourceCap, ShapeMismatch, TrialsTooSmall
from pixelgraph.estimator import (
    EstimateResult,
    check_lemma23,
    estimate_hits,
    exact_hit_probability,
    stage_hits,
    trial_streams,
    verify_distance_bound,
    wilson_interval,
)
from pixelgraph.pixel_graph import enumerate_connected, rectangles
from pixelgraph.random_set import CellSet, HorizontalLine, cover, intersects, sample
from pixelgraph.rng import Stream

from test_random_set import cell_rect, geometric_intersects


def test_wilson_examples():
    assert wilson_interval(0, 100, 2.576)[0] == 0
    assert wilson_interval(100, 100, 2.576)[1] == 1
    lo, hi = wilson_interval(50, 100, 1.96)
    # direct formula evaluation
    z = 1.96
    center = (0.5 + z * z / 200) / (1 + z * z / 100)
    half = z * math.sqrt(0.25 / 100 + z * z / 40000) / (1 + z * z / 100)
    assert lo == pytest.approx(center - half, abs=1e-12) and hi == pytest.approx(center + half, abs=1e-12)
    assert lo == pytest.approx(0.404, abs=5e-4) and hi == pytest.approx(0.596, abs=5e-4)


@given(st.integers(1, 10_000), st.data(), st.sampled_from([1.0, 1.96, 2.576, 3.29]))
def test_wilson_matches_statsmodels(trials, data, z):
    hits = data.draw(st.integers(0, trials))
    lo, hi = wilson_interval(hits, trials, z)
    alpha = 2 * (1 - 0.5 * (1 + math.erf(z / math.sqrt(2))))
    ref_lo, ref_hi = proportion_confint(hits, trials, alpha=alpha, method="wilson")
    assert lo == pytest.approx(max(0.0, ref_lo), abs=1e-9)
    assert hi == pytest.approx(min(1.0, ref_hi), abs=1e-9)
    assert 0 <= lo <= hits / trials <= hi <= 1


def test_wilson_rejects_bad_input():
    for args in [(1, 0, 1.0), (5, 4, 1.0), (-1, 4, 1.0), (1, 4, 0.0)]:
        with pytest.raises(ValueError):
            wilson_interval(*args)


def brute_exact(cells, m1, ends_fixed=False):
    graphs = list(enumerate_connected(m1, 1))
    if ends_fixed:
        graphs = [g for g in graphs if g.levels[0] == 1 and g.levels[-1] == 1]
    hits = sum(geometric_intersects(cells, g) for g in graphs)
    return F(hits, len(graphs))


def product_formula(cells, m1):
    # the (m1, 1) hit event fails iff every column picks a missing row
    miss = F(1)
    for k in range(2**m1):
        x_lo, x_hi = F(k, 2**m1), F(k + 1, 2**m1)
        free = 0
        for v in (1, 2):
            rect_y = (F(v - 1, 2), F(v, 2))
            touched = any(
                cell_rect(c, r, cells.depth).x_lo <= x_hi and x_lo <= cell_rect(c, r, cells.depth).x_hi
                and cell_rect(c, r, cells.depth).y_lo <= rect_y[1] and rect_y[0] <= cell_rect(c, r, cells.depth).y_hi
                for c, r in cells.cells
            )
            free += not touched
        miss *= F(free, 2)
    return 1 - miss


def test_exact_examples():
    c = cover(HorizontalLine(F(1, 3)), 3)
    assert exact_hit_probability(c, 1) == F(3, 4)
    assert exact_hit_probability(c, 2) == F(15, 16)
    for m1 in (1, 2, 3):
        assert exact_hit_probability(CellSet.full(0), m1) == 1


@given(st.integers(0, 4), st.sets(st.tuples(st.integers(1, 16), st.integers(1, 16)), max_size=5), st.integers(1, 2), st.booleans())
def test_exact_matches_brute_force(d, raw, m1, ends_fixed):
    side = 2**d
    cells = CellSet(d, frozenset((min(c, side), min(r, side)) for c, r in raw))
    got = exact_hit_probability(cells, m1, ends_fixed)
    assert got == brute_exact(cells, m1, ends_fixed)
    if not ends_fixed:
        assert got == product_formula(cells, m1)


def test_exact_m1_3_and_4_match_product_formula():
    for seed in range(5):
        cells = cover(sample("cantor-shift", Stream(seed)), 5)
        for m1 in (3, 4):
            assert exact_hit_probability(cells, m1) == product_formula(cells, m1)


def test_exact_cap(monkeypatch):
    monkeypatch.setenv("PIXELGRAPH_CAP", "1000")
    with pytest.raises(ResourceCap):
        exact_hit_probability(CellSet.full(0), 4)


def test_lemma23_examples():
    line = HorizontalLine(F(1, 3))
    r = check_lemma23(line, 2, 3, ends_fixed=False)
    assert (r.i_m1, r.bound, r.exact_p, r.satisfied) == (4, F(15, 16), F(15, 16), True)
    r = check_lemma23(line, 1, 3, ends_fixed=True)
    assert r.bound == 0 and r.satisfied
    full = sample("percolation:1:3", Stream(0))
    for m1 in (1, 2, 3):
        assert check_lemma23(full, m1, 3).exact_p == 1


def test_lemma23_holds_across_models(wiggle_heights):
    specs = ["horizontal:1/3", "horizontal:1/2", "cantor-shift", "percolation:0.6:5", f"function-graph:{wiggle_heights}"]
    for spec in specs:
        for seed in range(100):
            s = sample(spec, Stream(seed))
            for m1 in range(1, 5):
                for ends in (False, True):
                    rep = check_lemma23(s, m1, 5, ends)
                    assert rep.satisfied, (spec, seed, m1, ends, rep)


@given(st.sampled_from([(2, 4), (2, 4, 6), (1, 3, 5, 7), (1, 2), (3, 4)]), st.integers(0, 2**62),
       st.sampled_from(["horizontal:1/3", "cantor-shift", "percolation:0.6:6"]))
def test_lazy_stage_hits_match_materialized_intersects(ms, seed, spec):
    schedule = Schedule(ms)
    set_rng, graph_rng = trial_streams(seed, 0)
    cells = cover(sample(spec, set_rng), 6)
    seq = sample_nested(schedule, len(ms), graph_rng)
    lazy = LazyNested(schedule, len(ms), graph_rng)
    assert stage_hits(cells, lazy) == [intersects(cells, g) for g in seq.graphs]


def test_estimate_matches_exact_small_instance():
    r = estimate_hits("horizontal:1/3", Schedule((2,)), 1, 10_000, 3, seed=1)
    p = 15 / 16
    sigma = math.sqrt(p * (1 - p) / r.trials)
    assert abs(r.hits_per_stage[0] / r.trials - p) <= 4 * sigma
    lo, hi = r.ci_per_stage[0]
    assert lo <= p <= hi


def test_estimate_hits_nested_and_full_square():
    r = estimate_hits("cantor-shift", Schedule((2, 4, 6)), 3, 500, 6, seed=3)
    h = r.hits_per_stage
    assert h[0] >= h[1] >= h[2]
    full = estimate_hits("percolation:1.0:6", Schedule((2, 4)), 2, 200, 6)
    assert all(p == 1 for p in full.p_hat_per_stage)


def test_estimate_hits_errors():
    with pytest.raises(TrialsTooSmall):
        estimate_hits("horizontal:1/3", Schedule((2,)), 1, 99, 3)
    with pytest.raises(ShapeMismatch):
        estimate_hits("horizontal:1/3", Schedule((2, 3, 4)), 3, 100, 2)


def test_estimate_deterministic_across_workers():
    args = ("percolation:0.6:6", Schedule((2, 4, 6)), 3, 400, 6)
    a = estimate_hits(*args, seed=9, workers=1)
    b = estimate_hits(*args, seed=9, workers=3)
    assert a == b and a.to_json() == b.to_json()


def test_estimate_json_round_trip():
    r = estimate_hits("horizontal:1/3", Schedule((2, 4)), 2, 300, 4, seed=2, epsilon=0.05)
    obj = r.to_json()
    assert list(obj) == ["trials", "epsilon", "depth", "stages"]
    assert list(obj["stages"][0]) == ["n", "m", "hits", "p_hat", "ci"]
    assert EstimateResult.from_json(obj).to_json() == obj


def test_distance_bound_examples():
    full = sample("percolation:1:6", Stream(0))
    seq = sample_nested(Schedule((2, 4, 6)), 3, Stream(1))
    assert verify_distance_bound(full, seq, 6)
    line = HorizontalLine(F(1, 3))
    for seed in range(300):
        assert verify_distance_bound(line, sample_nested(Schedule((2, 4, 6)), 3, Stream(seed)), 6)
    with pytest.raises(ShapeMismatch):
        verify_distance_bound(full, seq, 2)


def test_distance_bound_vacuous_when_no_stage_hits():
    from pixelgraph.construction import NestedSequence
    from pixelgraph.pixel_graph import new_graph

    seq = NestedSequence((new_graph(1, 1, [2, 2]), new_graph(2, 2, [4, 4, 4, 4])), 0, Schedule((1, 2)))
    floor = HorizontalLine(F(0))
    assert not any(intersects(cover(floor, 4), g) for g in seq.graphs)
    assert verify_distance_bound(floor, seq, 4)
