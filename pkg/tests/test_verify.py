from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from denpres.arith import box_error_bound, jordan_totient
from denpres.maps import gingerbreadman, shear_example1, translation
from denpres.points import Box
from denpres.verify import (
    BoxIndicator,
    IndicatorCombination,
    SampledFunction,
    alternating_block_sequence,
    block_sizes,
    blockwise_cesaro_bound,
    check_preserves_denominator,
    equidist_csv,
    equidist_statistic,
    indicator_sequence,
    measure_preservation_test,
    summation_methods,
    verdicts_csv,
)
from oracles import brute_points

BOX = Box.half_open((0, 0), (F(1, 2), F(1, 3)))


def test_equidist_small_k():
    r = equidist_statistic(BOX, 6, 2)
    assert (r.count, r.g, r.error, r.bound) == (5, 24, F(1, 24), 2)


def test_equidist_at_2310():
    r = equidist_statistic(BOX, 2310, 2)
    assert r.error == F(31, 414720)
    assert r.bound == F(1, 120)


def test_full_cube_is_exact():
    for k in range(1, 30):
        assert equidist_statistic(Box.unit_cube(2), k, 2).error == 0


def test_combination_and_closed_boxes():
    combo = IndicatorCombination((BoxIndicator(BOX, F(2)), BoxIndicator(Box.half_open((F(1, 2), 0), (1, 1)), F(-1))))
    r = equidist_statistic(combo, 12, 2)
    assert r.target_integral == 2 * F(1, 6) - F(1, 2)
    closed = equidist_statistic(Box.closed((0, 0), (F(1, 2), F(1, 3))), 6, 2)
    assert closed.bound is None
    assert closed.count == len(brute_points(6, (0, 0), (F(1, 2), F(1, 3)), (True, True), (True, True)))


def test_sampled_function():
    sf = SampledFunction(lambda u: float(u[0]) * float(u[1]), Box.unit_cube(2), resolution=50)
    r = equidist_statistic(sf, 97, 2)
    assert r.target_integral == pytest.approx(0.25, abs=1e-9)
    assert r.error < 0.02


def test_equidist_csv_header():
    text = equidist_csv([equidist_statistic(BOX, k, 2) for k in (1, 2, 3)])
    assert text.splitlines()[0] == "k,g,h,ratio,target,error,bound,within_bound"


def test_translation_verdicts():
    m = translation((F(1, 2), F(1, 3)))
    window = Box.open((0, 0), (1, 1))
    v = check_preserves_denominator(m, window, 6)
    assert v.status == "violated"
    assert v.witness["point_denominator"] == 6 and v.witness["image_denominator"] != 6
    for k in (36, 72, 108):
        assert check_preserves_denominator(m, window, k).status == "preserved"
    text = verdicts_csv([v])
    assert text.splitlines()[0] == "map,k,window,status,checked,witness"


def test_gingerbreadman_window():
    m = gingerbreadman()
    for k in range(1, 13):
        v = check_preserves_denominator(m, Box.closed((-2, -2), (2, 2)), k)
        assert v.status == "preserved"
        assert v.checked == len(brute_points(k, (-2, -2), (2, 2), (True, True), (True, True)))


def test_window_outside_domain_is_rejected():
    m = shear_example1(5)
    m.domain = Box.half_open((0, 0), (1, 1))
    with pytest.raises(ValueError):
        check_preserves_denominator(m, Box.closed((-1, -1), (1, 1)), 3)


def test_measure_probes_deterministic():
    boxes = [Box.half_open((F(1, 2), F(1, 2)), (F(3, 2), F(3, 2)))]
    a = measure_preservation_test(gingerbreadman(), boxes, 40_000, seed=7)
    b = measure_preservation_test(gingerbreadman(), boxes, 40_000, seed=7)
    assert [p.to_json() for p in a] == [p.to_json() for p in b]
    assert a[0].deviation <= 3 * a[0].sigma
    c = measure_preservation_test(gingerbreadman(), boxes, 40_000, seed=8)
    assert c[0].estimate != a[0].estimate


def test_measure_detects_non_preserving_map():
    from denpres.maps import DenMap

    dilation = DenMap(
        "dilation", 2, lambda u: (2 * u[0], u[1]), lambda u: (u[0] / 2, u[1]),
        forward_array=lambda X: X * np.array([2.0, 1.0]), inverse_array=lambda X: X * np.array([0.5, 1.0]),
    )
    p = measure_preservation_test(dilation, [Box.half_open((0, 0), (1, 1))], 40_000)[0]
    assert p.deviation > 3 * p.sigma


def test_summation_on_indicator():
    K, n = 40, 1
    box = Box.half_open((0,), (F(1, 3),))
    seq = indicator_sequence(box, n, K)
    rep = summation_methods(seq, K, n)
    assert len(rep.block) == K
    for k, avg in enumerate(rep.block, start=1):
        assert abs(avg - F(1, 3)) <= box_error_bound(k, n)
    assert abs(rep.blockwise[-1] - F(1, 3)) <= blockwise_cesaro_bound(K, n)
    assert rep.block_ends[-1] == sum(block_sizes(K, n))
    assert rep.cesaro[rep.block_ends[-1] - 1] == pytest.approx(float(rep.blockwise[-1]))


def test_alternating_blocks_separate_the_methods():
    K, n = 400, 1
    rep = summation_methods(alternating_block_sequence(K, n), K, n)
    # block averages alternate between -1 and +1, so block convergence fails
    assert set(rep.block) == {-1, 1}
    # blockwise Cesaro averages settle near -1/3 (odd k carry more points)
    tail = [float(x) for x in rep.blockwise[-50:]]
    assert max(tail) - min(tail) < 0.03
    assert np.mean(tail) == pytest.approx(-1 / 3, abs=0.02)


def test_summation_requires_enough_terms():
    with pytest.raises(ValueError):
        summation_methods([1, 2, 3], 5, 1)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 400), st.fractions(min_value=0, max_value=1, max_denominator=20).filter(lambda x: x > 0),
       st.fractions(min_value=0, max_value=1, max_denominator=20).filter(lambda x: x > 0))
def test_equidist_bound_holds(k, a, b):
    r = equidist_statistic(Box.half_open((0, 0), (a, b)), k, 2)
    assert r.error <= r.bound == box_error_bound(k, 2)
    assert r.g == jordan_totient(k, 2)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 120), st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=8), min_size=4, max_size=4))
def test_general_box_bound(k, c):
    u = (min(c[0], c[1]), min(c[2], c[3]))
    v = (max(c[0], c[1]), max(c[2], c[3]))
    r = equidist_statistic(Box.half_open(u, v), k, 2)
    assert r.error <= r.bound
