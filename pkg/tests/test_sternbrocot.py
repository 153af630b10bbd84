from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from denpres.sternbrocot import (
    FareyInterval,
    PiecewiseLinearFn,
    alternating_partial_sum,
    chain_to,
    exact_f_at_rational,
    first_stage,
    partial_sum_array,
    partial_sum_at,
    sawtooth_g,
    stage_endpoints,
    stern_brocot_stage,
    unimodular_flanks,
)
from oracles import stern_brocot_endpoints


def test_farey_interval():
    iv = FareyInterval(F(1, 3), F(1, 2))
    assert iv.mediant() == F(2, 5)
    left, right = iv.split()
    assert (left.left, left.right, right.right) == (F(1, 3), F(2, 5), F(1, 2))
    with pytest.raises(ValueError):
        FareyInterval(F(1, 3), F(2, 3))


def test_stages_match_mediant_recursion():
    for t in range(8):
        assert stage_endpoints(t) == stern_brocot_endpoints(t)
        ivs = stern_brocot_stage(t)
        assert len(ivs) == 2**t
        assert sum(iv.width() for iv in ivs) == 1


def test_sawtooth_values():
    g1 = sawtooth_g(1)
    assert g1(F(1, 2)) == F(1, 2)
    assert g1(0) == 0 and g1(1) == 0
    assert g1(F(1, 4)) == F(1, 4)
    assert g1.slopes() == [1, -1]
    g2 = sawtooth_g(2)
    assert g2(F(1, 3)) == F(1, 3) and g2(F(2, 3)) == F(1, 3) and g2(F(1, 2)) == 0
    assert g2(F(4, 3)) == F(1, 3)


def test_sawtooth_sup_norm():
    for t in range(1, 12):
        assert sawtooth_g(t).sup_norm() == F(1, t + 1)


def test_partial_sum_known_values():
    f = alternating_partial_sum(11)
    assert f(F(1, 2)) == F(1, 2)
    assert f(F(1, 3)) == 0
    assert exact_f_at_rational(F(1, 3)) == 0
    assert exact_f_at_rational(F(1, 2)) == F(1, 2)
    assert f.breakpoints == tuple(stage_endpoints(11))
    assert len(f.breakpoints) == 2**11 + 1


def test_partial_sum_equals_series():
    for T in range(1, 8):
        f = alternating_partial_sum(T)
        for x in stage_endpoints(T + 1):
            assert f(x) == sum((-1) ** (m - 1) * sawtooth_g(m)(x) for m in range(1, T + 1))
            assert partial_sum_at(x, T) == f(x)


def test_f_lands_in_lattice():
    fs = {T: alternating_partial_sum(T) for T in range(1, 9)}
    for q in range(1, 40):
        for a in range(q + 1):
            x = F(a, q)
            assert (exact_f_at_rational(x) * x.denominator).denominator == 1
            T = max(first_stage(x), 1)
            assert partial_sum_at(x, T) == exact_f_at_rational(x)
            assert partial_sum_at(x, T + 5) == exact_f_at_rational(x)
            if T in fs:
                assert fs[T](x) == exact_f_at_rational(x)


def test_float_evaluation():
    xs = np.linspace(-1, 2, 301)
    f = alternating_partial_sum(12)
    got = partial_sum_array(xs, 12)
    assert np.allclose(got, [float(f(F(x))) for x in xs], atol=1e-12)
    assert abs(partial_sum_at(0.3, 12) - float(f(F(0.3)))) < 1e-12


def test_chain_slopes():
    ch = chain_to(F(0), 6)
    assert [c.r for c in ch] == [1] * 6
    assert [c.s for c in ch] == [1, 0, 1, 0, 1, 0]
    for step, t in zip(chain_to(F(3, 10) + F(1, 10**6), 10), range(1, 11)):
        iv = step.interval
        ft = alternating_partial_sum(t)
        assert (ft(iv.right) - ft(iv.left)) / iv.width() == step.s


def test_chain_policies_differ_at_mediant():
    left = chain_to(F(1, 2), 3, "left")
    right = chain_to(F(1, 2), 3, "right")
    assert left[0].interval.right == F(1, 2)
    assert right[0].interval.left == F(1, 2)
    with pytest.raises(ValueError):
        chain_to(F(1, 2), 3, "middle")


def test_flanks():
    assert unimodular_flanks(F(2, 5), F(1, 3)) == (F(1, 3), F(1, 2))
    assert unimodular_flanks(F(1, 2), 0) == (F(0), F(1))
    lo, hi = unimodular_flanks(F(2, 5), F(1, 3), strict_lower=True)
    assert F(1, 3) < lo < F(2, 5)
    lo, hi = unimodular_flanks(F(2, 5), 0, upper_bound=F(3, 7))
    assert hi <= F(3, 7)
    with pytest.raises(ValueError):
        unimodular_flanks(F(1, 2), F(2, 3))


def test_piecewise_linear_algebra_and_json():
    a = PiecewiseLinearFn([0, F(1, 2), 1], [0, 1, 0])
    b = PiecewiseLinearFn([0, F(1, 4), 1], [0, F(1, 2), 0])
    s = a + b
    assert s(F(1, 4)) == a(F(1, 4)) + b(F(1, 4))
    assert (a - a).sup_norm() == 0
    assert PiecewiseLinearFn.from_json(s.to_json()) == s
    assert a(2) == 0
    with pytest.raises(ValueError):
        PiecewiseLinearFn([0, 1], [0, 1])
    with pytest.raises(ValueError):
        PiecewiseLinearFn([0, 1, 1], [0, 0, 0])


def test_svg_document():
    svg = alternating_partial_sum(5).to_svg()
    assert svg.startswith("<?xml")
    assert 'version="1.1"' in svg and 'width="800"' in svg and 'height="500"' in svg
    pts = svg.split('points="')[1].split('"')[0].split()
    assert len(pts) == 2**5 + 1
    xs = [float(p.split(",")[0]) for p in pts]
    assert xs[0] == 20.0 and xs[-1] == 780.0
    assert xs == sorted(xs)


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=60))
def test_f_values_have_right_denominator(x):
    assert (exact_f_at_rational(x) * x.denominator).denominator == 1


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=10**6), st.integers(1, 20))
def test_chain_slope_jumps(alpha, T):
    ch = chain_to(alpha, T)
    for a, b in zip(ch, ch[1:]):
        assert abs(b.s - a.s) >= 1
    for step in ch:
        assert step.interval.left <= alpha <= step.interval.right


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=500).filter(lambda x: 0 < x < 1),
       st.fractions(min_value=0, max_value=1, max_denominator=500).filter(lambda x: x < 1))
def test_flanks_are_unimodular(center, frac):
    lower = center * frac
    lo, hi = unimodular_flanks(center, lower)
    assert lower <= lo < center < hi
    x, y = center.numerator, center.denominator
    assert x * lo.denominator - y * lo.numerator == 1
    assert hi.numerator * y - hi.denominator * x == 1
