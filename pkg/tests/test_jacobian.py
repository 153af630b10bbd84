from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from denpres.jacobian import (
    UnimodularSimplex,
    convex_decomposition_check,
    difference_map,
    difference_matrix,
    jacobian_limit_test,
    residual_is_zero,
    simplex_sequence,
    standard_simplex,
)
from denpres.linalg import det, inverse, is_integer_matrix, matmul
from denpres.maps import gingerbreadman, map_from_spec, shear_example1, translation, unimodular_affine
from denpres.points import RationalPoint


def test_linalg_basics():
    A = [[2, 1], [1, 1]]
    assert det(A) == 1
    assert matmul(A, inverse(A)) == [[1, 0], [0, 1]]
    assert det([[F(1, 2), 0], [0, F(2, 3)]]) == F(1, 3)
    assert det([[1, 2], [2, 4]]) == 0
    with pytest.raises(ZeroDivisionError):
        inverse([[1, 2], [2, 4]])


def test_simplex_validation():
    with pytest.raises(ValueError):
        UnimodularSimplex((RationalPoint((0, 0), 1), RationalPoint((2, 0), 1), RationalPoint((0, 1), 1)))
    s = standard_simplex(2)
    assert s.contains((F(1, 3), F(1, 3)))
    assert not s.contains((F(2, 3), F(2, 3)))


def test_sequence_shrinks_and_stays_unimodular():
    u = (F(1, 3) + F(1, 10**4), F(1, 5))
    seq = simplex_sequence(u, 40)
    assert seq[0] == standard_simplex(2)
    assert len(seq) == 41
    for s in seq:
        assert abs(det(s.matrix)) == 1
        assert s.contains(u)
    diams = [s.diameter_sq() for s in seq]
    assert all(b <= a for a, b in zip(diams, diams[1:]))
    assert diams[-1] < F(1, 10**5)
    one = simplex_sequence((F(2, 7),), 10)
    assert all(s.contains((F(2, 7),)) for s in one)


def test_start_requires_interior_point():
    with pytest.raises(ValueError):
        simplex_sequence((F(0), F(1, 2)), 5)


def test_difference_map_examples():
    m = gingerbreadman()
    trace = jacobian_limit_test(m, (F(1, 3), F(1, 5)), 20)
    assert trace.verdict == "converged"
    assert trace.limit == [[1, -1], [1, 0]]
    A = [[2, 1], [1, 1]]
    trace = jacobian_limit_test(unimodular_affine(A, [3, -1]), (F(1, 7), F(2, 9)), 8)
    assert trace.limit == A and trace.stable_from == 0
    trace = jacobian_limit_test(translation((F(1, 2), F(1, 3))), (F(1, 7), F(2, 9)), 8)
    assert trace.limit == [[1, 0], [0, 1]]


def test_b_integer_for_preserving_maps():
    for m in (gingerbreadman(), unimodular_affine([[1, 1], [0, 1]], [0, 2]), shear_example1(12)):
        for s in simplex_sequence((F(2, 7) + F(1, 10**5), F(3, 11)), 15):
            dm = difference_map(m, s)
            assert dm.b_is_integer
            assert dm.denominators_match
            assert dm.B[-1] == [0] * 2 + [1]


def test_b_not_integer_for_translation():
    m = translation((F(1, 2), F(1, 3)))
    dm = difference_map(m, standard_simplex(2))
    assert not dm.b_is_integer
    assert dm.a_is_integer


def test_shear_example1_identity_near_zero():
    m = map_from_spec("shear-example1:40")
    for u in [(F(1, 1000), F(1, 1000)), (F(1, 10**5), F(1, 3))]:
        trace = jacobian_limit_test(m, u, 25)
        assert trace.verdict == "converged"
        assert trace.limit == [[1, 0], [0, 1]]


def test_shear_example2_diverges():
    m = map_from_spec("shear-example2")
    trace = jacobian_limit_test(m, (F(3, 10) + F(1, 10**6), F(1, 7)), 30)
    assert trace.verdict == "diverged"
    assert all(s.b_is_integer for s in trace.steps)


def test_trace_serialization():
    trace = jacobian_limit_test(gingerbreadman(), (F(1, 3), F(1, 5)), 6)
    lines = trace.to_csv().splitlines()
    assert lines[0] == "depth,a11,a12,a21,a22,a_is_integer,b_is_integer,det"
    assert len(lines) == 8
    doc = trace.to_json()
    assert doc["verdict"] == "converged" and len(doc["steps"]) == 7
    with pytest.raises(ValueError):
        jacobian_limit_test(gingerbreadman(), (F(1, 3), F(1, 5)), 2)


def test_convex_decomposition_interior():
    m = gingerbreadman()
    verts = [(1, 0), (-1, 0), (0, 1)]
    assert residual_is_zero(convex_decomposition_check(m, verts, (0, F(1, 3))))
    with pytest.raises(ValueError):
        convex_decomposition_check(m, verts, (1, 1))


def test_convex_decomposition_on_a_face():
    # With a zero weight the identity needs F affine on that face; the kink
    # of |x| at u = (0, 0) breaks it.
    m = gingerbreadman()
    verts = [(1, 0), (-1, 0), (0, 1)]
    assert convex_decomposition_check(m, verts, (0, 0)) == [[0, 1], [0, 0]]
    assert residual_is_zero(convex_decomposition_check(m, [(0, 0), (1, 0), (0, 1)], (F(1, 2), 0)))


nonzero = st.fractions(min_value=-2, max_value=2, max_denominator=9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(nonzero, nonzero), min_size=3, max_size=3),
       st.lists(st.integers(1, 5), min_size=3, max_size=3),
       st.sampled_from(["gingerbreadman", "shear-example2", "translation:1/2,1/3", "affine:2,1;1,1"]))
def test_decomposition_residual_zero(verts, weights, spec):
    D = [[verts[1][0] - verts[0][0], verts[2][0] - verts[0][0]], [verts[1][1] - verts[0][1], verts[2][1] - verts[0][1]]]
    if det(D) == 0:
        return
    total = sum(weights)
    u = tuple(sum(F(w, total) * v[i] for w, v in zip(weights, verts)) for i in range(2))
    assert residual_is_zero(convex_decomposition_check(map_from_spec(spec), verts, u))


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=200).filter(lambda x: 0 < x < 1),
       st.fractions(min_value=0, max_value=1, max_denominator=200).filter(lambda x: 0 < x < 1))
def test_affine_difference_matrix_is_linear_part(x, y):
    if x + y >= 1:
        return
    A = [[1, 2], [1, 3]]
    m = unimodular_affine(A, [0, 1])
    for s in simplex_sequence((x, y), 6):
        assert difference_matrix(m, s.coords) == A
        assert is_integer_matrix(difference_map(m, s).B)


def test_b_not_integer_for_half_shift():
    m = translation((F(1, 2), 0))
    seq = simplex_sequence((F(2, 7), F(1, 5)), 10)
    assert all(not difference_map(m, s).b_is_integer for s in seq)
    assert all(difference_map(m, s).A == [[1, 0], [0, 1]] for s in seq)
