"""Exact tools for rational points sorted by denominator and for
denominator-preserving maps."""

__version__ = "0.1.0"

from .arith import (
    box_error_bound,
    closed_cube_totient,
    cumulative_profile,
    jordan_totient,
    m_ratio,
    moebius,
    p_adic_valuation,
    radical,
)
from .points import (
    Box,
    RationalPoint,
    box_count_h,
    denominator,
    denominator_sorted_enumeration,
    enumerate_by_denominator,
    star_discrepancy,
)
from .sternbrocot import (
    FareyInterval,
    PiecewiseLinearFn,
    alternating_partial_sum,
    chain_to,
    sawtooth_g,
    stern_brocot_stage,
    unimodular_flanks,
)
from .maps import DenMap, gingerbreadman, map_from_spec, translation, unimodular_affine
from .jacobian import UnimodularSimplex, convex_decomposition_check, jacobian_limit_test, simplex_sequence
from .verify import check_preserves_denominator, equidist_statistic, measure_preservation_test, summation_methods

