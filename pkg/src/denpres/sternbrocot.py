"""Stern-Brocot stages, exact piecewise-linear functions, and the sawtooth series.

``g_t`` vanishes at every stage-(t-1) endpoint, equals ``1/den(u)`` at each
mediant ``u`` inserted at stage t, and is affine on stage-t intervals.
``f_T = sum_{m<=T} (-1)^(m-1) g_m`` converges uniformly to a continuous,
nowhere differentiable ``f`` whose values at rationals are computed exactly
by a finite descent of the tree.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np


@dataclass(frozen=True)
class FareyInterval:
    left: Fraction
    right: Fraction

    def __post_init__(self):
        a, b = Fraction(self.left), Fraction(self.right)
        object.__setattr__(self, "left", a)
        object.__setattr__(self, "right", b)
        if not a < b:
            raise ValueError(f"empty interval [{a}, {b}]")
        if self.determinant != 1:
            raise ValueError(f"[{a}, {b}] is not unimodular")

    @property
    def determinant(self) -> int:
        return self.left.denominator * self.right.numerator - self.left.numerator * self.right.denominator

    def mediant(self) -> Fraction:
        return Fraction(
            self.left.numerator + self.right.numerator,
            self.left.denominator + self.right.denominator,
        )

    def split(self) -> tuple["FareyInterval", "FareyInterval"]:
        m = self.mediant()
        return FareyInterval(self.left, m), FareyInterval(m, self.right)

    def width(self) -> Fraction:
        return self.right - self.left

    def __contains__(self, x) -> bool:
        return self.left <= x <= self.right

    def __str__(self):
        return f"[{self.left}, {self.right}]"


def stern_brocot_stage(t: int) -> list[FareyInterval]:
    """The 2^t intervals of stage ``t``, left to right."""
    if t < 0:
        raise ValueError("stage must be >= 0")
    stage = [FareyInterval(Fraction(0), Fraction(1))]
    for _ in range(t):
        stage = [half for iv in stage for half in iv.split()]
    return stage


@lru_cache(maxsize=32)
def _stage_endpoint_arrays(t: int) -> tuple[np.ndarray, np.ndarray]:
    num = np.array([0, 1], dtype=np.int64)
    den = np.array([1, 1], dtype=np.int64)
    for _ in range(t):
        mn, md = num[:-1] + num[1:], den[:-1] + den[1:]
        n2 = np.empty(2 * len(num) - 1, dtype=np.int64)
        d2 = np.empty_like(n2)
        n2[0::2], n2[1::2] = num, mn
        d2[0::2], d2[1::2] = den, md
        num, den = n2, d2
    return num, den


def stage_endpoints(t: int) -> list[Fraction]:
    """Sorted endpoints of stage ``t`` (2^t + 1 rationals)."""
    num, den = _stage_endpoint_arrays(t)
    return [Fraction(int(a), int(b)) for a, b in zip(num, den)]


class PiecewiseLinearFn:
    """Continuous piecewise-linear function with rational breakpoints and values.

    Outside ``[breakpoints[0], breakpoints[-1]]`` the function is zero, or,
    with ``periodic=True`` (support must be [0, 1]), the period-1 extension.
    Evaluation at rational input is exact.
    """

    def __init__(self, breakpoints: Sequence, values: Sequence, periodic: bool = False):
        xs = tuple(Fraction(x) for x in breakpoints)
        ys = tuple(Fraction(y) for y in values)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("need at least two breakpoints with one value each")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if periodic:
            if xs[0] != 0 or xs[-1] != 1:
                raise ValueError("periodic functions are defined by their restriction to [0, 1]")
            if ys[0] != ys[-1]:
                raise ValueError("periodic extension would be discontinuous")
        elif ys[0] != 0 or ys[-1] != 0:
            raise ValueError("zero extension would be discontinuous")
        self.breakpoints = xs
        self.values = ys
        self.periodic = periodic

    def __repr__(self):
        return f"PiecewiseLinearFn({len(self.breakpoints)} breakpoints, periodic={self.periodic})"

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinearFn):
            return NotImplemented
        a, b = self.simplified(), other.simplified()
        return (a.breakpoints, a.values, a.periodic) == (b.breakpoints, b.values, b.periodic)

    def _reduce(self, x):
        if self.periodic:
            return x - math.floor(x)
        return x

    def __call__(self, x):
        exact = isinstance(x, (int, Fraction))
        x = self._reduce(Fraction(x) if exact else float(x))
        xs, ys = self.breakpoints, self.values
        if x < xs[0] or x > xs[-1]:
            return Fraction(0) if exact else 0.0
        i = bisect.bisect_right(xs, x)
        if i == len(xs):
            return ys[-1] if exact else float(ys[-1])
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        if exact:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        x0, x1, y0, y1 = float(x0), float(x1), float(y0), float(y1)
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def evaluate_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.periodic:
            xs = xs - np.floor(xs)
        bx = np.array([float(b) for b in self.breakpoints])
        by = np.array([float(v) for v in self.values])
        return np.interp(xs, bx, by, left=0.0, right=0.0)

    def slopes(self) -> list[Fraction]:
        xs, ys = self.breakpoints, self.values
        return [(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]

    def pieces(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """``(left, right, slope, intercept)`` for each linear segment, with f = slope*x + intercept."""
        out = []
        for i, s in enumerate(self.slopes()):
            x0, y0 = self.breakpoints[i], self.values[i]
            out.append((x0, self.breakpoints[i + 1], s, y0 - s * x0))
        return out

    def slope_at(self, x, side: str = "right") -> Fraction:
        x = self._reduce(Fraction(x))
        xs = self.breakpoints
        if x < xs[0] or x > xs[-1] or (side == "right" and x == xs[-1]) or (side == "left" and x == xs[0]):
            if not self.periodic:
                return Fraction(0)
            x = Fraction(0) if side == "right" else Fraction(1)
        i = bisect.bisect_right(xs, x) if side == "right" else bisect.bisect_left(xs, x)
        return self.slopes()[i - 1]

    def sup_norm(self) -> Fraction:
        return max(abs(v) for v in self.values)

    def max_value(self) -> Fraction:
        return max(self.values)

    def min_value(self) -> Fraction:
        return min(self.values)

    def simplified(self) -> "PiecewiseLinearFn":
        """Drop interior breakpoints where adjacent segments are collinear."""
        xs, ys = list(self.breakpoints), list(self.values)
        keep_x, keep_y = [xs[0]], [ys[0]]
        for i in range(1, len(xs) - 1):
            left = (ys[i] - keep_y[-1]) / (xs[i] - keep_x[-1])
            right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
            if left != right:
                keep_x.append(xs[i])
                keep_y.append(ys[i])
        keep_x.append(xs[-1])
        keep_y.append(ys[-1])
        return PiecewiseLinearFn(keep_x, keep_y, self.periodic)

    def _combine(self, other: "PiecewiseLinearFn", op) -> "PiecewiseLinearFn":
        if self.periodic != other.periodic:
            raise ValueError("cannot combine periodic and zero-extended functions")
        grid = sorted(set(self.breakpoints) | set(other.breakpoints))
        return PiecewiseLinearFn(grid, [op(self(x), other(x)) for x in grid], self.periodic).simplified()

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return PiecewiseLinearFn(self.breakpoints, [-v for v in self.values], self.periodic)

    def __mul__(self, c):
        c = Fraction(c)
        if c == 0:
            return PiecewiseLinearFn(self.breakpoints[:: len(self.breakpoints) - 1], (0, 0), self.periodic)
        return PiecewiseLinearFn(self.breakpoints, [c * v for v in self.values], self.periodic)

    __rmul__ = __mul__

    def has_integer_affine_pieces(self) -> bool:
        """True when every segment is x -> s*x + c with integers s and c.

        Such a function maps each rational l into den(l)^-1 Z.
        """
        return all(s.denominator == 1 and c.denominator == 1 for _, _, s, c in self.pieces())

    def to_json(self) -> dict:
        return {
            "breakpoints": [str(x) for x in self.breakpoints],
            "values": [str(y) for y in self.values],
            "periodic": self.periodic,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "PiecewiseLinearFn":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            [Fraction(x) for x in data["breakpoints"]],
            [Fraction(y) for y in data["values"]],
            data.get("periodic", False),
        )

    def to_svg(self, width: int = 800, height: int = 500, margin: int = 20, title: str | None = None) -> str:
        """SVG 1.1 document with the graph as one polyline.

        The x range is the support and the y range is [min, max] of the
        values, both exact; floats appear only in the emitted coordinates.
        """
        x0, x1 = self.breakpoints[0], self.breakpoints[-1]
        lo, hi = self.min_value(), self.max_value()
        if hi == lo:
            hi = lo + 1
        sx = Fraction(width - 2 * margin) / (x1 - x0)
        sy = Fraction(height - 2 * margin) / (hi - lo)
        pts = " ".join(
            f"{float(margin + (x - x0) * sx):.3f},{float(height - margin - (y - lo) * sy):.3f}"
            for x, y in zip(self.breakpoints, self.values)
        )
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
        ]
        if title:
            lines.append(f"<title>{title}</title>")
        lines += [
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
            f'<polyline fill="none" stroke="black" stroke-width="1" points="{pts}"/>',
            "</svg>",
            "",
        ]
        return "\n".join(lines)


def sawtooth_g(t: int) -> PiecewiseLinearFn:
    """``g_t``: zero on stage-(t-1) endpoints, ``1/den(u)`` at stage-t mediants, affine between."""
    if t < 1:
        raise ValueError("t must be >= 1")
    pts = stage_endpoints(t)
    vals = [Fraction(0) if i % 2 == 0 else Fraction(1, x.denominator) for i, x in enumerate(pts)]
    return PiecewiseLinearFn(pts, vals, periodic=True)


def alternating_partial_sum(T: int) -> PiecewiseLinearFn:
    """``f_T = sum_{m<=T} (-1)^(m-1) g_m``; breakpoints are the stage-T endpoints."""
    if T < 1:
        raise ValueError("T must be >= 1")
    xs = [Fraction(0), Fraction(1)]
    ys = [Fraction(0), Fraction(0)]
    for m in range(1, T + 1):
        sign = 1 if m % 2 else -1
        nx, ny = [xs[0]], [ys[0]]
        for i in range(len(xs) - 1):
            a, c = xs[i], xs[i + 1]
            b, d = a.denominator, c.denominator
            mid = Fraction(a.numerator + c.numerator, b + d)
            # f_{m-1} is affine on [a, c]; the mediant splits it in ratio d : b
            base = (b * ys[i] + d * ys[i + 1]) / (b + d)
            nx += [mid, c]
            ny += [base + Fraction(sign, b + d), ys[i + 1]]
        xs, ys = nx, ny
    return PiecewiseLinearFn(xs, ys, periodic=True)


def _descend(l, stop_stage: int | None):
    """Walk down the tree toward ``l`` carrying exact f values at the interval ends.

    Returns ``(lo, f_lo, hi, f_hi, stage, hit)``; ``hit`` is the endpoint equal
    to ``l`` if one appeared by ``stop_stage``.
    """
    lo, hi = Fraction(0), Fraction(1)
    flo = fhi = Fraction(0)
    stage = 0
    if l == lo:
        return lo, flo, hi, fhi, stage, flo
    if l == hi:
        return lo, flo, hi, fhi, stage, fhi
    while stop_stage is None or stage < stop_stage:
        stage += 1
        b, d = lo.denominator, hi.denominator
        mid = Fraction(lo.numerator + hi.numerator, b + d)
        sign = 1 if stage % 2 else -1
        fmid = (b * flo + d * fhi) / (b + d) + Fraction(sign, b + d)
        if l == mid:
            return lo, flo, hi, fhi, stage, fmid
        if l < mid:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return lo, flo, hi, fhi, stage, None


def first_stage(l: Fraction) -> int:
    """Stage at which the rational ``l`` in [0, 1] first appears as an endpoint."""
    l = Fraction(l)
    if not 0 <= l <= 1:
        raise ValueError("l must lie in [0, 1]")
    return _descend(l, None)[4]


def exact_f_at_rational(l) -> Fraction:
    """Exact value of the limit function f at a rational (period-1 extension outside [0,1])."""
    l = Fraction(l)
    l -= math.floor(l)
    return _descend(l, None)[5]


def partial_sum_at(x, T: int):
    """``f_T(x)`` without building the whole function; exact for rational ``x``."""
    exact = isinstance(x, (int, Fraction))
    x = Fraction(x) if exact else float(x)
    x -= math.floor(x)
    lo, flo, hi, fhi, _, hit = _descend(x, T)
    if hit is not None:
        return hit if exact else float(hit)
    if exact:
        return flo + (fhi - flo) * (x - lo) / (hi - lo)
    return float(flo) + float(fhi - flo) * (x - float(lo)) / float(hi - lo)


@lru_cache(maxsize=4)
def _float_table(T: int) -> tuple[np.ndarray, np.ndarray]:
    num = np.array([0, 1], dtype=np.int64)
    den = np.array([1, 1], dtype=np.int64)
    vals = np.zeros(2)
    for m in range(1, T + 1):
        b, d = den[:-1], den[1:]
        mid_vals = (b * vals[:-1] + d * vals[1:]) / (b + d) + (1 if m % 2 else -1) / (b + d)
        size = 2 * len(vals) - 1
        nv, nn, nd = np.empty(size), np.empty(size, dtype=np.int64), np.empty(size, dtype=np.int64)
        nv[0::2], nv[1::2] = vals, mid_vals
        nn[0::2], nn[1::2] = num, num[:-1] + num[1:]
        nd[0::2], nd[1::2] = den, b + d
        vals, num, den = nv, nn, nd
    return num / den, vals


def partial_sum_array(xs: np.ndarray, T: int = 20) -> np.ndarray:
    """Vectorized float ``f_T`` on arrays (period-1 extension); |f - f_T| <= 1/(T+2)."""
    grid, vals = _float_table(T)
    xs = np.asarray(xs, dtype=float)
    return np.interp(xs - np.floor(xs), grid, vals)


class ChainStep(NamedTuple):
    interval: FareyInterval
    r: int
    s: int


def chain_to(alpha, T: int, policy: str = "left") -> list[ChainStep]:
    """Nested stage intervals I_1 > ... > I_T containing ``alpha``.

    ``r`` is the slope of g_t on I_t and ``s`` the slope of f_t on I_t.
    When ``alpha`` is a mediant the chain is not unique; ``policy`` picks
    the left or right half.
    """
    if policy not in ("left", "right"):
        raise ValueError("policy must be 'left' or 'right'")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    iv = FareyInterval(Fraction(0), Fraction(1))
    s = 0
    out = []
    for t in range(1, T + 1):
        left, right = iv.split()
        m = left.right
        go_left = alpha < m or (alpha == m and policy == "left")
        if go_left:
            iv, r = left, left.left.denominator
        else:
            iv, r = right, -right.right.denominator
        s += r if t % 2 else -r
        out.append(ChainStep(iv, r, s))
    return out


def unimodular_flanks(center, lower_bound, upper_bound=None, strict_lower: bool = False):
    """Fractions a/b < center < c/d with [a/b, center] and [center, c/d] unimodular.

    Starts from the Farey neighbours of ``center`` (extended gcd) and pushes
    a/b -> (a + m x)/(b + m y) with the least m >= 0 giving a/b >= lower_bound
    (or > with ``strict_lower``); likewise pushes c/d down to ``upper_bound``.
    Pushes keep both determinants equal to 1.
    """
    center = Fraction(center)
    x, y = center.numerator, center.denominator
    lower_bound = Fraction(lower_bound)
    if lower_bound >= center:
        raise ValueError(f"lower bound {lower_bound} is not below {center}")
    if upper_bound is not None:
        upper_bound = Fraction(upper_bound)
        if upper_bound <= center:
            raise ValueError(f"upper bound {upper_bound} is not above {center}")
    inv = pow(x, -1, y) if y > 1 else 0
    # left neighbour: x*b - y*a = 1; right neighbour: c*y - d*x = 1
    b = inv if inv else y
    a = (x * b - 1) // y
    d = (y - inv) % y or y
    c = (1 + d * x) // y
    gap = Fraction(x) - lower_bound * y
    need = lower_bound * b - a
    mult = max(0, math.ceil(need / gap))
    if strict_lower and Fraction(a + mult * x, b + mult * y) == lower_bound:
        mult += 1
    a, b = a + mult * x, b + mult * y
    if upper_bound is not None:
        gap = upper_bound * y - x
        mult = max(0, math.ceil((c - upper_bound * d) / gap))
        c, d = c + mult * x, d + mult * y
    left, right = Fraction(a, b), Fraction(c, d)
    assert x * b - y * a == 1 and c * y - d * x == 1
    return left, right
