"""Rational points indexed by denominator, boxes, and counting/enumeration.

A point of Q^n is stored projectively as integer numerators ``(a_1..a_n)``
and a denominator ``k`` with ``gcd(a_1, ..., a_n, k) == 1``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .arith import divisors, moebius


@dataclass(frozen=True, order=True)
class RationalPoint:
    nums: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"denominator must be >= 1, got {self.k}")
        if math.gcd(self.k, *self.nums) != 1:
            raise ValueError(f"{self.nums}/{self.k} is not in lowest projective form")

    @property
    def dim(self) -> int:
        return len(self.nums)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.k) for a in self.nums)

    @classmethod
    def from_coords(cls, coords: Iterable) -> "RationalPoint":
        return denominator(coords)

    @classmethod
    def from_projective(cls, nums: Sequence[int], k: int) -> "RationalPoint":
        """Normalize an arbitrary projective vector ``(nums; k)`` with ``k != 0``."""
        if k == 0:
            raise ValueError("projective denominator is zero")
        if k < 0:
            nums, k = [-a for a in nums], -k
        g = math.gcd(k, *nums)
        return cls(tuple(a // g for a in nums), k // g)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def denominator(coords: Iterable) -> RationalPoint:
    """Lowest projective form of a rational vector; ``k`` is the lcm of coordinate denominators."""
    fr = [Fraction(c) for c in coords]
    k = math.lcm(*(c.denominator for c in fr)) if fr else 1
    return RationalPoint(tuple(int(c * k) for c in fr), k)


def den(coords: Iterable) -> int:
    return denominator(coords).k


def _as_bound(x):
    if isinstance(x, float) and math.isinf(x):
        return x
    if x is None:
        raise ValueError("use float('inf') for unbounded box faces")
    return Fraction(x)


@dataclass(frozen=True)
class Box:
    """Axis-parallel box with per-face closure flags.

    The default flags give the half-open box (u, v]: lower faces excluded,
    upper faces included.
    """

    lower: tuple
    upper: tuple
    lower_closed: tuple[bool, ...] | None = None
    upper_closed: tuple[bool, ...] | None = None

    def __post_init__(self):
        lo = tuple(_as_bound(x) for x in self.lower)
        hi = tuple(_as_bound(x) for x in self.upper)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box corners must have equal positive dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"box lower corner {lo} exceeds upper corner {hi}")
        n = len(lo)
        lc = (False,) * n if self.lower_closed is None else tuple(self.lower_closed)
        uc = (True,) * n if self.upper_closed is None else tuple(self.upper_closed)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "lower_closed", lc)
        object.__setattr__(self, "upper_closed", uc)

    @classmethod
    def half_open(cls, u, v) -> "Box":
        return cls(tuple(u), tuple(v))

    @classmethod
    def closed(cls, u, v) -> "Box":
        n = len(u)
        return cls(tuple(u), tuple(v), (True,) * n, (True,) * n)

    @classmethod
    def open(cls, u, v) -> "Box":
        n = len(u)
        return cls(tuple(u), tuple(v), (False,) * n, (False,) * n)

    @classmethod
    def unit_cube(cls, n: int, closed: bool = False) -> "Box":
        lo, hi = (0,) * n, (1,) * n
        return cls.closed(lo, hi) if closed else cls.half_open(lo, hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def bounded(self) -> bool:
        return not any(isinstance(x, float) for x in self.lower + self.upper)

    @property
    def is_half_open(self) -> bool:
        return not any(self.lower_closed) and all(self.upper_closed)

    def volume(self) -> Fraction:
        if not self.bounded:
            raise ValueError("unbounded box has no finite volume")
        return math.prod((b - a for a, b in zip(self.lower, self.upper)), start=Fraction(1))

    def contains(self, coords: Sequence) -> bool:
        for x, a, b, lc, uc in zip(coords, self.lower, self.upper, self.lower_closed, self.upper_closed):
            if x < a or (x == a and not lc):
                return False
            if x > b or (x == b and not uc):
                return False
        return True

    def contains_box(self, other: "Box") -> bool:
        for i in range(self.dim):
            a, b = self.lower[i], self.upper[i]
            c, d = other.lower[i], other.upper[i]
            if c < a or (c == a and other.lower_closed[i] and not self.lower_closed[i]):
                return False
            if d > b or (d == b and other.upper_closed[i] and not self.upper_closed[i]):
                return False
        return True

    def numerator_ranges(self, k: int) -> list[range]:
        """Per-coordinate ranges of integers ``a`` with ``a/k`` inside the box."""
        if not self.bounded:
            raise ValueError("cannot enumerate an unbounded box")
        out = []
        for a, b, lc, uc in zip(self.lower, self.upper, self.lower_closed, self.upper_closed):
            lo = math.ceil(a * k) if lc else math.floor(a * k) + 1
            hi = math.floor(b * k) if uc else math.ceil(b * k) - 1
            out.append(range(lo, hi + 1))
        return out

    def __str__(self):
        parts = []
        for a, b, lc, uc in zip(self.lower, self.upper, self.lower_closed, self.upper_closed):
            parts.append(f"{'[' if lc else '('}{a},{b}{']' if uc else ')'}")
        return " x ".join(parts)

    def to_json(self) -> dict:
        return {
            "lower": [str(x) for x in self.lower],
            "upper": [str(x) for x in self.upper],
            "lower_closed": list(self.lower_closed),
            "upper_closed": list(self.upper_closed),
        }


def enumerate_by_denominator(box: Box, k: int) -> list[RationalPoint]:
    """All points of denominator exactly ``k`` in ``box``, lexicographic in the numerators."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranges = box.numerator_ranges(k)
    return [
        RationalPoint(nums, k)
        for nums in itertools.product(*ranges)
        if math.gcd(k, *nums) == 1
    ]


def _anchored_count(k: int, corner: Sequence[Fraction]) -> int:
    # Moebius-floor sum; a zero coordinate gives an empty box and count 0.
    total = 0
    for d in divisors(k):
        mu = moebius(k // d)
        if mu:
            total += mu * math.prod(math.floor(d * l) for l in corner)
    return total


def box_count_h(k: int, v: Sequence) -> int:
    """Number of denominator-``k`` points in (0, v], for ``v`` in (0,1]^n."""
    v = [Fraction(x) for x in v]
    if any(not (0 < l <= 1) for l in v):
        raise ValueError(f"corner {v} must lie in (0,1]^n")
    return _anchored_count(k, v)


def half_open_terms(u: Sequence, v: Sequence) -> list[tuple[int, tuple[Fraction, ...]]]:
    """Signed anchored corners whose counts sum to the count in (u, v].

    The box is cut into pieces (u, v] & (w + (0,1]^n), each piece is moved
    into the unit cube by the integer translation -w, and split there by
    inclusion-exclusion into anchored boxes (0, corner]. Corners with a zero
    coordinate are empty and dropped.
    """
    u = [Fraction(x) for x in u]
    v = [Fraction(x) for x in v]
    n = len(u)
    if any(a > b for a, b in zip(u, v)):
        raise ValueError("lower corner exceeds upper corner")
    cells = [range(math.floor(a), math.ceil(b)) for a, b in zip(u, v)]
    terms = []
    for w in itertools.product(*cells):
        lo = [max(a - wi, Fraction(0)) for a, wi in zip(u, w)]
        hi = [min(b - wi, Fraction(1)) for b, wi in zip(v, w)]
        if any(a >= b for a, b in zip(lo, hi)):
            continue
        for picks in itertools.product((0, 1), repeat=n):
            corner = tuple(lo[i] if picks[i] else hi[i] for i in range(n))
            if all(c > 0 for c in corner):
                terms.append(((-1) ** sum(picks), corner))
    return terms


def half_open_box_count(k: int, u: Sequence, v: Sequence) -> int:
    """Number of denominator-``k`` points in an arbitrary bounded (u, v]."""
    return sum(sign * _anchored_count(k, corner) for sign, corner in half_open_terms(u, v))


def count_in_box(box: Box, k: int) -> int:
    if box.is_half_open and box.bounded:
        return half_open_box_count(k, box.lower, box.upper)
    return len(enumerate_by_denominator(box, k))


def cube_numerators(n: int, k: int, closed: bool = False) -> np.ndarray:
    """Integer array (m, n) of numerator tuples of denominator-k points of the unit cube, lexicographic."""
    lo = 0 if closed else 1
    axis = np.arange(lo, k + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    g = np.gcd.reduce(np.concatenate([grid, np.full((len(grid), 1), k)], axis=1), axis=1)
    return grid[g == 1]


class PointArray(NamedTuple):
    """Bulk point storage: numerators (N, n) and denominators (N,)."""

    nums: np.ndarray
    ks: np.ndarray

    def __len__(self):
        return len(self.ks)

    def to_points(self) -> list[RationalPoint]:
        return [RationalPoint(tuple(int(a) for a in row), int(k)) for row, k in zip(self.nums, self.ks)]

    def as_float(self) -> np.ndarray:
        return self.nums / self.ks[:, None]


OrderPolicy = str | Callable[[list], list]


def _apply_order(block, order: OrderPolicy):
    if order == "lex":
        return block
    if order == "reverse":
        return block[::-1]
    if callable(order):
        return order(block)
    raise ValueError(f"unknown order policy {order!r}")


def denominator_sorted_array(n: int, K: int, cube: str = "half-open", order: OrderPolicy = "lex") -> PointArray:
    if K < 1:
        raise ValueError("K must be >= 1")
    closed = _cube_closed(cube)
    nums, ks = [], []
    for k in range(1, K + 1):
        block = _apply_order(cube_numerators(n, k, closed), order)
        nums.append(np.asarray(block))
        ks.append(np.full(len(block), k, dtype=np.int64))
    return PointArray(np.concatenate(nums), np.concatenate(ks))


def _cube_closed(cube: str) -> bool:
    if cube not in ("half-open", "closed"):
        raise ValueError(f"cube must be 'half-open' or 'closed', got {cube!r}")
    return cube == "closed"


def denominator_sorted_enumeration(
    n: int, K: int, cube: str = "half-open", order: OrderPolicy = "lex"
) -> list[RationalPoint]:
    """Every point of the unit cube with denominator <= K, once each, by nondecreasing denominator."""
    if K < 1:
        raise ValueError("K must be >= 1")
    box = Box.unit_cube(n, closed=_cube_closed(cube))
    out: list[RationalPoint] = []
    for k in range(1, K + 1):
        out.extend(_apply_order(enumerate_by_denominator(box, k), order))
    return out


def _to_array(points) -> PointArray:
    if isinstance(points, PointArray):
        return points
    pts = list(points)
    return PointArray(
        np.array([p.nums for p in pts], dtype=np.int64),
        np.array([p.k for p in pts], dtype=np.int64),
    )


def star_discrepancy(points, n: int, grid_resolution: int = 50):
    """Star discrepancy of points in [0,1]^n.

    For n == 1 this is exact (a Fraction), from the sorted-points formula.
    For n >= 2 it is the lower bound max |#{x <= b}/N - vol[0,b]| over grid
    corners b in {0, 1/R, ..., 1}^n with R = ``grid_resolution``.
    """
    arr = _to_array(points)
    N = len(arr)
    if N == 0:
        raise ValueError("empty point set")
    if arr.nums.shape[1] != n:
        raise ValueError(f"points have dimension {arr.nums.shape[1]}, expected {n}")
    if np.any(arr.nums < 0) or np.any(arr.nums > arr.ks[:, None]):
        raise ValueError("points must lie in [0,1]^n")
    if n == 1:
        xs = sorted(Fraction(int(a), int(k)) for a, k in zip(arr.nums[:, 0], arr.ks))
        return max(max(Fraction(r + 1, N) - x, x - Fraction(r, N)) for r, x in enumerate(xs))
    R = int(grid_resolution)
    # smallest j with a/k <= j/R, in exact integer arithmetic
    idx = -((-arr.nums * R) // arr.ks[:, None])
    counts = np.zeros((R + 1,) * n, dtype=np.int64)
    np.add.at(counts, tuple(idx.T), 1)
    for ax in range(n):
        counts = np.cumsum(counts, axis=ax)
    side = np.arange(R + 1) / R
    vol = side
    for _ in range(n - 1):
        vol = np.multiply.outer(vol, side)
    return float(np.max(np.abs(counts / N - vol)))


def points_to_csv(points: Iterable[RationalPoint]) -> str:
    pts = list(points)
    n = pts[0].dim if pts else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k"] + [f"a{i + 1}" for i in range(n)])
    for p in pts:
        w.writerow([p.k, *p.nums])
    return buf.getvalue()


def points_to_json(points: Iterable[RationalPoint]) -> str:
    return json.dumps([{"k": p.k, "nums": list(p.nums)} for p in points])


def points_from_json(text: str) -> list[RationalPoint]:
    return [RationalPoint(tuple(d["nums"]), d["k"]) for d in json.loads(text)]
