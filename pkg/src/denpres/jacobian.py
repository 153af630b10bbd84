"""Unimodular simplex sequences and the difference maps of a denominator-preserving map.

For a simplex with vertices v_0..v_n the difference map L is the linear map
with L(v_i - v_j) = F(v_i) - F(v_j). When the projective vertex matrix S is
in GL(n+1, Z) and F preserves denominators, B = W S^-1 is an integer matrix
whose upper-left block is L, so a convergent sequence of such simplices
pins the Jacobian of F to an integer matrix.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import det, inverse, is_integer_matrix, is_zero, matmul, zero_matrix
from .maps import DenMap
from .points import RationalPoint, denominator

STABLE_WINDOW = 5


@dataclass(frozen=True)
class UnimodularSimplex:
    vertices: tuple[RationalPoint, ...]

    def __post_init__(self):
        n = len(self.vertices) - 1
        if n < 1 or any(v.dim != n for v in self.vertices):
            raise ValueError("need n+1 vertices in Q^n")
        if abs(det(self.matrix)) != 1:
            raise ValueError(f"projective matrix has determinant {det(self.matrix)}, not +-1")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def matrix(self) -> list[list[int]]:
        """(n+1)x(n+1) integer matrix whose columns are (numerators; denominator)."""
        n = self.dim
        rows = [[v.nums[i] for v in self.vertices] for i in range(n)]
        rows.append([v.k for v in self.vertices])
        return rows

    @property
    def coords(self) -> list[tuple[Fraction, ...]]:
        return [v.coords for v in self.vertices]

    def barycentric(self, u: Sequence) -> list[Fraction]:
        n = self.dim
        M = [[c[i] for c in self.coords] for i in range(n)] + [[Fraction(1)] * (n + 1)]
        rhs = [Fraction(x) for x in u] + [Fraction(1)]
        Minv = inverse(M)
        return [sum(a * b for a, b in zip(row, rhs)) for row in Minv]

    def contains(self, u: Sequence) -> bool:
        return all(a >= 0 for a in self.barycentric(u))

    def diameter_sq(self) -> Fraction:
        cs = self.coords
        return max(_dist_sq(cs[i], cs[j]) for i in range(len(cs)) for j in range(i + 1, len(cs)))

    def max_distance_sq_to(self, u: Sequence) -> Fraction:
        u = [Fraction(x) for x in u]
        return max(_dist_sq(c, u) for c in self.coords)

    def sort_key(self):
        return tuple(sorted(self.coords))

    def __str__(self):
        return "[" + ", ".join(str(v) for v in self.vertices) + "]"


def _dist_sq(a, b) -> Fraction:
    return sum((x - y) ** 2 for x, y in zip(a, b))


def standard_simplex(n: int) -> UnimodularSimplex:
    verts = [RationalPoint((0,) * n, 1)]
    for i in range(n):
        verts.append(RationalPoint(tuple(int(i == j) for j in range(n)), 1))
    return UnimodularSimplex(tuple(verts))


def rational_surrogate(u) -> tuple[tuple[Fraction, ...], int]:
    """Exact rational stand-in for a target point, with its denominator."""
    if isinstance(u, RationalPoint):
        return u.coords, u.k
    coords = tuple(Fraction(x) for x in u)
    return coords, denominator(coords).k


def _mediant(p: RationalPoint, q: RationalPoint) -> RationalPoint:
    # columns of a unimodular matrix are primitive, so no reduction is needed
    return RationalPoint(tuple(a + b for a, b in zip(p.nums, q.nums)), p.k + q.k)


def _subdivide(s: UnimodularSimplex, u) -> UnimodularSimplex:
    verts = list(s.vertices)
    cs = s.coords
    pairs = [(i, j) for i in range(len(verts)) for j in range(i + 1, len(verts))]
    i, j = max(pairs, key=lambda ij: (_dist_sq(cs[ij[0]], cs[ij[1]]), -ij[0], -ij[1]))
    m = _mediant(verts[i], verts[j])
    kids = []
    for replace in (i, j):
        vv = list(verts)
        vv[replace] = m
        kids.append(UnimodularSimplex(tuple(vv)))
    inside = [c for c in kids if c.contains(u)]
    if not inside:
        raise AssertionError("target left the simplex")
    return min(inside, key=UnimodularSimplex.sort_key)


def simplex_sequence(u, depth: int, n: int | None = None, start: UnimodularSimplex | None = None) -> list[UnimodularSimplex]:
    """Nested unimodular simplices converging to ``u``.

    Element 0 is the starting simplex (the unit interval for n = 1, the
    standard triangle for n = 2); each further step adds the projective
    columns of the two endpoints of the longest edge and keeps the half that
    contains ``u``. A target on the cut goes to the lexicographically
    smaller half.
    """
    coords, _ = rational_surrogate(u)
    n = n or len(coords)
    if start is None:
        if n not in (1, 2):
            raise ValueError("only n = 1 and n = 2 have a default starting simplex")
        start = standard_simplex(n)
        if any(a <= 0 for a in start.barycentric(coords)):
            raise ValueError(f"target {coords} is not strictly inside the starting simplex")
    elif not start.contains(coords):
        raise ValueError("target is not in the starting simplex")
    seq = [start]
    for _ in range(depth):
        seq.append(_subdivide(seq[-1], coords))
    return seq


def difference_matrix(m: DenMap, vertices: Sequence[Sequence]) -> list[list[Fraction]]:
    """Matrix of the linear map sending v_i - v_n to F(v_i) - F(v_n)."""
    vs = [tuple(Fraction(x) for x in v) for v in vertices]
    n = len(vs) - 1
    imgs = [m(v) for v in vs]
    D = [[vs[j][i] - vs[n][i] for j in range(n)] for i in range(n)]
    E = [[imgs[j][i] - imgs[n][i] for j in range(n)] for i in range(n)]
    try:
        Dinv = inverse(D)
    except ZeroDivisionError:
        raise ValueError("affinely dependent vertices") from None
    return matmul(E, Dinv)


@dataclass
class DifferenceMap:
    A: list[list[Fraction]]
    simplex: UnimodularSimplex
    W: list[list[Fraction]]
    B: list[list[Fraction]]
    a_is_integer: bool
    b_is_integer: bool
    degenerate_image: bool
    denominators_match: bool


def difference_map(m: DenMap, simplex: UnimodularSimplex) -> DifferenceMap:
    """A, plus W (columns d_i * (F(v_i), 1)) and B = W S^-1.

    W equals the projective matrix of the images when F preserves the
    vertex denominators; otherwise it may be non-integral and so may B.
    """
    A = difference_matrix(m, simplex.coords)
    n = simplex.dim
    imgs = [m(v) for v in simplex.coords]
    ds = [v.k for v in simplex.vertices]
    W = [[ds[j] * imgs[j][i] for j in range(n + 1)] for i in range(n)]
    W.append([Fraction(d) for d in ds])
    B = matmul(W, inverse(simplex.matrix))
    return DifferenceMap(
        A=A,
        simplex=simplex,
        W=W,
        B=B,
        a_is_integer=is_integer_matrix(A),
        b_is_integer=is_integer_matrix(B),
        degenerate_image=det(A) == 0,
        denominators_match=all(denominator(img).k == d for img, d in zip(imgs, ds)),
    )


@dataclass
class JacobianTrace:
    target: tuple[Fraction, ...]
    surrogate_denominator: int
    steps: list[DifferenceMap] = field(default_factory=list)
    verdict: str = "diverged"
    limit: list[list[Fraction]] | None = None
    stable_from: int | None = None

    @property
    def matrices(self) -> list[list[list[Fraction]]]:
        return [s.A for s in self.steps]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = len(self.target)
        entries = [f"a{i + 1}{j + 1}" for i in range(n) for j in range(n)]
        w.writerow(["depth", *entries, "a_is_integer", "b_is_integer", "det"])
        for depth, s in enumerate(self.steps):
            w.writerow([depth, *(str(x) for row in s.A for x in row), int(s.a_is_integer), int(s.b_is_integer), str(det(s.A))])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "target": [str(x) for x in self.target],
            "surrogate_denominator": self.surrogate_denominator,
            "verdict": self.verdict,
            "limit": None if self.limit is None else [[str(x) for x in row] for row in self.limit],
            "stable_from": self.stable_from,
            "steps": [
                {
                    "depth": d,
                    "A": [[str(x) for x in row] for row in s.A],
                    "a_is_integer": s.a_is_integer,
                    "b_is_integer": s.b_is_integer,
                    "det": str(det(s.A)),
                }
                for d, s in enumerate(self.steps)
            ],
        }


def jacobian_limit_test(
    m: DenMap, u, depth: int, window: int = STABLE_WINDOW, start: UnimodularSimplex | None = None
) -> JacobianTrace:
    """Difference matrices along a simplex sequence converging to ``u``.

    Verdict is "converged" when the last ``window`` matrices coincide
    exactly; integer matrices can only approach a limit by becoming equal
    to it.
    """
    if depth + 1 < window:
        raise ValueError(f"depth must be at least {window - 1} to judge stabilization")
    coords, qden = rational_surrogate(u)
    trace = JacobianTrace(coords, qden)
    for s in simplex_sequence(coords, depth, start=start):
        trace.steps.append(difference_map(m, s))
    mats = trace.matrices
    if all(A == mats[-1] for A in mats[-window:]):
        trace.verdict = "converged"
        trace.limit = mats[-1]
        first = len(mats) - 1
        while first > 0 and mats[first - 1] == mats[-1]:
            first -= 1
        trace.stable_from = first
    return trace


def convex_decomposition_check(m: DenMap, simplex, u) -> list[list[Fraction]]:
    """Exact residual sum_i alpha_i L(sigma_i) - L(sigma), where u = sum alpha_i v_i.

    sigma_i replaces v_i by u; terms with alpha_i = 0 are skipped. For u in
    the interior the residual is the zero matrix for every map. On a face
    (some alpha_i = 0) it vanishes only when F(u) equals the affine
    interpolation of F at the vertices of that face.
    """
    if isinstance(simplex, UnimodularSimplex):
        verts = simplex.coords
    else:
        verts = [tuple(Fraction(x) for x in v) for v in simplex]
    u = tuple(Fraction(x) for x in u)
    n = len(verts) - 1
    M = [[v[i] for v in verts] for i in range(n)] + [[Fraction(1)] * (n + 1)]
    alpha = [sum(a * b for a, b in zip(row, list(u) + [Fraction(1)])) for row in inverse(M)]
    if any(a < 0 for a in alpha):
        raise ValueError("u is outside the simplex")
    total = zero_matrix(n)
    for i, a in enumerate(alpha):
        if a == 0:
            continue
        vv = list(verts)
        vv[i] = u
        Ai = difference_matrix(m, vv)
        total = [[t + a * x for t, x in zip(trow, arow)] for trow, arow in zip(total, Ai)]
    A = difference_matrix(m, verts)
    return [[t - x for t, x in zip(trow, arow)] for trow, arow in zip(total, A)]


def residual_is_zero(R) -> bool:
    return is_zero(R)
