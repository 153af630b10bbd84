"""Denominator-preserving maps: translations, unimodular affine maps,
the gingerbreadman map, and shears (x, y) -> (x, y + f(x)).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .arith import next_prime_above, radical
from .linalg import det, inverse, is_integer_matrix, matvec
from .points import Box, RationalPoint, denominator
from .sternbrocot import (
    PiecewiseLinearFn,
    exact_f_at_rational,
    partial_sum_array,
    unimodular_flanks,
    alternating_partial_sum,
)


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


class DenMap:
    """An invertible map of R^n with exact evaluation on rational points.

    ``forward``/``inverse`` act on coordinate tuples and must work for both
    Fractions (exact) and floats. ``forward_projective`` optionally maps
    integer numerators and a denominator to an unnormalized projective
    image, which is much faster than Fraction arithmetic in bulk checks.
    """

    def __init__(
        self,
        name: str,
        dim: int,
        forward: Callable,
        inverse: Callable,
        params: dict | None = None,
        domain: Box | None = None,
        forward_array: Callable | None = None,
        inverse_array: Callable | None = None,
        forward_projective: Callable | None = None,
        inverse_projective: Callable | None = None,
        metadata: dict | None = None,
    ):
        self.name = name
        self.dim = dim
        self._forward = forward
        self._inverse = inverse
        self.params = params or {}
        self.domain = domain
        self._forward_array = forward_array
        self._inverse_array = inverse_array
        self._forward_projective = forward_projective
        self._inverse_projective = inverse_projective
        self.metadata = metadata or {}

    def __repr__(self):
        return f"DenMap({self.spec()})"

    def _apply(self, fn, u):
        if isinstance(u, RationalPoint):
            return denominator(fn(u.coords))
        u = tuple(u)
        if len(u) != self.dim:
            raise ValueError(f"{self.name} acts on R^{self.dim}, got a {len(u)}-vector")
        if all(_is_rational(x) for x in u):
            return tuple(Fraction(y) for y in fn(tuple(Fraction(x) for x in u)))
        return tuple(float(y) for y in fn(tuple(float(x) for x in u)))

    def __call__(self, u):
        return self._apply(self._forward, u)

    def inverse(self, u):
        return self._apply(self._inverse, u)

    def in_domain(self, coords) -> bool:
        return self.domain is None or self.domain.contains(coords)

    def _projective(self, fast, slow, p: RationalPoint) -> RationalPoint:
        if fast is not None:
            nums, k = fast(p.nums, p.k)
            return RationalPoint.from_projective(nums, k)
        return denominator(slow(p.coords))

    def image_point(self, p: RationalPoint) -> RationalPoint:
        return self._projective(self._forward_projective, self._forward, p)

    def preimage_point(self, p: RationalPoint) -> RationalPoint:
        return self._projective(self._inverse_projective, self._inverse, p)

    def forward_array(self, X: np.ndarray) -> np.ndarray:
        if self._forward_array is not None:
            return self._forward_array(np.asarray(X, dtype=float))
        return np.array([self._forward(tuple(row)) for row in np.asarray(X, dtype=float)], dtype=float)

    def inverse_array(self, X: np.ndarray) -> np.ndarray:
        if self._inverse_array is not None:
            return self._inverse_array(np.asarray(X, dtype=float))
        return np.array([self._inverse(tuple(row)) for row in np.asarray(X, dtype=float)], dtype=float)

    def descriptor(self) -> dict:
        return {"name": self.name, "params": self.params}

    def spec(self) -> str:
        return self.metadata.get("spec", self.name)


def identity(n: int = 2) -> DenMap:
    return DenMap(
        "identity",
        n,
        lambda u: u,
        lambda u: u,
        params={"n": n},
        forward_array=lambda X: X.copy(),
        inverse_array=lambda X: X.copy(),
        forward_projective=lambda a, k: (a, k),
        inverse_projective=lambda a, k: (a, k),
        metadata={"spec": f"identity:{n}" if n != 2 else "identity", "preserves_all": True},
    )


def translation(v: Sequence) -> DenMap:
    """u -> u + v. Preserves every k divisible by d*rad(d), d = den(v); all k iff v is integral."""
    v = tuple(Fraction(x) for x in v)
    vp = denominator(v)
    d = vp.k
    c = vp.nums

    def fwd_proj(a, k):
        return [ai * d + ci * k for ai, ci in zip(a, c)], k * d

    def inv_proj(a, k):
        return [ai * d - ci * k for ai, ci in zip(a, c)], k * d

    varr = np.array([float(x) for x in v])
    return DenMap(
        "translation",
        len(v),
        lambda u: tuple(x + y for x, y in zip(u, v)),
        lambda u: tuple(x - y for x, y in zip(u, v)),
        params={"v": [str(x) for x in v]},
        forward_array=lambda X: X + varr,
        inverse_array=lambda X: X - varr,
        forward_projective=fwd_proj,
        inverse_projective=inv_proj,
        metadata={
            "spec": "translation:" + ",".join(str(x) for x in v),
            "denominator": d,
            "preserved_modulus": d * radical(d),
            "preserves_all": d == 1,
        },
    )


def translation_predicts(m: DenMap, k: int) -> bool:
    """Whether the translation ``m`` is guaranteed to preserve denominator ``k``."""
    return k % m.metadata["preserved_modulus"] == 0


def unimodular_affine(A: Sequence[Sequence[int]], w: Sequence[int] | None = None) -> DenMap:
    """v -> A v + w with A integral of determinant +-1 and w integral."""
    A = [[int(x) for x in row] for row in A]
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("A must be square")
    w = [0] * n if w is None else [Fraction(x) for x in w]
    if any(Fraction(x).denominator != 1 for x in w):
        raise ValueError("translation part w must be integral")
    w = [int(x) for x in w]
    dA = det(A)
    if abs(dA) != 1:
        raise ValueError(f"matrix is not unimodular: det = {dA}")
    Ainv = [[int(x) for x in row] for row in inverse(A)]
    An, Ainvn = np.array(A, dtype=float), np.array(Ainv, dtype=float)
    wn = np.array(w, dtype=float)

    def fwd(u):
        return tuple(y + wi for y, wi in zip(matvec(A, u), w))

    def inv(u):
        return tuple(matvec(Ainv, [x - wi for x, wi in zip(u, w)]))

    spec = "affine:" + ";".join(",".join(str(x) for x in row) for row in A)
    if any(w):
        spec += "@" + ",".join(str(x) for x in w)
    return DenMap(
        "affine",
        n,
        fwd,
        inv,
        params={"A": A, "w": w},
        forward_array=lambda X: X @ An.T + wn,
        inverse_array=lambda X: (X - wn) @ Ainvn.T,
        forward_projective=lambda a, k: ([y + wi * k for y, wi in zip(matvec(A, a), w)], k),
        inverse_projective=lambda a, k: (matvec(Ainv, [x - wi * k for x, wi in zip(a, w)]), k),
        metadata={"spec": spec, "preserves_all": True, "linear_part": A},
    )


def gingerbreadman() -> DenMap:
    """(x, y) -> (1 - y + |x|, x), with inverse (X, Y) -> (Y, 1 - X + |Y|)."""

    def fwd_arr(X):
        return np.column_stack([1 - X[:, 1] + np.abs(X[:, 0]), X[:, 0]])

    def inv_arr(X):
        return np.column_stack([X[:, 1], 1 - X[:, 0] + np.abs(X[:, 1])])

    return DenMap(
        "gingerbreadman",
        2,
        lambda u: (1 - u[1] + abs(u[0]), u[0]),
        lambda u: (u[1], 1 - u[0] + abs(u[1])),
        forward_array=fwd_arr,
        inverse_array=inv_arr,
        forward_projective=lambda a, k: ((k - a[1] + abs(a[0]), a[0]), k),
        inverse_projective=lambda a, k: ((a[1], k - a[0] + abs(a[1])), k),
        metadata={"spec": "gingerbreadman", "preserves_all": True},
    )


@dataclass
class ShearCertificate:
    """Evidence that f(l) lies in den(l)^-1 Z.

    ``status`` is "satisfied" or "violated"; ``methods`` lists what was
    checked: "grid" (every rational of denominator <= grid_max_den in the
    checked range) and "structural" (every linear piece is s*x + c with
    integers s, c, which covers all of Q).
    """

    status: str
    methods: list[str] = field(default_factory=list)
    witness: Fraction | None = None
    grid_max_den: int = 0


def _grid_certificate(f: Callable, lo: Fraction, hi: Fraction, max_den: int) -> Fraction | None:
    for q in range(1, max_den + 1):
        for a in range(math.ceil(lo * q), math.floor(hi * q) + 1):
            if math.gcd(a, q) != 1:
                continue
            l = Fraction(a, q)
            if (f(l) * q).denominator != 1:
                return l
    return None


def _shear(name, f_exact, f_array, params, spec, certificate) -> DenMap:
    def fwd_arr(X):
        return np.column_stack([X[:, 0], X[:, 1] + f_array(X[:, 0])])

    def inv_arr(X):
        return np.column_stack([X[:, 0], X[:, 1] - f_array(X[:, 0])])

    def fwd(u):
        return (u[0], u[1] + f_exact(u[0]))

    def inv(u):
        return (u[0], u[1] - f_exact(u[0]))

    return DenMap(
        name,
        2,
        fwd,
        inv,
        params=params,
        forward_array=fwd_arr,
        inverse_array=inv_arr,
        metadata={
            "spec": spec,
            "preserves_all": certificate.status == "satisfied",
            "denominator_preserving": certificate,
        },
    )


def shear_from_f(f: PiecewiseLinearFn, grid_max_den: int = 60, name: str = "shear", spec: str | None = None) -> DenMap:
    """(x, y) -> (x, y + f(x)); inverse uses -f."""
    lo, hi = (Fraction(0), Fraction(1)) if f.periodic else (f.breakpoints[0], f.breakpoints[-1])
    witness = _grid_certificate(f, lo, hi, grid_max_den)
    methods = ["grid"]
    if witness is None and f.has_integer_affine_pieces():
        methods.append("structural")
    cert = ShearCertificate("violated" if witness is not None else "satisfied", methods, witness, grid_max_den)
    return _shear(name, f, f.evaluate_array, {"f": f.to_json()}, spec or name, cert)


def shear_example2(grid_max_den: int = 60, float_stages: int = 20) -> DenMap:
    """Shear by the exact nowhere-differentiable limit f of the sawtooth series.

    Exact evaluation uses the finite tree descent; float evaluation uses
    f_T with T = ``float_stages`` (sup error <= 1/(T+2)).
    """
    witness = _grid_certificate(exact_f_at_rational, Fraction(0), Fraction(1), grid_max_den)
    cert = ShearCertificate(
        "violated" if witness is not None else "satisfied",
        ["grid", "finite-sum"] if witness is None else ["grid"],
        witness,
        grid_max_den,
    )
    return _shear(
        "shear-example2",
        exact_f_at_rational,
        lambda x: partial_sum_array(x, float_stages),
        {"float_stages": float_stages},
        "shear-example2",
        cert,
    )


def prime_sequence(T: int) -> list[tuple[int, int]]:
    """``(t, p_t)`` with p_1 = 2 and p_{t+1} the least prime > (1 + 1/t) p_t."""
    if T < 1:
        raise ValueError("T must be >= 1")
    out = [(1, 2)]
    for t in range(1, T):
        out.append((t + 1, next_prime_above(Fraction(t + 1, t) * out[-1][1])))
    return out


@dataclass(frozen=True)
class Tooth:
    t: int
    p: int
    left: Fraction
    center: Fraction
    right: Fraction

    def determinants(self) -> tuple[int, int]:
        """(t*b - p*a, c*p - d*t) for left = a/b, right = c/d; both equal 1."""
        a, b = self.left.numerator, self.left.denominator
        c, d = self.right.numerator, self.right.denominator
        return self.t * b - self.p * a, c * self.p - d * self.t

    @property
    def peak(self) -> Fraction:
        return Fraction(1, self.p)


def example1_teeth(T: int) -> list[Tooth]:
    """Teeth t = 1..T, with flanks chosen left to right so every prefix is stable in T.

    Tooth t's left flank is pushed strictly above the next centre
    (t+1)/p_{t+1}; tooth t+1's right flank is then pushed down to at most
    tooth t's left flank.
    """
    primes = dict(prime_sequence(T + 1))
    teeth: list[Tooth] = []
    for t in range(1, T + 1):
        center = Fraction(t, primes[t])
        nxt = Fraction(t + 1, primes[t + 1])
        upper = teeth[-1].left if teeth else None
        left, right = unimodular_flanks(center, nxt, upper, strict_lower=True)
        teeth.append(Tooth(t, primes[t], left, center, right))
    return teeth


def example1_f(T: int) -> PiecewiseLinearFn:
    """Tent function with teeth b_t x - a_t on [a_t/b_t, t/p_t] and c_t - d_t x on [t/p_t, c_t/d_t]."""
    teeth = example1_teeth(T)
    xs: list[Fraction] = []
    ys: list[Fraction] = []
    for tooth in reversed(teeth):
        for x, y in ((tooth.left, Fraction(0)), (tooth.center, tooth.peak), (tooth.right, Fraction(0))):
            if xs and xs[-1] == x:
                continue
            xs.append(x)
            ys.append(y)
    return PiecewiseLinearFn(xs, ys)


def shear_example1(T: int = 40, grid_max_den: int = 60) -> DenMap:
    m = shear_from_f(example1_f(T), grid_max_den, name="shear-example1", spec=f"shear-example1:{T}")
    m.params = {"T": T}
    return m


def shear_partial_sum(T: int, grid_max_den: int = 60) -> DenMap:
    m = shear_from_f(alternating_partial_sum(T), grid_max_den, name="shear-fT", spec=f"shear-fT:{T}")
    m.params = {"T": T}
    return m


def _parse_frac_list(text: str) -> list[Fraction]:
    return [Fraction(x) for x in text.split(",") if x]


ZOO = ("identity", "gingerbreadman", "translation", "affine", "shear", "shear-example1", "shear-example2", "shear-fT")


def map_from_spec(spec: str) -> DenMap:
    """Build a zoo map from ``name[:params]``.

    Examples: ``gingerbreadman``, ``translation:1/2,1/3``,
    ``affine:1,1;0,1@0,2``, ``shear`` (the affine shear [[1,1],[0,1]]),
    ``shear-example1:40``, ``shear-example2``, ``shear-fT:11``.
    """
    name, _, arg = spec.partition(":")
    if name == "identity":
        return identity(int(arg) if arg else 2)
    if name == "gingerbreadman":
        return gingerbreadman()
    if name == "translation":
        return translation(_parse_frac_list(arg))
    if name == "affine":
        mat, _, w = arg.partition("@")
        A = [[int(x) for x in row.split(",")] for row in mat.split(";")]
        return unimodular_affine(A, [int(x) for x in w.split(",")] if w else None)
    if name == "shear":
        return unimodular_affine([[1, 1], [0, 1]])
    if name == "shear-example1":
        return shear_example1(int(arg) if arg else 40)
    if name == "shear-example2":
        return shear_example2()
    if name == "shear-fT":
        return shear_partial_sum(int(arg) if arg else 11)
    raise ValueError(f"unknown map {name!r}; known maps: {', '.join(ZOO)}")


def map_from_descriptor(desc: dict) -> DenMap:
    name, params = desc["name"], desc.get("params", {})
    if name == "identity":
        return identity(params.get("n", 2))
    if name == "gingerbreadman":
        return gingerbreadman()
    if name == "translation":
        return translation([Fraction(x) for x in params["v"]])
    if name == "affine":
        return unimodular_affine(params["A"], params.get("w"))
    if name == "shear-example1":
        return shear_example1(params["T"])
    if name == "shear-example2":
        return shear_example2(float_stages=params.get("float_stages", 20))
    if name == "shear-fT":
        return shear_partial_sum(params["T"])
    if name == "shear":
        return shear_from_f(PiecewiseLinearFn.from_json(params["f"]))
    raise ValueError(f"unknown map {name!r}; known maps: {', '.join(ZOO)}")


def orbit(m: DenMap, start, steps: int) -> list:
    """``start`` followed by ``steps`` iterates."""
    pts = [m._apply(lambda u: u, start)]
    for _ in range(steps):
        pts.append(m(pts[-1]))
    return pts


def orbit_csv(m: DenMap, start, steps: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = ["x", "y"] if m.dim == 2 else [f"x{i + 1}" for i in range(m.dim)]
    w.writerow(["step", *names, "denominator"])
    for i, p in enumerate(orbit(m, start, steps)):
        exact = all(_is_rational(x) for x in p)
        w.writerow([i, *(str(x) for x in p), denominator(p).k if exact else ""])
    return buf.getvalue()
