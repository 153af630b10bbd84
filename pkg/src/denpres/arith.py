"""Multiplicative number theory on exact integers and rationals.

Moebius function, radical, p-adic valuation, Jordan totients for the
open and closed unit cube, their running sums, and the error ratio ``m(k)``
that controls how fast denominator-k points equidistribute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

SIEVE_LIMIT = 10**6

_spf: np.ndarray | None = None


def set_sieve_limit(limit: int) -> None:
    """Change the bound below which factorization uses a smallest-prime-factor table."""
    global SIEVE_LIMIT, _spf
    SIEVE_LIMIT = int(limit)
    _spf = None
    factorize.cache_clear()


def _sieve(upto: int) -> np.ndarray:
    global _spf
    if _spf is not None and len(_spf) > upto:
        return _spf
    grown = 2 * len(_spf) if _spf is not None else 0
    size = min(max(upto + 1, 1 << 12, grown), SIEVE_LIMIT + 1)
    spf = np.zeros(size, dtype=np.int64)
    for p in range(2, math.isqrt(size - 1) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    unset = spf == 0
    spf[unset] = np.arange(size)[unset]
    _spf = spf
    return spf


@lru_cache(maxsize=65536)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n >= 1`` as sorted ``(p, e)`` pairs."""
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    out: list[tuple[int, int]] = []
    if n <= SIEVE_LIMIT:
        spf = _sieve(n)
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return tuple(out)
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def next_prime_above(x: Fraction | int) -> int:
    """Least prime strictly greater than the rational ``x``."""
    n = math.floor(Fraction(x)) + 1
    while not is_prime(n):
        n += 1
    return n


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def moebius(k: int) -> int:
    if k < 1:
        raise ValueError(f"moebius needs k >= 1, got {k}")
    fac = factorize(k)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def radical(d: int) -> int:
    if d < 1:
        raise ValueError(f"radical needs d >= 1, got {d}")
    return math.prod(p for p, _ in factorize(d))


class _Infinity:
    """+inf valuation of zero. Absorbs addition, exceeds every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __add__(self, other):
        if isinstance(other, (int, _Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("valuation-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


def p_adic_valuation(q: Fraction | int, p: int) -> int | _Infinity:
    """Exponent of the prime ``p`` in ``q``; ``INF`` for ``q == 0``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    q = Fraction(q)
    if q == 0:
        return INF
    v = 0
    num, den = abs(q.numerator), q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _check(k: int, n: int) -> None:
    if k < 1 or n < 1:
        raise ValueError(f"need k >= 1 and n >= 1, got k={k}, n={n}")


def jordan_totient(k: int, n: int) -> int:
    """Number of denominator-``k`` points in the half-open cube (0,1]^n."""
    _check(k, n)
    return sum(moebius(k // d) * d**n for d in divisors(k))


def closed_cube_totient(k: int, n: int) -> int:
    """Number of denominator-``k`` points in the closed cube [0,1]^n."""
    _check(k, n)
    return sum(moebius(k // d) * (d + 1) ** n for d in divisors(k))


@dataclass(frozen=True)
class TotientProfile:
    n: int
    k: int
    g: int
    G: int
    t: int
    T: int


def cumulative_profile(K: int, n: int) -> list[TotientProfile]:
    _check(K, n)
    rows = []
    t = T = 0
    for k in range(1, K + 1):
        g = jordan_totient(k, n)
        G = closed_cube_totient(k, n)
        t += g
        T += G
        rows.append(TotientProfile(n, k, g, G, t, T))
    return rows


def m_ratio_divisor_sum(k: int, n: int) -> Fraction:
    _check(k, n)
    num = sum(abs(moebius(k // d)) * d ** (n - 1) for d in divisors(k))
    return Fraction(num, jordan_totient(k, n))


def m_ratio_prime_power(p: int, e: int, n: int) -> Fraction:
    """Closed form (p^n + p) / (p^(n+e) - p^e) for ``m(p^e)``."""
    if e < 1:
        raise ValueError("exponent must be >= 1")
    return Fraction(p**n + p, p ** (n + e) - p**e)


def m_ratio(k: int, n: int) -> Fraction:
    """Error ratio sum |mu(k/d)| d^(n-1) / sum mu(k/d) d^n, computed as a product over prime powers."""
    _check(k, n)
    value = Fraction(1)
    for p, e in factorize(k):
        value *= m_ratio_prime_power(p, e, n)
    if __debug__:
        assert value == m_ratio_divisor_sum(k, n), (k, n)
    return value


def box_error_bound(k: int, n: int) -> Fraction:
    """Bound 2^n * m(k) on |h(k)/g(k) - vol| for anchored boxes (0, v] in the unit cube."""
    return 2**n * m_ratio(k, n)
