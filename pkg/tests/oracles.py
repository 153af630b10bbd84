"""Brute-force reference implementations, independent of the package code."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def brute_g(k: int, n: int) -> int:
    return sum(1 for a in itertools.product(range(1, k + 1), repeat=n) if math.gcd(k, *a) == 1)


def brute_G(k: int, n: int) -> int:
    return sum(1 for a in itertools.product(range(0, k + 1), repeat=n) if math.gcd(k, *a) == 1)


def brute_mu(k: int) -> int:
    out, m, p = 1, k, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


def brute_den(coords) -> int:
    return math.lcm(*(Fraction(c).denominator for c in coords))


def brute_points(k: int, lower, upper, lower_closed, upper_closed):
    """Denominator-k points of a box by testing every numerator in a generous range."""
    ranges = [range(math.floor(a * k) - 1, math.ceil(b * k) + 2) for a, b in zip(lower, upper)]
    out = []
    for nums in itertools.product(*ranges):
        if math.gcd(k, *nums) != 1:
            continue
        xs = [Fraction(a, k) for a in nums]
        ok = True
        for x, a, b, lc, uc in zip(xs, lower, upper, lower_closed, upper_closed):
            if not ((a <= x if lc else a < x) and (x <= b if uc else x < b)):
                ok = False
        if ok:
            out.append(tuple(xs))
    return out


def brute_star_discrepancy_1d(xs) -> Fraction:
    """sup over b of |#{x <= b}/N - b| and |#{x < b}/N - b|, checked at every point and 0, 1."""
    N = len(xs)
    best = Fraction(0)
    for b in set(xs) | {Fraction(0), Fraction(1)}:
        le = sum(1 for x in xs if x <= b)
        lt = sum(1 for x in xs if x < b)
        best = max(best, abs(Fraction(le, N) - b), abs(Fraction(lt, N) - b))
    return best


def brute_next_prime_above(x) -> int:
    q = math.floor(x) + 1
    while q < 2 or any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
        q += 1
    return q


def stern_brocot_endpoints(t: int) -> list[Fraction]:
    pts = [Fraction(0), Fraction(1)]
    for _ in range(t):
        new = [pts[0]]
        for a, c in zip(pts, pts[1:]):
            new += [Fraction(a.numerator + c.numerator, a.denominator + c.denominator), c]
        pts = new
    return pts
