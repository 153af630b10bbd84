"""Exact linear algebra over Z and Q on nested lists."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = list[list]


def det(M: Sequence[Sequence]) -> Fraction | int:
    """Determinant by Bareiss fraction-free elimination.

    Integer input stays integer throughout; rational input is scaled to
    integers row by row first.
    """
    n = len(M)
    if n == 0:
        return 1
    scale = Fraction(1)
    A = []
    for row in M:
        row = [Fraction(x) for x in row]
        s = math.lcm(*(x.denominator for x in row))
        scale /= s
        A.append([int(x * s) for x in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    value = sign * A[n - 1][n - 1] * scale
    return int(value) if value.denominator == 1 else value


def inverse(M: Sequence[Sequence]) -> Matrix:
    """Exact inverse by Gauss-Jordan over Q; raises on singular input."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def transpose(A: Sequence[Sequence]) -> Matrix:
    return [list(c) for c in zip(*A)]


def is_integer_matrix(A: Sequence[Sequence]) -> bool:
    return all(Fraction(x).denominator == 1 for row in A for x in row)


def as_int_if_possible(A: Sequence[Sequence]) -> Matrix:
    return [[int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in row] for row in A]


def zero_matrix(n: int, m: int | None = None) -> Matrix:
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def is_zero(A: Sequence[Sequence]) -> bool:
    return all(x == 0 for row in A for x in row)
