"""Small dense matrices of MultiPoly, just enough for triangular groups."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import MultiPoly

Matrix = list[list[MultiPoly]]


def zeros(n: int) -> Matrix:
    return [[MultiPoly() for _ in range(n)] for _ in range(n)]


def from_ints(rows: Sequence[Sequence[int]]) -> Matrix:
    return [[MultiPoly.const(int(x)) for x in r] for r in rows]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    n = len(A)
    out = zeros(n)
    for i in range(n):
        for j in range(n):
            acc = MultiPoly()
            for k in range(n):
                a = A[i][k]
                if a.is_zero():
                    continue
                b = B[k][j]
                if b.is_zero():
                    continue
                acc = acc + a * b
            out[i][j] = acc
    return out


def upper_inverse(A: Matrix, inv_diag: Sequence[MultiPoly]) -> Matrix:
    """Inverse of an upper triangular matrix, given symbols for 1/A_ii.

    Entries are polynomials in the entries of A and the supplied inverses.
    """
    n = len(A)
    inv_diag = [MultiPoly._lift(x) for x in inv_diag]
    out = zeros(n)
    for i in range(n):
        out[i][i] = inv_diag[i]
    for d in range(1, n):
        for i in range(n - d):
            j = i + d
            acc = MultiPoly()
            for k in range(i + 1, j + 1):
                if not A[i][k].is_zero() and not out[k][j].is_zero():
                    acc = acc + A[i][k] * out[k][j]
            out[i][j] = -(inv_diag[i] * acc)
    return out


def unipotent_inverse(A: Matrix) -> Matrix:
    one = MultiPoly.const(1)
    return upper_inverse(A, [one] * len(A))


def rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q by exact elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m or not m[0]:
        return 0
    r = 0
    ncol = len(m[0])
    for c in range(ncol):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def int_matmul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
