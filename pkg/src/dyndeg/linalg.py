"""Dense exact linear algebra over a FieldSpec (small matrices only)."""

from __future__ import annotations

from typing import Sequence

from .polyring import FieldSpec, PolynomialError

Matrix = list[list]


def coerce_matrix(A: Sequence[Sequence], field: FieldSpec) -> Matrix:
    n = len(A)
    rows = [[field.coerce(x) for x in row] for row in A]
    if any(len(r) != n for r in rows):
        raise PolynomialError("matrix must be square")
    return rows


def identity(n: int, field: FieldSpec) -> Matrix:
    one, zero = field.coerce(1), field.coerce(0)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix, field: FieldSpec) -> Matrix:
    p = field.characteristic
    n, m, k = len(A), len(B[0]), len(B)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = field.coerce(0)
            for t in range(k):
                s = s + A[i][t] * B[t][j]
            row.append(s % p if p else s)
        out.append(row)
    return out


def matvec(A: Matrix, v: Sequence, field: FieldSpec) -> list:
    return [row[0] for row in matmul(A, [[x] for x in v], field)]


def inverse(A: Matrix, field: FieldSpec) -> Matrix:
    """Gauss-Jordan inverse; raises PolynomialError on a singular matrix."""
    n = len(A)
    p = field.characteristic
    M = [list(row) + e for row, e in zip(coerce_matrix(A, field), identity(n, field))]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise PolynomialError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = field.inverse(M[col][col])
        M[col] = [(x * inv) % p if p else x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [((a - f * b) % p if p else a - f * b) for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]
