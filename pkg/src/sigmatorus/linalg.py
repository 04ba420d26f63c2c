"""Exact matrix helpers and a Smith normal form over Euclidean rings.

Matrices are lists of rows.  Rational matrices hold Fractions; the Smith
routine is generic over a small ring descriptor so that the same
elimination serves Z (torsion quotients) and Q[T] (subgroup presentations).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import qpoly
from .errors import SingularMatrixError

Matrix = list  # list[list[Any]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    A = [[Fraction(x) for x in row] for row in rows]
    if not A or any(len(row) != len(A) for row in A):
        raise ValueError("matrix must be square and non-empty")
    return A


def identity(n: int, one=Fraction(1), zero=Fraction(0)) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0))
             for j in range(len(B[0]))] for i in range(len(A))]


def matvec(A: Matrix, v: Sequence) -> list:
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def matpow(A: Matrix, e: int) -> Matrix:
    result = identity(len(A))
    base = A
    while e:
        if e & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        e >>= 1
    return result


def charpoly(A: Matrix) -> qpoly.QPoly:
    """Monic characteristic polynomial det(T·I - A), ascending coefficients.

    Faddeev-LeVerrier recursion; exact over Q.
    """
    n = len(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        AM = matmul(A, M) if k > 1 else [[Fraction(0)] * n for _ in range(n)]
        c_prev = coeffs[n - k + 1]
        M = [[AM[i][j] + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        AMk = matmul(A, M)
        coeffs[n - k] = -sum((AMk[i][i] for i in range(n)), Fraction(0)) / k
    return qpoly.qp(coeffs)


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def det(A: Matrix) -> Fraction:
    n = len(A)
    M = [list(map(Fraction, row)) for row in A]
    d = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            d = -d
        d *= M[col][col]
        for r in range(col + 1, n):
            if M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return d


def row_sum_norm(A: Matrix) -> Fraction:
    return max(sum((abs(x) for x in row), Fraction(0)) for row in A)


# ---------------------------------------------------------------------------
# Smith normal form over a Euclidean ring


@dataclass(frozen=True)
class EuclideanRing:
    zero: Any
    one: Any
    add: Callable
    sub: Callable
    mul: Callable
    divmod: Callable
    norm: Callable          # Euclidean size of a nonzero element
    normal_unit: Callable   # unit u with u*x in normal form
    is_zero: Callable


INTEGERS = EuclideanRing(
    zero=0, one=1,
    add=lambda a, b: a + b, sub=lambda a, b: a - b, mul=lambda a, b: a * b,
    divmod=divmod, norm=abs,
    normal_unit=lambda x: -1 if x < 0 else 1,
    is_zero=lambda x: x == 0,
)

RATIONAL_POLYS = EuclideanRing(
    zero=(), one=(Fraction(1),),
    add=qpoly.add, sub=qpoly.sub, mul=qpoly.mul,
    divmod=qpoly.divmod_, norm=qpoly.deg,
    normal_unit=lambda f: (1 / f[-1],),
    is_zero=lambda f: not f,
)


def smith_normal_form(M: Matrix, ring: EuclideanRing = INTEGERS):
    """Return (U, D, V) with U·M·V = D diagonal and D[i][i] | D[i+1][i+1].

    U and V are invertible over the ring.  Works for rectangular input.
    Diagonal entries are brought to the ring's normal form (nonnegative
    integers, monic polynomials).
    """
    m, n = len(M), len(M[0])
    A = [list(row) for row in M]
    U = [[ring.one if i == j else ring.zero for j in range(m)] for i in range(m)]
    V = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]

    def row_axpy(X, dst, src, q):  # row dst -= q * row src
        X[dst] = [ring.sub(a, ring.mul(q, b)) for a, b in zip(X[dst], X[src])]

    def col_axpy(X, dst, src, q):  # col dst -= q * col src
        for row in X:
            row[dst] = ring.sub(row[dst], ring.mul(q, row[src]))

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if not ring.is_zero(A[i][j]):
                        sz = ring.norm(A[i][j])
                        if best is None or sz < best[0]:
                            best = (sz, i, j)
            if best is None:
                break
            _, i, j = best
            A[t], A[i] = A[i], A[t]
            U[t], U[i] = U[i], U[t]
            for X in (A, V):
                for row in X:
                    row[t], row[j] = row[j], row[t]
            clean = True
            for i in range(t + 1, m):
                if not ring.is_zero(A[i][t]):
                    q, r = ring.divmod(A[i][t], A[t][t])
                    row_axpy(A, i, t, q)
                    row_axpy(U, i, t, q)
                    if not ring.is_zero(r):
                        clean = False
            for j in range(t + 1, n):
                if not ring.is_zero(A[t][j]):
                    q, r = ring.divmod(A[t][j], A[t][t])
                    col_axpy(A, j, t, q)
                    col_axpy(V, j, t, q)
                    if not ring.is_zero(r):
                        clean = False
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if not ring.is_zero(ring.divmod(A[i][j], A[t][t])[1])), None)
            if bad is None:
                break
            # pull the offending row into row t; next pass shrinks the pivot
            i = bad[0]
            A[t] = [ring.add(a, b) for a, b in zip(A[t], A[i])]
            U[t] = [ring.add(a, b) for a, b in zip(U[t], U[i])]
        if t < m and t < n and not ring.is_zero(A[t][t]):
            u = ring.normal_unit(A[t][t])
            A[t] = [ring.mul(u, a) for a in A[t]]
            U[t] = [ring.mul(u, a) for a in U[t]]
    return U, A, V
