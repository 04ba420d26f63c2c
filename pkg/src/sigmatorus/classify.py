"""Subgroup presentations over the Laurent ring and their classification.

A k×k matrix F of Laurent polynomials in σ presents Ker(F) ⊆ G_m^k.
Over Q[σ, σ⁻¹] (a PID) F is equivalent to a diagonal matrix of invariant
factors, from which the transcendence degree, a factor-count bound on the
rank and the modularity verdict are read off.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from . import linalg, qpoly
from .errors import SigmaTorusError, SingularMatrixError
from .laurent import (
    IntPoly,
    LaurentPoly,
    ModularityVerdict,
    cyclotomic,
    euler_phi,
    factor_rational,
    is_modular,
    normalize,
)


@dataclass(frozen=True)
class DiffMatrix:
    entries: tuple[tuple[LaurentPoly, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(e if isinstance(e, LaurentPoly) else LaurentPoly.const(e) for e in row)
                     for row in self.entries)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise SigmaTorusError("DiffMatrix must be square with k >= 1")
        object.__setattr__(self, "entries", rows)

    @property
    def k(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "DiffMatrix") -> "DiffMatrix":
        return DiffMatrix(tuple(laurent_matmul(self.entries, other.entries)))

    def det(self) -> LaurentPoly:
        return _laurent_det([list(r) for r in self.entries])

    def to_json(self) -> list:
        return [[e.to_json() for e in row] for row in self.entries]

    @classmethod
    def diag(cls, polys: Sequence[LaurentPoly]) -> "DiffMatrix":
        k = len(polys)
        zero = LaurentPoly()
        return cls(tuple(tuple(polys[i] if i == j else zero for j in range(k)) for i in range(k)))


def laurent_matmul(A, B):
    zero = LaurentPoly()
    return [tuple(sum((A[i][t] * B[t][j] for t in range(len(B))), zero)
                  for j in range(len(B[0]))) for i in range(len(A))]


def _laurent_det(M) -> LaurentPoly:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = LaurentPoly()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _laurent_det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def _laurent_from_qpoly(f: qpoly.QPoly, shift: int = 0) -> LaurentPoly:
    return LaurentPoly({i + shift: c for i, c in enumerate(f)})


@dataclass(frozen=True)
class SmithForm:
    U: DiffMatrix
    D: DiffMatrix
    V: DiffMatrix

    @property
    def invariant_factors(self) -> list[LaurentPoly]:
        return [self.D[i, i] for i in range(self.D.k)]


def smith_form(F: DiffMatrix) -> SmithForm:
    """U·F·V = D over Q[σ, σ⁻¹] with a divisibility chain on the diagonal.

    Nonzero diagonal entries are primitive integer polynomials with
    positive leading coefficient and lowest exponent 0.
    """
    k = F.k
    lows = [e.low for row in F.entries for e in row if not e.is_zero()]
    shift = -min(lows) if lows else 0
    # σ^shift·F has polynomial entries; σ^shift is a unit
    M = [[qpoly.qp(_ascending(e, shift)) for e in row] for row in F.entries]
    U, D, V = linalg.smith_normal_form(M, linalg.RATIONAL_POLYS)

    Ul = [[_laurent_from_qpoly(x, shift) for x in row] for row in U]
    Vl = [[_laurent_from_qpoly(x) for x in row] for row in V]
    diag = []
    for t in range(k):
        g = D[t][t]
        if not g:
            diag.append(LaurentPoly())
            continue
        s = next(i for i, c in enumerate(g) if c != 0)
        prim = qpoly.to_primitive_int(g[s:])
        # prim = lc(prim) · σ^{-s} · g ; fold that unit into row t of U
        unit = LaurentPoly({-s: prim[-1]})
        Ul[t] = [unit * x for x in Ul[t]]
        diag.append(LaurentPoly.from_ascending(prim))
    return SmithForm(DiffMatrix(tuple(map(tuple, Ul))), DiffMatrix.diag(diag),
                     DiffMatrix(tuple(map(tuple, Vl))))


def _ascending(e: LaurentPoly, shift: int) -> list:
    if e.is_zero():
        return []
    return [e[i - shift] for i in range(0, e.high + shift + 1)]


@dataclass(frozen=True)
class ClassifyReport:
    invariant_factors: list[LaurentPoly]
    trdeg: Optional[int]
    content: int
    connected_necessary: bool
    ev_su_upper: int
    c_minimal: bool
    modularity: ModularityVerdict
    finite_rank: bool = True

    def to_json(self) -> dict:
        return {
            "invariant_factors": [f.to_json() for f in self.invariant_factors],
            "trdeg": self.trdeg,
            "finite_rank": self.finite_rank,
            "content": self.content,
            "connected_necessary": self.connected_necessary,
            "ev_su_upper": self.ev_su_upper,
            "c_minimal": self.c_minimal,
            "modularity": self.modularity.to_json(),
        }


def classify(F: DiffMatrix, p: int) -> ClassifyReport:
    """Assemble the classification report of Ker(F).

    ``content`` is the content of det(F); content 1 is only a necessary
    condition for connectedness.  ``ev_su_upper`` counts irreducible
    factors with multiplicity and only bounds the rank from above.
    """
    snf = smith_form(F)
    factors = snf.invariant_factors
    nonzero = [f for f in factors if not f.is_zero()]
    finite = len(nonzero) == len(factors)
    det = F.det()
    if not det.is_zero():
        cont = normalize(det)[1].content()
    else:
        cont = 0
        for row in F.entries:
            for e in row:
                if not e.is_zero():
                    cont = gcd(cont, normalize(e)[1].content())
    ev = 0
    product = LaurentPoly.const(1)
    for f in nonzero:
        product = product * f
        ev += sum(m for _, m in factor_rational(normalize(f)[1]))
    trdeg = sum(f.high for f in nonzero) if finite else None
    return ClassifyReport(
        invariant_factors=factors,
        trdeg=trdeg,
        content=cont,
        connected_necessary=cont == 1,
        ev_su_upper=ev,
        c_minimal=finite and ev == 1,
        modularity=is_modular(product, p),
        finite_rank=finite,
    )


def companion_matrix(f: LaurentPoly) -> list[list[Fraction]]:
    """Companion matrix acting on (v(a), …, v(σ^{n-1} a)).

    Subdiagonal ones and last column -d_i/d_n, so that its characteristic
    polynomial is f/d_n.
    """
    _, g = normalize(f)
    n = g.degree
    if n < 1:
        raise SigmaTorusError("constant equation")
    dn = g.lc
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        A[i][n - 1] = Fraction(-g.coeffs[i], dn)
        if i + 1 < n:
            A[i + 1][i] = Fraction(1)
    expected = qpoly.scale(g.to_qpoly(), Fraction(1, dn))
    if linalg.charpoly(A) != expected:
        raise AssertionError("companion matrix characteristic polynomial mismatch")
    return A


def _int_square(M) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in M]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise SigmaTorusError("matrix must be square")
    return rows


def dynamics_charpoly(M) -> LaurentPoly:
    """Characteristic polynomial of an integer matrix, as a polynomial in σ.

    σ(x) = Mx on G_m^n is Ker(σI - M); its Smith reduction has this
    polynomial as the product of invariant factors.
    """
    rows = _int_square(M)
    if linalg.det(rows) == 0:
        raise SingularMatrixError("matrix is singular")
    return _laurent_from_qpoly(linalg.charpoly(rows))


def dynamics_diffmatrix(M) -> DiffMatrix:
    rows = _int_square(M)
    n = len(rows)
    s = LaurentPoly.sigma()
    return DiffMatrix(tuple(tuple((s if i == j else LaurentPoly()) - rows[i][j] for j in range(n))
                            for i in range(n)))


def no_root_of_unity(M) -> bool:
    """True iff no eigenvalue of M is a root of unity."""
    chi = normalize(dynamics_charpoly(M))[1].to_qpoly()
    n = len(M)
    k = 1
    # φ(k) ≥ sqrt(k/2) bounds the search
    while k <= 2 * n * n + 2:
        if euler_phi(k) <= n:
            if qpoly.deg(qpoly.gcd_(chi, cyclotomic(k).to_qpoly())) > 0:
                return False
        k += 1
    return True
