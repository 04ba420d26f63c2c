"""Finite quotients A[n]/f(A[n]) for endomorphisms of tori.

For A = G_m^k the n-torsion is (Z/nZ)^k.  σ acts on roots of unity
through some unit s mod n (a free model parameter), so a Laurent matrix
F specializes to an integer matrix by σ ↦ s.  The index of the image
always equals the size of the kernel, which is checked at runtime.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod

from .classify import DiffMatrix
from .errors import SigmaTorusError
from .linalg import INTEGERS, smith_normal_form


@dataclass(frozen=True)
class TorsionModule:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 2 or self.k < 1:
            raise SigmaTorusError("torsion module needs n >= 2 and k >= 1")

    def elements(self):
        return itertools.product(range(self.n), repeat=self.k)


@dataclass(frozen=True)
class TorsionEndo:
    base: TorsionModule
    matrix: tuple[tuple[int, ...], ...]   # reduced mod n
    lift: tuple[tuple[int, ...], ...]     # evaluated mod n², used by phi_map
    s: int

    def apply(self, x, modulus=None):
        m = modulus or self.base.n
        M = self.matrix if modulus is None else self.lift
        return tuple(sum(a * b for a, b in zip(row, x)) % m for row in M)


@dataclass(frozen=True)
class QuotientStructure:
    elementary_divisors: list[int]
    order: int
    kernel_order: int
    index_equals_kernel: bool

    def to_json(self, n=None, s=None) -> dict:
        out = {
            "elementary_divisors": self.elementary_divisors,
            "order": self.order,
            "kernel_order": self.kernel_order,
            "index_equals_kernel": self.index_equals_kernel,
        }
        if n is not None:
            out = {"n": n, "s": s, **out}
        return out


def endo_from_diffmatrix(F: DiffMatrix, n: int, s: int) -> TorsionEndo:
    """Specialize σ ↦ s in every entry (σ⁻¹ ↦ s⁻¹)."""
    if gcd(s, n) != 1:
        raise SigmaTorusError(f"gcd(s, n) must be 1 (s={s}, n={n})")
    n2 = n * n
    lift = tuple(tuple(e.eval_mod(s % n2, n2) for e in row) for row in F.entries)
    mat = tuple(tuple(x % n for x in row) for row in lift)
    return TorsionEndo(TorsionModule(n, F.k), mat, lift, s % n)


def _coker_smith(e: TorsionEndo):
    n, k = e.base.n, e.base.k
    aug = [list(e.matrix[i]) + [n if i == j else 0 for j in range(k)] for i in range(k)]
    U, D, _ = smith_normal_form(aug, INTEGERS)
    return U, [D[i][i] for i in range(k)]


def kernel_order(e: TorsionEndo) -> int:
    """|ker| on (Z/n)^k from the Smith form of the k×k lift: ∏ gcd(d_i, n)."""
    _, D, _ = smith_normal_form([list(r) for r in e.matrix], INTEGERS)
    n = e.base.n
    return prod(gcd(D[i][i], n) for i in range(e.base.k))


def quotient_structure(e: TorsionEndo) -> QuotientStructure:
    _, diag = _coker_smith(e)
    divisors = [d for d in diag if d > 1]
    order = prod(divisors)
    kern = kernel_order(e)
    return QuotientStructure(divisors, order, kern, order == kern)


def _canonical_coset(e: TorsionEndo, w) -> tuple[int, ...]:
    U, diag = _coker_smith(e)
    y = [sum(a * b for a, b in zip(row, w)) for row in U]
    return tuple(y[i] % diag[i] for i in range(len(diag)) if diag[i] > 1)


def phi_map(e: TorsionEndo, a) -> tuple[int, ...]:
    """φ(a) = f(b) + f(A[n]) for n·b = a.

    ``a`` is a vector mod n² lying in A[n] = n·(Z/n²)^k and in the kernel
    of the lifted endomorphism.  With b = a/n, f(b) = n·w and the coset of
    w in (Z/n)^k / M(Z/n)^k is returned in Smith coordinates.
    """
    n, k = e.base.n, e.base.k
    n2 = n * n
    a = tuple(x % n2 for x in a)
    if len(a) != k:
        raise SigmaTorusError("element has wrong rank")
    if any(x % n for x in a) or any(e.apply(a, n2)):
        raise SigmaTorusError("element is not in Ker(f) ∩ A[n]")
    b = tuple(x // n for x in a)
    fb = e.apply(b, n2)
    w = tuple(x // n for x in fb)
    coset = _canonical_coset(e, w)
    # independence of the choice of b: b + n·x gives w + M·x
    for x in itertools.islice(e.base.elements(), 1, 1 + min(n ** k - 1, 8)):
        b2 = tuple((bi + n * xi) % n2 for bi, xi in zip(b, x))
        w2 = tuple(v // n for v in e.apply(b2, n2))
        if _canonical_coset(e, w2) != coset:
            raise AssertionError("phi_map is not well defined on this instance")
    return coset
