"""Laurent polynomials in σ and the modularity decision procedure.

A difference equation ∏ σ^i(x)^{d_i} = 1 on G_m is presented by the
Laurent polynomial f = Σ d_i σ^i.  Ker(f) is modular exactly when f
shares no root with any T^m - p^ℓ (m ≥ 1, ℓ ∈ Z); in characteristic zero
the family degenerates to T^m - 1.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Optional

from sympy import ZZ, isprime
from sympy.polys.factortools import dup_factor_list

from . import linalg, qpoly
from .errors import SigmaTorusError, ZeroPolynomialError


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


class LaurentPoly:
    """Immutable Laurent polynomial Σ c_k σ^k with integer (or rational) coefficients."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, object] = {}
        for k, c in items:
            if isinstance(c, str):
                c = Fraction(c)
            acc[int(k)] = acc.get(int(k), 0) + c
        self._coeffs = {k: _clean(c) for k, c in sorted(acc.items()) if c != 0}
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def sigma(cls, k: int = 1) -> "LaurentPoly":
        return cls({k: 1})

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def from_ascending(cls, coeffs: Iterable, shift: int = 0) -> "LaurentPoly":
        return cls({i + shift: c for i, c in enumerate(coeffs)})

    # -- basic queries ------------------------------------------------------
    @property
    def coeffs(self) -> dict[int, object]:
        return dict(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def low(self) -> int:
        if not self._coeffs:
            raise ZeroPolynomialError("zero polynomial")
        return next(iter(self._coeffs))

    @property
    def high(self) -> int:
        if not self._coeffs:
            raise ZeroPolynomialError("zero polynomial")
        return next(reversed(self._coeffs))

    def degree_span(self) -> int:
        return self.high - self.low

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._coeffs.values())

    def is_monomial(self) -> bool:
        return len(self._coeffs) == 1

    def __getitem__(self, k: int):
        return self._coeffs.get(k, 0)

    def terms(self):
        return list(self._coeffs.items())

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._coeffs)
        for k, c in other._coeffs.items():
            acc[k] = acc.get(k, 0) + c
        return LaurentPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[int, object] = {}
        for i, a in self._coeffs.items():
            for j, b in other._coeffs.items():
                acc[i + j] = acc.get(i + j, 0) + a * b
        return LaurentPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            if not self.is_monomial():
                raise ValueError("only monomials are invertible")
            (k, c), = self._coeffs.items()
            return LaurentPoly({k * e: Fraction(c) ** e})
        result = LaurentPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self._coeffs == other._coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._coeffs.items()))
        return self._hash

    def __call__(self, x):
        """Evaluate at x (negative exponents need x invertible)."""
        return sum((c * (Fraction(x) ** k if k < 0 else x ** k)
                    for k, c in self._coeffs.items()), 0)

    def eval_mod(self, s: int, n: int) -> int:
        s_inv = pow(s, -1, n) if any(k < 0 for k in self._coeffs) else None
        total = 0
        for k, c in self._coeffs.items():
            if isinstance(c, Fraction):
                c = c.numerator * pow(c.denominator, -1, n)
            base = s if k >= 0 else s_inv
            total += c * pow(base, abs(k), n)
        return total % n

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"terms": [[k, str(c)] for k, c in self._coeffs.items()]}

    @classmethod
    def from_json(cls, obj) -> "LaurentPoly":
        if isinstance(obj, dict):
            obj = obj["terms"]
        return cls((int(k), Fraction(str(c))) for k, c in obj)

    def __repr__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for k, c in reversed(self._coeffs.items()):
            mon = "" if k == 0 else ("σ" if k == 1 else f"σ^{k}")
            if mon and c == 1:
                s = mon
            elif mon and c == -1:
                s = "-" + mon
            else:
                s = f"{c}{'·' + mon if mon else ''}"
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")


def _coerce(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.const(x)
    return NotImplemented


@dataclass(frozen=True)
class IntPoly:
    """Ordinary integer polynomial, ascending coefficients, trimmed."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1]

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def signed_content(self) -> int:
        g = self.content()
        return -g if self.coeffs and self.lc < 0 else g

    def primitive(self) -> "IntPoly":
        g = self.signed_content()
        return IntPoly(tuple(c // g for c in self.coeffs)) if g else self

    def to_qpoly(self):
        return qpoly.qp(self.coeffs)

    def to_laurent(self, shift: int = 0) -> LaurentPoly:
        return LaurentPoly.from_ascending(self.coeffs, shift)

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1) if self.coeffs and other.coeffs else []
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(tuple(out))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"IntPoly{self.coeffs}"


def normalize(f: LaurentPoly) -> tuple[int, IntPoly]:
    """Write f = σ^shift · g with g an ordinary polynomial and g(0) ≠ 0."""
    if f.is_zero():
        raise ZeroPolynomialError("zero polynomial")
    if not f.is_integral():
        raise SigmaTorusError("normalize expects integer coefficients")
    lo, hi = f.low, f.high
    return lo, IntPoly(tuple(f[k] for k in range(lo, hi + 1)))


def content(f: LaurentPoly) -> int:
    return normalize(f)[1].content()


def _sort_key(item):
    poly, _ = item
    return (poly.degree, poly.coeffs)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _find_rational_root(c: list[int]) -> Optional[tuple[int, int]]:
    """(a, b) with b > 0, gcd(a, b) = 1 and c(a/b) = 0, or None."""
    if c[0] == 0:
        return (0, 1)
    n = len(c) - 1
    for b in _divisors(c[-1]):
        for a0 in _divisors(c[0]):
            for a in (a0, -a0):
                if gcd(a, b) != 1:
                    continue
                # b^n·c(a/b) in integers
                if sum(ci * a ** i * b ** (n - i) for i, ci in enumerate(c)) == 0:
                    return (a, b)
    return None


def _factor_low_degree(coeffs: tuple[int, ...]):
    """Factor a polynomial of degree ≤ 3: reducible iff it has a rational root."""
    g = 0
    for x in coeffs:
        g = gcd(g, x)
    cur = [x // g for x in coeffs]
    mult: dict[tuple[int, ...], int] = {}
    while len(cur) > 2:
        r = _find_rational_root(cur)
        if r is None:
            break
        a, b = r
        # exact over Z by Gauss's lemma
        q = _divide_linear(cur, a, b)
        lin = (-a, b)
        mult[lin] = mult.get(lin, 0) + 1
        cur = q
    if len(cur) >= 2:
        key = tuple(cur) if cur[-1] > 0 else tuple(-x for x in cur)
        mult[key] = mult.get(key, 0) + 1
    return [(IntPoly(k), m) for k, m in mult.items()]


def _divide_linear(c: list[int], a: int, b: int) -> list[int]:
    """c / (bT - a) for an exact rational root a/b."""
    n = len(c) - 1
    q = [Fraction(0)] * n
    carry = Fraction(0)
    for i in range(n, 0, -1):
        carry = carry * Fraction(a, b) + Fraction(c[i], b) if i < n else Fraction(c[n], b)
        q[i - 1] = carry
    out = [int(x) for x in q]
    assert all(x.denominator == 1 for x in q)
    return out


@functools.lru_cache(maxsize=65536)
def _factor_cached(coeffs: tuple[int, ...]):
    if len(coeffs) <= 4:
        out = _factor_low_degree(coeffs)
    else:
        _, facs = dup_factor_list([ZZ(c) for c in reversed(coeffs)], ZZ)
        out = []
        for fac, mult in facs:
            p = IntPoly(tuple(int(c) for c in reversed(fac)))
            if p.lc < 0:
                p = IntPoly(tuple(-c for c in p.coeffs))
            out.append((p, mult))
    out.sort(key=_sort_key)
    return tuple(out)


def factor_rational(g: IntPoly) -> list[tuple[IntPoly, int]]:
    """Primitive irreducible factors over Q with multiplicities.

    Factors have positive leading coefficient and are sorted by degree,
    then ascending coefficient tuple.  ``g.signed_content()`` times the
    product recovers g.
    """
    if not g.coeffs:
        raise ZeroPolynomialError("zero polynomial")
    return list(_factor_cached(g.coeffs))


# ---------------------------------------------------------------------------
# cyclotomic polynomials


def euler_phi(k: int) -> int:
    result, m, d = k, k, 2
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            result -= result // d
        d += 1
    if m > 1:
        result -= result // m
    return result


@functools.lru_cache(maxsize=None)
def cyclotomic(k: int) -> IntPoly:
    """Φ_k by exact division of T^k - 1 by the Φ_d for proper divisors d."""
    num = qpoly.qp([-1] + [0] * (k - 1) + [1])
    for d in range(1, k):
        if k % d == 0:
            num, r = qpoly.divmod_(num, cyclotomic(d).to_qpoly())
            assert not r
    return IntPoly(tuple(int(c) for c in num))


def cyclotomic_indices_of_degree(n: int) -> list[int]:
    # φ(k) ≥ sqrt(k/2), so φ(k) = n forces k ≤ 2n²
    return [k for k in range(1, 2 * n * n + 3) if euler_phi(k) == n]


def is_cyclotomic(g: IntPoly) -> Optional[int]:
    """Return k with g = ±Φ_k, or None.  g must be irreducible with g(0) ≠ 0."""
    if not g.coeffs or g.degree < 1:
        raise SigmaTorusError("expected a nonconstant polynomial")
    facs = factor_rational(g)
    if len(facs) != 1 or facs[0][1] != 1:
        raise SigmaTorusError("is_cyclotomic expects an irreducible polynomial")
    q = g.primitive()
    for k in cyclotomic_indices_of_degree(q.degree):
        if cyclotomic(k) == q:
            return k
    return None


# ---------------------------------------------------------------------------
# modularity


@dataclass(frozen=True)
class ModularityVerdict:
    modular: bool
    witnesses: list[tuple[int, int]]
    per_factor: list[tuple[IntPoly, Optional[tuple[int, int]]]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "modular": self.modular,
            "witnesses": [list(w) for w in self.witnesses],
            "per_factor": [
                {"factor": list(q.coeffs), "witness": list(w) if w else None}
                for q, w in self.per_factor
            ],
        }


def check_prime_or_zero(p: int) -> None:
    if p != 0 and not (p > 1 and isprime(p)):
        raise SigmaTorusError("p must be prime or zero")


def _p_adic_exponent(x: int, p: int) -> Optional[int]:
    """e with x = p^e, or None."""
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e if x == 1 else None


def _divides_binomial(q: IntPoly, m: int, p: int, ell: int) -> bool:
    """Exact test: q | T^m - p^ℓ over Q (ℓ may be negative)."""
    t_m = qpoly.powmod(qpoly.qp([0, 1]), m, q.to_qpoly())
    target = qpoly.qp([Fraction(p) ** ell])
    return t_m == target


def _factor_witness(q: IntPoly, p: int) -> Optional[tuple[int, int]]:
    """Minimal (m, ℓ) with q | T^m - p^ℓ, or None.

    q is primitive irreducible with q(0) ≠ 0.  If α^m = p^ℓ for a root α
    then every conjugate has modulus p^{ℓ/m}, so |q(0)/lc| = p^{dℓ/m}.
    Writing that constant as p^u, β = α^d / p^u is a root of unity of
    some order k, and the minimal m divides d·k.
    """
    d = q.degree
    c = Fraction(abs(q.coeffs[0]), q.lc)
    if p == 0 or c == 1:
        k = is_cyclotomic(q)
        return (k, 0) if k is not None else None
    num_e = _p_adic_exponent(c.numerator, p)
    den_e = _p_adic_exponent(c.denominator, p)
    if num_e is None or den_e is None:
        return None
    u = num_e - den_e
    # h has roots α_i^d / p^u; it is Res_X(q(X), p^u T - X^d) up to a
    # constant, built here from power sums of the roots of q.
    h = _power_image(q, d, Fraction(p) ** (-u))
    h_sf = qpoly.monic(qpoly.squarefree_part(h))
    # q irreducible makes h a power of one irreducible, so h_sf is it
    k = None
    for cand in cyclotomic_indices_of_degree(qpoly.deg(h_sf)):
        if cyclotomic(cand).to_qpoly() == h_sf:
            k = cand
            break
    if k is None:
        return None
    for m in range(1, d * k + 1):
        if (d * k) % m or m % k or (m * u) % d:
            continue
        ell = m * u // d
        if _divides_binomial(q, m, p, ell):
            return (m, ell)
    raise AssertionError("cyclotomic β without a matching binomial; inconsistent state")


def _power_image(q: IntPoly, d: int, scale: Fraction) -> qpoly.QPoly:
    """Monic polynomial whose roots are scale·α^d over the roots α of q (Newton identities)."""
    n = q.degree
    c = [Fraction(x, q.lc) for x in q.coeffs]          # monic, c[n] = 1
    P = [Fraction(n)]
    for j in range(1, n * d + 1):
        acc = Fraction(j) * c[n - j] if j <= n else Fraction(0)
        for i in range(1, min(j - 1, n) + 1):
            acc += c[n - i] * P[j - i]
        P.append(-acc)
    S = [None] + [P[j * d] * scale ** j for j in range(1, n + 1)]
    e = [Fraction(1)]
    for k in range(1, n + 1):
        e.append(sum(((-1) ** (i - 1) * e[k - i] * S[i] for i in range(1, k + 1)), Fraction(0)) / k)
    return qpoly.qp([(-1) ** (n - i) * e[n - i] for i in range(n + 1)])


def _companion_of_intpoly(q: IntPoly):
    n = q.degree
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        A[i][n - 1] = Fraction(-q.coeffs[i], q.lc)
        if i + 1 < n:
            A[i + 1][i] = Fraction(1)
    return A


def is_modular(f: LaurentPoly, p: int) -> ModularityVerdict:
    """Decide whether f is coprime to every σ^m - p^ℓ (p = 0: every σ^m - 1).

    Each irreducible factor is tested separately; violating factors
    contribute their minimal witness (m, ℓ).  Witnesses are sorted by m,
    then |ℓ|.
    """
    check_prime_or_zero(p)
    _, g = normalize(f)
    per_factor = []
    for q, _mult in factor_rational(g):
        per_factor.append((q, _factor_witness(q, p)))
    witnesses = sorted({w for _, w in per_factor if w is not None},
                       key=lambda w: (w[0], abs(w[1]), w[1]))
    return ModularityVerdict(not witnesses, witnesses, per_factor)
