"""Coefficient fields: Q and F_{p^k}.

Both expose the same small method surface (add, mul, inv, ...) so that
series and polynomial code is written once.  Elements of F_{p^k} are
plain ints 0 ≤ x < p^k whose base-p digits are the coefficients of a
polynomial in the generator, reduced modulo a fixed irreducible modulus.
"""

from __future__ import annotations

import functools
import itertools
import logging
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from sympy import isprime

from .errors import SigmaTorusError

log = logging.getLogger(__name__)


class RationalField:
    char = 0
    zero = Fraction(0)
    one = Fraction(1)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"

    def coerce(self, x) -> Fraction:
        return Fraction(x) if not isinstance(x, str) else Fraction(x)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def pow(self, a, e: int):
        return a ** e

    def frobenius(self, a, power: int = 1):
        return a

    def to_json(self) -> dict:
        return {"char": 0}

    def fmt(self, a) -> str:
        return str(a)


QQ = RationalField()


def _poly_mod_p_rem(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = list(a)
    inv_lc = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lc % p
        shift = len(a) - len(m)
        if c:
            for i, b in enumerate(m):
                a[shift + i] = (a[shift + i] - c * b) % p
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return a


def _is_irreducible_mod_p(m: Sequence[int], p: int) -> bool:
    k = len(m) - 1
    if k == 1:
        return True
    # brute force is fine at the field sizes used here: no monic factor of degree ≤ k/2
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            f = list(tail) + [1]
            if not _poly_mod_p_rem(list(m), f, p):
                return False
    return True


def default_modulus(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree k over F_p in base-p encoding order."""
    if k == 1:
        return (0, 1)
    for code in range(p ** k):
        tail = [(code // p ** i) % p for i in range(k)]
        if tail[0] == 0:
            continue
        m = tuple(tail) + (1,)
        if _is_irreducible_mod_p(m, p):
            return m
    raise AssertionError("no irreducible polynomial found")


class GaloisField:
    """F_{p^k} with table-driven arithmetic."""

    def __init__(self, p: int, k: int = 1, modulus: Optional[Sequence[int]] = None):
        if not isprime(p):
            raise SigmaTorusError("characteristic must be prime")
        if k < 1:
            raise SigmaTorusError("extension degree must be >= 1")
        self.p, self.k, self.q = p, k, p ** k
        if modulus is None:
            modulus = default_modulus(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise SigmaTorusError("modulus must be monic of degree k")
        if not _is_irreducible_mod_p(modulus, p):
            raise SigmaTorusError("modulus is reducible")
        self.modulus = modulus
        self._build_tables()

    char = property(lambda self: self.p)
    zero = 0
    one = 1

    def _digits(self, a: int) -> list[int]:
        return [(a // self.p ** i) % self.p for i in range(self.k)]

    def _from_digits(self, d: Sequence[int]) -> int:
        return sum((c % self.p) * self.p ** i for i, c in enumerate(d))

    def _build_tables(self):
        q, p = self.q, self.p
        self._add = [[self._from_digits([x + y for x, y in zip(self._digits(a), self._digits(b))])
                      for b in range(q)] for a in range(q)]
        self._neg = [self._from_digits([-x for x in self._digits(a)]) for a in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            da = self._digits(a)
            for b in range(a, q):
                db = self._digits(b)
                prod = [0] * (2 * self.k - 1)
                for i, x in enumerate(da):
                    if x:
                        for j, y in enumerate(db):
                            prod[i + j] += x * y
                r = _poly_mod_p_rem([c % p for c in prod], self.modulus, p) if self.k > 1 else [prod[0] % p]
                mul[a][b] = mul[b][a] = self._from_digits(r)
        self._mul = mul
        self._inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    self._inv[a] = b
                    break

    def __eq__(self, other):
        return isinstance(other, GaloisField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    def coerce(self, x) -> int:
        if isinstance(x, str):
            x = int(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by the characteristic")
            return self.mul(self.from_int(x.numerator), self.inv(self.from_int(x.denominator)))
        x = int(x)
        if not 0 <= x < self.q:
            raise SigmaTorusError(f"element {x} outside 0..{self.q - 1}")
        return x

    def from_int(self, n: int) -> int:
        return n % self.p

    def elements(self) -> Iterator[int]:
        return iter(range(self.q))

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._inv[a]

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self._mul[result][a]
            a = self._mul[a][a]
            e >>= 1
        return result

    def frobenius(self, a, power: int = 1):
        return self.pow(a, self.p ** (power % self.k))

    def pth_root(self, a):
        return self.frobenius(a, self.k - 1)

    def trace(self, a) -> int:
        """Absolute trace to F_p (as an element of the prime field)."""
        t = 0
        for i in range(self.k):
            t = self.add(t, self.frobenius(a, i))
        return t

    def is_square(self, a) -> bool:
        if a == 0 or self.p == 2:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1

    def generator(self) -> int:
        return self.p if self.k > 1 else self.primitive_element()

    @functools.lru_cache(maxsize=None)
    def primitive_element(self) -> int:
        for g in range(2 if self.q > 2 else 1, self.q):
            seen, x = set(), 1
            for _ in range(self.q - 1):
                x = self._mul[x][g]
                seen.add(x)
            if len(seen) == self.q - 1:
                return g
        return 1

    def extend(self, degree: int) -> tuple["GaloisField", dict[int, int]]:
        """Field F_{p^{k·degree}} with an explicit embedding of this field.

        The embedding sends the generator to a root of this field's modulus
        found by exhaustive search in the larger field.
        """
        big = GaloisField(self.p, self.k * degree)
        if self.k == 1:
            return big, {a: a for a in range(self.q)}
        root = next(x for x in big.elements()
                    if _eval_in(big, [big.from_int(c) for c in self.modulus], x) == 0)
        powers = [1]
        for _ in range(self.k - 1):
            powers.append(big.mul(powers[-1], root))
        embed = {}
        for a in range(self.q):
            img = 0
            for c, pw in zip(self._digits(a), powers):
                img = big.add(img, big.mul(big.from_int(c), pw))
            embed[a] = img
        log.info("extended %r to %r for root adjunction", self, big)
        return big, embed

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def fmt(self, a) -> str:
        return str(a)


def _eval_in(F, coeffs, x):
    acc = F.zero
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, x), c)
    return acc


def field_from_json(obj) -> RationalField | GaloisField:
    if obj is None or obj.get("char", None) == 0 or obj.get("p", 0) == 0:
        return QQ
    return GaloisField(int(obj["p"]), int(obj.get("k", 1)), obj.get("modulus"))


# ---------------------------------------------------------------------------
# dense polynomials over a finite field: lists of elements, ascending


def fp_trim(f: list) -> list:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def fp_add(F, f, g):
    n = max(len(f), len(g))
    return fp_trim([F.add(f[i] if i < len(f) else 0, g[i] if i < len(g) else 0) for i in range(n)])


def fp_sub(F, f, g):
    return fp_add(F, f, [F.neg(c) for c in g])


def fp_scale(F, f, c):
    return fp_trim([F.mul(c, a) for a in f])


def fp_mul(F, f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = F.add(out[i + j], F.mul(a, b))
    return fp_trim(out)


def fp_divmod(F, f, g):
    g = fp_trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = fp_trim(f)
    q = [0] * max(len(r) - len(g) + 1, 0)
    inv = F.inv(g[-1])
    while len(r) >= len(g):
        c = F.mul(r[-1], inv)
        shift = len(r) - len(g)
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = F.sub(r[shift + i], F.mul(c, b))
        r = fp_trim(r)
    return fp_trim(q), r


def fp_monic(F, f):
    f = fp_trim(f)
    return fp_scale(F, f, F.inv(f[-1])) if f else f


def fp_gcd(F, f, g):
    f, g = fp_trim(f), fp_trim(g)
    while g:
        f, g = g, fp_divmod(F, f, g)[1]
    return fp_monic(F, f)


def fp_powmod(F, base, e: int, modulus):
    result = [1]
    base = fp_divmod(F, base, modulus)[1]
    while e:
        if e & 1:
            result = fp_divmod(F, fp_mul(F, result, base), modulus)[1]
        base = fp_divmod(F, fp_mul(F, base, base), modulus)[1]
        e >>= 1
    return fp_divmod(F, result, modulus)[1]


def fp_derivative(F, f):
    return fp_trim([F.mul(F.from_int(i), f[i]) for i in range(1, len(f))])


def fp_eval(F, f, x):
    return _eval_in(F, f, x)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def fp_is_irreducible(F, f) -> bool:
    """Rabin's test over F_q."""
    f = fp_monic(F, f)
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    for r in _prime_factors(d):
        h = fp_powmod(F, x, F.q ** (d // r), f)
        if len(fp_gcd(F, fp_sub(F, h, x), f)) - 1 > 0:
            return False
    return fp_sub(F, fp_powmod(F, x, F.q ** d, f), x) == []


def fp_is_square(F, f) -> bool:
    """Whether f is a square in F_q[x] (odd characteristic).

    The monic part is compared against the square of its top-down
    square root; the leading coefficient must be a square in F_q.
    """
    f = fp_trim(f)
    if not f:
        return True
    if F.char == 2:
        raise SigmaTorusError("square test implemented for odd characteristic only")
    if not F.is_square(f[-1]):
        return False
    m = fp_monic(F, f)
    n2 = len(m) - 1
    if n2 % 2:
        return False
    n = n2 // 2
    # g monic of degree n with g² = m: solve for coefficients from the top
    g = [0] * n + [1]
    half = F.inv(F.from_int(2))
    for i in range(n - 1, -1, -1):
        # coefficient of x^{n+i} in g² is 2 g_i + Σ_{j+k=n+i, i<j,k≤n} g_j g_k
        s = 0
        for j in range(i + 1, n + 1):
            kk = n + i - j
            if i < kk <= n:
                s = F.add(s, F.mul(g[j], g[kk]))
        g[i] = F.mul(half, F.sub(m[n + i], s))
    return fp_mul(F, g, g) == m


def fp_is_squarefree(F, f) -> bool:
    f = fp_trim(f)
    if len(f) <= 2:
        return bool(f)
    return len(fp_gcd(F, f, fp_derivative(F, f))) == 1
