"""Truncated generalized power series E((t^Γ)) with exact precision tracking.

A series stores finitely many terms c·t^e plus a precision marker π:
every term with exponent ≤ π is present and exact (π = None means the
series is exact, i.e. a finite sum).  Only truncations are ever
materialized; all arithmetic propagates π conservatively.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .errors import HenselError, InsufficientPrecision, SigmaTorusError, ZeroSeriesError
from .fields import QQ, GaloisField, RationalField, field_from_json
from .reals import Exponent, ExponentGroup, exp_min

log = logging.getLogger(__name__)


def _shift_precision(pi: Optional[Exponent], by: Optional[Exponent]) -> Optional[Exponent]:
    if pi is None or by is None:
        return None
    return pi + by


class HahnSeries:
    __slots__ = ("field", "group", "terms", "precision")

    def __init__(self, field, group: ExponentGroup, terms: Iterable = (),
                 precision: Optional[Exponent] = None):
        self.field = field
        self.group = group
        acc: dict[tuple, object] = {}
        for e, c in terms:
            if not isinstance(e, Exponent):
                e = group.exponent(e)
            elif e.group is not group:
                raise SigmaTorusError("term exponent from a different group")
            c = field.coerce(c)
            acc[e.coords] = field.add(acc[e.coords], c) if e.coords in acc else c
        if precision is not None and not isinstance(precision, Exponent):
            precision = group.exponent(precision)
        self.precision = precision
        self.terms = self._sorted(acc)

    def _sorted(self, acc: dict) -> tuple:
        items = [(Exponent(self.group, k), c) for k, c in acc.items() if c != 0]
        if self.precision is not None:
            items = [(e, c) for e, c in items if e <= self.precision]
        items.sort(key=lambda t: t[0])
        return tuple(items)

    @classmethod
    def _raw(cls, field, group, acc: dict, precision) -> "HahnSeries":
        s = cls.__new__(cls)
        s.field, s.group, s.precision = field, group, precision
        s.terms = s._sorted(acc)
        return s

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, field, group, precision=None) -> "HahnSeries":
        return cls(field, group, (), precision)

    @classmethod
    def constant(cls, field, group, c, precision=None) -> "HahnSeries":
        return cls(field, group, [(group.zero(), c)], precision)

    @classmethod
    def monomial(cls, field, group, c, e, precision=None) -> "HahnSeries":
        return cls(field, group, [(e, c)], precision)

    # -- queries --------------------------------------------------------------
    def is_exact(self) -> bool:
        return self.precision is None

    def is_zero(self) -> bool:
        """Exactly zero (no terms and exact)."""
        return not self.terms and self.precision is None

    def valuation(self) -> Exponent:
        if not self.terms:
            if self.precision is None:
                raise ZeroSeriesError("zero series")
            raise InsufficientPrecision("no terms known up to the precision marker")
        return self.terms[0][0]

    def leading_coeff(self):
        self.valuation()
        return self.terms[0][1]

    def lower_bound(self) -> Optional[Exponent]:
        """Valuation if any term is known, else the precision (None: exact zero)."""
        return self.terms[0][0] if self.terms else self.precision

    def coeff(self, e) -> object:
        if not isinstance(e, Exponent):
            e = self.group.exponent(e)
        for x, c in self.terms:
            if x.coords == e.coords:
                return c
        return self.field.zero

    def support(self) -> list[Exponent]:
        return [e for e, _ in self.terms]

    def __iter__(self) -> Iterator:
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    # -- arithmetic -----------------------------------------------------------
    def _compat(self, other: "HahnSeries"):
        if other.group is not self.group or other.field != self.field:
            raise SigmaTorusError("series over different fields or exponent groups")

    def _acc(self) -> dict:
        return {e.coords: c for e, c in self.terms}

    def __add__(self, other: "HahnSeries") -> "HahnSeries":
        self._compat(other)
        F = self.field
        acc = self._acc()
        for e, c in other.terms:
            acc[e.coords] = F.add(acc[e.coords], c) if e.coords in acc else c
        return HahnSeries._raw(F, self.group, acc, exp_min(self.precision, other.precision))

    def __neg__(self) -> "HahnSeries":
        F = self.field
        return HahnSeries._raw(F, self.group, {e.coords: F.neg(c) for e, c in self.terms}, self.precision)

    def __sub__(self, other: "HahnSeries") -> "HahnSeries":
        return self + (-other)

    def __mul__(self, other) -> "HahnSeries":
        F = self.field
        if not isinstance(other, HahnSeries):
            c = F.coerce(other)
            return HahnSeries._raw(F, self.group, {e.coords: F.mul(c, x) for e, x in self.terms},
                                   self.precision)
        self._compat(other)
        la, lb = self.lower_bound(), other.lower_bound()
        if (la is None and self.precision is None) or (lb is None and other.precision is None):
            return HahnSeries.zero(F, self.group)
        prec = exp_min(_shift_precision(self.precision, lb), _shift_precision(other.precision, la))
        acc: dict[tuple, object] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                k = tuple(a + b for a, b in zip(e1.coords, e2.coords))
                v = F.mul(c1, c2)
                acc[k] = F.add(acc[k], v) if k in acc else v
        return HahnSeries._raw(F, self.group, acc, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "HahnSeries":
        if n < 0:
            raise ValueError("use invert_to for negative powers")
        result = HahnSeries.constant(self.field, self.group, self.field.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def truncate(self, gamma) -> "HahnSeries":
        """a↾γ: terms with exponent ≤ γ; precision min(γ, π)."""
        if not isinstance(gamma, Exponent):
            gamma = self.group.exponent(gamma)
        if self.precision is not None and self.precision < gamma:
            raise InsufficientPrecision(
                f"insufficient precision: truncation at {gamma} beyond precision {self.precision}")
        return HahnSeries._raw(self.field, self.group,
                               {e.coords: c for e, c in self.terms if e <= gamma}, gamma)

    def _clip(self, bound: Exponent) -> "HahnSeries":
        """Drop terms above bound and lower the precision to it (no error)."""
        return HahnSeries._raw(self.field, self.group,
                               {e.coords: c for e, c in self.terms if e <= bound},
                               exp_min(self.precision, bound))

    def exact(self) -> "HahnSeries":
        """The same finite sum, regarded as an exact element."""
        return HahnSeries._raw(self.field, self.group, self._acc(), None)

    def with_precision(self, pi) -> "HahnSeries":
        if pi is not None and not isinstance(pi, Exponent):
            pi = self.group.exponent(pi)
        return HahnSeries._raw(self.field, self.group, self._acc(), exp_min(self.precision, pi))

    def invert_to(self, cutoff) -> "HahnSeries":
        """Inverse known through ``cutoff``.

        a = c·t^v·(1 + r) with v(r) > 0 and (1 + r)^{-1} = Σ (-r)^i summed
        until the powers pass cutoff + v.
        """
        if not isinstance(cutoff, Exponent):
            cutoff = self.group.exponent(cutoff)
        F = self.field
        v = self.valuation()
        c = self.terms[0][1]
        if self.precision is not None:
            reachable = self.precision - v - v
            if reachable < cutoff:
                deficit = cutoff - reachable
                raise InsufficientPrecision(
                    f"cutoff {cutoff} unreachable: inverse known only through {reachable} "
                    f"(deficit {deficit})")
        lead_inv = HahnSeries.monomial(F, self.group, F.inv(c), -v)
        if len(self.terms) == 1 and self.precision is None:
            return lead_inv
        one = HahnSeries.constant(F, self.group, F.one)
        r = self * lead_inv - one
        offset = cutoff + v
        neg_r = -r
        total = one
        power = one
        while True:
            power = (power * neg_r)._clip(offset)
            if not power.terms:
                break
            total = total + power
        result = (total * lead_inv)._clip(cutoff)
        return HahnSeries._raw(F, self.group, result._acc(), cutoff)

    # -- comparison / io --------------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, HahnSeries) and self.group is other.group
                and self.field == other.field and self.terms == other.terms
                and self.precision == other.precision)

    def same_terms(self, other: "HahnSeries") -> bool:
        return self.terms == other.terms

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "group": self.group.to_json(),
            "terms": [[e.to_json(), self.field.fmt(c)] for e, c in self.terms],
            "precision": self.precision.to_json() if self.precision is not None else None,
        }

    @classmethod
    def from_json(cls, obj, group: Optional[ExponentGroup] = None) -> "HahnSeries":
        F = field_from_json(obj.get("field"))
        G = group or ExponentGroup.from_json(obj.get("group", {"weights": ["1"], "d": 1}))
        terms = [(G.exponent(_coords(e)), c if F is not QQ else Fraction(str(c)))
                 for e, c in obj.get("terms", [])]
        pi = obj.get("precision")
        return cls(F, G, terms, G.exponent(_coords(pi)) if pi is not None else None)

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            body = " + ".join(f"{self.field.fmt(c)}·t^{_fmt_coords(e)}" for e, c in self.terms)
        tail = "" if self.precision is None else f" + O(t^>{_fmt_coords(self.precision)})"
        return body + tail


def _coords(e):
    if isinstance(e, (list, tuple)):
        return tuple(Fraction(str(x)) for x in e)
    return (Fraction(str(e)),)


def _fmt_coords(e: Exponent) -> str:
    if len(e.coords) == 1:
        return str(e.coords[0])
    return "(" + ",".join(str(c) for c in e.coords) + ")"


# ---------------------------------------------------------------------------
# polynomials with series coefficients


def poly_eval(P: Sequence[HahnSeries], x: HahnSeries) -> HahnSeries:
    acc = HahnSeries.zero(x.field, x.group)
    for c in reversed(P):
        acc = acc * x + c
    return acc


def poly_derivative(P: Sequence[HahnSeries]) -> list[HahnSeries]:
    return [P[i] * P[i].field.from_int(i) for i in range(1, len(P))]


def _val_or_none(s: HahnSeries) -> Optional[Exponent]:
    return s.terms[0][0] if s.terms else None


def newton_iterates(P: Sequence[HahnSeries], start: HahnSeries, cutoff):
    """Yield (b, v(P(b))) along the Newton iteration until v(P(b)) > cutoff.

    A residual valuation of None means P(b) vanished identically.
    """
    if not isinstance(cutoff, Exponent):
        cutoff = start.group.exponent(cutoff)
    dP = poly_derivative(P)
    b = start
    r = poly_eval(P, b)
    vr = _val_or_none(r)
    if vr is None:
        _require_known(r, cutoff)
        yield b, None
        return
    dr = poly_eval(dP, b)
    vd = _val_or_none(dr)
    zero = start.group.zero()
    if vd is None or not (vr > zero and vr > vd + vd):
        raise HenselError(
            f"Hensel condition fails: v(P(start)) = {vr}, v(P'(start)) = {vd if vd is not None else '∞'}")
    yield b, vr
    work = cutoff - vd
    while True:
        if vr is None or vr > cutoff:
            return
        inv = dr.invert_to(work - vr)
        delta = (r * inv)._clip(work).exact()
        b = b - delta
        r = poly_eval(P, b)
        dr = poly_eval(dP, b)
        new_vr = _val_or_none(r)
        if new_vr is None:
            _require_known(r, cutoff)
            yield b, None
            return
        if _val_or_none(dr) != vd:
            raise HenselError(f"derivative valuation drift: {_val_or_none(dr)} != {vd}")
        if not new_vr > vr:
            raise HenselError(f"residual valuation did not increase: {new_vr} <= {vr}")
        vr = new_vr
        yield b, vr


def _require_known(r: HahnSeries, cutoff: Exponent) -> None:
    if r.precision is not None and r.precision < cutoff:
        raise InsufficientPrecision(f"residual known only through {r.precision} < cutoff {cutoff}")


def newton_lift(P: Sequence[HahnSeries], start: HahnSeries, cutoff) -> HahnSeries:
    """Root b of P near ``start`` with v(P(b)) > cutoff (Hensel's lemma)."""
    b = start
    for b, _ in newton_iterates(P, start, cutoff):
        pass
    return b


# ---------------------------------------------------------------------------
# Artin-Schreier reduction


@dataclass
class ASCertificate:
    outcome: str                      # "solved" | "obstructed"
    solution: Optional[HahnSeries]
    obstruction_exponents: list[Exponent] = field(default_factory=list)
    residue_extension_degree: int = 1

    @property
    def theta(self) -> Optional[Exponent]:
        return self.obstruction_exponents[0] if self.obstruction_exponents else None

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "solution": self.solution.to_json() if self.solution is not None else None,
            "obstruction_exponents": [e.to_json() for e in self.obstruction_exponents],
            "theta": self.theta.to_json() if self.theta is not None else None,
            "residue_extension_degree": self.residue_extension_degree,
        }


def _map_field(s: HahnSeries, F, embed: dict) -> HahnSeries:
    return HahnSeries._raw(F, s.group, {e.coords: embed[c] for e, c in s.terms}, s.precision)


def artin_schreier_reduce(b: HahnSeries, cutoff=None) -> ASCertificate:
    """Reduce X^p - X = b to its wild part.

    Negative terms whose exponent is p-divisible in Γ are replaced via
    d^p - d with d = c^{1/p} t^{e/p}; the others are recorded as
    obstruction exponents.  Without obstructions the residue equation is
    solved (adjoining a degree-p extension of the coefficient field when
    needed) and the positive-valuation part is lifted by Hensel to
    ``cutoff`` (default: the largest exponent in the support).
    """
    F = b.field
    if F.char == 0:
        raise SigmaTorusError("Artin-Schreier reduction needs characteristic p > 0")
    p = F.char
    G = b.group
    zero = G.zero()
    if b.precision is not None and b.precision < zero:
        raise InsufficientPrecision("series must be known through exponent 0")
    work = b
    sol = HahnSeries.zero(F, G)
    obstructions: list[Exponent] = []
    while work.terms and work.terms[0][0] < zero:
        e, c = work.terms[0]
        lead = HahnSeries.monomial(F, G, c, e)
        if e.divisible_by(p):
            d = HahnSeries.monomial(F, G, F.pth_root(c), e.scale(Fraction(1, p)))
            # d^p = c·t^e, so subtracting d^p - d removes the leading term
            work = work - lead + d
            sol = sol + d
        else:
            obstructions.append(e)
            work = work - lead
    if obstructions:
        return ASCertificate("obstructed", sol, obstructions)

    ext = 1
    c0 = work.coeff(zero)
    if c0 != 0:
        root = next((x for x in F.elements() if F.sub(F.pow(x, p), x) == c0), None)
        if root is None:
            F, embed = F.extend(p)
            log.info("residue equation X^p - X = %s needs %r", c0, F)
            work, sol = _map_field(work, F, embed), _map_field(sol, F, embed)
            c0 = embed[c0]
            root = next(x for x in F.elements() if F.sub(F.pow(x, p), x) == c0)
            ext = p
        const = HahnSeries.constant(F, G, root)
        sol = sol + const
        work = work - HahnSeries.constant(F, G, c0)
    if work.terms:
        if cutoff is None:
            cutoff = work.terms[-1][0]
        elif not isinstance(cutoff, Exponent):
            cutoff = G.exponent(cutoff)
        # P(X) = X^p - X - work, P' = -1
        P = [-work, HahnSeries.constant(F, G, F.neg(F.one))] + \
            [HahnSeries.zero(F, G)] * (p - 2) + [HahnSeries.constant(F, G, F.one)]
        sol = sol + newton_lift(P, HahnSeries.zero(F, G), cutoff)
    return ASCertificate("solved", sol, [], ext)


# ---------------------------------------------------------------------------
# σ acting on exponents


def sigma_action(a: HahnSeries, A, frob_power: int = 0) -> HahnSeries:
    """Apply the exponent map e ↦ A·e and a field automorphism to coefficients.

    The precision marker is mapped to A·π and terms beyond it are dropped;
    this is conservative only when A is order preserving on the support,
    which the caller is responsible for.
    """
    G, F = a.group, a.field
    A = [[Fraction(x) for x in row] for row in A]
    if len(A) != G.rank or any(len(row) != G.rank for row in A):
        raise SigmaTorusError("matrix dimension must equal the rank of the exponent group")

    def image(coords):
        new = tuple(sum((A[i][j] * coords[j] for j in range(G.rank)), Fraction(0)) for i in range(G.rank))
        if not G.in_lattice(new):
            raise SigmaTorusError(f"image of exponent {list(map(str, coords))} leaves the group: "
                                  f"{list(map(str, new))}")
        return new

    acc = {}
    for e, c in a.terms:
        acc[image(e.coords)] = F.frobenius(c, frob_power)
    pi = None if a.precision is None else G.exponent(image(a.precision.coords))
    return HahnSeries._raw(F, G, acc, pi)
