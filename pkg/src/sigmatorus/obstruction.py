"""Wild-ramification obstruction pipeline and Babbitt σ-stability tests.

Given a modular equation f and an Artin–Schreier datum b = Σ c_ν t^{ν·γ}
with every ν·γ negative and prime to p, a σ-stable extension carrying
the datum would force two exponent vectors ν·A^kγ and ν·A^ℓγ along the
recurrent orbit to be proportional by a power of p.  That makes p^m an
eigenvalue of A^{ℓ-k}, which modularity rules out.  ``obstruct`` runs
the exact eigenvalue check over the return-time pairs it can afford.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .classify import companion_matrix
from .errors import HypothesisViolated, SigmaTorusError
from .fields import (GaloisField, fp_gcd, fp_is_irreducible, fp_is_square,
                     fp_is_squarefree, fp_mul, fp_powmod, fp_sub, fp_trim)
from .laurent import LaurentPoly, check_prime_or_zero, is_modular
from .reals import Exponent, ExponentGroup
from .recurrence import (Budgets, Direction, RecurrenceWitness, find_recurrent_direction,
                         near_returns, power_of_p_exponents)


@dataclass(frozen=True)
class RamificationDatum:
    J: tuple[tuple[int, ...], ...]
    coefficients: tuple
    field: GaloisField
    group: ExponentGroup

    def __post_init__(self):
        J = tuple(tuple(int(x) for x in nu) for nu in self.J)
        object.__setattr__(self, "J", J)
        coeffs = tuple(self.field.coerce(c) for c in self.coefficients) if self.coefficients \
            else (self.field.one,) * len(J)
        if len(coeffs) != len(J):
            raise SigmaTorusError("one coefficient per exponent vector is required")
        if any(c == 0 for c in coeffs):
            raise SigmaTorusError("datum coefficients must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)
        for nu in J:
            if len(nu) != self.group.rank:
                raise SigmaTorusError(f"exponent vector {list(nu)} does not match group rank {self.group.rank}")

    @property
    def p(self) -> int:
        return self.field.p

    def exponents(self) -> list[Exponent]:
        return [self.group.exponent(nu) for nu in self.J]

    def to_json(self) -> dict:
        return {"J": [list(nu) for nu in self.J],
                "coefficients": [self.field.fmt(c) for c in self.coefficients],
                "field": self.field.to_json(), "group": self.group.to_json()}


def theta_invariant(datum: RamificationDatum) -> Exponent:
    """min over J of ν·γ, the valuation of the reduced right-hand side."""
    if not datum.J:
        raise SigmaTorusError("empty ramification datum")
    exps = datum.exponents()
    for e in exps:
        if e.sign() >= 0:
            raise SigmaTorusError(f"datum exponent {e!r} is not negative")
    theta = min(exps)
    if theta.divisible_by(datum.p):
        raise SigmaTorusError("datum not reduced — run artin_schreier_reduce first")
    return theta


@dataclass
class ObstructionReport:
    verdict: str                       # obstructed | inconclusive
    witness: Optional[tuple[int, int]]
    theta: Optional[Exponent]
    trace: list[dict]
    budgets: dict
    recurrence: Optional[RecurrenceWitness] = None

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness else None,
            "theta": None if self.theta is None else
            {"coords": self.theta.to_json(), "approx": float(self.theta)},
            "trace": self.trace,
            "budgets": self.budgets,
        }
        if self.recurrence is not None:
            out["recurrence"] = self.recurrence.to_json()
        return out


def _orient(gamma: Sequence[float], J) -> tuple[float, ...]:
    """Flip γ if needed so that every ν·γ is negative."""
    dots = [sum(a * b for a, b in zip(nu, gamma)) for nu in J]
    if all(d < 0 for d in dots):
        return tuple(gamma)
    if all(d > 0 for d in dots):
        return tuple(-g for g in gamma)
    raise SigmaTorusError("no orientation of γ makes every datum exponent negative")


def obstruct(f: LaurentPoly, p: int, datum: Optional[RamificationDatum] = None,
             J: Optional[Sequence[Sequence[int]]] = None, gamma: Optional[Sequence[float]] = None,
             eps: float = 1e-4, budgets: Budgets = Budgets(), max_pairs: int = 256,
             seed: int = 0) -> ObstructionReport:
    """Decide whether a wild datum is obstructed for the modular equation f.

    Either a full ``datum`` or just the exponent vectors ``J`` may be
    given; in the latter case γ comes from ``gamma`` or from a recurrence
    search on the companion matrix and the coefficients are all 1.
    """
    check_prime_or_zero(p)
    if p == 0:
        raise SigmaTorusError("p must be prime")
    if not is_modular(f, p).modular:
        raise HypothesisViolated("hypothesis violated: f is not modular")
    A = companion_matrix(f)
    n = len(A)
    bjson = {"j_max": budgets.j_max, "orbit_steps": budgets.orbit_steps,
             "samples": budgets.samples, "return_horizon": budgets.return_horizon,
             "max_pairs": max_pairs, "epsilon": eps}

    witness = None
    if datum is not None:
        direction = tuple(float(w) for w in datum.group.weights)
        times = near_returns(A, direction, eps, budgets.return_horizon)
        witness = RecurrenceWitness(Direction(direction), eps, times, "caller-supplied")
    else:
        if J is None:
            J = [tuple(-1 if i == 0 else 0 for i in range(n))]
        if gamma is not None:
            times = near_returns(A, gamma, eps, budgets.return_horizon)
            witness = RecurrenceWitness(Direction(tuple(gamma)), eps, times, "caller-supplied")
        else:
            witness = find_recurrent_direction(A, eps, budgets, seed=seed)
        if witness.status != "found" or not witness.return_times:
            return ObstructionReport("inconclusive", None, None, [], bjson, witness)
        oriented = _orient(witness.direction.vector, J)
        datum = RamificationDatum(J, (), GaloisField(p), ExponentGroup.from_direction(oriented))
        times = witness.return_times
    if len(datum.group.weights) != n:
        raise SigmaTorusError("datum group rank must equal deg f")
    if datum.p != p:
        raise SigmaTorusError("datum field characteristic differs from p")
    theta = theta_invariant(datum)

    trace, found, cache = [], None, {}
    pairs = ((k, l) for i, k in enumerate(times) for l in times[i + 1:]
             if l - k <= budgets.j_max)
    for k, l in pairs:
        if len(trace) >= max_pairs:
            break
        j = l - k
        if j not in cache:
            cache[j] = power_of_p_exponents(A, p, j)
        hits = cache[j]
        trace.append({"k": k, "l": l, "j": j, "m": hits[0] if hits else None})
        if hits and found is None:
            found = (j, hits[0])
    # Modularity excludes every p^m eigenvalue, so a hit would mean an
    # inconsistent input rather than a stable extension.
    if found is None and trace:
        verdict = "obstructed"
    else:
        verdict = "inconclusive"
    return ObstructionReport(verdict, found, theta, trace, bjson, witness)


# ---------------------------------------------------------------------------
# Babbitt σ-stability


@dataclass(frozen=True)
class SigmaStabilityResult:
    stable: bool
    root_count: int
    degree: int

    def to_json(self) -> dict:
        return {"stable": self.stable, "root_count": self.root_count, "degree": self.degree}


def babbitt_finite(P: Sequence, F: GaloisField, e: int = 1) -> SigmaStabilityResult:
    """Count roots of P^σ in F_q[T]/(P) for σ = Frob_p^e on coefficients."""
    P = fp_trim([F.coerce(c) for c in P])
    d = len(P) - 1
    if d < 1 or not fp_is_irreducible(F, P):
        raise SigmaTorusError("P must be irreducible of degree >= 1")
    Ps = [F.frobenius(c, e) for c in P]
    xq = fp_powmod(F, [0, 1], F.q ** d, Ps)
    g = fp_gcd(F, fp_sub(F, xq, [0, 1]), Ps)
    count = len(g) - 1
    if count != d:
        raise AssertionError("finite-field closure violated")
    return SigmaStabilityResult(count == d, count, d)


def _substitute_monomial(F: GaloisField, f: list, c, d: int) -> tuple[list, int]:
    """f(c·x^d) as x^shift · poly, with d possibly negative."""
    out: dict[int, int] = {}
    cp = F.one
    for i, a in enumerate(f):
        if a:
            out[i * d] = F.mul(a, cp)
        cp = F.mul(cp, c)
    shift = min(out) if out else 0
    poly = [0] * (max(out) - shift + 1) if out else []
    for k, a in out.items():
        poly[k - shift] = a
    return fp_trim(poly), shift


def babbitt_quadratic_function_field(g_num: Sequence, g_den: Sequence, F: GaloisField,
                                     c=1, d: int = 1, e: int = 0) -> SigmaStabilityResult:
    """σ-stability of L = F_q(x)(√g) for σ: x ↦ c·x^d (and Frob^e on F_q).

    L is σ-stable iff σ(g) is a square in L, i.e. σ(g) or σ(g)·g is a
    square in F_q(x).  A ratio N/D is a square iff N·D is, so every
    test runs on a polynomial.
    """
    if F.p == 2:
        raise SigmaTorusError("wild quadratic — unsupported")
    if d == 0:
        raise SigmaTorusError("x ↦ c·x^0 is not an automorphism")
    c = F.coerce(c)
    if c == 0:
        raise SigmaTorusError("c must be nonzero")
    num = fp_trim([F.coerce(a) for a in g_num])
    den = fp_trim([F.coerce(a) for a in g_den])
    if not num or not den:
        raise SigmaTorusError("numerator and denominator must be nonzero")
    g = fp_mul(F, num, den)
    if not fp_is_squarefree(F, g):
        raise SigmaTorusError("g must be squarefree")
    frob = lambda f: [F.frobenius(a, e) for a in f]
    sn, kn = _substitute_monomial(F, frob(num), c, d)
    sd, kd = _substitute_monomial(F, frob(den), c, d)
    # σ(g) = x^{kn-kd}·sn/sd  ~  x^{kn-kd}·sn·sd up to squares
    k = kn - kd
    base = fp_mul(F, sn, sd)
    if k % 2:
        base = [0] + base
    stable = fp_is_square(F, base) or fp_is_square(F, fp_mul(F, base, g))
    return SigmaStabilityResult(stable, 2 if stable else 0, 2)
