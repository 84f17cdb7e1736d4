"""Weight systems (w1, w2, dmu) and their moments.

The base family is Jacobi-Pineiro: w1 = x^alpha, w2 = x^beta on [0, 1] with
dmu = (1-x)^gamma dx, unnormalized.  For gamma a nonnegative integer and
rational alpha, beta every moment is an exact rational via the finite Beta
product

    int_0^1 x^(n+s) (1-x)^gamma dx = gamma! / prod_{j=0..gamma} (n+s+1+j).

Modifications multiply the weight ROW VECTOR on the right by a 2x2 polynomial
matrix, optionally divide by a polynomial and add point masses:

    (v1, v2) = (w1, w2) . M / denom  +  masses.

That single shape covers Christoffel perturbations, the permuting transform,
constant gauge changes, and Geronimus perturbations (denominator pi*p with
masses at its zeros).  Moments of a modification are linear combinations of
base moments when denom == 1, and high-precision quadratures otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath
from mpmath import mpf

from .context import (
    Context,
    MopError,
    NonExactParameters,
    QuadratureDivergence,
    SingularZeroSet,
    as_fraction,
)
from .polynomials import Poly


def _iroot(n: int, r: int) -> int | None:
    """Exact integer r-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n in (0, 1) or r == 1:
        return n
    x = int(round(n ** (1.0 / r))) or 1
    for cand in (x - 1, x, x + 1):
        if cand >= 0 and cand**r == n:
            return cand
    while x**r > n:
        x -= 1
    while (x + 1) ** r <= n:
        x += 1
    return x if x**r == n else None


def exact_pow(x: Fraction, s: Fraction) -> Fraction:
    """x**s as an exact rational; x must be a perfect s.denominator-th power."""
    if s.denominator == 1:
        return Fraction(x) ** s.numerator
    x = Fraction(x)
    pn = _iroot(x.numerator, s.denominator)
    pd = _iroot(x.denominator, s.denominator)
    if pn is None or pd is None:
        raise MopError(f"{x}^{s} is not rational")
    return Fraction(pn, pd) ** s.numerator


@dataclass(frozen=True)
class PointMass:
    """Dirac mass at zeta with per-weight charges (c1, c2)."""

    zeta: object
    c1: object
    c2: object

    def charge(self, a: int):
        return self.c1 if a == 1 else self.c2


@dataclass(frozen=True)
class JacobiPineiro:
    """w1 = x^alpha, w2 = x^beta, dmu = (1-x)^gamma dx on [0, 1]."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    ctx: Context

    def __post_init__(self):
        a, b, g = self.alpha, self.beta, self.gamma
        if min(a, b, g) <= -1:
            raise MopError("Jacobi-Pineiro requires alpha, beta, gamma > -1")
        if (a - b).denominator == 1:
            raise MopError("Jacobi-Pineiro requires alpha - beta not an integer")

    @staticmethod
    def make(alpha, beta, gamma, ctx: Context) -> "JacobiPineiro":
        return JacobiPineiro(as_fraction(alpha), as_fraction(beta), as_fraction(gamma), ctx)

    @property
    def support(self):
        return (Fraction(0), Fraction(1))

    @property
    def exact_eligible(self) -> bool:
        return self.gamma.denominator == 1 and self.gamma >= 0

    def moment(self, a: int, n: int):
        s = self.alpha if a == 1 else self.beta
        if self.ctx.exact:
            if not self.exact_eligible:
                raise NonExactParameters(
                    f"gamma = {self.gamma} not a nonnegative integer; use the float backend"
                )
            g = int(self.gamma)
            den = Fraction(1)
            for j in range(g + 1):
                den *= n + s + 1 + j
            return self.ctx.scalar(Fraction(factorial(g)) / den)
        return _quad_moment(self, a, n)

    def weight(self, a: int, x):
        s = self.alpha if a == 1 else self.beta
        if s == 0:
            return x * 0 + 1
        if self.ctx.exact:
            return exact_pow(x, s)
        return x ** (mpf(s.numerator) / s.denominator)

    def measure_density(self, x):
        if self.gamma == 0:
            return x * 0 + 1
        if self.ctx.exact:
            return exact_pow(1 - x, self.gamma)
        return (1 - x) ** (mpf(self.gamma.numerator) / self.gamma.denominator)

    def sample_points(self) -> list:
        """Interior points where both weights evaluate exactly (perfect powers)."""
        if self.ctx.exact:
            from math import lcm

            L = lcm(self.alpha.denominator, self.beta.denominator, self.gamma.denominator)
            return [Fraction(1, 2) ** L, Fraction(3, 4) ** L]
        return [mpf("0.3"), mpf("0.7")]

    def to_json(self) -> dict:
        return {
            "kind": "jacobi_pineiro",
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "gamma": str(self.gamma),
            "support": ["0", "1"],
        }


@dataclass(frozen=True)
class Modified:
    """(v1, v2) = (w1, w2) . matrix / denom + point masses."""

    base: object
    matrix: tuple  # ((Poly, Poly), (Poly, Poly)), right-multiplier
    denom: Poly = Poly.of([1])
    masses: tuple = ()

    @property
    def ctx(self) -> Context:
        return self.base.ctx

    @property
    def support(self):
        return self.base.support

    def __post_init__(self):
        if self.masses and self.denom.degree < 1:
            raise MopError("point masses require a nontrivial denominator")
        if self.masses:
            zs = [m.zeta for m in self.masses]
            if len(set(zs)) != len(zs):
                raise SingularZeroSet("mass locations must be distinct")

    def is_polynomial(self) -> bool:
        return self.denom.degree == 0 and not self.masses

    def combined(self, a: int) -> tuple[Poly, Poly]:
        """Polynomials (p1, p2) with v_a = (p1 w1 + p2 w2)/denom + masses."""
        col = a - 1
        return self.matrix[0][col], self.matrix[1][col]

    def moment(self, a: int, n: int):
        p1, p2 = self.combined(a)
        if self.is_polynomial():
            c = self.denom[0]
            tot = self.ctx.zero()
            for k, coef in enumerate(p1.coeffs):
                if coef:
                    tot += coef * self.base.moment(1, n + k)
            for k, coef in enumerate(p2.coeffs):
                if coef:
                    tot += coef * self.base.moment(2, n + k)
            return tot / c
        if self.ctx.exact:
            raise NonExactParameters("rational modifications need the float backend")
        val = _quad_moment(self, a, n)
        for m in self.masses:
            val += m.charge(a) * m.zeta**n
        return val

    def weight(self, a: int, x):
        """Continuous part of v_a at x (masses excluded)."""
        p1, p2 = self.combined(a)
        num = p1(x) * self.base.weight(1, x) + p2(x) * self.base.weight(2, x)
        return num / self.denom(x)

    def measure_density(self, x):
        return self.base.measure_density(x)

    def sample_points(self) -> list:
        return [x for x in self.base.sample_points() if self.denom(x) != 0]

    def to_json(self) -> dict:
        ctx = self.ctx
        return {
            "kind": "modified",
            "base": self.base.to_json(),
            "matrix": [[p.to_json(ctx) for p in row] for row in self.matrix],
            "denominator": self.denom.to_json(ctx),
            "masses": [
                {"zeta": ctx.format(m.zeta), "c1": ctx.format(m.c1), "c2": ctx.format(m.c2)}
                for m in self.masses
            ],
        }


WeightSystem = object  # JacobiPineiro | Modified (duck-typed)


def weight_system_from_json(obj: dict, ctx: Context):
    kind = obj["kind"]
    if kind == "jacobi_pineiro":
        return JacobiPineiro.make(obj["alpha"], obj["beta"], obj["gamma"], ctx)
    if kind == "modified":
        base = weight_system_from_json(obj["base"], ctx)
        matrix = tuple(tuple(Poly.from_json(p, ctx) for p in row) for row in obj["matrix"])
        denom = Poly.from_json(obj["denominator"], ctx)
        masses = tuple(
            PointMass(ctx.parse(m["zeta"]), ctx.parse(m["c1"]), ctx.parse(m["c2"]))
            for m in obj.get("masses", [])
        )
        return Modified(base, matrix, denom, masses)
    raise MopError(f"unknown weight system kind {kind!r}")


# -- quadrature ----------------------------------------------------------------

_moment_cache: dict = {}


def _quad_moment(ws, a: int, n: int):
    key = (id(ws), a, n)
    hit = _moment_cache.get(key)
    if hit is not None:
        return hit
    val = quad_weighted(ws, lambda x: x**n, a)
    _moment_cache[key] = val
    return val


def quad_weighted(ws, f, a: int):
    """integral over the support of f(x) * w_a(x) dmu(x), continuous part only."""
    from .context import to_mpf

    lo, hi = (to_mpf(e) for e in ws.support)

    def integrand(x):
        return f(x) * ws.weight(a, x) * ws.measure_density(x)

    val, err = mpmath.quad(integrand, [lo, hi], error=True)
    target = getattr(ws.ctx, "quad_target", None) or mpf("1e-30")
    if err > target * max(1, abs(val)):
        raise QuadratureDivergence(f"estimated error {err} above target {target}")
    return val


def cauchy_moment(ws, poly: Poly, a: int, z):
    """integral of poly(x) w_a(x) dmu(x) / (z - x), plus mass terms."""
    val = quad_weighted(ws, lambda x: poly(x) / (z - x), a)
    for m in getattr(ws, "masses", ()):
        val += m.charge(a) * poly(m.zeta) / (z - m.zeta)
    return val


# -- standard constructions ----------------------------------------------------


def christoffel_matrix(ptilde: Poly) -> tuple:
    """Right-multiplier matrix of Eq-(48) shape for a monic perturbation.

    With P~(x) = p(x^2) P(x) and P~ = P~_e(x^2) + x P~_o(x^2) the perturbed
    weights are v1 = P~_e w1 + P~_o w2, v2 = x P~_o w1 + P~_e w2, where the
    even/odd parts are evaluated at x itself.
    """
    pe, po = ptilde.even_part(), ptilde.odd_part()
    x = Poly.of([0, 1])
    return ((pe, x * po), (po, pe))


def permuting_matrix() -> tuple:
    """(w1, w2) -> (w2, x w1)."""
    x = Poly.of([0, 1])
    zero, one = Poly.of([]), Poly.of([1])
    return ((zero, x), (one, zero))


def gauge_matrix(alpha, beta, gamma) -> tuple:
    """(w1, w2) -> (w1, -(gamma w1 + alpha w2)/beta), the hidden-symmetry gauge."""
    one = Poly.of([1])
    zero = Poly.of([])
    return ((one, Poly.of([-Fraction(gamma) / Fraction(beta)])),
            (zero, Poly.of([-Fraction(alpha) / Fraction(beta)])))


def geronimus_system(base, pe: Poly, po: Poly, p: Poly, masses=()) -> Modified:
    """Geronimus perturbation: (w1, w2) . adj / (pi p) + masses.

    adj = [[P_e, -x P_o], [-P_o, P_e]], pi = P_e^2 - x P_o^2, all in the x
    variable; mass locations must lie in the zero set of pi*p.
    """
    x = Poly.of([0, 1])
    pi = pe * pe - x * po * po
    adj = ((pe, (-1) * (x * po)), ((-1) * po, pe))
    return Modified(base, adj, pi * p, tuple(masses))
