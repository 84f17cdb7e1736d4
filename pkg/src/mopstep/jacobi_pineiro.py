"""Jacobi-Pineiro closed forms: H_n, boundary values, deltas, connection entries.

All Gamma-quotients are rewritten as finite Pochhammer products before
evaluation, so results are exact rationals whenever gamma is a nonnegative
integer (and high-precision floats otherwise, via log-Gamma-free products,
since every quotient below telescopes for integer gamma only; non-integer
gamma goes through mpmath.gamma).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath

from .context import Context, MopError, as_fraction, to_mpf


@dataclass(frozen=True)
class JPParams:
    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) <= -1:
            raise MopError("parameters must exceed -1")
        if (self.alpha - self.beta).denominator == 1:
            raise MopError("alpha - beta must not be an integer")

    @staticmethod
    def make(alpha, beta, gamma) -> "JPParams":
        return JPParams(as_fraction(alpha), as_fraction(beta), as_fraction(gamma))

    @property
    def exact_eligible(self) -> bool:
        return self.gamma.denominator == 1 and self.gamma >= 0


def pochhammer(x, n: int):
    """(x)_n = x (x+1) ... (x+n-1)."""
    out = Fraction(1) if isinstance(x, (Fraction, int)) else x * 0 + 1
    for k in range(n):
        out *= x + k
    return out


def _gamma_ratio(top: Fraction, count: int):
    """Gamma(top + count) / Gamma(top) as a finite product = (top)_count."""
    return pochhammer(top, count)


def closed_H(p: JPParams, n: int):
    """H_n from the published product formulas, exact for integer gamma.

    H_{2m} = m! (2m+gamma)! / (m+1+alpha)_{2m+1+gamma}
             * (alpha-beta+1)_m / ((2m+1+alpha+gamma)_m (2m+1+beta+gamma)_m),
    H_{2m+1} = m! (2m+1+gamma)! / (m+1+beta)_{2m+1+gamma}
             * (beta-alpha)_{m+1} / ((2m+2+beta+gamma)_{m+1} (2m+2+alpha+gamma)_{m+1}).
    """
    a, b, g = p.alpha, p.beta, p.gamma
    m, r = divmod(n, 2)
    if p.exact_eligible:
        gi = int(g)
        if r == 0:
            num = Fraction(factorial(m)) * factorial(2 * m + gi)
            num *= pochhammer(a - b + 1, m)
            den = _gamma_ratio(m + 1 + a, 2 * m + 1 + gi)
            den *= pochhammer(2 * m + 1 + a + g, m) * pochhammer(2 * m + 1 + b + g, m)
            return num / den
        num = Fraction(factorial(m)) * factorial(2 * m + 1 + gi)
        num *= pochhammer(b - a, m + 1)
        den = _gamma_ratio(m + 1 + b, 2 * m + 1 + gi)
        den *= pochhammer(2 * m + 2 + b + g, m + 1) * pochhammer(2 * m + 2 + a + g, m + 1)
        return num / den
    ga = mpmath.gamma
    af, bf, gf = (to_mpf(v) for v in (a, b, g))
    if r == 0:
        return (
            mpmath.factorial(m)
            * ga(2 * m + 1 + gf)
            * ga(m + 1 + af)
            / ga(3 * m + 2 + af + gf)
            * pochhammer(af - bf + 1, m)
            / (pochhammer(2 * m + 1 + af + gf, m) * pochhammer(2 * m + 1 + bf + gf, m))
        )
    return (
        mpmath.factorial(m)
        * ga(2 * m + 2 + gf)
        * ga(m + 1 + bf)
        / ga(3 * m + 2 + bf + gf)
        * pochhammer(bf - af, m + 1)
        / (pochhammer(2 * m + 2 + bf + gf, m + 1) * pochhammer(2 * m + 2 + af + gf, m + 1))
    )


def boundary_values(p: JPParams, n: int, m: int):
    """(B_(n,m)(1), B_(n,m)(0)) by Pochhammer products."""
    a, b, g = p.alpha, p.beta, p.gamma
    den = pochhammer(a + g + m + n + 1, n) * pochhammer(b + g + m + n + 1, m)
    at1 = pochhammer(g + 1, m + n) / den
    at0 = Fraction(-1) ** (m + n) * pochhammer(a + 1, n) * pochhammer(b + 1, m) / den
    return at1, at0


def boundary_values_seq(p: JPParams, k: int):
    """(B^(k)(1), B^(k)(0)) along the step-line: (m,m) then (m+1,m)."""
    m, r = divmod(k, 2)
    return boundary_values(p, m + r, m)


def delta_det(p: JPParams, nm: tuple[int, int], kl: tuple[int, int]):
    """delta^((n,m),(k,l)) from the closed form (ratio of Pochhammer products)."""
    n, m = nm
    k, l = kl
    a, b, g = p.alpha, p.beta, p.gamma
    num = Fraction(-1) ** (m + n) * pochhammer(a + 1, n) * pochhammer(b + 1, m) * pochhammer(
        g + 1, k + l
    )
    num -= Fraction(-1) ** (k + l) * pochhammer(a + 1, k) * pochhammer(b + 1, l) * pochhammer(
        g + 1, m + n
    )
    den = (
        pochhammer(a + g + m + n + 1, n)
        * pochhammer(b + g + m + n + 1, m)
        * pochhammer(a + g + k + l + 1, k)
        * pochhammer(b + g + k + l + 1, l)
    )
    return num / den


def permuting_omega(p: JPParams, n: int, parity: int):
    """Connection entries of the permuting transform, closed form.

    parity 0: Omega[2n+1][2n]; parity 1: Omega[2n+2][2n+1].
    """
    a, b, g = p.alpha, p.beta, p.gamma
    if parity == 0:
        num = (2 * n + 1 + g) * (2 * n + 1 + b + g) * (b - a + n)
        den = (3 * n + 2 + a + g) * (3 * n + 1 + b + g) * (3 * n + 2 + b + g)
    else:
        num = Fraction((n + 1)) * (2 * n + 2 + g)
        den = (3 * n + 3 + a + g) * (3 * n + 4 + a + g)
    return num / den


def permuting_omega_entry(p: JPParams, row: int):
    """Omega[row][row-1] for the permuting transform, any row >= 1."""
    n, r = divmod(row - 1, 2)
    return permuting_omega(p, n, r)


def h_comparison_table(p: JPParams, ctx: Context, n_max: int, factorized_H, seq=None) -> str:
    """CSV: n, H_n(closed), H_n(LU), B(0), B(1)."""
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["n", "H_closed", "H_factorized", "B_at_0", "B_at_1"])
    for n in range(n_max + 1):
        at1, at0 = boundary_values_seq(p, n)
        w.writerow(
            [
                n,
                ctx.format(ctx.scalar(closed_H(p, n)) if p.exact_eligible else closed_H(p, n)),
                ctx.format(factorized_H[n]),
                ctx.format(ctx.scalar(at0) if p.exact_eligible else to_mpf(at0)),
                ctx.format(ctx.scalar(at1) if p.exact_eligible else to_mpf(at1)),
            ]
        )
    return buf.getvalue()
