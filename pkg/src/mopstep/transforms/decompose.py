"""Even/odd factorization of a monic perturbation polynomial.

Any monic P~ factors as P~(x) = p(x^2) P(x) with P non-symmetric (no pair of
opposite nonzero roots) and p collecting the symmetric pairs +-r.  P splits as
P(x) = P_e(x^2) + x P_o(x^2); pi(y) = P_e(y)^2 - y P_o(y)^2 satisfies
pi(x^2) = P(x) P(-x), and the zero set of p*pi is {r_i^2} union {x_j^2}.
All zeros of p*pi are required to be simple.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .. import polynomials
from ..context import Context, MopError, NonMonic, RepeatedZeros, to_mpf
from ..polynomials import Poly


@dataclass(frozen=True)
class EvenOddDecomp:
    ptilde: Poly
    p_sym: Poly        # p(y), zeros r_i^2
    p_nonsym: Poly     # P(x), non-symmetric part
    p_even: Poly       # P_e(y)
    p_odd: Poly        # P_o(y)
    pi: Poly           # pi(y) = P_e^2 - y P_o^2
    r_zeros: tuple     # r_1 .. r_M  (one representative per +- pair)
    x_zeros: tuple     # x_1 .. x_N

    @property
    def M(self) -> int:
        return len(self.r_zeros)

    @property
    def N(self) -> int:
        return len(self.x_zeros)

    @property
    def Ntilde(self) -> int:
        return 2 * self.M + self.N

    @property
    def zero_set(self) -> tuple:
        """Z_{p pi} = (r_1^2 ... r_M^2, x_1^2 ... x_N^2)."""
        return tuple(r * r for r in self.r_zeros) + tuple(x * x for x in self.x_zeros)

    def v_polys(self, a1: Poly, a2: Poly) -> tuple[Poly, Poly]:
        """(v1, v2) = (P_e A1 - x P_o A2, -P_o A1 + P_e A2), all at x."""
        x = Poly.of([0, 1])
        v1 = self.p_even * a1 - x * self.p_odd * a2
        v2 = -self.p_odd * a1 + self.p_even * a2
        return v1, v2


def _find_zeros_float(ptilde: Poly, ctx: Context) -> list:
    coeffs = [to_mpf(c) for c in reversed(ptilde.coeffs)]
    roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=ctx.prec_bits)
    out = []
    for r in roots:
        if abs(mpmath.im(r)) > mpmath.mpf(10) ** (-ctx.prec_bits // 4):
            raise MopError("complex perturbation zeros are not supported")
        out.append(mpmath.re(r))
    return out


def decompose(ptilde: Poly, ctx: Context, zeros=None) -> EvenOddDecomp:
    """Split a monic P~ into symmetric pairs and the non-symmetric rest.

    In exact mode the caller supplies the (rational) zeros; in float mode they
    are found numerically.  The product over supplied zeros must reproduce P~.
    """
    if not ptilde.is_monic():
        raise NonMonic("perturbation polynomial must be monic")
    if zeros is None:
        if ctx.exact:
            raise MopError("exact mode needs the zeros of the perturbation supplied")
        zeros = _find_zeros_float(ptilde, ctx)
    zeros = [ctx.scalar(z) if not hasattr(z, "_mpf_") else z for z in zeros]
    if len(zeros) != ptilde.degree:
        raise MopError("zero count does not match the degree")
    one = ctx.one()
    recon = Poly.from_roots(zeros, one=one)
    if ctx.exact:
        if recon != ptilde:
            raise MopError("supplied zeros do not factor the perturbation")
    else:
        scale = max((abs(c) for c in ptilde.coeffs), default=1)
        if recon.residual_against(ptilde) > ctx.eps_rel * scale * 10**6:
            raise MopError("numerical zeros do not factor the perturbation")

    def close(u, v):
        return u == v if ctx.exact else ctx.close(u, v)

    remaining = list(zeros)
    r_zeros, x_zeros = [], []
    while remaining:
        z = remaining.pop(0)
        mate = next((w for w in remaining if z != 0 and close(w, -z)), None)
        if mate is not None:
            remaining.remove(mate)
            r_zeros.append(abs(z) if ctx.exact else abs(z))
        else:
            x_zeros.append(z)
    p_sym = Poly.from_roots([r * r for r in r_zeros], one=one)
    p_nonsym = Poly.from_roots(x_zeros, one=one)
    pe, po = p_nonsym.even_part(), p_nonsym.odd_part()
    y = Poly.of([ctx.zero(), one])
    pi = pe * pe - y * po * po

    zs = [r * r for r in r_zeros] + [x * x for x in x_zeros]
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            if close(zs[i], zs[j]):
                raise RepeatedZeros(f"zeros of p*pi collide: {zs[i]} ~ {zs[j]}")

    dec = EvenOddDecomp(
        ptilde, p_sym, p_nonsym, pe, po, pi, tuple(r_zeros), tuple(x_zeros)
    )
    _check_invariants(dec, ctx)
    return dec


def _check_invariants(dec: EvenOddDecomp, ctx: Context) -> None:
    x = Poly.of([ctx.zero(), ctx.one()])
    lhs = dec.p_sym.at_x_squared() * dec.p_nonsym
    scale = max((abs(c) for c in dec.ptilde.coeffs), default=1)
    tol_ok = (
        (lhs == dec.ptilde)
        if ctx.exact
        else lhs.residual_against(dec.ptilde) <= ctx.eps_rel * scale * 10**6
    )
    if not tol_ok:
        raise MopError("p(x^2)P(x) != P~(x)")
    even2 = dec.p_even.at_x_squared().scale(2)
    want = dec.p_nonsym + Poly.of([c * (-1) ** i for i, c in enumerate(dec.p_nonsym.coeffs)])
    if ctx.exact and even2 != want:
        raise MopError("even part mismatch")
    pi_x2 = dec.pi.at_x_squared()
    p_minus = Poly.of([c * (-1) ** i for i, c in enumerate(dec.p_nonsym.coeffs)])
    prod = dec.p_nonsym * p_minus
    if ctx.exact and pi_x2 != prod:
        raise MopError("pi(x^2) != P(x)P(-x)")
