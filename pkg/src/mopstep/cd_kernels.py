"""Christoffel-Darboux kernels, CD formulas, second-kind functions.

Partial kernels K_a^(n)(x,y) = sum_{m<n} B^(m)(x) A_a^(m)(y) are kept as exact
bivariate coefficient grids; the full kernel K^(n) weights them by w_a(y) and
is only ever evaluated pointwise.  The partial CD formula moves (x - y)K_a^(n)
to a five-term bilinear combination with recursion-matrix coefficients and is
checked as an identity of coefficient grids.
"""

from __future__ import annotations

from mpmath import mpf

from .context import TooCloseToSupport, to_mpf
from .gauss_borel import PolySequence
from .polynomials import BiPoly, Poly
from .reports import Check, Report
from .spectral import RecursionMatrix
from .weights import cauchy_moment


def cd_kernels(seq: PolySequence, n: int) -> tuple[BiPoly, BiPoly]:
    """(K_1^(n), K_2^(n)) as bivariate coefficient grids."""
    k1 = BiPoly.zero()
    k2 = BiPoly.zero()
    for m in range(n):
        k1 = k1 + BiPoly.outer(seq.B[m], seq.A1[m])
        k2 = k2 + BiPoly.outer(seq.B[m], seq.A2[m])
    return k1, k2


def full_kernel_eval(seq: PolySequence, n: int, x, y):
    """K^(n)(x, y) = w1(y) K_1 + w2(y) K_2 evaluated pointwise."""
    k1, k2 = cd_kernels(seq, n)
    ws = seq.ws
    return ws.weight(1, y) * k1.eval(x, y) + ws.weight(2, y) * k2.eval(x, y)


def _cd_rhs(seq: PolySequence, t, n: int, fam) -> BiPoly:
    rhs = BiPoly.outer(seq.B[n], fam[n - 1])
    mid = seq.B[n - 2].scale(t[n, n - 2]) + seq.B[n - 1].scale(t[n, n - 1])
    rhs = rhs - BiPoly.outer(mid, fam[n])
    rhs = rhs - BiPoly.outer(seq.B[n - 1], fam[n + 1].scale(t[n + 1, n - 1]))
    return rhs


def verify_cd_formula(seq: PolySequence, rec: RecursionMatrix, n_lo: int, n_hi: int) -> Report:
    """(x-y) K_a^(n) equals the five-term combination, exactly, for each n, a."""
    ctx = seq.ctx
    t = rec.T
    rep = Report()
    worst = ctx.zero() * 0
    for a, fam in ((1, seq.A1), (2, seq.A2)):
        for n in range(n_lo, n_hi + 1):
            k = cd_kernels(seq, n)[a - 1]
            lhs = k.shift(1, 0) - k.shift(0, 1)
            diff = lhs - _cd_rhs(seq, t, n, fam)
            worst = max(worst, diff.max_abs())
    rep.add(Check.residual("cd_partial_formula", n_hi, worst, ctx))

    # full-kernel version at exactly evaluable sample points
    pts = seq.ws.sample_points()
    worstq = ctx.zero() * 0
    for n in range(n_lo, min(n_hi, n_lo + 2) + 1):
        for x0 in pts:
            for y0 in pts:
                lhs = (x0 - y0) * full_kernel_eval(seq, n, x0, y0)
                qv = [seq.Q_eval(m, y0) for m in range(n + 2)]
                rhs = seq.B[n](x0) * qv[n - 1]
                rhs -= (t[n, n - 2] * seq.B[n - 2](x0) + t[n, n - 1] * seq.B[n - 1](x0)) * qv[n]
                rhs -= seq.B[n - 1](x0) * qv[n + 1] * t[n + 1, n - 1]
                worstq = max(worstq, abs(lhs - rhs))
    rep.add(Check.residual("cd_full_formula_sampled", n_hi, worstq, ctx))
    return rep


def reproducing_residual(seq: PolySequence, n: int):
    """max_m |int K^(n)(x,y) B^(m)(y) dmu(y) - B^(m)(x)| coefficients, m < n."""
    from .gauss_borel import integrate_poly

    ctx = seq.ctx
    worst = ctx.zero() * 0
    for m in range(n):
        acc = Poly(())
        for l in range(n):
            c1 = integrate_poly(seq.ws, seq.A1[l] * seq.B[m], 1)
            c2 = integrate_poly(seq.ws, seq.A2[l] * seq.B[m], 2)
            acc = acc + seq.B[l].scale(c1 + c2)
        worst = max(worst, acc.residual_against(seq.B[m]))
    return worst


def second_kind(seq: PolySequence, z, n_max: int, delta_min=None) -> list:
    """Cauchy transforms C_a^(n)(z) = int B^(n)(x) w_a(x) dmu(x) / (z - x).

    Float backend; z must keep distance delta_min (default 1e-3) from the
    support.  Returns [(C_1^(n)(z), C_2^(n)(z))] for n <= n_max.
    """
    ws = seq.ws
    lo, hi = (to_mpf(e) for e in ws.support)
    delta_min = mpf("0.001") if delta_min is None else delta_min
    zf = to_mpf(z)
    dist = max(lo - zf, zf - hi)
    if dist < delta_min:
        raise TooCloseToSupport(f"z = {z} within {delta_min} of the support")
    out = []
    for n in range(n_max + 1):
        out.append(
            (
                cauchy_moment(ws, seq.B[n], 1, zf),
                cauchy_moment(ws, seq.B[n], 2, zf),
            )
        )
    return out


def second_kind_q(seq: PolySequence, z, n_max: int) -> list:
    """Cauchy transforms of the linear forms, C^(n)(z) = int Q^(n)/(z-x) dx."""
    vals = second_kind(seq, z, n_max)
    return [c1 + c2 for (c1, c2) in vals]


def mixed_kernels(seq: PolySequence, x, y, n: int, cached_c=None):
    """2x2 grid K_{a,b}^(n)(x,y) = sum_{l<n} C_b^(l)(x) A_a^(l)(y)."""
    cvals = second_kind(seq, x, n - 1) if cached_c is None else cached_c
    out = [[seq.ctx.zero()] * 2 for _ in range(2)]
    for a, fam in ((1, seq.A1), (2, seq.A2)):
        for b in (1, 2):
            s = seq.ctx.zero()
            for l in range(n):
                s += cvals[l][b - 1] * fam[l](y)
            out[a - 1][b - 1] = s
    return out
