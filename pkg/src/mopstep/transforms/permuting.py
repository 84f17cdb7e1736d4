"""Permuting Christoffel transform: (w1, w2) -> (w2, x w1).

The connection matrix Omega = S_orig S_perm^-1 is unit lower bidiagonal with
Omega[n+1][n] = H_orig[n+1] / H_perm[n] = -A1_orig^(n)(0) / A1_orig^(n+1)(0),
B/A/Q connection rows as in the source relations, kernel connections, and the
evaluation-based Christoffel formulas, all checked as polynomial identities.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..cd_kernels import cd_kernels
from ..context import ZeroAtOrigin
from ..gauss_borel import Factorization, PolySequence, poly_sequence
from ..matrices import TruncMatrix, unitriangular_inverse
from ..polynomials import BiPoly, Poly
from ..reports import Check, Report
from ..spectral import recursion_matrix


@dataclass(frozen=True)
class ConnectionMatrix:
    omega: TruncMatrix
    taus: tuple = ()


def permuting_christoffel(f_orig: Factorization, f_perm: Factorization):
    """Connection data + full verification report for the permuting transform.

    ``f_orig`` is the (w1, w2) system, ``f_perm`` is (w2, x w1).
    """
    ctx = f_orig.ctx
    n = min(f_orig.size, f_perm.size)
    rep = Report()
    omega = f_orig.S @ unitriangular_inverse(f_perm.S)
    w = omega.valid - 1

    rep.add(
        Check.residual(
            "permuting_band", w, omega.out_of_band_max(1, 0, w), ctx,
            scale=omega.max_abs(w) if not ctx.exact else 1,
        )
    )

    worst = ctx.zero() * 0
    for k in range(w - 1):
        worst = max(worst, abs(omega[k + 1, k] - f_orig.H[k + 1] / f_perm.H[k]))
    rep.add(Check.residual("permuting_H_ratio", w, worst, ctx))

    so, sp = poly_sequence(f_orig), poly_sequence(f_perm)
    x = Poly.of([ctx.zero(), ctx.one()])

    worst = ctx.zero() * 0
    for k in range(w - 1):
        lhs = sp.B[k] + (sp.B[k - 1].scale(omega[k, k - 1]) if k else Poly(()))
        worst = max(worst, lhs.residual_against(so.B[k]))
    rep.add(Check.residual("permuting_B_connection", w, worst, ctx))

    for k in range(w):
        if so.A1[k](ctx.zero()) == 0:
            raise ZeroAtOrigin(f"A1^({k})(0) = 0")
    worst = ctx.zero() * 0
    for k in range(w - 1):
        worst = max(
            worst,
            abs(omega[k + 1, k] + so.A1[k](ctx.zero()) / so.A1[k + 1](ctx.zero())),
        )
    rep.add(Check.residual("permuting_A1_at_zero_entry", w, worst, ctx))

    worst1 = worst2 = ctx.zero() * 0
    for k in range(w - 1):
        lhs = so.A1[k] + so.A1[k + 1].scale(omega[k + 1, k])
        worst1 = max(worst1, lhs.residual_against(x * sp.A2[k]))
        lhs = so.A2[k] + so.A2[k + 1].scale(omega[k + 1, k])
        worst2 = max(worst2, lhs.residual_against(sp.A1[k]))
    rep.add(Check.residual("permuting_A1_connection", w, worst1, ctx))
    rep.add(Check.residual("permuting_A2_connection", w, worst2, ctx))

    # kernel relations at truncation n: three families
    worst = ctx.zero() * 0
    for kn in range(2, min(w - 1, 7)):
        k1o, k2o = cd_kernels(so, kn)
        k1p, k2p = cd_kernels(sp, kn)
        om = omega[kn, kn - 1]
        d1 = k1p - k2o - BiPoly.outer(sp.B[kn - 1], so.A2[kn].scale(om))
        d2 = k2p.shift(0, 1) - k1o - BiPoly.outer(sp.B[kn - 1], so.A1[kn].scale(om))
        worst = max(worst, d1.max_abs(), d2.max_abs())
    rep.add(Check.residual("permuting_kernel_connection", w, worst, ctx))

    # Christoffel formulas: B_perm from K1(x, 0), the T-version, A/Q rows
    rec = recursion_matrix(f_orig)
    t = rec.T
    worst_k = worst_t = ctx.zero() * 0
    zero = ctx.zero()
    for k in range(w - 2):
        knl = cd_kernels(so, k + 1)[0]
        num = knl.eval_y(zero)
        worst_k = max(
            worst_k,
            num.scale(1 / so.A1[k](zero)).residual_against(sp.B[k]),
        )
        coef = (so.A1[k - 1](zero) / so.A1[k](zero) if k else zero) + t[k, k]
        r = so.B[k + 1] + so.B[k].scale(coef)
        if k >= 1:
            r = r - so.B[k - 1].scale(so.A1[k + 1](zero) / so.A1[k](zero) * t[k + 1, k - 1])
        worst_t = max(worst_t, (x * sp.B[k]).residual_against(r))
    rep.add(Check.residual("permuting_christoffel_formula_kernel", w, worst_k, ctx))
    rep.add(Check.residual("permuting_christoffel_formula_T", w, worst_t, ctx))

    # H relation: H_perm[n] = -(A1^(n+1)(0)/A1^(n)(0)) H_orig[n+1]
    worst = ctx.zero() * 0
    for k in range(w - 1):
        want = -so.A1[k + 1](zero) / so.A1[k](zero) * f_orig.H[k + 1]
        worst = max(worst, abs(f_perm.H[k] - want))
    rep.add(Check.residual("permuting_H_relation", w, worst, ctx))

    # Q connection via weight-combination split: coefficient of w1 and of w2
    worst = ctx.zero() * 0
    for k in range(w - 1):
        c_w1 = so.A1[k] + so.A1[k + 1].scale(omega[k + 1, k]) - x * sp.A2[k]
        c_w2 = so.A2[k] + so.A2[k + 1].scale(omega[k + 1, k]) - sp.A1[k]
        worst = max(worst, c_w1.residual_against(Poly(())), c_w2.residual_against(Poly(())))
    rep.add(Check.residual("permuting_Q_connection", w, worst, ctx))

    return ConnectionMatrix(omega.with_band(1, 0)), rep
