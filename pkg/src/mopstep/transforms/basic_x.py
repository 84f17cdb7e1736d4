"""Basic x-Christoffel transform: (w1, w2) -> (x w1, x w2).

Factor pair: omega = S_pert Lambda S_orig^-1 (upper bidiagonal, diagonal
H_pert[n]/H_orig[n] = -B^(n+1)(0)/B^(n)(0), unit superdiagonal) and
Omega = S_orig S_pert^-1 (unit lower, two subdiagonals, with
Omega[n+2][n] = H_orig[n+2]/H_pert[n]).  They give the LU/UL flip
T_orig = Omega omega, T_pert = omega Omega, the connection rows
x B_pert = omega B_orig and x A_pert,a = Omega^T A_orig,a, and the 2x2
evaluation solve for (Omega[n+1][n], Omega[n+2][n]) at the origin.
"""

from __future__ import annotations

from ..context import SingularEvaluationMatrix
from ..gauss_borel import Factorization, poly_sequence
from ..matrices import shift_lambda, unitriangular_inverse
from ..polynomials import Poly
from ..reports import Check, Report
from ..spectral import recursion_matrix
from .permuting import ConnectionMatrix


def basic_x_christoffel(f_orig: Factorization, f_pert: Factorization):
    """Connection data (omega, Omega) + verification for (w1,w2) -> (xw1,xw2)."""
    ctx = f_orig.ctx
    rep = Report()
    lam = shift_lambda(ctx, f_orig.size)
    omega = f_pert.S @ lam @ f_orig.S_inv()
    Omega = f_orig.S @ unitriangular_inverse(f_pert.S)
    w = min(omega.valid, Omega.valid) - 1
    scale = 1 if ctx.exact else omega.max_abs(w)

    rep.add(Check.residual("xchristoffel_omega_band", w,
                           omega.out_of_band_max(0, 1, w), ctx, scale=scale))
    rep.add(Check.residual("xchristoffel_Omega_band", w,
                           Omega.out_of_band_max(2, 0, w), ctx, scale=scale))

    worst = ctx.zero() * 0
    for n in range(w - 1):
        worst = max(worst, abs(omega[n, n] - f_pert.H[n] / f_orig.H[n]))
        worst = max(worst, abs(omega[n, n + 1] - ctx.one()))
    rep.add(Check.residual("xchristoffel_omega_diag_Hratio", w, worst, ctx))

    worst = ctx.zero() * 0
    for n in range(w - 2):
        worst = max(worst, abs(Omega[n + 2, n] - f_orig.H[n + 2] / f_pert.H[n]))
    rep.add(Check.residual("xchristoffel_Omega_Hratio", w, worst, ctx))

    so, sp = poly_sequence(f_orig), poly_sequence(f_pert)
    x = Poly.of([ctx.zero(), ctx.one()])
    zero = ctx.zero()

    worst = ctx.zero() * 0
    for n in range(w - 1):
        lhs = so.B[n].scale(omega[n, n]) + so.B[n + 1]
        worst = max(worst, lhs.residual_against(x * sp.B[n]))
        worst = max(worst, abs(omega[n, n] + so.B[n + 1](zero) / so.B[n](zero)))
    rep.add(Check.residual("xchristoffel_B_connection", w, worst, ctx))

    worst = ctx.zero() * 0
    for a, fo, fp in ((1, so.A1, sp.A1), (2, so.A2, sp.A2)):
        for n in range(w - 2):
            lhs = fo[n] + fo[n + 1].scale(Omega[n + 1, n]) + fo[n + 2].scale(Omega[n + 2, n])
            worst = max(worst, lhs.residual_against(x * fp[n]))
    rep.add(Check.residual("xchristoffel_A_connection", w, worst, ctx))

    # 2x2 evaluation solve for the Omega rows (Lemma-10 matrix must be regular)
    worst = ctx.zero() * 0
    for n in range(w - 2):
        m11, m12 = so.A1[n + 1](zero), so.A2[n + 1](zero)
        m21, m22 = so.A1[n + 2](zero), so.A2[n + 2](zero)
        det = m11 * m22 - m12 * m21
        if ctx.is_zero(det, scale=max(abs(m11), abs(m22), 1)):
            raise SingularEvaluationMatrix(f"A-evaluation matrix singular at n = {n}")
        r1, r2 = -so.A1[n](zero), -so.A2[n](zero)
        o1 = (r1 * m22 - r2 * m21) / det
        o2 = (m11 * r2 - m21 * r1) / det
        worst = max(worst, abs(o1 - Omega[n + 1, n]), abs(o2 - Omega[n + 2, n]))
    rep.add(Check.residual("xchristoffel_Omega_eval_solve", w, worst, ctx))

    # determinantal (Christoffel formula) forms reproduce the perturbed family
    worst = ctx.zero() * 0
    for n in range(w - 2):
        num = so.B[n + 1] - so.B[n].scale(so.B[n + 1](zero) / so.B[n](zero))
        q = num.exact_div(x, None if ctx.exact else ctx)
        worst = max(worst, q.residual_against(sp.B[n]))
        for fo, fp in ((so.A1, sp.A1), (so.A2, sp.A2)):
            num = fo[n] + fo[n + 1].scale(Omega[n + 1, n]) + fo[n + 2].scale(Omega[n + 2, n])
            q = num.exact_div(x, None if ctx.exact else ctx)
            worst = max(worst, q.residual_against(fp[n]))
    rep.add(Check.residual("xchristoffel_determinantal_formulas", w, worst, ctx))

    # LU flip: T_orig = Omega omega, T_pert = omega Omega
    t_o = recursion_matrix(f_orig).T
    t_p = recursion_matrix(f_pert).T
    w2 = w - 2
    rep.add(Check.residual("xchristoffel_T_eq_Omega_omega", w2,
                           (Omega @ omega).window_residual(t_o, w2), ctx,
                           scale=scale))
    rep.add(Check.residual("xchristoffel_Tpert_eq_omega_Omega", w2,
                           (omega @ Omega).window_residual(t_p, w2), ctx,
                           scale=scale))
    return ConnectionMatrix(omega.with_band(0, 1)), ConnectionMatrix(Omega.with_band(2, 0)), rep
