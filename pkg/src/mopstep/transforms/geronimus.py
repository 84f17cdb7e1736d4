"""General Geronimus transform: division by pi*p plus point masses at its zeros.

Float backend throughout: the perturbed moments are quadratures.  The checks
mirror the Christoffel side but run on second-kind (Cauchy-transform) data:

* moment relation  g_check P~(Lambda^T) = g,
* Omega = S_check S^-1, unit lower with Ntilde subdiagonals, dressed form,
* connection rows Omega B = B_check and Omega^T A_check = P~-matrix A,
* Corollaries 4-5 for the transformed second-kind functions,
* W-vectors at the squared zeros, tau-check determinants, the Lemma-16 row
  solve, and the bordered-determinant formulas for B_check and A_check,
* the kappa kernels of the mass-aware connection identity and the mixed-CD
  connection at sampled points.

tau-check vanishing is reported, never repaired (no nonvanishing theorem
exists for the Geronimus side).
"""

from __future__ import annotations

from mpmath import mpf

from ..cd_kernels import second_kind
from ..context import MopError, to_mpf
from ..gauss_borel import Factorization, factorize, poly_sequence
from ..matrices import det_grid, shift_lambda, unitriangular_inverse
from ..moments import MomentMatrix, build_moment_matrix, geronimus_moments
from ..polynomials import Poly
from ..reports import Check, Report
from .decompose import EvenOddDecomp
from .permuting import ConnectionMatrix


def _mass_charge(masses, zeta, a, ctx):
    for m in masses:
        if ctx.close(to_mpf(m.zeta), to_mpf(zeta)):
            return m.charge(a)
    return ctx.zero()


def second_kind_perturbed(seq_check, masses, z, n_max):
    """C-check_a^(n)(z): quadrature of the continuous part plus mass poles."""
    vals = second_kind(seq_check, z, n_max)
    if not masses:
        return vals
    out = []
    for n in range(n_max + 1):
        c1, c2 = vals[n]
        for m in masses:
            bn = seq_check.B[n](to_mpf(m.zeta))
            c1 += m.c1 * bn / (to_mpf(z) - to_mpf(m.zeta))
            c2 += m.c2 * bn / (to_mpf(z) - to_mpf(m.zeta))
        out.append((c1, c2))
    return out


def w_values(dec: EvenOddDecomp, seq, masses, n_max: int) -> dict:
    """W_a^(n)(zeta) for zeta in Z_{p pi}: adjugate-combined Cauchy data.

    W_a = V_a - c_a (pi p)'(zeta) B^(n)(zeta), with V_1 = P_e C_1 - P_o C_2
    and V_2 = -zeta P_o C_1 + P_e C_2 (original-system second-kind functions).
    """
    ctx = seq.ctx
    pip = dec.pi * dec.p_sym
    pipd = pip.derivative()
    out = {}
    for zeta in dec.zero_set:
        cvals = second_kind(seq, zeta, n_max)
        pe, po = to_mpf(dec.p_even(zeta)), to_mpf(dec.p_odd(zeta))
        for n in range(n_max + 1):
            c1, c2 = cvals[n]
            v1 = pe * c1 - po * c2
            v2 = -to_mpf(zeta) * po * c1 + pe * c2
            bn = seq.B[n](to_mpf(zeta))
            out[(1, n, zeta)] = v1 - _mass_charge(masses, zeta, 1, ctx) * pipd(zeta) * bn
            out[(2, n, zeta)] = v2 - _mass_charge(masses, zeta, 2, ctx) * pipd(zeta) * bn
    return out


def _w_row(dec: EvenOddDecomp, wv: dict, n: int) -> list:
    r2 = [r * r for r in dec.r_zeros]
    x2 = [x * x for x in dec.x_zeros]
    return (
        [wv[(1, n, z)] for z in r2]
        + [wv[(2, n, z)] for z in r2]
        + [wv[(2, n, z)] for z in x2]
    )


def tau_check(dec: EvenOddDecomp, wv: dict, ctx, n: int):
    """tau-check_n = det of W rows n - Ntilde .. n - 1."""
    nt = dec.Ntilde
    return det_grid(ctx, [_w_row(dec, wv, n - nt + i) for i in range(nt)])


def vee_polys(dec: EvenOddDecomp, g_check: MomentMatrix, seq_check, p: Poly, n_trunc: int):
    """V-script_{a,b}^P(x, y): divided-difference bivariate polynomials.

    Built from perturbed moments: sum over monomials of P of
    sum_{i+j = k-1} x^i * sum_l [int B_check^(l) t^j w-check_b dt] A_check_a^(l)(y).
    Returns grids[a][b] as Poly-in-y coefficients of x^i (list of Poly).
    """
    ctx = seq_check.ctx

    def bmoment(l, j, b):
        tot = ctx.zero()
        for kk, c in enumerate(seq_check.B[l].coeffs):
            if c:
                tot += c * g_check.ws.moment(b, kk + j)
        return tot

    deg = p.degree
    out = {}
    for a in (1, 2):
        fam = seq_check.A1 if a == 1 else seq_check.A2
        for b in (1, 2):
            coefs = [Poly(()) for _ in range(max(deg, 0))]
            for k, ck in enumerate(p.coeffs):
                if not ck or k == 0:
                    continue
                for i in range(k):
                    j = k - 1 - i
                    acc = Poly(())
                    for l in range(n_trunc):
                        m = bmoment(l, j, b)
                        if m:
                            acc = acc + fam[l].scale(m)
                    coefs[i] = coefs[i] + acc.scale(ck)
            out[(a, b)] = coefs
    return out


def _eval_vee(coefs: list, x, y):
    tot = x * 0
    for i, poly_y in enumerate(coefs):
        tot += poly_y(y) * x**i
    return tot


def kappa_value(dec, seqo, wv, vee, a: int, b: int, zeta, y, n_trunc: int):
    """kappa_{a,b}(zeta, y) per its mass-aware definition (truncation n_trunc)."""
    pte = (dec.p_sym * dec.p_even)(y)
    pto = (dec.p_sym * dec.p_odd)(y)
    row = [pte, y * pto] if a == 1 else [pto, pte]
    s1 = sum(seqo.A1[l](y) * wv[(b, l, zeta)] for l in range(n_trunc))
    s2 = sum(seqo.A2[l](y) * wv[(b, l, zeta)] for l in range(n_trunc))
    val = row[0] * s1 + row[1] * s2

    pe_z, po_z = dec.p_even(zeta), dec.p_odd(zeta)
    adj_col = ([pe_z, -po_z] if b == 1 else [-zeta * po_z, pe_z])
    pt_e = dec.p_sym * dec.p_even
    pt_o = dec.p_sym * dec.p_odd
    x_pt_o = pt_o.shift_up(1)
    if a == 1:
        v_first = _eval_vee(vee[("Pe", 1, 1)], zeta, y) + _eval_vee(vee[("Po", 1, 2)], zeta, y)
        v_second = _eval_vee(vee[("xPo", 1, 1)], zeta, y) + _eval_vee(vee[("Pe", 1, 2)], zeta, y)
    else:
        v_first = _eval_vee(vee[("Pe", 2, 1)], zeta, y) + _eval_vee(vee[("Po", 2, 2)], zeta, y)
        v_second = _eval_vee(vee[("xPo", 2, 1)], zeta, y) + _eval_vee(vee[("Pe", 2, 2)], zeta, y)
    val += v_first * adj_col[0] + v_second * adj_col[1]
    return val


def geronimus(
    f_orig: Factorization,
    dec: EvenOddDecomp,
    masses=(),
    f_check: Factorization | None = None,
    n_funcs: int | None = None,
):
    """Run the Geronimus pipeline and verify its identity battery."""
    ctx = f_orig.ctx
    if ctx.exact:
        raise MopError("Geronimus transforms need the float backend")
    rep = Report()
    n = f_orig.size
    nt = dec.Ntilde

    if f_check is None:
        gch = geronimus_moments(f_orig.ws, dec.ptilde, masses, n)
        f_check = factorize(gch)
    else:
        gch = build_moment_matrix(f_check.ws, n)

    # moment relation g_check P~(Lambda^T) = g
    g = build_moment_matrix(f_orig.ws, n)
    pt = Poly.of([ctx.scalar(c) for c in dec.ptilde.coeffs])
    lhs = gch.trunc @ shift_lambda(ctx, n).T.poly_at(pt)
    w_rel = n - dec.ptilde.degree
    rep.add(
        Check.residual(
            "geronimus_moment_relation", w_rel,
            lhs.window_residual(g.trunc, w_rel), ctx,
            scale=g.trunc.max_abs(w_rel),
        )
    )

    omega = f_check.S @ unitriangular_inverse(f_orig.S)
    w = omega.valid - nt
    scale = omega.max_abs(w)
    rep.add(Check.residual("geronimus_Omega_band", w,
                           omega.out_of_band_max(nt, 0, w), ctx, scale=scale))

    alt = (
        f_check.H_mat()
        @ f_check.St_inv().T
        @ shift_lambda(ctx, n).T.poly_at(pt)
        @ f_orig.St.T
        @ f_orig.H_inv_mat()
    )
    rep.add(Check.residual("geronimus_Omega_alternative", w,
                           omega.window_residual(alt, w), ctx, scale=scale))

    so, sc = poly_sequence(f_orig), poly_sequence(f_check)
    worst = ctx.zero()
    for k in range(w):
        acc = Poly(())
        for m in range(max(0, k - nt), k + 1):
            if omega[k, m]:
                acc = acc + so.B[m].scale(omega[k, m])
        worst = max(worst, acc.residual_against(sc.B[k]))
    rep.add(Check.residual("geronimus_B_connection", w, worst, ctx, scale=scale))

    x = Poly.of([ctx.zero(), ctx.one()])
    pe, po, p = dec.p_even, dec.p_odd, dec.p_sym
    worst = ctx.zero()
    for k in range(w - nt):
        lhs1, lhs2 = Poly(()), Poly(())
        for m in range(k, min(k + nt + 1, n)):
            coef = omega[m, k]
            if coef:
                lhs1 = lhs1 + sc.A1[m].scale(coef)
                lhs2 = lhs2 + sc.A2[m].scale(coef)
        rhs1 = p * (pe * so.A1[k] + x * po * so.A2[k])
        rhs2 = p * (po * so.A1[k] + pe * so.A2[k])
        worst = max(worst, lhs1.residual_against(rhs1), lhs2.residual_against(rhs2))
    rep.add(Check.residual("geronimus_A_connection", w, worst, ctx,
                           scale=max(scale, so.A1[w - 1].lead() if w else 1)))

    # second-kind connections (Corollaries 4-5) at test points outside [0,1]
    n_funcs = min(w - 1, (n_funcs or n - 2))
    n0 = nt + 2
    pts = [mpf(3), mpf("-1.5")]
    pt_e = p * pe
    pt_o = p * po
    worst4 = worst5 = ctx.zero()
    pip = dec.pi * dec.p_sym
    for z in pts:
        cvals = second_kind(so, z, n_funcs)
        ccheck = second_kind_perturbed(sc, masses, z, n_funcs)
        for k in range(n0, n_funcs - nt):
            oc = [ctx.zero(), ctx.zero()]
            for a in (1, 2):
                s = ctx.zero()
                for m in range(max(0, k - nt), k + 1):
                    coef = omega[k, m] if m < k else ctx.one()
                    if coef:
                        s += coef * cvals[m][a - 1]
                oc[a - 1] = s
            c1h, c2h = ccheck[k]
            worst4 = max(
                worst4,
                abs(oc[0] - (pt_e(z) * c1h + pt_o(z) * c2h)),
                abs(oc[1] - (z * pt_o(z) * c1h + pt_e(z) * c2h)),
            )
            lhs1 = oc[0] * dec.p_even(z) + oc[1] * (-dec.p_odd(z))
            lhs2 = oc[0] * (-z * dec.p_odd(z)) + oc[1] * dec.p_even(z)
            worst5 = max(worst5, abs(lhs1 - pip(z) * c1h), abs(lhs2 - pip(z) * c2h))
    rep.add(Check.residual("geronimus_second_kind_connection", n_funcs, worst4, ctx,
                           scale=1))
    rep.add(Check.residual("geronimus_adjugate_second_kind", n_funcs, worst5, ctx,
                           scale=1))

    # W-values, Lemma 15(ii), tau-check, Lemma 16, Theorem 13
    wv = w_values(dec, so, masses, n_funcs)
    worst = ctx.zero()
    for zeta in dec.zero_set:
        for a in (1, 2):
            for k in range(n0, n_funcs - nt):
                s = ctx.zero()
                for m in range(max(0, k - nt), k + 1):
                    coef = omega[k, m] if m < k else ctx.one()
                    if coef:
                        s += coef * wv[(a, m, zeta)]
                worst = max(worst, abs(s))
    rep.add(Check.residual("geronimus_omega_W_vanishing", n_funcs, worst, ctx, scale=1))

    taus = {}
    tau_ok = True
    for k in range(nt, n_funcs - nt):
        taus[k] = tau_check(dec, wv, ctx, k)
        if ctx.is_zero(taus[k], scale=1):
            tau_ok = False
    rep.add(Check("geronimus_tau_check_nonzero", n_funcs,
                  "pass" if tau_ok else "fail", "0" if tau_ok else "tau-check vanished"))
    if not tau_ok:
        return ConnectionMatrix(omega.with_band(nt, 0)), rep

    worst = ctx.zero()
    for k in range(nt, min(n_funcs - nt, w - 1)):
        mat = [_w_row(dec, wv, k - nt + i) for i in range(nt)]
        rhs = [-v for v in _w_row(dec, wv, k)]
        sol = _solve_right(ctx, mat, rhs)
        for i, v in enumerate(sol):
            worst = max(worst, abs(v - omega[k, k - nt + i]))
    rep.add(Check.residual("geronimus_row_solve", n_funcs, worst, ctx, scale=scale))

    worst = ctx.zero()
    for k in range(nt, min(n_funcs - nt, w - 1)):
        for xx in (mpf("0.3"), mpf("0.8")):
            rows = []
            for i in range(nt + 1):
                rows.append(_w_row(dec, wv, k - nt + i) + [so.B[k - nt + i](xx)])
            dets = det_grid(ctx, rows)
            worst = max(worst, abs(dets / taus[k] - sc.B[k](xx)))
    rep.add(Check.residual("geronimus_formula_type_ii", n_funcs, worst, ctx, scale=1))

    # kappa kernels, Prop-20 identity, and the type-I bordered formula
    n_trunc = n_funcs - nt
    gch_for_vee = gch
    vee = {}
    for tag, pol in (("Pe", pt_e), ("Po", pt_o), ("xPo", pt_o.shift_up(1))):
        grids = vee_polys(dec, gch_for_vee, sc, pol, n_trunc)
        for (a, b), coefs in grids.items():
            vee[(tag, a, b)] = coefs

    ys = (mpf("0.43"),)
    worst = ctx.zero()
    col_types = [1] * dec.M + [2] * dec.M + [2] * dec.N
    r2 = [r * r for r in dec.r_zeros]
    zcols = r2 + r2 + [xx * xx for xx in dec.x_zeros]
    for k in (n_trunc - 1,):
        for y0 in ys:
            for a in (1, 2):
                for (b, zeta) in zip(col_types, zcols):
                    kv = kappa_value(dec, so, wv, vee, a, b, to_mpf(zeta), y0, k)
                    s = ctx.zero()
                    for jj in range(nt):
                        for ii in range(jj + 1):
                            om = omega[k + ii, k - nt + jj]
                            if om:
                                s += (
                                    (sc.A1[k + ii](y0) if a == 1 else sc.A2[k + ii](y0))
                                    * om
                                    * wv[(b, k - nt + jj, zeta)]
                                )
                    worst = max(worst, abs(kv - s))
    rep.add(Check.residual("geronimus_kappa_identity", n_trunc, worst, ctx, scale=1))

    worst = ctx.zero()
    for k in range(nt, n_trunc - 1):
        for y0 in ys:
            for a in (1, 2):
                rows = []
                for i in range(1, nt):
                    rows.append(_w_row(dec, wv, k - nt + i))
                krow = [
                    kappa_value(dec, so, wv, vee, a, b, to_mpf(zeta), y0, k)
                    for (b, zeta) in zip(col_types, zcols)
                ]
                rows.append(krow)
                tau_next = tau_check(dec, wv, ctx, k + 1)
                val = det_grid(ctx, rows) / tau_next
                want = sc.A1[k](y0) if a == 1 else sc.A2[k](y0)
                worst = max(worst, abs(val - want))
    rep.add(Check.residual("geronimus_formula_type_i", n_trunc, worst, ctx, scale=1))

    # mixed-CD connection at a sampled (x, y) with x outside the support
    x0, y0 = mpf(3), mpf("0.43")
    k = n_trunc - 1
    cvals = second_kind(so, x0, k + nt)
    ccheck = second_kind_perturbed(sc, masses, x0, k)
    pe_x, po_x = dec.p_even(x0), dec.p_odd(x0)
    adj_x = ((pe_x, -x0 * po_x), (-po_x, pe_x))
    ptm_y = (
        (pt_e(y0), y0 * pt_o(y0)),
        (pt_o(y0), pt_e(y0)),
    )
    K = [[sum(cvals[l][b] * (so.A1[l](y0) if a == 0 else so.A2[l](y0)) for l in range(k))
          for b in (0, 1)] for a in (0, 1)]
    Kc = [[sum(ccheck[l][b] * (sc.A1[l](y0) if a == 0 else sc.A2[l](y0)) for l in range(k))
           for b in (0, 1)] for a in (0, 1)]
    vee_combo = [
        [
            _eval_vee(vee[("Pe", a + 1, 1)], x0, y0) + _eval_vee(vee[("Po", a + 1, 2)], x0, y0),
            _eval_vee(vee[("xPo", a + 1, 1)], x0, y0) + _eval_vee(vee[("Pe", a + 1, 2)], x0, y0),
        ]
        for a in (0, 1)
    ]
    vvals = {}
    for m in range(k - nt, k):
        c1, c2 = cvals[m]
        vvals[(1, m)] = pe_x * c1 - po_x * c2
        vvals[(2, m)] = -x0 * po_x * c1 + pe_x * c2
    worst = ctx.zero()
    for a in (0, 1):
        for b in (0, 1):
            lhs = pip(x0) * Kc[a][b]
            rhs = sum(
                ptm_y[a][c] * K[c][d] * adj_x[d][b] for c in (0, 1) for d in (0, 1)
            )
            rhs += sum(vee_combo[a][c] * adj_x[c][b] for c in (0, 1))
            tail = ctx.zero()
            for jj in range(nt):
                for ii in range(jj + 1):
                    om = omega[k + ii, k - nt + jj]
                    if om:
                        av = sc.A1[k + ii](y0) if a == 0 else sc.A2[k + ii](y0)
                        tail += av * om * vvals[(b + 1, k - nt + jj)]
            rhs -= tail
            worst = max(worst, abs(lhs - rhs))
    rep.add(Check.residual("geronimus_mixed_kernel_connection", k, worst, ctx, scale=1))

    return ConnectionMatrix(omega.with_band(nt, 0)), rep


def _solve_right(ctx, mat, rhs):
    """Solve row * mat = rhs for the row (mat given by rows)."""
    from .christoffel import _solve_left

    return _solve_left(ctx, mat, rhs)
