"""Even perturbation: both weights multiplied (or divided) by one polynomial.

For p with simple zeros off the open support, the Christoffel direction maps
w_a -> p(x) w_a and the Geronimus direction w_a -> w_a / p(x) plus masses at
the zeros of p.  A single upper banded matrix omega (deg p superdiagonals,
unit top diagonal) connects the families:

    Christoffel:  p(x) B_hat = omega B,   A_hat_a = (omega^T)^-1-free via
                  omega^T A_hat_a = A_a;
    Geronimus:    omega B_check = p(x) B, A_check_a = omega^T A_a,
                  p(x) Q_check = omega^T Q.

Evaluation of the originals at the zeros of p gives the alternative
(kernel-free) determinant formulas; the type-I Geronimus formula is
reproduced up to the predicted normalization H_check_n / H_n.
"""

from __future__ import annotations

from ..context import MopError, SingularEvaluationMatrix, to_mpf
from ..gauss_borel import Factorization, poly_sequence
from ..matrices import det_grid, shift_lambda, unitriangular_inverse
from ..polynomials import Poly
from ..reports import Check, Report
from .permuting import ConnectionMatrix


def _omega_from_factorizations(f_left: Factorization, f_right: Factorization, p: Poly):
    """omega = S_left p(Lambda) S_right^-1."""
    ctx = f_left.ctx
    pl = shift_lambda(ctx, f_left.size).poly_at(Poly.of([ctx.scalar(c) for c in p.coeffs]))
    return f_left.S @ pl @ unitriangular_inverse(f_right.S)


def even_perturbation(
    f_orig: Factorization,
    f_pert: Factorization,
    p: Poly,
    direction: str = "christoffel",
    masses=(),
):
    """Verify the even-perturbation battery; returns (omega, report).

    ``f_pert`` is the perturbed system's factorization: weights p*w for the
    Christoffel direction, weights w/p (+ masses) for the Geronimus one.
    """
    ctx = f_orig.ctx
    if direction not in ("christoffel", "geronimus"):
        raise MopError("direction must be 'christoffel' or 'geronimus'")
    if p.degree < 0 or not p.is_monic():
        raise MopError("p must be monic")
    deg = p.degree
    rep = Report()
    so, sp = poly_sequence(f_orig), poly_sequence(f_pert)

    if direction == "christoffel":
        omega = _omega_from_factorizations(f_pert, f_orig, p)
        hi, lo = f_pert, f_orig
        b_hi, b_lo = sp, so
    else:
        omega = _omega_from_factorizations(f_orig, f_pert, p)
        hi, lo = f_orig, f_pert
        b_hi, b_lo = so, sp
    # omega B_lo = p B_hi rowwise; diag = H_hi / H_lo; unit top superdiagonal
    w = omega.valid - deg - 1
    scale = 1 if ctx.exact else omega.max_abs(w)
    rep.add(Check.residual("even_omega_band", w, omega.out_of_band_max(0, deg, w), ctx,
                           scale=scale))
    worst = ctx.zero() * 0
    for k in range(w):
        worst = max(worst, abs(omega[k, k] - hi.H[k] / lo.H[k]))
        if deg and k + deg < omega.size:
            worst = max(worst, abs(omega[k, k + deg] - ctx.one()))
    rep.add(Check.residual("even_omega_diag_Hratio", w, worst, ctx))

    worst = ctx.zero() * 0
    for k in range(w):
        acc = Poly(())
        for m in range(k, min(k + deg + 1, omega.size)):
            if omega[k, m]:
                acc = acc + b_lo.B[m].scale(omega[k, m])
        worst = max(worst, acc.residual_against(p * b_hi.B[k]))
    rep.add(Check.residual("even_B_connection", w, worst, ctx, scale=scale))

    # omega^T maps the hi-system A's to the lo-system A's
    worst = ctx.zero() * 0
    for k in range(w - deg):
        for fam_hi, fam_lo in ((b_hi.A1, b_lo.A1), (b_hi.A2, b_lo.A2)):
            acc = Poly(())
            for m in range(max(0, k - deg), k + 1):
                if omega[m, k]:
                    acc = acc + fam_hi[m].scale(omega[m, k])
            worst = max(worst, acc.residual_against(fam_lo[k]))
    rep.add(Check.residual("even_A_connection", w, worst, ctx, scale=scale))

    # evaluation row-solve at the zeros of p reproduces omega's rows
    zeros = _p_zeros(p, ctx)
    if direction == "christoffel":
        rep.add(_b_eval_solve(ctx, omega, so, zeros, deg, w))
        rep.add(_christoffel_formula(ctx, so, sp, p, zeros, deg, w))
    else:
        rep.add(_q_eval_solve(ctx, omega, so, zeros, deg, w))
        rep.add(_geronimus_formula(ctx, f_orig, f_pert, so, sp, zeros, deg, w))
        worst = ctx.zero() * 0
        pts = [x for x in so.ws.sample_points()]
        for x0 in pts:
            for k in range(w - deg):
                lhs = p(x0) * sp.Q_eval(k, x0) / p(x0)  # Q_check = Q/p pointwise
                lhs = sp.Q_eval(k, x0)  # continuous part of p(x) Q_check(x)
                acc = ctx.zero()
                for m in range(max(0, k - deg), k + 1):
                    if omega[m, k]:
                        acc += omega[m, k] * so.Q_eval(m, x0)
                worst = max(worst, abs(lhs - acc))
        rep.add(Check.residual("even_linear_form_connection_sampled", w, worst, ctx,
                               scale=scale))
    return ConnectionMatrix(omega.with_band(0, deg)), rep


def _p_zeros(p: Poly, ctx):
    import mpmath

    if ctx.exact:
        # rational-root extraction by synthetic division candidates
        zeros = []
        q = p
        from fractions import Fraction

        while q.degree > 0:
            root = _rational_root(q)
            if root is None:
                raise MopError("exact mode requires rational zeros of p")
            zeros.append(ctx.scalar(root))
            q = q.exact_div(Poly.of([-root, Fraction(1)]))
        return zeros
    roots = mpmath.polyroots([to_mpf(c) for c in reversed(p.coeffs)], extraprec=ctx.prec_bits)
    return [mpmath.re(r) for r in roots]


def _rational_root(p: Poly):
    from fractions import Fraction

    lead = p.coeffs[-1]
    const = p.coeffs[0]
    if const == 0:
        return Fraction(0)
    cn = Fraction(const)
    ln = Fraction(lead)
    nums = _divisors(abs(cn.numerator) * cn.denominator)
    dens = _divisors(abs(ln.numerator) * ln.denominator)
    for a in nums:
        for b in dens:
            for s in (1, -1):
                cand = Fraction(s * a, b)
                if p(cand) == 0:
                    return cand
    return None


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(out + [n // d for d in out]))


def _b_eval_solve(ctx, omega, so, zeros, deg, w) -> Check:
    """Christoffel: row k of omega from B-evaluations at the zeros of p."""
    worst = ctx.zero() * 0
    for k in range(w - deg):
        mat = [[so.B[k + 1 + i](z) for z in zeros] for i in range(deg)]
        rhs = [-so.B[k](z) for z in zeros]
        try:
            sol = _solve_row(ctx, mat, rhs)
        except ZeroDivisionError:
            raise SingularEvaluationMatrix(f"B-evaluation matrix singular at n = {k}")
        # normalization: omega[k][k+deg] = 1; solved row gives omega[k][k+i]/omega[k][k]
        # directly from p(z)B_hat = omega B: 0 = sum_m omega[k][m] B[m](z).
        # Solve with omega[k][k] treated as the inhomogeneity:
        for i, v in enumerate(sol):
            worst = max(worst, abs(v - omega[k, k + 1 + i] / omega[k, k]))
    return Check.residual("even_B_eval_solve", w, worst, ctx)


def _solve_row(ctx, mat_rows, rhs):
    """Solve sum_i x_i mat_rows[i] = rhs (rows indexed by unknowns)."""
    from .christoffel import _solve_left

    return _solve_left(ctx, mat_rows, rhs)


def _q_eval_solve(ctx, omega, so, zeros, deg, w) -> Check:
    """Geronimus: column k of omega from Q-evaluations at the zeros of p."""
    worst = ctx.zero() * 0
    qv = {}
    for k in range(w):
        qv[k] = [so.Q_eval(k, to_mpf(z) if not ctx.exact else z) for z in zeros]
    for k in range(deg, w - 1):
        mat = [qv[k - deg + i] for i in range(deg)]
        rhs = [-v for v in qv[k]]
        try:
            sol = _solve_row(ctx, mat, rhs)
        except ZeroDivisionError:
            raise SingularEvaluationMatrix(f"Q-evaluation matrix singular at n = {k}")
        for i, v in enumerate(sol):
            worst = max(worst, abs(v - omega[k - deg + i, k] / omega[k, k]))
    return Check.residual("even_Q_eval_solve", w, worst, ctx)


def _christoffel_formula(ctx, so, sp, p, zeros, deg, w) -> Check:
    """Bordered B-determinant over the zeros reproduces B_hat exactly."""
    worst = ctx.zero() * 0
    for k in range(w - deg):
        rows = [[so.B[k + i](z) for z in zeros] for i in range(deg + 1)]
        border = [so.B[k + i] for i in range(deg + 1)]
        total = Poly(())
        for i in range(deg + 1):
            minor = [rows[t] for t in range(deg + 1) if t != i]
            cof = det_grid(ctx, minor) if deg else ctx.one()
            sgn = ctx.one() if (i + deg) % 2 == 0 else -ctx.one()
            total = total + border[i].scale(sgn * cof)
        denom = det_grid(ctx, [rows[i] for i in range(deg)]) if deg else ctx.one()
        q = total.scale(1 / denom).exact_div(p, None if ctx.exact else ctx)
        worst = max(worst, q.residual_against(sp.B[k]))
    return Check.residual("even_christoffel_formula", w, worst, ctx)


def _geronimus_formula(ctx, f_orig, f_pert, so, sp, zeros, deg, w) -> Check:
    """Bordered Q-determinant reproduces A_check up to H_check_n / H_n.

    The printed ratio normalizes the top A-coefficient to one, i.e. equals
    A_check_a^(n) * (H_n / H_check_n); both components must share the constant.
    """
    worst = ctx.zero() * 0
    qv = {}
    for k in range(w):
        qv[k] = [so.Q_eval(k, to_mpf(z) if not ctx.exact else z) for z in zeros]
    for k in range(deg, w - 1):
        denom = det_grid(ctx, [qv[k - deg + i] for i in range(deg)])
        if ctx.is_zero(denom, scale=1):
            raise SingularEvaluationMatrix(f"Q-matrix singular at n = {k}")
        predicted = f_pert.H[k] / f_orig.H[k]
        for fam_o, fam_p in ((so.A1, sp.A1), (so.A2, sp.A2)):
            total = Poly(())
            for i in range(deg + 1):
                rows = [qv[k - deg + t] for t in range(deg + 1) if t != i]
                cof = det_grid(ctx, rows) if deg else ctx.one()
                sgn = ctx.one() if (i + deg) % 2 == 0 else -ctx.one()
                total = total + fam_o[k - deg + i].scale(sgn * cof)
            formula = total.scale(1 / denom)
            worst = max(worst, formula.scale(predicted).residual_against(fam_p[k]))
    return Check.residual("even_geronimus_formula", w, worst, ctx)
