"""Pearson data, derivative dressings, the Laguerre-Freud operator, ODEs.

Everything here works in the convention where the two weights absorb the
measure density (wtilde_a = w_a * v, dmu = dx); for Jacobi-Pineiro that means
sigma = x(1-x), q_1 = alpha(1-x) - gamma x, q_2 = beta(1-x) - gamma x.  The
moment matrix is unchanged by the regrouping, so the factorization objects are
shared with the rest of the package.

Polynomials of the projected operators Lambda_a / T_a take Pi_a / C_a as the
unit for their constant terms; with a plain identity the cross-weight terms of
the moment symmetry fail.

The Laguerre-Freud operator Psi = sigma(T) Phi is banded with deg(sigma) - 1
superdiagonals and 2 max(deg sigma - 1, deg q_1, deg q_2) subdiagonals.  Its
superdiagonal is exactly -(n+2).  Its deepest subdiagonal is NOT the bare
integer pattern floor(n/2): the exact closed form (established by double-path
computation and used throughout) is

    Psi[n+2][n] = (floor(n/2) + (alpha+gamma) [n even] + (beta+gamma) [n odd])
                  * H_{n+2} / H_n .
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .context import DegenerateDeterminant, MopError
from .gauss_borel import Factorization, PolySequence
from .matrices import TruncMatrix, derivative_matrices, shift_lambda, shift_matrices
from .polynomials import Poly
from .reports import Check, Report
from .spectral import RecursionMatrix, dual_matrices, recursion_matrix


@dataclass(frozen=True)
class PearsonData:
    sigma: Poly
    q1: Poly
    q2: Poly
    support: tuple

    @property
    def tau1(self) -> Poly:
        return self.q1 + self.sigma.derivative()

    @property
    def tau2(self) -> Poly:
        return self.q2 + self.sigma.derivative()


def pearson_for_jp(alpha, beta, gamma) -> PearsonData:
    """sigma = x(1-x), q_a = s(1-x) - gamma x for s = alpha, beta."""
    a, b, g = Fraction(alpha), Fraction(beta), Fraction(gamma)
    sigma = Poly.of([0, 1, -1])
    q1 = Poly.of([a, -(a + g)])
    q2 = Poly.of([b, -(b + g)])
    return PearsonData(sigma, q1, q2, (Fraction(0), Fraction(1)))


def _cast(ctx, p: Poly) -> Poly:
    return Poly.of([ctx.scalar(c) for c in p.coeffs])


def moment_symmetry_check(g, pd: PearsonData) -> Report:
    """sigma(L) D g + g (D1 sigma(L1) + q1(L1) + D2 sigma(L2) + q2(L2))^T = 0."""
    ctx = g.ctx
    n = g.size
    sm = shift_matrices(ctx, n)
    dm = derivative_matrices(ctx, n)
    sig, q1, q2 = (_cast(ctx, p) for p in (pd.sigma, pd.q1, pd.q2))

    lhs = sm["Lambda"].poly_at(sig) @ dm["D"] @ g.trunc
    inner = (
        dm["D1"] @ sm["Lambda1"].poly_at(sig, unit=sm["Pi1"])
        + sm["Lambda1"].poly_at(q1, unit=sm["Pi1"])
        + dm["D2"] @ sm["Lambda2"].poly_at(sig, unit=sm["Pi2"])
        + sm["Lambda2"].poly_at(q2, unit=sm["Pi2"])
    )
    rhs = g.trunc @ inner.T
    w = n - (pd.sigma.degree + 2)
    zero = TruncMatrix.zeros(ctx, n)
    worst = (lhs + rhs).window_residual(zero, w)
    rep = Report()
    rep.add(Check.residual("moment_symmetry", w, worst, ctx,
                           scale=lhs.max_abs(w) if not ctx.exact else 1))
    return rep


@dataclass(frozen=True)
class PhiMatrices:
    Phi: TruncMatrix
    Phi1: TruncMatrix
    Phi2: TruncMatrix
    C1: TruncMatrix
    C2: TruncMatrix


def phi_matrices(f: Factorization) -> PhiMatrices:
    dm = derivative_matrices(f.ctx, f.size)
    sm = shift_matrices(f.ctx, f.size)
    return PhiMatrices(
        Phi=f.S @ dm["D"] @ f.S_inv(),
        Phi1=f.dress(dm["D1"]),
        Phi2=f.dress(dm["D2"]),
        C1=f.dress(sm["Pi1"]),
        C2=f.dress(sm["Pi2"]),
    )


def verify_phi(f: Factorization, seq: PolySequence, rec: RecursionMatrix) -> Report:
    """Derivative dressings: B' = Phi B, A_a' = Phi_a A_a, commutators, bands."""
    from .spectral import _matrix_rows_apply, _rows_equal_poly

    ctx = f.ctx
    ph = phi_matrices(f)
    dm = dual_matrices(f)
    rep = Report()
    w = min(ph.Phi.valid, seq.valid) - 2

    trios = [
        ("phi_B_derivative", ph.Phi, seq.B, [p.derivative() for p in seq.B]),
        ("phi1_A1_derivative", ph.Phi1, seq.A1, [p.derivative() for p in seq.A1]),
        ("phi2_A2_derivative", ph.Phi2, seq.A2, [p.derivative() for p in seq.A2]),
        ("phi1_A2_zero", ph.Phi1, seq.A2, [Poly(())] * len(seq.A2)),
        ("phi2_A1_zero", ph.Phi2, seq.A1, [Poly(())] * len(seq.A1)),
    ]
    for name, m, fam, want in trios:
        got = _matrix_rows_apply(m, fam, w)
        rep.add(Check.residual(name, w, _rows_equal_poly(ctx, got, want, w), ctx))

    # strict lower-triangularity: Phi starts at subdiagonal 1, Phi_a at 2
    worst = max(
        [abs(ph.Phi[i, j]) for i in range(w) for j in range(w) if j >= i]
        + [abs(ph.Phi1[i, j]) for i in range(w) for j in range(w) if j >= i - 1]
        + [abs(ph.Phi2[i, j]) for i in range(w) for j in range(w) if j >= i - 1],
        default=ctx.zero() * 0,
    )
    rep.add(Check.residual("phi_strictly_lower", w, worst, ctx))

    t = rec.T
    w2 = w - 2
    eye = TruncMatrix.identity(ctx, f.size)
    zero = TruncMatrix.zeros(ctx, f.size)
    rep.add(Check.residual("commutator_T_Phi_eq_I", w2,
                           t.commutator(ph.Phi).window_residual(eye, w2), ctx))
    rep.add(Check.residual("commutator_T1_Phi1_eq_C1", w2,
                           dm.T1.commutator(ph.Phi1).window_residual(ph.C1, w2), ctx))
    rep.add(Check.residual("commutator_T2_Phi2_eq_C2", w2,
                           dm.T2.commutator(ph.Phi2).window_residual(ph.C2, w2), ctx))
    rep.add(Check.residual("commutator_T1_Phi2_zero", w2,
                           dm.T1.commutator(ph.Phi2).window_residual(zero, w2), ctx))
    rep.add(Check.residual("commutator_T2_Phi1_zero", w2,
                           dm.T2.commutator(ph.Phi1).window_residual(zero, w2), ctx))
    for name, prod in (
        ("phi1_T2_zero", ph.Phi1 @ dm.T2),
        ("T2_phi1_zero", dm.T2 @ ph.Phi1),
        ("phi2_T1_zero", ph.Phi2 @ dm.T1),
        ("T1_phi2_zero", dm.T1 @ ph.Phi2),
    ):
        rep.add(Check.residual(name, w2, prod.window_residual(zero, w2), ctx))
    return rep


@dataclass(frozen=True)
class LaguerreFreudMatrix:
    Psi: TruncMatrix
    sub_band: int
    super_band: int


def laguerre_freud(f: Factorization, pd: PearsonData) -> tuple[LaguerreFreudMatrix, Report]:
    """Psi from sigma(T) Phi and from the transposed dual expression; both agree."""
    ctx = f.ctx
    sig, q1, q2 = (_cast(ctx, p) for p in (pd.sigma, pd.q1, pd.q2))
    rec = recursion_matrix(f)
    ph = phi_matrices(f)
    dm = dual_matrices(f)

    psi_a = rec.T.poly_at(sig) @ ph.Phi
    inner = (
        ph.Phi1 @ dm.T1.poly_at(sig, unit=ph.C1)
        + ph.Phi2 @ dm.T2.poly_at(sig, unit=ph.C2)
        + dm.T1.poly_at(q1, unit=ph.C1)
        + dm.T2.poly_at(q2, unit=ph.C2)
    )
    psi_b = inner.T.scale(-ctx.one())

    sub = 2 * max(pd.sigma.degree - 1, pd.q1.degree, pd.q2.degree)
    sup = pd.sigma.degree - 1
    w = min(psi_a.valid, psi_b.valid)
    rep = Report()
    rep.add(Check.residual("psi_dual_expressions_agree", w,
                           psi_a.window_residual(psi_b, w), ctx,
                           scale=psi_a.max_abs(w) if not ctx.exact else 1))
    worst = psi_a.out_of_band_max(sub, sup, w)
    rep.add(Check.residual("psi_band_structure", w, worst, ctx,
                           scale=psi_a.max_abs(w) if not ctx.exact else 1))
    worst = ctx.zero() * 0
    for n in range(w - 1):
        worst = max(worst, abs(psi_a[n, n + 1] + ctx.scalar(n + 2)))
    rep.add(Check.residual("psi_superdiagonal_minus_n_plus_2", w, worst, ctx))
    return LaguerreFreudMatrix(psi_a.with_band(sub, sup), sub, sup), rep


def psi_deep_subdiagonal(seq: PolySequence, pd: PearsonData, n: int):
    """Exact closed form of Psi[n+2][n] for deg sigma = 2, deg q_a <= 1.

    The a-linear parts of q_a reach the same extreme band as the sigma terms;
    with q_a = q_a(0) + q_a'(0) x the pass-through coefficient is
    (floor(n/2) - q'_parity(0)) * H_{n+2}/H_n where parity follows n.
    """
    lin = pd.q1[1] if n % 2 == 0 else pd.q2[1]
    coef = seq.ctx.scalar(Fraction(n // 2)) - seq.ctx.scalar(lin)
    return coef * seq.H[n + 2] / seq.H[n]


def psi_closed_entries(seq: PolySequence, pd: PearsonData, lf: LaguerreFreudMatrix, n: int):
    """(Psi[n+2][n+1], Psi[n+2][n+2]) from boundary values of row n+2 of the ODE.

    Evaluates (sigma B^(n+2))' = Psi B at the zeros a, b of sigma, where the
    derivative term drops, and solves the resulting 2x2 system.  Uses the
    exact deep-subdiagonal closed form; the superdiagonal entry is -(n+4).
    """
    ctx = seq.ctx
    a, b = (ctx.scalar(e) for e in pd.support)
    if seq.valid < n + 4:
        raise MopError("need B through degree n+3")
    sig = _cast(ctx, pd.sigma)
    sigp = sig.derivative()
    deep = psi_deep_subdiagonal(seq, pd, n)
    rows = []
    rhs = []
    for pt in (a, b):
        rows.append([seq.B[n + 1](pt), seq.B[n + 2](pt)])
        r = sigp(pt) * seq.B[n + 2](pt)
        r -= deep * seq.B[n](pt)
        r += ctx.scalar(n + 4) * seq.B[n + 3](pt)
        rhs.append(r)
    det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if ctx.is_zero(det, scale=max(abs(rows[0][0]), abs(rows[1][1]), 1)):
        raise DegenerateDeterminant(f"boundary determinant vanished at n = {n}")
    p1 = (rhs[0] * rows[1][1] - rhs[1] * rows[0][1]) / det
    p2 = (rows[0][0] * rhs[1] - rows[1][0] * rhs[0]) / det
    return p1, p2


def boundary_delta(seq: PolySequence, pd: PearsonData, n: int, m: int):
    """delta^(n,m) = B^(n)(a) B^(m)(b) - B^(n)(b) B^(m)(a)."""
    ctx = seq.ctx
    a, b = (ctx.scalar(e) for e in pd.support)
    return seq.B[n](a) * seq.B[m](b) - seq.B[n](b) * seq.B[m](a)


def ode_checks(seq: PolySequence, pd: PearsonData, lf: LaguerreFreudMatrix, n_max: int) -> Report:
    """(sigma B)' = Psi B rowwise, the A-ODEs, and the Q~-ODE at sample points."""
    ctx = seq.ctx
    psi = lf.Psi
    sig, q1, q2 = (_cast(ctx, p) for p in (pd.sigma, pd.q1, pd.q2))
    rep = Report()
    n_max = min(n_max, seq.valid - 2, psi.valid - 1)

    worst = ctx.zero() * 0
    for n in range(n_max):
        lhs = (sig * seq.B[n]).derivative()
        acc = Poly(())
        for k in range(max(0, n - lf.sub_band), min(seq.valid, n + lf.super_band + 1)):
            if psi[n, k]:
                acc = acc + seq.B[k].scale(psi[n, k])
        worst = max(worst, lhs.residual_against(acc))
    rep.add(Check.residual("ode_type_ii_rows", n_max, worst, ctx))

    worst = ctx.zero() * 0
    psit = psi.T
    for name, fam, q in (("A1", seq.A1, q1), ("A2", seq.A2, q2)):
        w_fam = ctx.zero() * 0
        for n in range(n_max):
            lhs = sig * fam[n].derivative() + q * fam[n]
            acc = Poly(())
            for k in range(max(0, n - lf.super_band), min(seq.valid, n + lf.sub_band + 1)):
                if psit[n, k]:
                    acc = acc + fam[k].scale(psit[n, k])
            w_fam = max(w_fam, (lhs + acc).residual_against(Poly(())))
        rep.add(Check.residual(f"ode_type_i_{name}", n_max, w_fam, ctx))

    # linear-form ODE sigma Q~' + Psi^T Q~ = 0 at sample points; Q~ = Q * v
    pts = seq.ws.sample_points()
    worst = ctx.zero() * 0
    for x0 in pts:
        v0 = seq.ws.measure_density(x0)
        w1v, w2v = seq.ws.weight(1, x0) * v0, seq.ws.weight(2, x0) * v0
        for n in range(n_max):
            # Q~' = (A1' + q1/sigma A1) w~1 + ... ; use Pearson to avoid w'
            d1 = seq.A1[n].derivative()(x0) * sig(x0) + q1(x0) * seq.A1[n](x0)
            d2 = seq.A2[n].derivative()(x0) * sig(x0) + q2(x0) * seq.A2[n](x0)
            lhs = d1 * w1v + d2 * w2v
            acc = ctx.zero()
            for k in range(max(0, n - lf.super_band), min(seq.valid, n + lf.sub_band + 1)):
                if psit[n, k]:
                    acc += psit[n, k] * (
                        seq.A1[k](x0) * w1v + seq.A2[k](x0) * w2v
                    )
            worst = max(worst, abs(lhs + acc))
    rep.add(Check.residual("ode_linear_form_sampled", n_max, worst, ctx))
    return rep


def jp_third_order_ode(alpha, beta, gamma, n1: int, n2: int, bpoly: Poly):
    """Residual of the third-order operator on B_(n1,n2); expected zero.

    Coefficients q_{k,3} for the two-weight case, exactly as published:
    q03 = z^2(1-z)^2, q13 = z(z-1)(2(g+1)z + (a+b+3)(z-1)), etc.
    """
    a, b, g = Fraction(alpha), Fraction(beta), Fraction(gamma)
    if (n1, n2) not in ((n2, n2), (n2 + 1, n2)):
        raise MopError("step-line indices required: (m, m) or (m+1, m)")
    z = Poly.of([0, 1])
    one = Poly.of([1])
    zm1 = Poly.of([-1, 1])
    q03 = z * z * zm1 * zm1
    q13 = z * zm1 * (z.scale(2 * (g + 1)) + zm1.scale(a + b + 3))
    s1 = (g + a + n1 + 1) * n1
    s2 = (g + b + n2 + 1) * n2
    q23 = (
        (z * z).scale(g * (g + 1))
        + (zm1 * zm1).scale((a + 1) * (b + 1))
        - (z * zm1).scale(s1 + s2 + n1 * n2 - (g + 1) * (a + b + 3))
    )
    q33 = (
        z.scale(g * (s1 + s2))
        - zm1.scale(n1 * (g + a + n1 + 1) * (b + n2 + 1) + n2 * (g + b + n2 + 1) * (a + n1 + 1))
        - one.scale(g * n1 * n2)
    )
    bp = bpoly
    residual = (
        q03 * bp.derivative().derivative().derivative()
        + q13 * bp.derivative().derivative()
        + q23 * bp.derivative()
        + q33 * bp
    )
    return (q03, q13, q23, q33), residual
