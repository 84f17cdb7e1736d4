"""Gauss-Borel factorization g = S^-1 H S~^-T and the polynomial families.

The factorization is computed Doolittle-style without pivoting; a vanishing
pivot H_l means the weight system is not perfect at index l and raises
ImperfectSystem.  Because the factors are unitriangular, the factorization of
a leading principal block equals the leading block of the semi-infinite
factorization, so every extracted quantity is exact within the truncation.

Type II polynomials are the rows of S (monic).  Type I polynomials come from
the even/odd columns of S~ scaled by 1/H_n, uniformly in n:

    A1^(n) = (1/H_n) sum_{2i <= n} S~[n][2i] x^i,
    A2^(n) = (1/H_n) sum_{2i+1 <= n} S~[n][2i+1] x^i.

The uniform rule is what biorthogonality int B^(n) Q^(m) dmu = delta_nm
requires (checked in tests), including at n = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import ImperfectSystem, MopError
from .matrices import DiagSeq, TruncMatrix, unitriangular_inverse
from .moments import MomentMatrix, moment
from .polynomials import Poly
from .reports import Check, Report


@dataclass(frozen=True)
class Factorization:
    ws: object
    S: TruncMatrix
    St: TruncMatrix
    H: tuple
    valid: int

    @property
    def ctx(self):
        return self.S.ctx

    @property
    def size(self) -> int:
        return self.S.size

    def S_inv(self) -> TruncMatrix:
        return unitriangular_inverse(self.S)

    def St_inv(self) -> TruncMatrix:
        return unitriangular_inverse(self.St)

    def H_mat(self) -> TruncMatrix:
        return TruncMatrix.from_diag(self.ctx, self.H, self.size)

    def H_inv_mat(self) -> TruncMatrix:
        return TruncMatrix.from_diag(self.ctx, tuple(1 / h for h in self.H), self.size)

    def H_seq(self) -> DiagSeq:
        return DiagSeq(0, self.H)

    def dress(self, m: TruncMatrix) -> TruncMatrix:
        """H^-1 S~ m S~^-1 H, the type-I conjugation."""
        return self.H_inv_mat() @ self.St @ m @ self.St_inv() @ self.H_mat()

    def reconstruction_residual(self):
        recon = self.S_inv() @ self.H_mat() @ self.St_inv().T
        g = build_g_trunc(self.ws, self.size) if self.ws is not None else None
        if g is None:
            raise MopError("no weight system attached")
        return recon.window_residual(g, min(self.valid, recon.valid))


def build_g_trunc(ws, n: int) -> TruncMatrix:
    rows = [
        [moment(ws, 1 if j % 2 == 0 else 2, i + j // 2) for j in range(n)] for i in range(n)
    ]
    return TruncMatrix.from_rows(ws.ctx, rows, lb=n, ub=n)


def factorize(g: MomentMatrix) -> Factorization:
    """LDU with unit triangular factors; raises ImperfectSystem on a bad pivot."""
    ctx = g.ctx
    n = g.size
    if n < 1:
        raise MopError("empty truncation")
    a = [list(r) for r in g.trunc.rows]
    z, one = ctx.zero(), ctx.one()
    L = [[one if i == j else z for j in range(n)] for i in range(n)]
    U = [[one if i == j else z for j in range(n)] for i in range(n)]
    H = [z] * n
    piv_scale = one
    for k in range(n):
        H[k] = a[k][k]
        if ctx.exact:
            bad = H[k] == 0
        else:
            bad = abs(H[k]) < ctx.eps_piv * abs(piv_scale)
        if bad:
            raise ImperfectSystem(k)
        piv_scale = max(piv_scale, abs(H[k])) if not ctx.exact else one
        for j in range(k + 1, n):
            U[k][j] = a[k][j] / H[k]
        for i in range(k + 1, n):
            L[i][k] = a[i][k] / H[k]
        for i in range(k + 1, n):
            lik = L[i][k]
            if lik:
                hk = H[k]
                rowk = U[k]
                rowi = a[i]
                for j in range(k + 1, n):
                    rowi[j] -= lik * hk * rowk[j]
    Lm = TruncMatrix.from_rows(ctx, L, lb=n, ub=0)
    Um = TruncMatrix.from_rows(ctx, U, lb=0, ub=n)
    S = unitriangular_inverse(Lm)
    St = unitriangular_inverse(Um.T)  # g = S^-1 H S~^-T with S~^-T = U
    return Factorization(g.ws, S, St, tuple(H), n)


def factorize_system(ws, n: int) -> Factorization:
    from .moments import build_moment_matrix

    return factorize(build_moment_matrix(ws, n))


@dataclass(frozen=True)
class PolySequence:
    """The families B, A1, A2 with normalizations H and multi-index map nu."""

    ws: object
    B: tuple
    A1: tuple
    A2: tuple
    H: tuple
    valid: int

    @property
    def ctx(self):
        return self.ws.ctx

    @staticmethod
    def nu(n: int) -> tuple[int, int]:
        """Type-I multi-index: nu(2m) = (m+1, m), nu(2m+1) = (m+1, m+1)."""
        m, r = divmod(n, 2)
        return (m + 1, m) if r == 0 else (m + 1, m + 1)

    @staticmethod
    def nu_type_ii(n: int) -> tuple[int, int]:
        """Multi-index of B^(n): (m, m) for n = 2m, (m+1, m) for n = 2m+1."""
        m, r = divmod(n, 2)
        return (m, m) if r == 0 else (m + 1, m)

    def Q_eval(self, n: int, x):
        """Linear form Q^(n)(x) = w1(x) A1^(n)(x) + w2(x) A2^(n)(x)."""
        ws = self.ws
        return ws.weight(1, x) * self.A1[n](x) + ws.weight(2, x) * self.A2[n](x)


def type_ii(f: Factorization) -> list[Poly]:
    return [Poly.of(f.S.rows[m][: m + 1]) for m in range(f.valid)]


def type_i(f: Factorization) -> tuple[list[Poly], list[Poly]]:
    a1, a2 = [], []
    for n in range(f.valid):
        row = f.St.rows[n]
        h = f.H[n]
        a1.append(Poly.of([c / h for c in row[0 : n + 1 : 2]]))
        a2.append(Poly.of([c / h for c in row[1 : n + 1 : 2]]))
    return a1, a2


def poly_sequence(f: Factorization) -> PolySequence:
    a1, a2 = type_i(f)
    return PolySequence(f.ws, tuple(type_ii(f)), tuple(a1), tuple(a2), f.H, f.valid)


def integrate_poly(ws, p: Poly, a: int):
    """integral of p(x) w_a(x) dmu(x) by moment expansion (masses included)."""
    tot = ws.ctx.zero()
    for k, c in enumerate(p.coeffs):
        if c:
            tot += c * moment(ws, a, k)
    return tot


def integrate_form(ws, p1: Poly, p2: Poly):
    """integral of (p1 w1 + p2 w2) dmu."""
    return integrate_poly(ws, p1, 1) + integrate_poly(ws, p2, 2)


def verify_orthogonality(ws, seq: PolySequence, n_max: int) -> Report:
    """Type I + type II orthogonality and biorthogonality, as residual checks."""
    checks = []
    ctx = seq.ctx
    n_max = min(n_max, seq.valid - 1)

    worst = ctx.zero() * 0
    for n in range(n_max + 1):
        nu1, nu2 = PolySequence.nu_type_ii(n)
        for a, cnt in ((1, nu1), (2, nu2)):
            for j in range(cnt):
                r = integrate_poly(ws, seq.B[n].shift_up(j), a)
                worst = max(worst, abs(r))
    checks.append(Check.residual("type_ii_orthogonality", n_max, worst, ctx))

    worst = ctx.zero() * 0
    for n in range(n_max + 1):
        nu1, nu2 = PolySequence.nu(n)
        if seq.A1[n].degree > nu1 - 1 or seq.A2[n].degree > nu2 - 1:
            checks.append(Check("type_i_degrees", n, "fail", "degree bound violated"))
        for j in range(nu1 + nu2 - 1):
            r = integrate_form(ws, seq.A1[n].shift_up(j), seq.A2[n].shift_up(j))
            worst = max(worst, abs(r))
    checks.append(Check.residual("type_i_orthogonality", n_max, worst, ctx))

    worst = ctx.zero() * 0
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            r = integrate_form(ws, seq.B[n] * seq.A1[m], seq.B[n] * seq.A2[m])
            r -= ctx.one() if n == m else ctx.zero()
            worst = max(worst, abs(r))
    checks.append(Check.residual("biorthogonality", n_max, worst, ctx))

    leading_ok = all(seq.B[n].is_monic() for n in range(n_max + 1))
    for m in range(0, n_max + 1, 2):
        leading_ok &= seq.A1[m].degree == m // 2 and seq.A1[m].lead() == 1 / seq.H[m]
    for m in range(1, n_max + 1, 2):
        leading_ok &= seq.A2[m].degree == m // 2 and seq.A2[m].lead() == 1 / seq.H[m]
    checks.append(
        Check("leading_coefficients", n_max, "pass" if leading_ok else "fail", "0")
    )
    return Report(checks)
