"""Assembly of the bi-Hankel moment matrix and its Christoffel/Geronimus kin.

Column layout interleaves the two weights: g[n][2k] is the (n+k)-th moment of
w1 and g[n][2k+1] the (n+k)-th moment of w2, so the bi-Hankel symmetry reads
g[n+1][m] = g[n][m+2] (one row shift = two column shifts).
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import MopError
from .matrices import TruncMatrix, shift_lambda
from .polynomials import Poly
from .weights import Modified, christoffel_matrix, geronimus_system


def moment(ws, a: int, n: int):
    """n-th moment of weight a in (1, 2), including any point masses."""
    if a not in (1, 2):
        raise MopError("weight index must be 1 or 2")
    if n < 0:
        raise MopError("moment order must be nonnegative")
    return ws.moment(a, n)


@dataclass(frozen=True)
class MomentMatrix:
    ws: object
    trunc: TruncMatrix

    @property
    def ctx(self):
        return self.trunc.ctx

    @property
    def size(self) -> int:
        return self.trunc.size

    def generators(self) -> list[tuple]:
        """The vector-Hankel generators g_n = (g[n][n], g[n][n+1])."""
        t = self.trunc
        return [(t[n, n], t[n, n + 1]) for n in range(t.size - 1)]

    def bihankel_residual(self):
        """max |g[n+1][m] - g[n][m+2]| over the trusted window."""
        t = self.trunc
        w = t.valid
        return max(
            (
                abs(t[n + 1, m] - t[n, m + 2])
                for n in range(w - 1)
                for m in range(w - 2)
            ),
            default=self.ctx.zero() * 0,
        )


def build_moment_matrix(ws, n: int) -> MomentMatrix:
    if n < 2:
        raise MopError("need truncation size >= 2")
    rows = [
        [moment(ws, 1 if j % 2 == 0 else 2, i + j // 2) for j in range(n)] for i in range(n)
    ]
    return MomentMatrix(ws, TruncMatrix.from_rows(ws.ctx, rows, lb=n, ub=n))


def christoffel_moments(g: MomentMatrix, ptilde: Poly) -> MomentMatrix:
    """Perturbed moment matrix g . P~(Lambda^T) for a monic P~ of degree >= 1.

    The weight-system view of the same object multiplies (w1, w2) by the
    Eq-(48) matrix; both constructions agree entrywise on the common window.
    """
    if ptilde.degree < 1:
        raise MopError("perturbation must have degree >= 1")
    if not ptilde.is_monic():
        raise MopError("perturbation must be monic")
    ctx = g.ctx
    n = g.size
    op = shift_lambda(ctx, n).T.poly_at(
        Poly.of([ctx.scalar(c) for c in ptilde.coeffs])
    )
    ws_hat = Modified(g.ws, christoffel_matrix(ptilde))
    return MomentMatrix(ws_hat, g.trunc @ op)


def geronimus_moments(ws, ptilde: Poly, masses, n: int) -> MomentMatrix:
    """Moment matrix of the Geronimus-perturbed system (float backend).

    ptilde must factor as p(x^2) P(x) through ``transforms.decompose``; here we
    only need its even/odd split and the symmetric-zero polynomial p, which the
    caller passes via a decomposition.  Masses must sit in the zero set of
    pi*p.  The defining property, tested downstream, is
    g_check . P~(Lambda^T) = g.
    """
    from .transforms.decompose import decompose

    if ptilde.degree < 1:
        raise MopError("perturbation must have degree >= 1")
    dec = decompose(ptilde, ws.ctx)
    zero_set = set(dec.zero_set)
    for m in masses:
        if not any(abs(m.zeta - z) == 0 or ws.ctx.close(m.zeta, z) for z in zero_set):
            raise MopError(f"mass location {m.zeta} not a zero of pi*p")
    ws_check = geronimus_system(ws, dec.p_even, dec.p_odd, dec.p_sym, masses)
    return build_moment_matrix(ws_check, n)
