"""Truncated semi-infinite matrices with validity windows, and the operator zoo.

A TruncMatrix is an N x N truncation of a semi-infinite matrix together with

* ``valid`` -- the leading square window on which its entries are trusted to
  equal the semi-infinite object's, and
* band reach ``(lb, ub)`` -- the largest occupied subdiagonal/superdiagonal
  offsets (lb = max(i-j), ub = max(j-i) over nonzero entries; lb = size for
  effectively full lower triangles).

Products propagate windows by ``min(valid) - max(0, min(ub_left, lb_right))``:
an entry of a truncated product can only miss tail terms that both factors
reach, so the window shrinks by the smaller of the left factor's upper reach
and the right factor's lower reach.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .context import BandViolation, Context, MopError
from .polynomials import Poly


@dataclass(frozen=True)
class DiagSeq:
    """One diagonal of a truncation: offset k holds entries M[i+k][i]."""

    offset: int
    values: tuple

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int):
        return self.values[i]

    def a_minus(self, k: int = 1) -> "DiagSeq":
        return DiagSeq(self.offset, self.values[k:])

    def a_plus(self, k: int = 1) -> "DiagSeq":
        zero = self.values[0] * 0 if self.values else Fraction(0)
        return DiagSeq(self.offset, (zero,) * k + self.values)

    def emul(self, other: "DiagSeq") -> "DiagSeq":
        n = min(len(self.values), len(other.values))
        return DiagSeq(self.offset, tuple(self.values[i] * other.values[i] for i in range(n)))

    def eadd(self, other: "DiagSeq") -> "DiagSeq":
        n = min(len(self.values), len(other.values))
        return DiagSeq(self.offset, tuple(self.values[i] + other.values[i] for i in range(n)))

    def neg(self) -> "DiagSeq":
        return DiagSeq(self.offset, tuple(-v for v in self.values))


def diag_shift(direction: str, d: DiagSeq) -> DiagSeq:
    """Shift operators on diagonal sequences: a_- drops, a_+ prepends zero."""
    if direction == "minus":
        return d.a_minus()
    if direction == "plus":
        return d.a_plus()
    raise ValueError(f"direction must be 'minus' or 'plus', got {direction!r}")


@dataclass(frozen=True)
class TruncMatrix:
    ctx: Context
    rows: tuple
    valid: int
    lb: int
    ub: int

    @staticmethod
    def from_rows(ctx, rows, valid=None, lb=None, ub=None) -> "TruncMatrix":
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise MopError("truncation must be square")
        if lb is None or ub is None:
            lo, hi = 0, 0
            for i in range(n):
                for j in range(n):
                    if rows[i][j] != 0:
                        lo = max(lo, i - j)
                        hi = max(hi, j - i)
            lb = lo if lb is None else lb
            ub = hi if ub is None else ub
        v = n if valid is None else min(valid, n)
        return TruncMatrix(ctx, rows, v, lb, ub)

    @staticmethod
    def zeros(ctx, n: int) -> "TruncMatrix":
        z = ctx.zero()
        return TruncMatrix(ctx, tuple((z,) * n for _ in range(n)), n, -n, -n)

    @staticmethod
    def identity(ctx, n: int) -> "TruncMatrix":
        z, one = ctx.zero(), ctx.one()
        return TruncMatrix(
            ctx, tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), n, 0, 0
        )

    @staticmethod
    def from_diag(ctx, values, n: int, offset: int = 0) -> "TruncMatrix":
        z = ctx.zero()
        rows = [[z] * n for _ in range(n)]
        for i, v in enumerate(values):
            r, c = (i + offset, i) if offset >= 0 else (i, i - offset)
            if r < n and c < n:
                rows[r][c] = v
        return TruncMatrix(
            ctx, tuple(tuple(r) for r in rows), n, max(offset, 0), max(-offset, 0)
        )

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def with_valid(self, v: int) -> "TruncMatrix":
        return TruncMatrix(self.ctx, self.rows, min(v, self.size), self.lb, self.ub)

    def with_band(self, lb: int, ub: int) -> "TruncMatrix":
        return TruncMatrix(self.ctx, self.rows, self.valid, lb, ub)

    def __matmul__(self, other: "TruncMatrix") -> "TruncMatrix":
        if self.size != other.size:
            raise MopError("size mismatch")
        n = self.size
        z = self.ctx.zero()
        bt = tuple(zip(*other.rows))
        out = []
        for i in range(n):
            ri = self.rows[i]
            lo_i = max(0, i - self.lb)
            hi_i = min(n, i + self.ub + 1)
            row = []
            for j in range(n):
                lo = max(lo_i, j - other.ub)
                hi = min(hi_i, j + other.lb + 1)
                s = z
                cj = bt[j]
                for k in range(lo, hi):
                    a = ri[k]
                    if a:
                        s += a * cj[k]
                row.append(s)
            out.append(tuple(row))
        reach = max(0, min(self.ub, other.lb))
        v = max(0, min(self.valid, other.valid) - reach)
        return TruncMatrix(
            self.ctx, tuple(out), v, min(self.lb + other.lb, n), min(self.ub + other.ub, n)
        )

    def _combine(self, other: "TruncMatrix", sgn) -> "TruncMatrix":
        n = self.size
        rows = tuple(
            tuple(self.rows[i][j] + sgn * other.rows[i][j] for j in range(n)) for i in range(n)
        )
        return TruncMatrix(
            self.ctx, rows, min(self.valid, other.valid),
            max(self.lb, other.lb), max(self.ub, other.ub),
        )

    def __add__(self, other: "TruncMatrix") -> "TruncMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "TruncMatrix") -> "TruncMatrix":
        return self._combine(other, -1)

    def scale(self, c) -> "TruncMatrix":
        return TruncMatrix(
            self.ctx, tuple(tuple(c * v for v in r) for r in self.rows),
            self.valid, self.lb, self.ub,
        )

    @property
    def T(self) -> "TruncMatrix":
        return TruncMatrix(self.ctx, tuple(zip(*self.rows)), self.valid, self.ub, self.lb)

    def diag(self, offset: int = 0) -> DiagSeq:
        n = self.size
        if offset >= 0:
            vals = tuple(self.rows[i + offset][i] for i in range(n - offset))
        else:
            vals = tuple(self.rows[i][i - offset] for i in range(n + offset))
        return DiagSeq(offset, vals)

    def commutator(self, other: "TruncMatrix") -> "TruncMatrix":
        return (self @ other) - (other @ self)

    def window_residual(self, other: "TruncMatrix", window: int | None = None):
        """max |self - other| over the common trusted window."""
        w = min(self.valid, other.valid) if window is None else window
        return max(
            (abs(self.rows[i][j] - other.rows[i][j]) for i in range(w) for j in range(w)),
            default=self.ctx.zero() * 0,
        )

    def max_abs(self, window: int | None = None):
        w = self.valid if window is None else window
        return max(
            (abs(self.rows[i][j]) for i in range(w) for j in range(w)), default=Fraction(0)
        )

    def out_of_band_max(self, lb: int, ub: int, window: int | None = None):
        w = self.valid if window is None else window
        bad = [
            abs(self.rows[i][j])
            for i in range(w)
            for j in range(w)
            if (i - j) > lb or (j - i) > ub
        ]
        return max(bad, default=Fraction(0))

    def assert_band(self, lb: int, ub: int, window: int | None = None, scale=1):
        worst = self.out_of_band_max(lb, ub, window)
        if not self.ctx.is_zero(worst, scale=scale):
            raise BandViolation(f"entry of size {worst} outside band ({lb},{ub})")

    def poly_at(self, p: Poly, unit: "TruncMatrix | None" = None) -> "TruncMatrix":
        """p(M) with the constant term multiplying ``unit`` (default identity).

        The projected matrices Lambda_a / T_a require unit = Pi_a / C_a so that
        p acts as multiplication on the corresponding half of the basis.
        """
        n = self.size
        unit = TruncMatrix.identity(self.ctx, n) if unit is None else unit
        out = unit.scale(p[0]) if p.coeffs else TruncMatrix.zeros(self.ctx, n)
        power = unit
        for c in p.coeffs[1:]:
            power = power @ self
            if c:
                out = out + power.scale(c)
            else:
                out = TruncMatrix(self.ctx, out.rows, min(out.valid, power.valid),
                                  max(out.lb, power.lb), max(out.ub, power.ub))
        return out


# -- the operator zoo ---------------------------------------------------------


def shift_lambda(ctx, n: int, power: int = 1) -> TruncMatrix:
    """Lambda^power: ones on the power-th superdiagonal."""
    z, one = ctx.zero(), ctx.one()
    rows = tuple(
        tuple(one if j == i + power else z for j in range(n)) for i in range(n)
    )
    return TruncMatrix(ctx, rows, n, -power, power)


def projection(ctx, n: int, parity: int) -> TruncMatrix:
    z, one = ctx.zero(), ctx.one()
    rows = tuple(
        tuple(one if i == j and i % 2 == parity else z for j in range(n)) for i in range(n)
    )
    return TruncMatrix(ctx, rows, n, 0, 0)


def shift_matrices(ctx, n: int) -> dict:
    """Lambda, Lambda_1, Lambda_2, Pi_1, Pi_2 at truncation n (n >= 2)."""
    if n < 2:
        raise MopError("need n >= 2")
    lam = shift_lambda(ctx, n)
    lam2 = shift_lambda(ctx, n, 2)
    pi1, pi2 = projection(ctx, n, 0), projection(ctx, n, 1)
    return {
        "Lambda": lam,
        "Lambda1": (pi1 @ lam2).with_band(-2, 2),
        "Lambda2": (pi2 @ lam2).with_band(-2, 2),
        "Pi1": pi1,
        "Pi2": pi2,
    }


def derivative_matrices(ctx, n: int) -> dict:
    """D, D_1, D_2 and the integer diagonals N, N_1, N_2, ceil(N/2)."""
    if n < 3:
        raise MopError("need n >= 3")
    one = ctx.one()
    enn = [one * (i + 1) for i in range(n)]
    n1 = [one * (i // 2 + 1) if i % 2 == 0 else one * 0 for i in range(n)]
    n2 = [one * ((i + 1) // 2) if i % 2 == 1 else one * 0 for i in range(n)]
    half = [a + b for a, b in zip(n1, n2)]
    d = TruncMatrix.from_diag(ctx, [one * (i + 1) for i in range(n - 1)], n, offset=1)
    lamT2 = shift_lambda(ctx, n, 2).T
    nd1 = TruncMatrix.from_diag(ctx, n1, n)
    nd2 = TruncMatrix.from_diag(ctx, n2, n)
    return {
        "D": d,
        "D1": (lamT2 @ nd1).with_band(2, -2),
        "D2": (lamT2 @ nd2).with_band(2, -2),
        "N": TruncMatrix.from_diag(ctx, enn, n),
        "N1": nd1,
        "N2": nd2,
        "ceilN2": TruncMatrix.from_diag(ctx, half, n),
    }


def unitriangular_inverse(m: TruncMatrix) -> TruncMatrix:
    """Exact inverse of a lower unitriangular truncation by forward substitution."""
    n = m.size
    z, one = m.ctx.zero(), m.ctx.one()
    for i in range(n):
        if m.rows[i][i] != 1:
            raise MopError("not unitriangular")
        for j in range(i + 1, n):
            if m.rows[i][j] != 0:
                raise MopError("not lower triangular")
    x = [[z] * n for _ in range(n)]
    for i in range(n):
        x[i][i] = one
        for j in range(i - 1, -1, -1):
            s = z
            for k in range(j, i):
                if m.rows[i][k]:
                    s += m.rows[i][k] * x[k][j]
            x[i][j] = -s
    return TruncMatrix(m.ctx, tuple(tuple(r) for r in x), m.valid, n, 0)


def inverse_subdiagonals(m: TruncMatrix, upto: int = 4) -> list[DiagSeq]:
    """First subdiagonals of S^-1 from the closed diagonal-expansion formulas.

    Independent of forward substitution; used as its cross-check.  The k=2
    formula reads -S2 + (a_-S1)S1 and so on through k=4.
    """
    s1, s2, s3, s4 = (m.diag(k) for k in (1, 2, 3, 4))

    def am(d: DiagSeq, k=1):
        return d.a_minus(k)

    out = [DiagSeq(0, tuple(m.ctx.one() for _ in range(m.size)))]
    m1 = s1.neg()
    m2 = s2.neg().eadd(am(s1).emul(s1))
    m3 = (
        s3.neg()
        .eadd(am(s2).emul(s1))
        .eadd(am(s1, 2).emul(s2))
        .eadd(am(s1, 2).emul(am(s1)).emul(s1).neg())
    )
    m4 = (
        s4.neg()
        .eadd(am(s3).emul(s1))
        .eadd(am(s2, 2).emul(s2))
        .eadd(am(s2, 2).emul(am(s1)).emul(s1).neg())
        .eadd(am(s1, 3).emul(s3))
        .eadd(am(s1, 3).emul(am(s2)).emul(s1).neg())
        .eadd(am(s1, 3).emul(am(s1, 2)).emul(s2).neg())
        .eadd(am(s1, 3).emul(am(s1, 2)).emul(am(s1)).emul(s1))
    )
    return (out + [DiagSeq(k + 1, d.values) for k, d in enumerate((m1, m2, m3, m4))])[: upto + 1]


def det_exact(m: TruncMatrix):
    """Determinant: fraction-free Bareiss (exact) or pivoted elimination (float)."""
    n = m.size
    if n == 0:
        return m.ctx.one()
    a = [list(r) for r in m.rows]
    if m.ctx.exact:
        sign = 1
        prev = Fraction(1)
        for k in range(n - 1):
            if a[k][k] == 0:
                piv = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
                if piv is None:
                    return m.ctx.zero()
                a[k], a[piv] = a[piv], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]
    sign = 1
    det = m.ctx.one()
    for k in range(n):
        piv = max(range(k, n), key=lambda r: abs(a[r][k]))
        if a[piv][k] == 0:
            return m.ctx.zero()
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        det *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    return sign * det


def det_grid(ctx, grid) -> "Fraction":
    """Determinant of a plain square list-of-lists of scalars."""
    n = len(grid)
    m = TruncMatrix.from_rows(ctx, [list(r) for r in grid], lb=n, ub=n)
    return det_exact(m)
