"""Dense univariate and bivariate polynomials over a context's scalars.

Coefficients are stored ascending by degree with exact trailing zeros trimmed,
so ``degree == len(coeffs) - 1`` and the zero polynomial has no coefficients.
Arithmetic never needs the context; comparisons in float mode go through
residuals (``residual_against``) rather than ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .context import MopError, NonMonic, Scalar


@dataclass(frozen=True)
class Poly:
    coeffs: tuple

    @staticmethod
    def of(cs) -> "Poly":
        cs = list(cs)
        while cs and cs[-1] == 0:
            cs.pop()
        return Poly(tuple(cs))

    @staticmethod
    def const(c) -> "Poly":
        return Poly.of([c])

    @staticmethod
    def x(one=Fraction(1)) -> "Poly":
        return Poly.of([one * 0, one])

    @staticmethod
    def from_roots(roots, one=Fraction(1)) -> "Poly":
        p = Poly.of([one])
        for r in roots:
            p = p * Poly.of([-r, one])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def lead(self):
        if not self.coeffs:
            raise MopError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly.of([self[i] + other[i] for i in range(n)])

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly.of([self[i] - other[i] for i in range(n)])

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        if not self.coeffs or not other.coeffs:
            return Poly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly.of(out)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        if c == 0:
            return Poly(())
        return Poly(tuple(c * a for a in self.coeffs))

    def shift_up(self, k: int) -> "Poly":
        """Multiply by x^k."""
        if not self.coeffs:
            return self
        return Poly(tuple([self.coeffs[0] * 0] * k) + self.coeffs)

    def __call__(self, x):
        v = x * 0
        for c in reversed(self.coeffs):
            v = v * x + c
        return v

    def derivative(self) -> "Poly":
        return Poly.of([i * c for i, c in enumerate(self.coeffs)][1:])

    def compose(self, inner: "Poly") -> "Poly":
        out = Poly(())
        for c in reversed(self.coeffs):
            out = out * inner + Poly.const(c)
        return out

    def divmod(self, den: "Poly") -> tuple["Poly", "Poly"]:
        if den.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        num = list(self.coeffs)
        dn, dd = len(num) - 1, den.degree
        if dn < dd:
            return Poly(()), self
        q = [num[0] * 0] * (dn - dd + 1)
        for i in range(dn - dd, -1, -1):
            c = num[i + dd] / den.coeffs[-1]
            q[i] = c
            for j, dc in enumerate(den.coeffs):
                num[i + j] -= c * dc
        return Poly.of(q), Poly.of(num)

    def exact_div(self, den: "Poly", ctx=None) -> "Poly":
        q, r = self.divmod(den)
        if ctx is None:
            if not r.is_zero():
                raise MopError("inexact polynomial division")
        else:
            scale = max((abs(c) for c in self.coeffs), default=1)
            for c in r.coeffs:
                if not ctx.is_zero(c, scale=scale):
                    raise MopError("inexact polynomial division")
        return q

    def monic(self) -> "Poly":
        if not self.coeffs:
            raise NonMonic("zero polynomial cannot be made monic")
        lc = self.coeffs[-1]
        return Poly(tuple(c / lc for c in self.coeffs))

    def even_part(self) -> "Poly":
        """P_e with P(x) = P_e(x^2) + x P_o(x^2)."""
        return Poly.of(self.coeffs[0::2])

    def odd_part(self) -> "Poly":
        return Poly.of(self.coeffs[1::2])

    def at_x_squared(self) -> "Poly":
        """p(x) -> p(x^2)."""
        out = [self.coeffs[0] * 0] * (2 * len(self.coeffs) - 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[2 * i] = c
        return Poly.of(out)

    def residual_against(self, other: "Poly"):
        n = max(len(self.coeffs), len(other.coeffs))
        return max((abs(self[i] - other[i]) for i in range(n)), default=Fraction(0))

    def to_json(self, ctx) -> dict:
        return {"degree": self.degree, "coeffs": [ctx.format(c) for c in self.coeffs]}

    @staticmethod
    def from_json(obj, ctx) -> "Poly":
        return Poly.of([ctx.parse(c) for c in obj["coeffs"]])


@dataclass(frozen=True)
class BiPoly:
    """Bivariate polynomial, grid[i][j] = coefficient of x^i y^j."""

    grid: tuple

    @staticmethod
    def zero() -> "BiPoly":
        return BiPoly(())

    @staticmethod
    def outer(p: Poly, q: Poly) -> "BiPoly":
        """p(x) * q(y)."""
        return BiPoly(tuple(tuple(a * b for b in q.coeffs) for a in p.coeffs))

    def coeff(self, i: int, j: int):
        if 0 <= i < len(self.grid) and 0 <= j < len(self.grid[i]):
            return self.grid[i][j]
        return 0

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.grid), max((len(r) for r in self.grid), default=0)

    def _combine(self, other: "BiPoly", sgn) -> "BiPoly":
        nx = max(len(self.grid), len(other.grid))
        ny = max(self.shape[1], other.shape[1])
        return BiPoly(
            tuple(
                tuple(self.coeff(i, j) + sgn * other.coeff(i, j) for j in range(ny))
                for i in range(nx)
            )
        )

    def __add__(self, other: "BiPoly") -> "BiPoly":
        return self._combine(other, 1)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self._combine(other, -1)

    def scale(self, c) -> "BiPoly":
        return BiPoly(tuple(tuple(c * v for v in row) for row in self.grid))

    def shift(self, dx: int, dy: int) -> "BiPoly":
        """Multiply by x^dx y^dy."""
        nx, ny = self.shape
        return BiPoly(
            tuple(
                tuple(self.coeff(i - dx, j - dy) for j in range(ny + dy))
                for i in range(nx + dx)
            )
        )

    def max_abs(self):
        return max((abs(v) for row in self.grid for v in row), default=Fraction(0))

    def eval(self, x, y):
        tot = x * 0
        for i, row in enumerate(self.grid):
            py = x * 0
            for c in reversed(row):
                py = py * y + c
            tot += py * x**i
        return tot

    def eval_y(self, y) -> Poly:
        """Partial evaluation in the second variable."""
        return Poly.of([Poly.of(row)(y) for row in self.grid])
