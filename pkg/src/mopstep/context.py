"""Computation contexts and scalar backends.

A context fixes the scalar backend for a whole pipeline: exact rationals
(``fractions.Fraction``) or fixed-precision reals (``mpmath.mpf``, at least
128 bits).  Mixing scalars from different backends inside one pipeline is a
constructor error; all derived objects carry the context they were built with.

Exact mode compares by literal equality; float mode compares residuals against
a relative tolerance ``eps_rel`` at scale max(|a|, |b|, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mpf

Scalar = Union[Fraction, mpf]


class MopError(Exception):
    """Base error for this package."""


class MixedBackend(MopError):
    """Scalars from different backends were combined."""


class NonExactParameters(MopError):
    """Exact backend requested for parameters that are not exactly integrable."""


class QuadratureDivergence(MopError):
    """Quadrature error estimate above the configured target."""


class ImperfectSystem(MopError):
    """A pivot H_l vanished: the weight system is not perfect at that index."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"zero pivot H_{index}: system not perfect at index {index}")


class BandViolation(MopError):
    """A matrix that must be banded has a nonzero entry outside its band."""


class RepeatedZeros(MopError):
    """Perturbation zeros are not pairwise distinct."""


class SingularZeroSet(RepeatedZeros):
    """Geronimus zero set has repeated zeros."""


class NonMonic(MopError):
    """A monic polynomial was required."""


class ZeroAtOrigin(MopError):
    """A_1^(n)(0) = 0, contradicting the permuting-Christoffel assumptions."""


class SingularEvaluationMatrix(MopError):
    """An evaluation matrix required to be invertible is singular."""


class TauVanishes(MopError):
    """tau_n = 0 for n >= Ntilde in a Christoffel run (should be impossible)."""


class DegenerateDeterminant(MopError):
    """A boundary-value determinant needed as a denominator vanished."""


class TooCloseToSupport(MopError):
    """Evaluation point too close to the support interval."""


@dataclass(frozen=True)
class Context:
    """Fixes backend, precision and comparison tolerances for a pipeline."""

    backend: str = "exact"
    prec_bits: int = 256
    eps_rel: Scalar | None = None
    eps_piv: Scalar | None = None
    quad_target: Scalar | None = None

    def __post_init__(self):
        if self.backend not in ("exact", "float"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "float":
            if self.prec_bits < 128:
                raise ValueError("float backend requires >= 128 bits")
            mpmath.mp.prec = self.prec_bits
            if self.eps_rel is None:
                object.__setattr__(self, "eps_rel", mpf("1e-20"))
            if self.eps_piv is None:
                object.__setattr__(self, "eps_piv", mpf("1e-40"))
            if self.quad_target is None:
                object.__setattr__(self, "quad_target", mpf("1e-30"))

    @property
    def exact(self) -> bool:
        return self.backend == "exact"

    def scalar(self, x) -> Scalar:
        """Coerce an int, Fraction or "p/q" string into this backend."""
        if isinstance(x, mpf):
            if self.exact:
                raise MixedBackend("float scalar in exact context")
            return x
        q = x if isinstance(x, Fraction) else Fraction(str(x) if isinstance(x, str) else x)
        if self.exact:
            return q
        return mpf(q.numerator) / mpf(q.denominator)

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else mpf(0)

    def one(self) -> Scalar:
        return Fraction(1) if self.exact else mpf(1)

    def check_scalar(self, x) -> Scalar:
        if self.exact and not isinstance(x, (Fraction, int)):
            raise MixedBackend(f"{type(x).__name__} scalar in exact context")
        if not self.exact and isinstance(x, Fraction):
            raise MixedBackend("exact rational in float context")
        return x

    def is_zero(self, x, scale=1) -> bool:
        if self.exact:
            return x == 0
        return abs(x) <= self.eps_rel * max(abs(mpf(scale)), mpf(1))

    def close(self, a, b, tol=None, scale=None) -> bool:
        if self.exact:
            return a == b
        tol = self.eps_rel if tol is None else tol
        sc = max(abs(a), abs(b), mpf(1)) if scale is None else max(abs(mpf(scale)), mpf(1))
        return abs(a - b) <= tol * sc

    def format(self, x) -> str:
        """Lossless-ish string form: "p/q" exact, decimal string in float mode."""
        if isinstance(x, Fraction) or isinstance(x, int):
            return str(x)
        return mpmath.nstr(x, int(mpmath.mp.dps), strip_zeros=True)

    def parse(self, s: str) -> Scalar:
        if self.exact:
            return Fraction(s)
        return mpf(s)


def as_fraction(x) -> Fraction:
    """Exact value of an int/Fraction/"p/q"-string parameter."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def to_mpf(x) -> mpf:
    """Lossless conversion of ints, Fractions, and mpf to mpf."""
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)
