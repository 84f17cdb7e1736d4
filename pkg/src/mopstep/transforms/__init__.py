"""Weight-perturbation machinery: Christoffel and Geronimus transforms."""

from .decompose import EvenOddDecomp, decompose
from .permuting import permuting_christoffel
from .basic_x import basic_x_christoffel
from .christoffel import general_christoffel
from .geronimus import geronimus
from .even import even_perturbation

__all__ = [
    "EvenOddDecomp",
    "decompose",
    "permuting_christoffel",
    "basic_x_christoffel",
    "general_christoffel",
    "geronimus",
    "even_perturbation",
]
