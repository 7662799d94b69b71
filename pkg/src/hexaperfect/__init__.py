"""Exact construction and verification of two-unitaries and doubly perfect phase functions."""

from .scalar import CycScalar, root_of_unity, tau, gauss_sum
from .matrix import ExactMatrix
from .phase_space import PhasePoint, SymplecticMap
from .doubly_perfect import PhaseFunction, artisanal, is_doubly_perfect, u_lambda
from .two_unitary import is_two_unitary
from .hadamard import build_hadamard

__version__ = "0.1.0"

__all__ = [
    "CycScalar",
    "ExactMatrix",
    "PhasePoint",
    "SymplecticMap",
    "PhaseFunction",
    "root_of_unity",
    "tau",
    "gauss_sum",
    "artisanal",
    "is_doubly_perfect",
    "u_lambda",
    "is_two_unitary",
    "build_hadamard",
]
