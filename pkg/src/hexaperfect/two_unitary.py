"""Index reshuffles, the two-unitarity test and classical constructions.

An operator ``U`` on ``C^d (x) C^d`` is two-unitary when ``U``, its
realignment ``U^R`` and its partial transpose ``U^Gamma`` are all unitary.
The reshuffles only permute entries, so they are implemented once on the
``(d, d, d, d)`` view of the matrix and work for both :class:`ExactMatrix`
and plain numpy arrays.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .matrix import ExactMatrix
from .scalar import DEFAULT_TOL

__all__ = [
    "partial_transpose",
    "realignment",
    "flip",
    "TwoUnitaryFlags",
    "is_two_unitary",
    "LatinSquare",
    "linear_ols",
    "ols_to_unitary",
    "exhaustive_ols_search",
    "box_product",
    "NotTwoUnitaryWarning",
]

Matrix = Union[ExactMatrix, np.ndarray]


class NotTwoUnitaryWarning(UserWarning):
    """An input to the box product is not two-unitary."""


def _local_dim(dim: int) -> int:
    d = math.isqrt(dim)
    if d * d != dim:
        raise ValueError(f"dimension {dim} is not a perfect square")
    return d


def _reshuffle(U: Matrix, axes: tuple[int, int, int, int]) -> Matrix:
    """Permute the four indices ``(i, j, k, l)`` of ``<ij|U|kl>``."""
    if isinstance(U, ExactMatrix):
        rows, cols = U.shape
        if rows != cols:
            raise ValueError("matrix must be square")
        d = _local_dim(rows)
        c = U.coeffs.reshape(d, d, d, d, -1).transpose(*axes, 4).reshape(rows, cols, -1)
        return ExactMatrix(np.ascontiguousarray(c), U.conductor, U.scale)
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("matrix must be square")
    d = _local_dim(U.shape[0])
    return U.reshape(d, d, d, d).transpose(axes).reshape(d * d, d * d)


def partial_transpose(U: Matrix) -> Matrix:
    """``<ij|U^Gamma|kl> = <il|U|kj>``: transpose on the second tensor factor."""
    return _reshuffle(U, (0, 3, 2, 1))


def realignment(U: Matrix) -> Matrix:
    """``<ij|U^R|kl> = <ik|U|jl>``."""
    return _reshuffle(U, (0, 2, 1, 3))


def flip(d: int) -> ExactMatrix:
    """The swap operator ``|ij> -> |ji>``."""
    return ExactMatrix.permutation([j * d + i for i in range(d) for j in range(d)])


@dataclass(frozen=True)
class TwoUnitaryFlags:
    unitary: bool
    dual: bool
    gamma_dual: bool

    @property
    def two_unitary(self) -> bool:
        return self.unitary and self.dual and self.gamma_dual

    def to_json(self) -> dict:
        return {
            "unitary": self.unitary,
            "dual": self.dual,
            "gamma_dual": self.gamma_dual,
            "two_unitary": self.two_unitary,
        }


def _float_unitary(U: np.ndarray, tol: float) -> bool:
    U = np.asarray(U, dtype=complex)
    return bool(np.allclose(U @ U.conj().T, np.eye(U.shape[0]), atol=tol, rtol=0))


def is_two_unitary(U: Matrix, backend: str = "exact", tol: float = DEFAULT_TOL) -> TwoUnitaryFlags:
    """Unitarity of ``U``, ``U^R`` and ``U^Gamma``, checked independently."""
    if backend == "exact":
        if not isinstance(U, ExactMatrix):
            raise TypeError("exact backend needs an ExactMatrix")
        check = lambda M: M.is_unitary()
    elif backend == "float":
        if isinstance(U, ExactMatrix):
            U = U.to_numpy()
        check = lambda M: _float_unitary(M, tol)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return TwoUnitaryFlags(check(U), check(realignment(U)), check(partial_transpose(U)))


# ---------------------------------------------------------------------------
# Latin squares


def _is_prime(d: int) -> bool:
    return d >= 2 and all(d % p for p in range(2, math.isqrt(d) + 1))


@dataclass(frozen=True)
class LatinSquare:
    d: int
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        t = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", t)
        full = set(range(self.d))
        if len(t) != self.d or any(len(r) != self.d for r in t):
            raise ValueError("table must be d x d")
        if any(set(r) != full for r in t) or any(set(c) != full for c in zip(*t)):
            raise ValueError("not a Latin square")

    @classmethod
    def from_array(cls, a) -> "LatinSquare":
        a = np.asarray(a)
        return cls(a.shape[0], tuple(map(tuple, a.tolist())))

    def __getitem__(self, ij):
        i, j = ij
        return self.table[i][j]

    def orthogonal_to(self, other: "LatinSquare") -> bool:
        if other.d != self.d:
            return False
        pairs = {(self[i, j], other[i, j]) for i in range(self.d) for j in range(self.d)}
        return len(pairs) == self.d**2


def linear_ols(d: int, alpha: int) -> tuple[LatinSquare, LatinSquare]:
    """``K_ij = i + j`` and ``L_ij = i + alpha j`` over the prime field Z_d."""
    if not _is_prime(d):
        raise ValueError(f"d = {d} is not prime")
    if alpha % d in (0, 1):
        raise ValueError("alpha must differ from 0 and 1")
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return LatinSquare.from_array((i + j) % d), LatinSquare.from_array((i + alpha * j) % d)


def ols_to_unitary(K: LatinSquare, L: LatinSquare) -> ExactMatrix:
    """Permutation matrix ``|ij> -> |K_ij L_ij>``."""
    if not K.orthogonal_to(L):
        raise ValueError("Latin squares are not orthogonal")
    d = K.d
    return ExactMatrix.permutation([K[i, j] * d + L[i, j] for i in range(d) for j in range(d)])


def _all_latin_squares(d: int) -> list[LatinSquare]:
    out = []
    for rows in itertools.product(itertools.permutations(range(d)), repeat=d):
        try:
            out.append(LatinSquare(d, rows))
        except ValueError:
            pass
    return out


def exhaustive_ols_search(d: int) -> list[tuple[LatinSquare, LatinSquare]]:
    """All orthogonal pairs of order-d Latin squares (small d only)."""
    if d > 4:
        raise ValueError("exhaustive search is limited to d <= 4")
    squares = _all_latin_squares(d)
    return [(K, L) for K in squares for L in squares if K.orthogonal_to(L)]


# ---------------------------------------------------------------------------
# box product


def _box_perm(d1: int, d2: int) -> list[int]:
    """Old index ``(i1, j1, i2, j2)`` to new index ``(i1 d2 + i2, j1 d2 + j2)``."""
    perm = [0] * (d1 * d1 * d2 * d2)
    for i1, j1, i2, j2 in itertools.product(range(d1), range(d1), range(d2), range(d2)):
        old = ((i1 * d1 + j1) * d2 + i2) * d2 + j2
        new = ((i1 * d2 + i2) * d1 + j1) * d2 + j2
        perm[old] = new
    return perm


def box_product(U1: Matrix, U2: Matrix, check: bool = True) -> Matrix:
    """Combine operators of orders d1 and d2 into one of order d1 d2.

    ``U1 (x) U2`` acts on ``(C^d1 (x) C^d1) (x) (C^d2 (x) C^d2)``; the result is
    the same operator on ``(C^d1 (x) C^d2) (x) (C^d1 (x) C^d2)``, where the
    local index is ``i1 d2 + i2``.
    """
    exact = isinstance(U1, ExactMatrix) and isinstance(U2, ExactMatrix)
    if check:
        for U in (U1, U2):
            flags = is_two_unitary(U, backend="exact" if isinstance(U, ExactMatrix) else "float")
            if not flags.two_unitary:
                warnings.warn("box product input is not two-unitary", NotTwoUnitaryWarning, stacklevel=2)
    d1 = _local_dim(U1.shape[0])
    d2 = _local_dim(U2.shape[0])
    if exact:
        P = ExactMatrix.permutation(_box_perm(d1, d2))
        return P @ U1.kron(U2) @ P.dagger()
    A = U1.to_numpy() if isinstance(U1, ExactMatrix) else np.asarray(U1)
    B = U2.to_numpy() if isinstance(U2, ExactMatrix) else np.asarray(U2)
    T = np.kron(A, B).reshape(d1, d1, d2, d2, d1, d1, d2, d2)
    D = d1 * d1 * d2 * d2
    return T.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(D, D)
