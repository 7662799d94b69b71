"""Arithmetic on the discrete phase space Z_d^(2n).

Coordinates are always ordered as ``(p_1..p_n, q_1..q_n)``.  The module also
holds the Chinese-remainder splitting of Z_6, the split of Z_6^2 into a
"singlet" copy of Z_3^2 and a "triplet" copy of Z_3^3, and brute-force
enumeration of the small matrix groups over Z_3 used by the orbit analysis.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "PhasePoint",
    "SymplecticMap",
    "DecomposedPoint",
    "ShapeError",
    "symplectic_j",
    "symp_form",
    "symp_form_int",
    "all_points",
    "point_index",
    "crt_split",
    "crt_merge",
    "decompose6",
    "compose6",
    "enumerate_group",
    "lift_gl3_to_z6",
    "rank1_symmetric_orbits",
    "mat_det_mod",
    "mat_inv_mod",
    "mat_rank_mod_p",
    "galois_similitude",
]


class ShapeError(ValueError):
    """Operands live on different phase spaces or have the wrong shape."""


@dataclass(frozen=True)
class PhasePoint:
    d: int
    n: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != 2 * self.n:
            raise ShapeError(f"expected {2 * self.n} coordinates, got {len(self.coords)}")
        object.__setattr__(self, "coords", tuple(int(c) % self.d for c in self.coords))

    @classmethod
    def of(cls, d: int, *coords: int) -> "PhasePoint":
        return cls(d, len(coords) // 2, tuple(coords))

    @property
    def p(self) -> tuple[int, ...]:
        return self.coords[: self.n]

    @property
    def q(self) -> tuple[int, ...]:
        return self.coords[self.n :]

    def _check(self, other: "PhasePoint"):
        if (self.d, self.n) != (other.d, other.n):
            raise ShapeError("points belong to different phase spaces")

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        self._check(other)
        return PhasePoint(self.d, self.n, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        self._check(other)
        return PhasePoint(self.d, self.n, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(self.d, self.n, tuple(-a for a in self.coords))

    def index(self) -> int:
        return point_index(self.coords, self.d)

    def to_json(self) -> dict:
        return {"d": self.d, "n": self.n, "coords": list(self.coords)}

    @classmethod
    def from_json(cls, obj) -> "PhasePoint":
        return cls(int(obj["d"]), int(obj["n"]), tuple(obj["coords"]))


def symplectic_j(n: int) -> np.ndarray:
    """The block matrix ``[[0, I], [-I, 0]]`` of size 2n."""
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    J[:n, n:] = np.eye(n, dtype=np.int64)
    J[n:, :n] = -np.eye(n, dtype=np.int64)
    return J


def symp_form_int(a: Sequence[int], b: Sequence[int]) -> int:
    """``a^t J b`` over the integers (no reduction)."""
    n = len(a) // 2
    if len(a) != len(b) or len(a) % 2:
        raise ShapeError("symplectic form needs two vectors of the same even length")
    return sum(a[i] * b[n + i] - a[n + i] * b[i] for i in range(n))


def symp_form(a: PhasePoint, b: PhasePoint) -> int:
    """``[a, b] = a^t J b`` reduced modulo d."""
    a._check(b)
    return symp_form_int(a.coords, b.coords) % a.d


def all_points(d: int, n: int) -> Iterator[tuple[int, ...]]:
    """All coordinate tuples of Z_d^(2n) in lexicographic order."""
    return itertools.product(range(d), repeat=2 * n)


def point_index(coords: Sequence[int], d: int) -> int:
    idx = 0
    for c in coords:
        idx = idx * d + (int(c) % d)
    return idx


# ---------------------------------------------------------------------------
# matrices over Z_d


def mat_det_mod(M, d: int) -> int:
    """Determinant modulo d by integer cofactor expansion (small matrices)."""
    M = [[int(x) for x in row] for row in np.asarray(M)]
    return _det_int(M) % d


def _det_int(M: list[list[int]]) -> int:
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = 0
    for j in range(n):
        if M[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in M[1:]]
            total += (-1) ** j * M[0][j] * _det_int(minor)
    return total


def mat_inv_mod(M, d: int) -> np.ndarray:
    """Inverse modulo d via the adjugate; raises if ``det`` is not a unit."""
    A = np.asarray(M, dtype=np.int64) % d
    n = A.shape[0]
    det = mat_det_mod(A, d)
    if math.gcd(det, d) != 1:
        raise ValueError("matrix is singular modulo d")
    det_inv = pow(det, -1, d)
    rows = [[int(x) for x in r] for r in A]
    adj = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1 :] for k, r in enumerate(rows) if k != i]
            adj[j, i] = (-1) ** (i + j) * _det_int(minor)
    return (adj * det_inv) % d


def mat_rank_mod_p(M, p: int) -> int:
    """Rank over the prime field F_p by Gaussian elimination."""
    A = [[int(x) % p for x in row] for row in np.asarray(M)]
    rows, cols = len(A), len(A[0]) if A else 0
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [(x * inv) % p for x in A[rank]]
        for r in range(rows):
            if r != rank and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class SymplecticMap:
    """A 2n x 2n matrix over Z_d preserving the symplectic form up to ``scale``."""

    d: int
    n: int
    matrix: np.ndarray = field(compare=False)
    scale: int = 1

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=np.int64) % self.d
        if M.shape != (2 * self.n, 2 * self.n):
            raise ShapeError("symplectic map has the wrong shape")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "scale", int(self.scale) % self.d)

    def is_valid(self) -> bool:
        J = symplectic_j(self.n)
        lhs = (self.matrix.T @ J @ self.matrix) % self.d
        return bool(np.array_equal(lhs, (self.scale * J) % self.d))

    def apply(self, coords: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(x) for x in (self.matrix @ np.asarray(coords, dtype=np.int64)) % self.d)

    def inverse(self) -> "SymplecticMap":
        inv = mat_inv_mod(self.matrix, self.d)
        return SymplecticMap(self.d, self.n, inv, pow(self.scale, -1, self.d))

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(
            self.d, self.n, (self.matrix @ other.matrix) % self.d, self.scale * other.scale
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymplecticMap):
            return NotImplemented
        return (self.d, self.n, self.scale) == (other.d, other.n, other.scale) and bool(
            np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.d, self.n, self.scale, self.matrix.tobytes()))


def galois_similitude(d: int, n: int, k: int) -> SymplecticMap:
    """``diag(k I, I)``, which scales the symplectic form by k."""
    if math.gcd(k, d) != 1:
        raise ValueError(f"{k} is not a unit modulo {d}")
    M = np.eye(2 * n, dtype=np.int64)
    M[:n, :n] *= k
    return SymplecticMap(d, n, M, k)


# ---------------------------------------------------------------------------
# Z_6 = Z_3 x Z_2 and the singlet/triplet split of Z_6^2


def crt_split(a: int) -> tuple[int, int]:
    """``a mod 6 -> (a mod 3, a mod 2)``."""
    return a % 3, a % 2


def crt_merge(k: int, x: int) -> int:
    """Inverse of :func:`crt_split`: ``(k, x) -> 4k + 3x mod 6``."""
    return (4 * k + 3 * x) % 6


@dataclass(frozen=True)
class DecomposedPoint:
    sector: str  # "singlet" or "triplet"
    k: int
    l: int
    m: int | None = None

    def __post_init__(self):
        if self.sector not in ("singlet", "triplet"):
            raise ValueError("sector must be 'singlet' or 'triplet'")
        if (self.sector == "triplet") != (self.m is not None):
            raise ValueError("m is present exactly for the triplet sector")


def decompose6(a: PhasePoint) -> DecomposedPoint:
    """Map a point of Z_6^2 to the singlet copy of Z_3^2 or the triplet Z_3^3.

    Each coordinate is split as ``a_i -> (k_i, x_i)`` in Z_3 x Z_2.  The pair
    ``(x, y) = (1, 1)`` is the singlet; the other three pairs are labelled by
    ``m = x - y`` in Z_3 with x, y read as 0 or 1 in Z_3.
    """
    if a.d != 6 or a.n != 1:
        raise ShapeError("decompose6 needs a point of Z_6^2")
    k, x = crt_split(a.coords[0])
    l, y = crt_split(a.coords[1])
    if (x, y) == (1, 1):
        return DecomposedPoint("singlet", k, l)
    return DecomposedPoint("triplet", k, l, (x - y) % 3)


_M_TO_XY = {0: (0, 0), 1: (1, 0), 2: (0, 1)}


def compose6(c: DecomposedPoint) -> PhasePoint:
    if c.sector == "singlet":
        x, y = 1, 1
    else:
        x, y = _M_TO_XY[c.m % 3]
    return PhasePoint(6, 1, (crt_merge(c.k, x), crt_merge(c.l, y)))


# ---------------------------------------------------------------------------
# small groups over Z_3

_GROUPS = ("GL3_2", "SL3_2", "O3_2", "SO3_2")


def _all_2x2_mod3() -> Iterator[np.ndarray]:
    for e in itertools.product(range(3), repeat=4):
        yield np.array(e, dtype=np.int64).reshape(2, 2)


def enumerate_group(name: str) -> list[np.ndarray]:
    """All elements of GL, SL, O or SO of Z_3^2, in lexicographic entry order."""
    if name not in _GROUPS:
        raise ValueError(f"unknown group {name!r}; expected one of {_GROUPS}")
    out = []
    I = np.eye(2, dtype=np.int64)
    for G in _all_2x2_mod3():
        det = mat_det_mod(G, 3)
        if det == 0:
            continue
        if name == "SL3_2" and det != 1:
            continue
        if name in ("O3_2", "SO3_2"):
            if not np.array_equal((G @ G.T) % 3, I):
                continue
            if name == "SO3_2" and det != 1:
                continue
        out.append(G)
    return out


def lift_gl3_to_z6(G) -> np.ndarray:
    """``4 G + 3 I mod 6``: reduces to G mod 3 and to the identity mod 2."""
    G = np.asarray(G, dtype=np.int64) % 3
    if mat_det_mod(G, 3) == 0:
        raise ValueError("G is singular over Z_3")
    return (4 * G + 3 * np.eye(G.shape[0], dtype=np.int64)) % 6


@dataclass(frozen=True)
class OrbitCensus:
    representatives: list[np.ndarray]
    sizes: list[int]
    orbits: list[list[np.ndarray]]

    @property
    def total(self) -> int:
        return sum(self.sizes)


def _sym_key(S: np.ndarray) -> tuple[int, ...]:
    return tuple(int(x) for x in (S % 3).ravel())


def rank1_symmetric_orbits() -> OrbitCensus:
    """Partition rank-1 symmetric 2x2 matrices over Z_3 under ``S -> G S G^t``, G orthogonal."""
    group = enumerate_group("O3_2")
    mats = []
    for a, b, c in itertools.product(range(3), repeat=3):
        S = np.array([[a, b], [b, c]], dtype=np.int64)
        if mat_rank_mod_p(S, 3) == 1:
            mats.append(S)
    seen: set[tuple[int, ...]] = set()
    reps, sizes, orbits = [], [], []
    for S in mats:
        if _sym_key(S) in seen:
            continue
        orbit = {}
        for G in group:
            T = (G @ S @ G.T) % 3
            orbit[_sym_key(T)] = T
        seen.update(orbit)
        reps.append(S)
        sizes.append(len(orbit))
        orbits.append([orbit[k] for k in sorted(orbit)])
    return OrbitCensus(reps, sizes, orbits)
