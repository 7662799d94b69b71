"""Dense matrices with exact cyclotomic entries.

An :class:`ExactMatrix` stores integer coefficient arrays of shape
``(rows, cols, phi(N))`` in the canonical basis of Z[zeta_N] together with a
positive integer ``scale``; the represented matrix is ``coeffs / sqrt(scale)``.
Integer coefficients suffice for everything built in this package because all
denominators are square roots of the dimension.

Arithmetic is vectorised with numpy: a product is computed as one integer
matmul per exponent followed by a cyclic shift and a reduction modulo
``Phi_N``.  Arrays switch to Python-int object dtype when a product could
leave the int64 range.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .scalar import CycScalar, _lcm, euler_phi, reduction_matrix, sqrt_int

__all__ = ["ExactMatrix", "ScaleMismatchError"]

_FLOAT_EXACT = 2**53
_INT64_SAFE = 2**62


class ScaleMismatchError(ValueError):
    """Two matrices with incompatible square-root denominators were added."""


def _squarefree_split(s: int) -> tuple[int, int]:
    """Write ``s = f^2 r`` with ``r`` squarefree; return ``(f, r)``."""
    f, r = 1, 1
    m = s
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            f *= p
            m //= p * p
        if m % p == 0:
            r *= p
            m //= p
        p += 1
    return f, r * m


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.ravel())
    return int(np.abs(a).max())


def _reduce(pb: np.ndarray, N: int) -> np.ndarray:
    """Power-basis array ``(..., N)`` to canonical ``(..., phi(N))``."""
    R = reduction_matrix(N)
    if pb.dtype == object:
        return pb.dot(R.astype(object))
    if _max_abs(pb) * N * max(1, int(np.abs(R).max())) >= _INT64_SAFE:
        return pb.astype(object).dot(R.astype(object))
    return pb @ R


class ExactMatrix:
    """Matrix ``coeffs / sqrt(scale)`` over Z[zeta_N] in canonical form."""

    __slots__ = ("coeffs", "conductor", "scale")

    def __init__(self, coeffs: np.ndarray, conductor: int, scale: int = 1):
        coeffs = np.asarray(coeffs)
        if coeffs.ndim != 3 or coeffs.shape[2] != euler_phi(conductor):
            raise ValueError("coefficient array must have shape (rows, cols, phi(N))")
        if scale < 1:
            raise ValueError("scale must be a positive integer")
        if coeffs.dtype != object and coeffs.dtype != np.int64:
            coeffs = coeffs.astype(np.int64)
        self.coeffs = coeffs
        self.conductor = int(conductor)
        self.scale = int(scale)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_power_basis(cls, pb: np.ndarray, conductor: int, scale: int = 1) -> "ExactMatrix":
        return cls(_reduce(np.asarray(pb), conductor), conductor, scale)

    @classmethod
    def from_int(cls, a, scale: int = 1) -> "ExactMatrix":
        a = np.asarray(a)
        if a.dtype != object:
            a = a.astype(np.int64)
        if a.ndim == 1:
            a = a[:, None]
        return cls(a[:, :, None], 1, scale)

    @classmethod
    def identity(cls, dim: int) -> "ExactMatrix":
        return cls.from_int(np.eye(dim, dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None, conductor: int = 1, scale: int = 1):
        cols = rows if cols is None else cols
        return cls(np.zeros((rows, cols, euler_phi(conductor)), dtype=np.int64), conductor, scale)

    @classmethod
    def from_exponents(
        cls,
        exponents,
        conductor: int,
        mask=None,
        scale: int = 1,
    ) -> "ExactMatrix":
        """Entries ``zeta_N^exponents`` where ``mask`` is true, zero elsewhere."""
        e = np.asarray(exponents, dtype=np.int64) % conductor
        if e.ndim == 1:
            e = e[:, None]
        m = np.ones(e.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool).reshape(e.shape)
        pb = np.zeros(e.shape + (conductor,), dtype=np.int64)
        rows, cols = np.nonzero(m)
        pb[rows, cols, e[rows, cols]] = 1
        return cls.from_power_basis(pb, conductor, scale)

    @classmethod
    def from_scalars(cls, table: Sequence[Sequence[CycScalar]], scale: int = 1) -> "ExactMatrix":
        """Build from a nested list of CycScalars with integral coefficients."""
        rows = len(table)
        cols = len(table[0]) if rows else 0
        N = 1
        for row in table:
            for x in row:
                N = _lcm(N, x.conductor)
        pb = np.zeros((rows, cols, N), dtype=object)
        for i, row in enumerate(table):
            for j, x in enumerate(row):
                for e, c in enumerate(x.power_basis(N)):
                    if c:
                        if c.denominator != 1:
                            raise ValueError("entries must have integer coefficients")
                        pb[i, j, e] = int(c)
        return cls.from_power_basis(pb, N, scale)._compact()

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "ExactMatrix":
        """Matrix sending basis vector ``j`` to ``perm[j]``."""
        dim = len(perm)
        a = np.zeros((dim, dim), dtype=np.int64)
        a[np.asarray(perm), np.arange(dim)] = 1
        if not np.array_equal(a.sum(axis=0), np.ones(dim)) or not np.array_equal(
            a.sum(axis=1), np.ones(dim)
        ):
            raise ValueError("not a permutation")
        return cls.from_int(a)

    # -- basic properties -------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[0], self.coeffs.shape[1]

    @property
    def dim(self) -> int:
        r, c = self.shape
        if r != c:
            raise ValueError("matrix is not square")
        return r

    def _compact(self) -> "ExactMatrix":
        if self.coeffs.dtype == object and (
            self.coeffs.size == 0 or _max_abs(self.coeffs) < _INT64_SAFE
        ):
            return ExactMatrix(self.coeffs.astype(np.int64), self.conductor, self.scale)
        return self

    def power_basis(self, M: int | None = None) -> np.ndarray:
        """Coefficients in the basis ``zeta_M^e``; ``M`` a multiple of the conductor."""
        M = self.conductor if M is None else M
        if M % self.conductor:
            raise ValueError("target conductor must be a multiple of the conductor")
        step = M // self.conductor
        r, c, k = self.coeffs.shape
        pb = np.zeros((r, c, M), dtype=self.coeffs.dtype)
        pb[:, :, 0 : k * step : step] = self.coeffs
        return pb

    def lift(self, M: int) -> "ExactMatrix":
        if M == self.conductor:
            return self
        return ExactMatrix.from_power_basis(self.power_basis(M), M, self.scale)

    def with_scale(self, scale: int) -> "ExactMatrix":
        """Re-express with a larger ``scale``; ``scale / self.scale`` must be a square."""
        if scale == self.scale:
            return self
        ratio, rem = divmod(scale, self.scale)
        t = math.isqrt(ratio) if not rem else 0
        if rem or t * t != ratio:
            raise ScaleMismatchError(f"cannot rewrite scale {self.scale} as {scale}")
        return ExactMatrix(self.coeffs * t, self.conductor, scale)._compact()

    def _aligned(self, other: "ExactMatrix") -> tuple["ExactMatrix", "ExactMatrix"]:
        M = _lcm(self.conductor, other.conductor)
        a, b = self.lift(M), other.lift(M)
        if a.scale != b.scale:
            fa, ra = _squarefree_split(a.scale)
            fb, rb = _squarefree_split(b.scale)
            if ra != rb:
                raise ScaleMismatchError(
                    f"scales {a.scale} and {b.scale} differ by an irrational factor"
                )
            s = _lcm(fa, fb) ** 2 * ra
            a, b = a.with_scale(s), b.with_scale(s)
        return a, b

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        a, b = self._aligned(other)
        return ExactMatrix(a.coeffs + b.coeffs, a.conductor, a.scale)._compact()

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        a, b = self._aligned(other)
        return ExactMatrix(a.coeffs - b.coeffs, a.conductor, a.scale)._compact()

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(-self.coeffs, self.conductor, self.scale)

    def __mul__(self, x) -> "ExactMatrix":
        """Multiplication by an integer or by a CycScalar with integer coefficients."""
        if isinstance(x, (int, np.integer)):
            return ExactMatrix(self.coeffs * int(x), self.conductor, self.scale)._compact()
        if isinstance(x, CycScalar):
            one = ExactMatrix.from_scalars([[x]])
            r, c = self.shape
            # scalar times matrix = (x I) M, done through the generic product
            xi = ExactMatrix(
                np.broadcast_to(np.eye(r, dtype=np.int64)[:, :, None], (r, r, one.coeffs.shape[2]))
                * one.coeffs[0, 0][None, None, :],
                one.conductor,
            )
            return xi @ self
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        r, k = self.shape
        k2, c = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        M = _lcm(self.conductor, other.conductor)
        A = self.power_basis(M)
        B = other.power_basis(M)
        bound = _max_abs(self.coeffs) * _max_abs(other.coeffs) * max(k, 1) * M
        use_obj = A.dtype == object or B.dtype == object or bound >= _INT64_SAFE
        if use_obj:
            A, B = A.astype(object), B.astype(object)
        Bflat = B.reshape(k, c * M)
        # integer products are exact in float64 while every partial sum stays below 2^53
        use_float = not use_obj and _max_abs(A) * _max_abs(B) * max(k, 1) < _FLOAT_EXACT
        if use_float:
            Bflat = Bflat.astype(np.float64)
        out = np.zeros((r, c, M), dtype=object if use_obj else np.int64)
        for e1 in range(M):
            Ae = A[:, :, e1]
            if not Ae.any():
                continue
            if use_obj:
                T = Ae.dot(Bflat)
            elif use_float:
                T = np.rint(Ae.astype(np.float64) @ Bflat).astype(np.int64)
            else:
                T = Ae @ Bflat
            out += np.roll(T.reshape(r, c, M), e1, axis=2)
        return ExactMatrix.from_power_basis(out, M, self.scale * other.scale)._compact()

    def dagger(self) -> "ExactMatrix":
        N = self.conductor
        pb = self.power_basis()
        conj = np.zeros_like(pb)
        conj[:, :, (-np.arange(N)) % N] = pb
        return ExactMatrix.from_power_basis(conj.transpose(1, 0, 2), N, self.scale)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.coeffs.transpose(1, 0, 2).copy(), self.conductor, self.scale)

    def conj(self) -> "ExactMatrix":
        return self.dagger().transpose()

    def galois(self, k: int) -> "ExactMatrix":
        """Apply ``zeta_N -> zeta_N^k`` entrywise (scale is left untouched)."""
        N = self.conductor
        if math.gcd(k, N) != 1:
            raise ValueError(f"{k} is not a unit modulo {N}")
        pb = self.power_basis()
        out = np.zeros_like(pb)
        out[:, :, (np.arange(N) * k) % N] = pb
        return ExactMatrix.from_power_basis(out, N, self.scale)

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        M = _lcm(self.conductor, other.conductor)
        A, B = self.power_basis(M), other.power_basis(M)
        (r1, c1), (r2, c2) = self.shape, other.shape
        use_obj = A.dtype == object or B.dtype == object
        out = np.zeros((r1, r2, c1, c2, M), dtype=object if use_obj else np.int64)
        for e1 in range(M):
            Ae = A[:, :, e1]
            if not Ae.any():
                continue
            T = Ae[:, None, :, None, None] * B[None, :, None, :, :]
            out += np.roll(T, e1, axis=4)
        out = out.reshape(r1 * r2, c1 * c2, M)
        return ExactMatrix.from_power_basis(out, M, self.scale * other.scale)._compact()

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        try:
            a, b = self._aligned(other)
        except ScaleMismatchError:
            return self.is_zero() and other.is_zero()
        return bool(np.array_equal(a.coeffs, b.coeffs))

    __hash__ = None

    def numerator_entry(self, i: int, j: int) -> CycScalar:
        N = self.conductor
        return CycScalar(N, tuple(_frac(x) for x in self.coeffs[i, j]))

    def entry(self, i: int, j: int) -> CycScalar:
        x = self.numerator_entry(i, j)
        return x if self.scale == 1 else x / sqrt_int(self.scale)

    def trace(self) -> CycScalar:
        n = self.dim
        total = self.coeffs[np.arange(n), np.arange(n)].sum(axis=0)
        x = CycScalar(self.conductor, tuple(_frac(v) for v in np.atleast_1d(total)))
        return x if self.scale == 1 else x / sqrt_int(self.scale)

    def is_unitary(self) -> bool:
        r, c = self.shape
        if r != c:
            return False
        return self @ self.dagger() == ExactMatrix.identity(r)

    def is_diagonal(self) -> bool:
        r, c = self.shape
        off = self.coeffs.copy()
        off[np.arange(min(r, c)), np.arange(min(r, c))] = 0
        return not off.any()

    def is_monomial_unimodular(self) -> bool:
        """True if every entry has modulus exactly one (checked via x * conj(x))."""
        sq = self.entrywise_abs_sq()
        return bool(np.all(sq == self.scale))

    def entrywise_abs_sq(self) -> np.ndarray:
        """Integer array of ``|numerator_ij|^2`` when every value is rational, else error."""
        N = self.conductor
        pb = self.power_basis()
        conj = np.zeros_like(pb)
        conj[:, :, (-np.arange(N)) % N] = pb
        # cyclic convolution of pb and conj, entrywise
        r, c, _ = pb.shape
        out = np.zeros((r, c, N), dtype=object if pb.dtype == object else np.int64)
        for e1 in range(N):
            a = pb[:, :, e1]
            if not a.any():
                continue
            out += np.roll(a[:, :, None] * conj, e1, axis=2)
        red = _reduce(out, N)
        if red.shape[2] > 1 and red[:, :, 1:].any():
            raise ArithmeticError("norms are not rational")
        return red[:, :, 0]

    def to_numpy(self) -> np.ndarray:
        N = self.conductor
        k = self.coeffs.shape[2]
        z = np.exp(2j * np.pi * np.arange(k) / N)
        vals = self.coeffs.astype(np.float64) @ z if self.coeffs.dtype == object else self.coeffs @ z
        return vals / math.sqrt(self.scale)

    def __repr__(self) -> str:
        return f"ExactMatrix(shape={self.shape}, conductor={self.conductor}, scale={self.scale})"

    # -- serialisation ----------------------------------------------------
    def scale_as_power(self) -> tuple[int, int]:
        """Return ``(d, e)`` with ``d**e == scale`` and ``e`` as large as possible."""
        s = self.scale
        if s == 1:
            return 1, 0
        for e in range(s.bit_length(), 0, -1):
            base = round(s ** (1.0 / e))
            for b in (base - 1, base, base + 1):
                if b > 1 and b**e == s:
                    return b, e
        return s, 1

    def to_json(self) -> dict:
        d, e = self.scale_as_power()
        r, c = self.shape
        return {
            "dim": r if r == c else [r, c],
            "denom_pow": e,
            "d": d,
            "entries": [[self.numerator_entry(i, j).to_json() for j in range(c)] for i in range(r)],
        }

    @classmethod
    def from_json(cls, obj) -> "ExactMatrix":
        d, e = int(obj["d"]), int(obj["denom_pow"])
        table = [[CycScalar.from_json(x) for x in row] for row in obj["entries"]]
        return cls.from_scalars(table, scale=d**e)

    def to_float_json(self) -> dict:
        a = self.to_numpy()
        return {"entries": [[[float(z.real), float(z.imag)] for z in row] for row in a]}


def _frac(x):
    from fractions import Fraction

    return Fraction(int(x))


def block_sum(blocks: Iterable[ExactMatrix]) -> ExactMatrix:
    out = None
    for b in blocks:
        out = b if out is None else out + b
    if out is None:
        raise ValueError("empty sum")
    return out
