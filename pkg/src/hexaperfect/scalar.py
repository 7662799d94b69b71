"""Exact arithmetic in cyclotomic fields Q(zeta_N) and a float mirror.

A :class:`CycScalar` stores the canonical remainder of a polynomial in
``zeta_N`` modulo the N-th cyclotomic polynomial, with rational
coefficients.  Operands with different conductors are lifted to the least
common multiple before combining.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import numpy as np

__all__ = [
    "CycScalar",
    "ApproxScalar",
    "InvalidConductorError",
    "cyclotomic_poly",
    "reduction_matrix",
    "euler_phi",
    "root_of_unity",
    "tau",
    "tau_root",
    "omega",
    "gauss_sum",
    "gauss_sum_closed_form_3",
    "gamma3",
    "sqrt_int",
    "to_complex",
    "roots_sum_is_zero",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9


class InvalidConductorError(ValueError):
    """Raised when a conductor (or dimension) is not a positive integer."""


def _check_conductor(N: int) -> int:
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidConductorError(f"conductor must be a positive integer, got {N!r}")
    return int(N)


# ---------------------------------------------------------------------------
# cyclotomic polynomials and reduction tables


def _poly_divexact(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Exact division of integer polynomials (coefficients low to high)."""
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dn)
    for k in range(len(out) - 1, -1, -1):
        c, r = divmod(num[k + dn], lead)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        out[k] = c
        for j, dj in enumerate(den):
            num[k + j] -= c * dj
    if any(num[:dn]):
        raise ArithmeticError("polynomial division is not exact")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> tuple[int, ...]:
    """Integer coefficients (low to high) of the N-th cyclotomic polynomial.

    Obtained by dividing ``x^N - 1`` by every ``Phi_m`` with ``m`` a proper
    divisor of ``N``.
    """
    N = _check_conductor(N)
    poly = [-1] + [0] * (N - 1) + [1]
    for m in range(1, N):
        if N % m == 0:
            poly = _poly_divexact(poly, cyclotomic_poly(m))
    return tuple(poly)


def euler_phi(N: int) -> int:
    return len(cyclotomic_poly(N)) - 1


@lru_cache(maxsize=None)
def reduction_matrix(N: int) -> np.ndarray:
    """Integer matrix ``R`` of shape ``(N, phi(N))`` with ``x^e = R[e] mod Phi_N``.

    A coefficient vector in the power basis ``1, zeta, ..., zeta^(N-1)`` is
    brought to canonical form by right multiplication with ``R``.
    """
    phi = cyclotomic_poly(N)
    deg = len(phi) - 1
    R = np.zeros((N, deg), dtype=np.int64)
    cur = [0] * deg
    if deg:
        cur[0] = 1
    for e in range(N):
        R[e] = cur
        # multiply by x and reduce the overflowing top coefficient
        top = cur[-1] if deg else 0
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi[j]
    R.setflags(write=False)
    return R


def roots_sum_is_zero(counts: np.ndarray, N: int) -> np.ndarray:
    """Exact zero test for sums of N-th roots of unity.

    ``counts[..., e]`` is the integer multiplicity of ``zeta_N^e``.  Returns
    a boolean array over the leading axes.
    """
    red = np.asarray(counts) @ reduction_matrix(N)
    return ~np.any(red != 0, axis=-1)


# ---------------------------------------------------------------------------
# scalars

Number = Union[int, Fraction, "CycScalar"]


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True, eq=False)
class CycScalar:
    """Element ``sum_e coeffs[e] * zeta_N^e`` of Q(zeta_N) in canonical form.

    ``coeffs`` has length ``phi(N)``; construct instances through
    :meth:`from_power_basis`, :meth:`from_terms` or the helpers below so that
    the canonical-form invariant holds.
    """

    conductor: int
    coeffs: tuple[Fraction, ...]

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_power_basis(cls, N: int, values: Iterable) -> "CycScalar":
        """Canonicalise a length-N coefficient vector in the basis ``zeta_N^e``."""
        N = _check_conductor(N)
        vals = [Fraction(v) for v in values]
        if len(vals) != N:
            raise ValueError("power-basis vector must have length N")
        R = reduction_matrix(N)
        deg = R.shape[1]
        out = [Fraction(0)] * deg
        for e, v in enumerate(vals):
            if v:
                row = R[e]
                for j in range(deg):
                    if row[j]:
                        out[j] += v * int(row[j])
        return cls(N, tuple(out))

    @classmethod
    def from_terms(cls, N: int, terms: Mapping[int, Number]) -> "CycScalar":
        """Build ``sum c * zeta_N^e`` from a mapping ``{e: c}``."""
        N = _check_conductor(N)
        vec = [Fraction(0)] * N
        for e, c in terms.items():
            vec[int(e) % N] += Fraction(c)
        return cls.from_power_basis(N, vec)

    @classmethod
    def from_rational(cls, q) -> "CycScalar":
        return cls(1, (Fraction(q),))

    @classmethod
    def zero(cls) -> "CycScalar":
        return cls(1, (Fraction(0),))

    @classmethod
    def one(cls) -> "CycScalar":
        return cls(1, (Fraction(1),))

    # -- conversions ------------------------------------------------------
    def power_basis(self, M: int | None = None) -> list[Fraction]:
        """Coefficient list of length ``M`` (a multiple of the conductor)."""
        M = self.conductor if M is None else M
        if M % self.conductor:
            raise ValueError("target conductor must be a multiple of the conductor")
        step = M // self.conductor
        vec = [Fraction(0)] * M
        for e, c in enumerate(self.coeffs):
            vec[e * step] = c
        return vec

    def lift(self, M: int) -> "CycScalar":
        """Same number written with conductor ``M`` (a multiple of the current one)."""
        if M == self.conductor:
            return self
        return CycScalar.from_power_basis(M, self.power_basis(M))

    def __complex__(self) -> complex:
        N = self.conductor
        return complex(
            sum(
                complex(float(c)) * cmath.exp(2j * math.pi * e / N)
                for e, c in enumerate(self.coeffs)
                if c
            )
        )

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "CycScalar":
        if isinstance(other, CycScalar):
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            return CycScalar.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        M = _lcm(self.conductor, other.conductor)
        a, b = self.power_basis(M), other.power_basis(M)
        return CycScalar.from_power_basis(M, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(self.conductor, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.conductor == 1:
            q = other.coeffs[0]
            return CycScalar(self.conductor, tuple(c * q for c in self.coeffs))
        if self.conductor == 1:
            return other * self
        M = _lcm(self.conductor, other.conductor)
        a, b = self.power_basis(M), other.power_basis(M)
        out = [Fraction(0)] * M
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % M] += x * y
        return CycScalar.from_power_basis(M, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, np.integer)):
            q = Fraction(other)
            return CycScalar(self.conductor, tuple(c / q for c in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def conjugate(self) -> "CycScalar":
        N = self.conductor
        vec = [Fraction(0)] * N
        for e, c in enumerate(self.coeffs):
            vec[(-e) % N] += c
        return CycScalar.from_power_basis(N, vec)

    def norm_sq(self) -> "CycScalar":
        return self * self.conjugate()

    def is_unimodular(self) -> bool:
        return self.norm_sq() == 1

    def inverse(self) -> "CycScalar":
        """Multiplicative inverse.

        Unimodular elements use the conjugate; otherwise the product of all
        Galois conjugates gives a rational norm to divide by.
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_unimodular():
            return self.conjugate()
        N = self.conductor
        others = CycScalar.one()
        for k in range(2, N):
            if math.gcd(k, N) == 1:
                others = others * self.galois(k)
        norm = (self * others).to_fraction()
        return others / norm

    def galois(self, k: int) -> "CycScalar":
        """Apply the field automorphism ``zeta_N -> zeta_N^k`` (``gcd(k, N) = 1``)."""
        N = self.conductor
        if math.gcd(k, N) != 1:
            raise ValueError(f"Galois index {k} is not a unit modulo {N}")
        vec = [Fraction(0)] * N
        for e, c in enumerate(self.coeffs):
            vec[(e * k) % N] += c
        return CycScalar.from_power_basis(N, vec)

    def __pow__(self, k: int) -> "CycScalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = CycScalar.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # equality crosses conductors, so no cheap hash

    def __repr__(self) -> str:
        terms = [
            f"{c}*z{self.conductor}^{e}" if e else f"{c}"
            for e, c in enumerate(self.coeffs)
            if c
        ]
        return "CycScalar(" + (" + ".join(terms) if terms else "0") + ")"

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "conductor": self.conductor,
            "terms": [
                [e, c.numerator, c.denominator] for e, c in enumerate(self.coeffs) if c
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "CycScalar":
        N = int(obj["conductor"])
        terms: dict[int, Fraction] = {}
        for e, num, den in obj["terms"]:
            terms[int(e)] = terms.get(int(e), Fraction(0)) + Fraction(int(num), int(den))
        return cls.from_terms(N, terms)


@dataclass(frozen=True)
class ApproxScalar:
    """Complex float with a comparison tolerance."""

    re: float
    im: float
    tol: float = DEFAULT_TOL

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(complex(self))

    def is_zero(self) -> bool:
        return abs(self) < self.tol

    def close_to(self, other) -> bool:
        return abs(complex(self) - complex(other)) < self.tol


def to_complex(x: CycScalar, tol: float = DEFAULT_TOL) -> ApproxScalar:
    z = complex(x)
    return ApproxScalar(z.real, z.imag, tol)


# ---------------------------------------------------------------------------
# named constants


def root_of_unity(N: int, k: int = 1) -> CycScalar:
    """``zeta_N^k`` in canonical form."""
    N = _check_conductor(N)
    return CycScalar.from_terms(N, {k % N: 1})


def omega(d: int, k: int = 1) -> CycScalar:
    """``omega_d^k`` with ``omega_d = exp(2 pi i / d)``."""
    return root_of_unity(d, k)


def tau_root(d: int) -> tuple[int, int]:
    """Return ``(N, e)`` with ``tau_d = zeta_N^e``.

    Even ``d`` gives ``(2d, 1)``; odd ``d`` gives a d-th root ``(d, (d+1)/2)``,
    the square root of ``omega_d`` lying in Q(omega_d).
    """
    d = _check_conductor(d)
    if d % 2 == 0:
        return 2 * d, 1
    return d, (d + 1) // 2


def tau(d: int) -> CycScalar:
    """Square root of ``omega_d`` equal to ``(-1)^d exp(i pi / d)``."""
    N, e = tau_root(d)
    return root_of_unity(N, e)


def gamma3() -> CycScalar:
    """Quadratic Gauss sum over Z_3, equal to ``1 + 2 omega_3 = i sqrt(3)``."""
    return CycScalar.from_terms(3, {0: 1, 1: 2})


def _is_odd_prime(d: int) -> bool:
    return d > 2 and d % 2 == 1 and all(d % p for p in range(3, math.isqrt(d) + 1, 2))


def gauss_sum(a: int, b: int, c: int, d: int) -> CycScalar:
    """Direct summation of ``sum_x omega_d^(a x^2 + b x + c)`` for odd prime ``d``."""
    if not _is_odd_prime(d):
        raise ValueError(f"gauss_sum needs an odd prime modulus, got {d}")
    terms: dict[int, int] = {}
    for x in range(d):
        e = (a * x * x + b * x + c) % d
        terms[e] = terms.get(e, 0) + 1
    return CycScalar.from_terms(d, terms)


def gauss_sum_closed_form_3(a: int, b: int, c: int) -> CycScalar:
    """Closed form of the quadratic character sum over Z_3.

    For ``a != 0`` this is ``gamma * a * omega^(c - a b^2)`` with ``a`` read as
    ``+1`` or ``-1``; for ``a = 0`` it is ``3 omega^c delta(b)``.
    """
    a, b, c = a % 3, b % 3, c % 3
    if a == 0:
        return omega(3, c) * 3 if b == 0 else CycScalar.zero()
    sign = 1 if a == 1 else -1
    return gamma3() * sign * omega(3, c - a * b * b)


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycScalar:
    if p == 2:
        return CycScalar.from_terms(8, {1: 1, 7: 1})
    g = gauss_sum(1, 0, 0, p)
    if p % 4 == 1:
        return g
    return g * root_of_unity(4, 3)  # g = i sqrt(p)


def sqrt_int(r: int) -> CycScalar:
    """Positive square root of a positive integer as a cyclotomic number."""
    if r < 1:
        raise ValueError("sqrt_int needs a positive integer")
    out = CycScalar.one()
    square = 1
    m = r
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            square *= p
            m //= p * p
        if m % p == 0:
            out = out * _sqrt_prime(p)
            m //= p
        p += 1
    if m > 1:
        out = out * _sqrt_prime(m)
    return out * square
