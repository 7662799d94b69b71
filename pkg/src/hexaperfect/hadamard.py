"""Complex Hadamard two-unitaries built from phase functions.

For ``lambda`` on ``V = Z_d^n (+) Z_d^n`` the matrices

    G[a, b] = lambda(a - b) omega^[a, b]
    H[a, b] = omega^(a1 . a2) lambda(a - b) omega^(-b1 . b2)

have unimodular entries.  Divided by ``d^n`` they are two-unitary exactly
when ``lambda`` is doubly perfect.  Rows and columns are indexed by points in
the lexicographic order of :mod:`hexaperfect.phase_space`, which is the same
as the computational basis ``|a1>|a2>`` of 2n qudits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .doubly_perfect import PhaseFunction, _tables, act, commutes_with_stabilizers, u_lambda
from .matrix import ExactMatrix
from .pauli import clock, gate, shift, wh_basis_state, weyl
from .scalar import CycScalar, _lcm
from .two_unitary import TwoUnitaryFlags, is_two_unitary, partial_transpose

__all__ = [
    "HadamardPair",
    "build_hadamard",
    "verify_h_factorization",
    "verify_gamma_link",
    "circulant_checks",
    "CirculantReport",
    "FactorizationReport",
    "h_stabilizers",
]


@dataclass
class HadamardPair:
    """``G`` and ``H`` stored with scale ``d^(2n)``, i.e. already divided by ``d^n``."""

    G: ExactMatrix
    H: ExactMatrix
    source: PhaseFunction

    def flags(self) -> tuple[TwoUnitaryFlags, TwoUnitaryFlags]:
        return is_two_unitary(self.G), is_two_unitary(self.H)

    def entries_unimodular(self) -> bool:
        """Every entry of ``d^n G`` and ``d^n H`` has modulus one."""
        for M in (self.G, self.H):
            unscaled = ExactMatrix(M.coeffs, M.conductor, 1)
            if not np.all(unscaled.entrywise_abs_sq() == 1):
                return False
        return True


def _point_data(d: int, n: int):
    pts, add, neg, symp = _tables(d, n)
    diff = add[:, neg]  # diff[a, b] = index of a - b
    dots = (pts[:, :n] * pts[:, n:]).sum(axis=1) % d
    return pts, diff, symp, dots


def _build(lam: PhaseFunction, phase: np.ndarray) -> ExactMatrix:
    """Matrix ``lambda(a - b) omega_d^phase[a, b]`` scaled by ``d^-n``."""
    d, n = lam.d, lam.n
    _, diff, _, _ = _point_data(d, n)
    scale = d ** (2 * n)
    if lam.is_exponent:
        M = _lcm(lam.base, d)
        e = lam.exponent_array()[diff] * (M // lam.base) + phase * (M // d)
        return ExactMatrix.from_exponents(e, M, scale=scale)
    # general values: only needed for non-root-of-unity inputs
    vals = lam.values
    den = 1
    for v in vals:
        for c in v.coeffs:
            den = _lcm(den, c.denominator)
    omega = [CycScalar.from_terms(d, {k: 1}) for k in range(d)]
    table = [
        [vals[diff[a, b]] * omega[int(phase[a, b]) % d] * den for b in range(lam.size)]
        for a in range(lam.size)
    ]
    return ExactMatrix.from_scalars(table, scale=scale * den * den)


def build_hadamard(lam: PhaseFunction) -> HadamardPair:
    d, n = lam.d, lam.n
    _, _, symp, dots = _point_data(d, n)
    G = _build(lam, symp)
    H = _build(lam, dots[:, None] - dots[None, :])
    return HadamardPair(G, H, lam)


@dataclass
class FactorizationReport:
    ok: bool
    matrix_identity: bool
    eigen_ok: bool
    first_failure: Optional[int] = None
    opposite_orientation: Optional[bool] = None


def _local_fourier(d: int, n: int) -> ExactMatrix:
    """``F (x) 1`` with ``F`` the n-qudit Fourier gate."""
    return gate("fourier", d, n).matrix.kron(ExactMatrix.identity(d**n))


def verify_h_factorization(lam: PhaseFunction) -> FactorizationReport:
    """``d^-n H = (F (x) 1) U_mu (F (x) 1)^dagger`` with ``mu(p, q) = (F lambda)(p, -q)``.

    With ``F|x> = d^(-n/2) sum_y omega^(x.y) |y>`` the eigenvectors of ``H`` are
    ``(F (x) 1)|Phi_a>`` with eigenvalues ``mu(a)``.  The form
    ``(F (x) 1)^dagger U_(F lambda) (F (x) 1)`` is evaluated too and reported in
    ``opposite_orientation``; it only holds for special lambda.
    """
    d, n = lam.d, lam.n
    H = build_hadamard(lam).H
    Fl = act("fourier", lam)
    mu = act("pt", Fl)
    F1 = _local_fourier(d, n)
    identity_ok = F1 @ u_lambda(mu) @ F1.dagger() == H
    opposite = F1.dagger() @ u_lambda(Fl) @ F1 == H
    first = None
    for i, a in enumerate(_tables(d, n)[0]):
        v = F1 @ wh_basis_state(tuple(int(x) for x in a), d)
        if not H @ v == _scaled_vector(v, mu.value(i)):
            first = i
            break
    return FactorizationReport(identity_ok and first is None, identity_ok, first is None, first, opposite)


def _scaled_vector(v: ExactMatrix, c: CycScalar) -> ExactMatrix:
    den = 1
    for x in c.coeffs:
        den = _lcm(den, x.denominator)
    w = v * (c * den)
    return ExactMatrix(w.coeffs, w.conductor, w.scale * den * den)


def verify_gamma_link(lam: PhaseFunction) -> bool:
    """``H(lambda o PT)^Gamma = G(lambda)``, entrywise."""
    H_pt = build_hadamard(act("pt", lam)).H
    return partial_transpose(H_pt) == build_hadamard(lam).G


@dataclass
class CirculantReport:
    u_lambda_stabilized: bool
    h_stabilized: bool
    g_columns: bool
    first_bad_column: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.u_lambda_stabilized and self.h_stabilized and self.g_columns


def h_stabilizers(d: int, n: int) -> list[ExactMatrix]:
    """``Z_i (x) X_(n+i)`` and ``X_i (x) Z_(n+i)``: the WH stabilizers moved by ``F (x) 1``."""
    gens = []
    for i in range(n):
        a = [0] * (4 * n)
        a[i] = 1
        a[2 * n + n + i] = 1
        gens.append(weyl(tuple(a), d=d))
        b = [0] * (4 * n)
        b[2 * n + i] = 1
        b[n + i] = 1
        gens.append(weyl(tuple(b), d=d))
    return gens


def _tensor(ops: list[ExactMatrix]) -> ExactMatrix:
    out = ops[0]
    for op in ops[1:]:
        out = out.kron(op)
    return out


def circulant_checks(lam: PhaseFunction) -> CirculantReport:
    d, n = lam.d, lam.n
    pair = build_hadamard(lam)
    H, G = pair.H, pair.G
    u_ok = commutes_with_stabilizers(lam)
    h_ok = all((H @ g - g @ H).is_zero() for g in h_stabilizers(d, n))
    pts = _tables(d, n)[0]
    e0 = ExactMatrix.from_int(np.eye(lam.size, dtype=np.int64)[:, :1])
    col0 = G @ e0
    bad = None
    for j, q in enumerate(pts):
        q1, q2 = q[:n], q[n:]
        Zs = _tensor([clock(d, int(x)) for x in q2] + [clock(d, -int(x)) for x in q1])
        Xs = _tensor([shift(d, int(x)) for x in q1] + [shift(d, int(x)) for x in q2])
        ej = ExactMatrix.from_int(np.eye(lam.size, dtype=np.int64)[:, j : j + 1])
        if not (G @ ej == Zs @ Xs @ col0):
            bad = j
            break
    return CirculantReport(u_ok, h_ok, bad is None, bad)
