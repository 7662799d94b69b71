"""Weyl-Heisenberg operators, the maximally entangled WH basis and Clifford gates.

Conventions:

* ``X|x> = |x+1>`` and ``Z|x> = omega^x |x>``.
* ``w(p, q) = tau^(-pq) Z^p X^q``; for ``n`` qudits the operator is the tensor
  product with the leftmost factor as the slowest-varying index.
* ``w^(d,m)`` is the Galois image of ``w`` under ``tau -> tau^m`` (so that
  ``omega = tau^2`` goes to ``omega^m`` as well).

For even ``d`` the phase ``tau`` has order ``2d``, so ``w`` depends on integer
representatives of its label and not only on the class modulo ``d``.  All
functions here accept unreduced integer coordinates and evaluate them as given.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .matrix import ExactMatrix
from .phase_space import (
    PhasePoint,
    ShapeError,
    SymplecticMap,
    all_points,
    mat_det_mod,
    mat_inv_mod,
    point_index,
    symplectic_j,
)
from .scalar import CycScalar, root_of_unity, tau_root

__all__ = [
    "ExactMatrix",
    "CliffordGate",
    "MetaplecticReport",
    "DiagonalCliffordData",
    "CrtFactorization",
    "InvalidGaloisIndexError",
    "shift",
    "clock",
    "weyl",
    "wh_basis_state",
    "wh_unitary",
    "gate",
    "verify_metaplectic",
    "diagonal_clifford_decompose",
    "crt_factorize",
    "S_WH",
    "S_WH_DIRECT",
    "wh_circuit",
    "tau_order",
    "infer_symplectic",
    "random_clifford",
]


class InvalidGaloisIndexError(ValueError):
    pass


S_WH = np.array([[1, 0, 0, 0], [-1, 0, 0, 1], [0, -1, 1, 0], [0, -1, 0, 0]], dtype=np.int64)


def tau_order(d: int) -> int:
    return 2 * d if d % 2 == 0 else d


def shift(d: int, power: int = 1) -> ExactMatrix:
    """Single-qudit ``X^power``."""
    perm = [(x + power) % d for x in range(d)]
    return ExactMatrix.permutation(perm)


def clock(d: int, power: int = 1) -> ExactMatrix:
    """Single-qudit ``Z^power``."""
    e = np.zeros((d, d), dtype=np.int64)
    e[np.arange(d), np.arange(d)] = (np.arange(d) * power) % d
    return ExactMatrix.from_exponents(e, d, mask=np.eye(d, dtype=bool))


def _coords_of(a, d: Optional[int]) -> tuple[int, tuple[int, ...]]:
    if isinstance(a, PhasePoint):
        return a.d, a.coords
    if d is None:
        raise ValueError("a modulus d is required for raw coordinate tuples")
    coords = tuple(int(x) for x in a)
    if len(coords) % 2:
        raise ShapeError("phase-space coordinates must have even length")
    return d, coords


def _weyl_single(d: int, p: int, q: int, m: int) -> ExactMatrix:
    """``tau^(-m p q) Z^(m p) X^q`` as an exact monomial matrix."""
    N, te = tau_root(d)
    rows = (np.arange(d) + q) % d  # X^q |x> = |x+q>
    # phase on column x: tau^(-m p q) * omega^(m p (x + q)), omega = zeta_N^(2 te)
    omega_e = N // d
    cols = np.arange(d)
    phase = (-m * p * q * te + m * p * (cols + q) * omega_e) % N
    e = np.zeros((d, d), dtype=np.int64)
    mask = np.zeros((d, d), dtype=bool)
    e[rows, cols] = phase
    mask[rows, cols] = True
    return ExactMatrix.from_exponents(e, N, mask=mask)


def weyl(a, m: int = 1, d: Optional[int] = None) -> ExactMatrix:
    """Weyl-Heisenberg operator ``w^(d,m)(a)``.

    ``a`` is a :class:`PhasePoint` or a raw integer vector ``(p_1..p_n, q_1..q_n)``
    (then ``d`` must be given).  Raw vectors are not reduced modulo ``d``.
    """
    d, coords = _coords_of(a, d)
    if math.gcd(m, tau_order(d)) != 1:
        raise InvalidGaloisIndexError(f"m={m} is not coprime to the order of tau_{d}")
    n = len(coords) // 2
    out = ExactMatrix.identity(1)
    for i in range(n):
        out = out.kron(_weyl_single(d, coords[i], coords[n + i], m))
    return out


def wh_basis_state(a, d: Optional[int] = None) -> ExactMatrix:
    """Unnormalised column ``(tau^(pq) w(p, q) (x) 1) sum_x |x, x>``.

    The tau phases cancel so the state is ``sum_x omega^(p.(x+q)) |x+q, x>`` with
    integer coefficients; its squared norm is ``d^n``.  The first ``n`` qudits
    carry the operator, the last ``n`` are the reference copy.
    """
    d, coords = _coords_of(a, d)
    n = len(coords) // 2
    p = np.asarray(coords[:n], dtype=np.int64)
    q = np.asarray(coords[n:], dtype=np.int64)
    dim = d**n
    exps = np.zeros((dim * dim, 1), dtype=np.int64)
    mask = np.zeros((dim * dim, 1), dtype=bool)
    for x in itertools.product(range(d), repeat=n):
        x = np.asarray(x, dtype=np.int64)
        top = (x + q) % d
        row = point_index(top, d) * dim + point_index(x, d)
        exps[row, 0] = int(p @ (x + q)) % d
        mask[row, 0] = True
    return ExactMatrix.from_exponents(exps, d, mask=mask)


def wh_unitary(d: int, n: int = 1) -> ExactMatrix:
    """Basis change sending ``|a>`` (phase-space label in lexicographic order) to ``|Phi_a>``."""
    cols = [wh_basis_state(c, d) for c in all_points(d, n)]
    coeffs = np.concatenate([c.coeffs for c in cols], axis=1)
    return ExactMatrix(coeffs, d if d > 1 else 1, d**n)


@dataclass
class CliffordGate:
    matrix: ExactMatrix
    symp: SymplecticMap
    phase_vec: Optional[tuple] = None
    label: str = ""


def _check_symmetric(N: np.ndarray):
    if not np.array_equal(N, N.T):
        raise ValueError("quadratic-form matrix must be symmetric")


def _gl_gate(G: np.ndarray, d: int) -> CliffordGate:
    G = np.asarray(G, dtype=np.int64) % d
    n = G.shape[0]
    if math.gcd(mat_det_mod(G, d), d) != 1:
        raise ValueError("G is singular modulo d")
    perm = []
    for x in itertools.product(range(d), repeat=n):
        perm.append(point_index((G @ np.asarray(x)) % d, d))
    M = ExactMatrix.permutation(perm)
    Ginv_t = mat_inv_mod(G, d).T
    S = np.zeros((2 * n, 2 * n), dtype=np.int64)
    S[:n, :n] = Ginv_t
    S[n:, n:] = G
    return CliffordGate(M, SymplecticMap(d, n, S), label="gl")


def _fourier_gate(d: int, n: int) -> CliffordGate:
    dim = d**n
    xs = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(dim, n)
    e = (xs @ xs.T) % d  # entry (y, x) = omega^(x.y)
    M = ExactMatrix.from_exponents(e, d, scale=dim)
    return CliffordGate(M, SymplecticMap(d, n, symplectic_j(n)), label="fourier")


def _quad_gate(N: np.ndarray, d: int) -> CliffordGate:
    N = np.asarray(N, dtype=np.int64)
    _check_symmetric(N)
    n = N.shape[0]
    dim = d**n
    Nt, te = tau_root(d)
    xs = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(dim, n)
    e = np.zeros((dim, dim), dtype=np.int64)
    diag = np.einsum("ij,jk,ik->i", xs, N, xs) * te
    e[np.arange(dim), np.arange(dim)] = diag % Nt
    M = ExactMatrix.from_exponents(e, Nt, mask=np.eye(dim, dtype=bool))
    S = np.eye(2 * n, dtype=np.int64)
    S[:n, n:] = N
    return CliffordGate(M, SymplecticMap(d, n, S), phase_vec=(0, (0,) * n, N), label="quad")


# Symplectic tag of ``wh_unitary(d)`` (the map |p,q> -> |Phi_(p,q)>), found by
# conjugating the four generators.  The reference matrix ``S_WH`` belongs to the
# circuit ``C_2X_1 (1 (x) F)``, which differs by a swap of labels and a phase.
S_WH_DIRECT = np.array([[0, 1, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0], [-1, 0, 0, -1]], dtype=np.int64)


def wh_circuit(d: int) -> ExactMatrix:
    """``C_2X_1 (1 (x) F)``: sends ``|p,q>`` to ``omega^(-pq) |Phi_(q,p)>``."""
    cx = _gl_gate(np.array([[1, 1], [0, 1]]), d).matrix
    return cx @ ExactMatrix.identity(d).kron(_fourier_gate(d, 1).matrix)


def _uwh_gate(d: int) -> CliffordGate:
    return CliffordGate(wh_circuit(d), SymplecticMap(d, 2, S_WH), label="uwh")


def _uwh_direct_gate(d: int) -> CliffordGate:
    return CliffordGate(wh_unitary(d, 1), SymplecticMap(d, 2, S_WH_DIRECT), label="uwh_direct")


def gate(kind: str, d: int, n: int = 1, G=None, N=None) -> CliffordGate:
    """Concrete Clifford gate with its symplectic tag.

    ``kind`` is one of ``gl`` (needs ``G``), ``fourier``, ``quad`` (needs ``N``),
    ``uwh`` (the two-qudit circuit ``C_2X_1 (1 (x) F)`` tagged with ``S_WH``),
    ``uwh_direct`` (the basis change ``|p,q> -> |Phi_(p,q)>``) or ``identity``.
    """
    if kind == "gl":
        if G is None:
            raise ValueError("gl gate needs a matrix G")
        return _gl_gate(G, d)
    if kind == "fourier":
        return _fourier_gate(d, n)
    if kind == "quad":
        if N is None:
            raise ValueError("quad gate needs a symmetric matrix N")
        return _quad_gate(N, d)
    if kind == "uwh":
        return _uwh_gate(d)
    if kind == "uwh_direct":
        return _uwh_direct_gate(d)
    if kind == "identity":
        return CliffordGate(
            ExactMatrix.identity(d**n), SymplecticMap(d, n, np.eye(2 * n, dtype=np.int64)), label="identity"
        )
    raise ValueError(f"unknown gate kind {kind!r}")


@dataclass
class MetaplecticReport:
    ok: bool
    phases: dict
    first_violation: Optional[tuple] = None


def _proportionality(A: ExactMatrix, B: ExactMatrix) -> Optional[CycScalar]:
    """Return ``c`` with ``A = c B`` when B is unitary, else None."""
    X = A @ B.dagger()
    if not X.is_diagonal():
        return None
    c = X.entry(0, 0)
    dim = X.dim
    diff = X - _scalar_identity(c, dim)
    return c if diff.is_zero() else None


def _scalar_identity(c: CycScalar, dim: int) -> ExactMatrix:
    # write c * I with the denominator absorbed into an integer-coefficient form
    den = 1
    for x in c.coeffs:
        den = den * x.denominator // math.gcd(den, x.denominator)
    num = c * den
    M = ExactMatrix.identity(dim) * num
    return ExactMatrix(M.coeffs, M.conductor, M.scale * den * den)


def verify_metaplectic(g: CliffordGate, points=None) -> MetaplecticReport:
    """Check ``U w(a) U^dagger = c_a w(S a)`` for every phase-space point ``a``."""
    d, n = g.symp.d, g.symp.n
    U, Ud = g.matrix, g.matrix.dagger()
    phases = {}
    pts = list(all_points(d, n)) if points is None else [tuple(p) for p in points]
    for a in pts:
        lhs = U @ weyl(a, d=d) @ Ud
        c = _proportionality(lhs, weyl(g.symp.apply(a), d=d))
        if c is None:
            return MetaplecticReport(False, phases, a)
        phases[a] = c
    return MetaplecticReport(True, phases)


def infer_symplectic(U: ExactMatrix, d: int, n: int) -> Optional[np.ndarray]:
    """Symplectic matrix of a Clifford unitary, read off from its action on the generators.

    Column ``i`` is the label ``b`` with ``U w(e_i) U^dagger`` proportional to
    ``w(b)``.  Returns None when some conjugate is not a WH operator.
    """
    Ud = U.dagger()
    cols = []
    for i in range(2 * n):
        e = [0] * (2 * n)
        e[i] = 1
        L = U @ weyl(e, d=d) @ Ud
        label = _weyl_label(L, d, n)
        if label is None:
            return None
        cols.append(label)
    return np.array(cols, dtype=np.int64).T % d


def _weyl_label(L: ExactMatrix, d: int, n: int) -> Optional[tuple[int, ...]]:
    """Label ``b`` of the WH operator proportional to ``L``, if any."""
    dim = d**n
    if L.shape != (dim, dim):
        return None
    # the column of |0> fixes q (support) and the ratio of two columns fixes p
    col0 = [i for i in range(dim) if L.coeffs[i, 0].any()]
    if len(col0) != 1:
        return None
    xs = list(itertools.product(range(d), repeat=n))
    q = xs[col0[0]]
    for p in itertools.product(range(d), repeat=n):
        b = tuple(p) + tuple(q)
        if _proportionality(L, weyl(b, d=d)) is not None:
            return b
    return None


@dataclass
class DiagonalCliffordData:
    phase: CycScalar
    p: tuple[int, ...]
    N: np.ndarray


def _tau_exponent(x: CycScalar, d: int) -> Optional[int]:
    Nt, te = tau_root(d)
    for k in range(tau_order(d)):
        if x == root_of_unity(Nt, k * te):
            return k
    return None


def diagonal_clifford_decompose(D: ExactMatrix, d: int) -> Optional[DiagonalCliffordData]:
    """Find ``(phase, p, N)`` with ``D|x> = phase * tau^(2 p.x + x N x)|x>``, or None.

    The entries are normalised by ``D[0,0]`` and written as powers of tau; the
    exponents are then matched against every ``(p, N)`` with ``p`` in Z_d^n and
    symmetric ``N`` modulo d.
    """
    if not D.is_diagonal():
        raise ValueError("matrix is not diagonal")
    dim = D.dim
    n = round(math.log(dim, d))
    if d**n != dim:
        raise ShapeError("dimension is not a power of d")
    phase = D.entry(0, 0)
    inv = phase.inverse()
    f = []
    for i in range(dim):
        k = _tau_exponent(D.entry(i, i) * inv, d)
        if k is None:
            return None
        f.append(k)
    f = np.asarray(f, dtype=np.int64)
    order = tau_order(d)
    xs = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(dim, n)
    tri = [(i, j) for i in range(n) for j in range(i, n)]
    for p in itertools.product(range(d), repeat=n):
        lin = 2 * (xs @ np.asarray(p, dtype=np.int64))
        for vals in itertools.product(range(d), repeat=len(tri)):
            N = np.zeros((n, n), dtype=np.int64)
            for (i, j), v in zip(tri, vals):
                N[i, j] = N[j, i] = v
            pred = (lin + np.einsum("ij,jk,ik->i", xs, N, xs)) % order
            if np.array_equal(pred, f % order):
                return DiagonalCliffordData(phase, tuple(p), N)
    return None


@dataclass
class CrtFactorization:
    R: ExactMatrix
    kappa1: int
    kappa2: int
    verified: bool


def crt_factorize(d1: int, d2: int, m: int = 1, verify: bool = True) -> CrtFactorization:
    """Chinese-remainder relabelling ``C^(d1 d2) -> C^d1 (x) C^d2``.

    ``kappa_i`` is the inverse of ``d / d_i`` modulo ``d_i`` (odd ``d_i``) or
    ``2 d_i`` (even ``d_i``).  With ``verify`` the factorisation of every
    single-qudit WH operator is checked exactly.
    """
    if math.gcd(d1, d2) != 1:
        raise ValueError("d1 and d2 must be coprime")
    d = d1 * d2
    perm = [(a % d1) * d2 + (a % d2) for a in range(d)]
    R = ExactMatrix.permutation(perm)
    kappa = []
    for di in (d1, d2):
        mod = 2 * di if di % 2 == 0 else di
        kappa.append(pow(d // di, -1, mod) if mod > 1 else 0)
    k1, k2 = kappa
    ok = True
    if verify:
        Rd = R.dagger()
        for p, q in itertools.product(range(d), repeat=2):
            lhs = R @ weyl((p, q), m, d=d) @ Rd
            rhs = weyl((p, q), _unit(k1 * m, d1), d=d1).kron(weyl((p, q), _unit(k2 * m, d2), d=d2))
            if lhs != rhs:
                ok = False
                break
    return CrtFactorization(R, k1, k2, ok)


def _unit(k: int, d: int) -> int:
    # d = 1 has the trivial group; any unit index works
    return k if d > 1 else 1




def random_clifford(d: int, n: int, depth: int, rng: np.random.Generator) -> ExactMatrix:
    """Product of ``depth`` random generators: single-qudit Fourier, GL and phase gates."""
    U = ExactMatrix.identity(d**n)
    F1 = _fourier_gate(d, 1).matrix
    for _ in range(depth):
        kind = rng.integers(3)
        if kind == 0:
            i = int(rng.integers(n))
            g = ExactMatrix.identity(d**i).kron(F1).kron(ExactMatrix.identity(d ** (n - i - 1)))
        elif kind == 1:
            while True:
                G = rng.integers(0, d, size=(n, n))
                if math.gcd(mat_det_mod(G, d), d) == 1:
                    break
            g = _gl_gate(G, d).matrix
        else:
            A = rng.integers(0, d, size=(n, n))
            g = _quad_gate(np.triu(A) + np.triu(A, 1).T, d).matrix
        U = g @ U
    return U
