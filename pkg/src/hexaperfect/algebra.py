"""Two-unitarity as quasi-orthogonality of operator subalgebras.

Matrices are vectors for the normalised Hilbert-Schmidt product
``(X|Y) = tr(X^dagger Y) / D``.  The overlap of two subalgebras is
``eta(A, B)^2 = Tr(P_A P_B)`` with ``P_A`` the orthogonal projection onto A; a
unitary ``U`` on ``C^d (x) C^d`` is two-unitary exactly when ``U L U^dagger``
overlaps both local algebras ``L = M_d (x) 1`` and ``R = 1 (x) M_d`` with
``eta^2 = 1``.

Exact routines return :class:`fractions.Fraction`; the float routines accept
numpy arrays and are used for random unitaries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .doubly_perfect import (
    SPARSE,
    SYMMETRIC,
    PhaseFunction,
    _tables,
    artisanal,
    cross_corr,
    crt_reorder_36,
    u_lambda,
)
from .matrix import ExactMatrix
from .pauli import clock, wh_basis_state, wh_circuit, wh_unitary, weyl, shift
from .phase_space import all_points
from .scalar import DEFAULT_TOL, CycScalar, _lcm, gamma3, root_of_unity
from .two_unitary import is_two_unitary, partial_transpose, realignment

__all__ = [
    "hs_inner",
    "OperatorBasis",
    "overlap_eta_sq",
    "overlap_eta",
    "overlap_eta_sq_float",
    "schatten4",
    "schatten4_float",
    "local_bases_float",
    "random_unitary",
    "lemma_overlaps_float",
    "PropReport",
    "check_prop_equivalences",
    "SupportReport",
    "support_algebra_dim",
    "So4Frame",
    "SectorAnalysis",
    "sector_analysis",
    "verify_operator_picture",
]


# ---------------------------------------------------------------------------
# inner products and bases


def _common(mats: Sequence[ExactMatrix]) -> list[ExactMatrix]:
    """Lift to one conductor and one scale."""
    out = list(mats)
    ref = out[0]
    for m in out[1:]:
        ref, _ = ref._aligned(m)
    aligned = []
    for m in out:
        a, _ = m._aligned(ref)
        _, r = ref._aligned(a)
        aligned.append(a if a.scale == r.scale else a.with_scale(r.scale))
    return aligned


def _stack(mats: Sequence[ExactMatrix]) -> ExactMatrix:
    """Columns are the row-major vectorisations of ``mats``."""
    mats = _common(mats)
    D2 = mats[0].shape[0] * mats[0].shape[1]
    cols = [m.coeffs.reshape(D2, 1, -1) for m in mats]
    return ExactMatrix(np.concatenate(cols, axis=1), mats[0].conductor, mats[0].scale)


def hs_inner(X: ExactMatrix, Y: ExactMatrix) -> CycScalar:
    """``tr(X^dagger Y) / D``."""
    if X.shape != Y.shape:
        raise ValueError("shape mismatch")
    return (X.dagger() @ Y).trace() / X.shape[0]


@dataclass
class OperatorBasis:
    """A spanning set of a subspace of ``M_D``, usually a subalgebra."""

    dim: int
    elements: list
    label: str = ""
    orthonormal: Optional[bool] = None

    def __post_init__(self):
        for e in self.elements:
            if e.shape != (self.dim, self.dim):
                raise ValueError("element has the wrong shape")

    @classmethod
    def local(cls, d: int, side: str) -> "OperatorBasis":
        """WH operators ``w(a) (x) 1`` (side ``L``) or ``1 (x) w(a)`` (side ``R``)."""
        one = ExactMatrix.identity(d)
        ops = [weyl(a, d=d) for a in all_points(d, 1)]
        elems = [w.kron(one) if side == "L" else one.kron(w) for w in ops]
        return cls(d * d, elems, side, orthonormal=True)

    def conjugated(self, U: ExactMatrix) -> "OperatorBasis":
        Ud = U.dagger()
        return OperatorBasis(self.dim, [U @ e @ Ud for e in self.elements], f"U{self.label}U+", self.orthonormal)

    def stacked(self) -> ExactMatrix:
        return _stack(self.elements)

    def gram(self) -> list[list[CycScalar]]:
        S = self.stacked()
        G = S.dagger() @ S
        m = len(self.elements)
        return [[G.entry(i, j) / self.dim for j in range(m)] for i in range(m)]

    def check_orthonormal(self) -> bool:
        S = self.stacked()
        G = S.dagger() @ S
        m = len(self.elements)
        return G == ExactMatrix.identity(m) * self.dim


def _cyc_inverse(M: list[list[CycScalar]]) -> list[list[CycScalar]]:
    n = len(M)
    A = [row[:] + [CycScalar.one() if i == j else CycScalar.zero() for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not A[r][c].is_zero()), None)
        if piv is None:
            raise ArithmeticError("degenerate basis: Gram matrix is singular")
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and not A[r][c].is_zero():
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def overlap_eta_sq(A: OperatorBasis, B: OperatorBasis) -> Fraction:
    """``Tr(P_A P_B)`` exactly."""
    if A.dim != B.dim:
        raise ValueError("bases live in different matrix algebras")
    SA, SB = A.stacked(), B.stacked()
    C = SA.dagger() @ SB  # D * (a_i | b_j)
    D = A.dim
    if A.orthonormal and B.orthonormal:
        val = (C @ C.dagger()).trace() / (D * D)
        return val.to_fraction()
    GA = _cyc_inverse(A.gram())
    GB = _cyc_inverse(B.gram())
    m, k = len(A.elements), len(B.elements)
    Cs = [[C.entry(i, j) / D for j in range(k)] for i in range(m)]
    total = CycScalar.zero()
    # Tr(G_A^-1 C G_B^-1 C^dagger)
    left = [[sum((GA[i][t] * Cs[t][j] for t in range(m)), CycScalar.zero()) for j in range(k)] for i in range(m)]
    right = [[sum((GB[i][t] * Cs[j][t].conjugate() for t in range(k)), CycScalar.zero()) for j in range(m)] for i in range(k)]
    for i in range(m):
        for j in range(k):
            total = total + left[i][j] * right[j][i]
    return total.to_fraction()


def overlap_eta(A: OperatorBasis, B: OperatorBasis) -> float:
    return float(overlap_eta_sq(A, B)) ** 0.5


def _orthonormal_columns(V: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the column span, rank cut at ``tol`` relative to the largest singular value."""
    U, s, _ = np.linalg.svd(V, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return U[:, :0]
    return U[:, s > tol * s[0]]


def overlap_eta_sq_float(A: Sequence[np.ndarray], B: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> float:
    D = A[0].shape[0]
    VA = _orthonormal_columns(np.stack([a.ravel() for a in A], axis=1) / np.sqrt(D), tol)
    VB = _orthonormal_columns(np.stack([b.ravel() for b in B], axis=1) / np.sqrt(D), tol)
    return float(np.linalg.norm(VA.conj().T @ VB) ** 2)


def local_bases_float(d: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Matrix units ``E_ij (x) 1`` and ``1 (x) E_ij``."""
    I = np.eye(d)
    units = []
    for i, j in itertools.product(range(d), repeat=2):
        E = np.zeros((d, d))
        E[i, j] = 1
        units.append(E)
    return [np.kron(E, I) for E in units], [np.kron(I, E) for E in units]


def schatten4(A: ExactMatrix) -> Fraction:
    """``tau((A A^dagger)^2)``, exact."""
    P = A @ A.dagger()
    return ((P @ P).trace() / A.shape[0]).to_fraction()


def schatten4_float(A: np.ndarray) -> float:
    P = A @ A.conj().T
    return float(np.real(np.trace(P @ P)) / A.shape[0])


def lemma_overlaps_float(U: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Deviations ``|eta(ULU+, R)^2 - ||U^Gamma||^4|`` and ``|eta(ULU+, L)^2 - ||U^R||^4|``."""
    U = np.asarray(U, dtype=complex)
    d = int(round(U.shape[0] ** 0.5))
    L, R = local_bases_float(d)
    UL = [U @ x @ U.conj().T for x in L]
    dev_gamma = abs(overlap_eta_sq_float(UL, R, tol) - schatten4_float(partial_transpose(U)))
    dev_real = abs(overlap_eta_sq_float(UL, L, tol) - schatten4_float(realignment(U)))
    return dev_gamma, dev_real


def random_unitary(D: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    Z = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


# ---------------------------------------------------------------------------
# equivalences between index reshuffles and overlaps


@dataclass
class PropReport:
    eta_sq: dict
    flags: dict
    consistent: bool
    two_unitary: bool

    def to_json(self) -> dict:
        return {
            "eta_sq": {k: str(v) for k, v in self.eta_sq.items()},
            "flags": self.flags,
            "consistent": self.consistent,
            "two_unitary": self.two_unitary,
        }


def check_prop_equivalences(U, backend: str = "exact", tol: float = DEFAULT_TOL) -> PropReport:
    """Compare the overlap conditions with the unitarity of ``U^Gamma`` and ``U^R``.

    Checked biconditionals:

    * ``U^Gamma`` unitary <=> ``eta(ULU+, R)^2 = 1`` <=> ``eta(URU+, L)^2 = 1``
    * ``U^R`` unitary <=> ``eta(ULU+, L)^2 = 1`` <=> ``eta(URU+, R)^2 = 1``
    * two-unitary <=> both of the above
    """
    if backend == "exact":
        d = int(round(U.shape[0] ** 0.5))
        L, R = OperatorBasis.local(d, "L"), OperatorBasis.local(d, "R")
        UL, UR = L.conjugated(U), R.conjugated(U)
        eta = {
            "ULU_R": overlap_eta_sq(UL, R),
            "URU_L": overlap_eta_sq(UR, L),
            "ULU_L": overlap_eta_sq(UL, L),
            "URU_R": overlap_eta_sq(UR, R),
        }
        one = lambda x: x == 1
        fl = is_two_unitary(U)
    else:
        U = U.to_numpy() if isinstance(U, ExactMatrix) else np.asarray(U)
        d = int(round(U.shape[0] ** 0.5))
        L, R = local_bases_float(d)
        UL = [U @ x @ U.conj().T for x in L]
        UR = [U @ x @ U.conj().T for x in R]
        eta = {
            "ULU_R": overlap_eta_sq_float(UL, R, tol),
            "URU_L": overlap_eta_sq_float(UR, L, tol),
            "ULU_L": overlap_eta_sq_float(UL, L, tol),
            "URU_R": overlap_eta_sq_float(UR, R, tol),
        }
        one = lambda x: abs(x - 1) < 1e-6
        fl = is_two_unitary(U, backend="float", tol=1e-6)
    gamma_ok = fl.gamma_dual == one(eta["ULU_R"]) == one(eta["URU_L"])
    dual_ok = fl.dual == one(eta["ULU_L"]) == one(eta["URU_R"])
    both = one(eta["ULU_R"]) and one(eta["ULU_L"])
    both_r = one(eta["URU_L"]) and one(eta["URU_R"])
    two_ok = (fl.unitary and fl.dual and fl.gamma_dual) == both == both_r
    flags = {"unitary": fl.unitary, "dual": fl.dual, "gamma_dual": fl.gamma_dual}
    return PropReport(eta, flags, gamma_ok and dual_ok and two_ok, fl.two_unitary)


# ---------------------------------------------------------------------------
# support algebras across a coprime split


def _crt_reorder(d1: int, d2: int) -> ExactMatrix:
    """``|a1, a2> -> |a1 mod d1, a2 mod d1, a1 mod d2, a2 mod d2>``."""
    d = d1 * d2
    perm = []
    for a1, a2 in itertools.product(range(d), repeat=2):
        perm.append((((a1 % d1) * d1 + a2 % d1) * d2 + a1 % d2) * d2 + a2 % d2)
    return ExactMatrix.permutation(perm)


def _wh_two(d: int) -> list[tuple[tuple[int, ...], ExactMatrix]]:
    return [(a, weyl(a, d=d)) for a in all_points(d, 2)]


def _cyc_rank(rows: list[list[CycScalar]]) -> int:
    """Rank over the cyclotomic field by incremental elimination."""
    basis: list[tuple[int, list[CycScalar]]] = []
    ncols = len(rows[0]) if rows else 0
    for row in rows:
        v = row[:]
        for piv, b in basis:
            if not v[piv].is_zero():
                f = v[piv]
                v = [x - f * y for x, y in zip(v, b)]
        piv = next((j for j in range(len(v)) if not v[j].is_zero()), None)
        if piv is None:
            continue
        inv = v[piv].inverse()
        basis.append((piv, [x * inv for x in v]))
        if len(basis) == ncols:
            break
    return len(basis)


def _label_group(labels: list[tuple[int, ...]], d: int) -> set:
    group = {tuple([0] * len(labels[0]))} if labels else set()
    frontier = list(group)
    gens = list(labels)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                s = tuple((x + y) % d for x, y in zip(g, h))
                if s not in group:
                    group.add(s)
                    nxt.append(s)
        frontier = nxt
    return group


@dataclass
class SupportReport:
    dim: int
    labels: list
    closed: bool
    within_stabilizer: bool


def _support(Up: ExactMatrix, dA: int, dB: int, a_first: bool) -> SupportReport:
    """Support in the B part of ``Up (M_A (x) 1) Up^dagger``; A, B are two-qudit factors of local size dA, dB."""
    A_ops = _wh_two(dA)
    B_ops = _wh_two(dB)
    IB = ExactMatrix.identity(dB * dB)
    Upd = Up.dagger()
    images = [Up @ (w.kron(IB) if a_first else IB.kron(w)) @ Upd for _, w in A_ops]
    S_X = _stack(images)
    basis = [wa.kron(wb) if a_first else wb.kron(wa) for _, wa in A_ops for _, wb in B_ops]
    S_W = _stack(basis)
    C = S_W.dagger() @ S_X  # rows (a, b), columns: images
    nA, nB = len(A_ops), len(B_ops)
    coeffs = C.coeffs.reshape(nA, nB, len(images), -1)
    nonzero_b = [j for j in range(nB) if coeffs[:, j].any()]
    rows = []
    seen = set()
    for a, img in itertools.product(range(nA), range(len(images))):
        vec = coeffs[a, nonzero_b, img]
        if not vec.any():
            continue
        key = tuple(int(x) for x in vec.ravel())
        if key in seen:
            continue
        seen.add(key)
        rows.append([CycScalar(C.conductor, tuple(Fraction(int(x)) for x in vec[j])) for j in range(len(nonzero_b))])
    rank = _cyc_rank(rows)
    labels = [B_ops[j][0] for j in nonzero_b]
    group = _label_group(labels, dB)
    # WH basis stabilizers on the B pair: X (x) X and Z (x) Z^-1
    stab = _label_group([(0, 0, 1, 1), (1, dB - 1, 0, 0)], dB)
    return SupportReport(rank, labels, rank == len(group), set(labels) <= stab)


def support_algebra_dim(
    U: ExactMatrix, split: tuple[int, int], both: bool = True
) -> tuple[SupportReport, Optional[SupportReport]]:
    """Support of the ``d1``-algebra inside the ``d2`` factor, and vice versa.

    ``U`` acts on ``C^d (x) C^d`` with ``d = d1 d2`` coprime; it is rewritten on
    ``(C^d1 (x) C^d1) (x) (C^d2 (x) C^d2)`` by the Chinese remainder reorder.
    Dimensions are exact ranks over the cyclotomic field.  With ``both=False``
    only the first direction is computed.
    """
    d1, d2 = split
    if np.gcd(d1, d2) != 1:
        raise ValueError("split factors must be coprime")
    R = _crt_reorder(d1, d2)
    Up = R @ U @ R.dagger()
    first = _support(Up, d1, d2, True)
    return first, (_support(Up, d2, d1, False) if both else None)


# ---------------------------------------------------------------------------
# so(4) frame for the qubit pair


def _asym(i: int, j: int) -> np.ndarray:
    M = np.zeros((4, 4), dtype=np.int64)
    M[i, j], M[j, i] = -1, 1
    return M


@dataclass
class So4Frame:
    """The J/K basis of so(4) and the quaternionic basis of the two-qubit space.

    Index order of the 4x4 matrices is ``(empty, -1, 0, 1)``: the singlet
    followed by the three triplet states.
    """

    J: dict = field(default_factory=lambda: {-1: _asym(2, 3), 0: _asym(3, 1), 1: _asym(1, 2)})
    K: dict = field(default_factory=lambda: {-1: _asym(1, 0), 0: _asym(2, 0), 1: _asym(3, 0)})

    def L(self, m: int) -> np.ndarray:
        return self.J[m] - self.K[m]

    def R(self, m: int) -> np.ndarray:
        return self.J[m] + self.K[m]

    @staticmethod
    def basis_states() -> ExactMatrix:
        """Columns ``-Phi_11, -i Phi_01, Phi_00, -i Phi_10`` (normalised)."""
        mi = CycScalar.from_terms(4, {3: 1})
        cols = [
            wh_basis_state((1, 1), d=2) * -1,
            wh_basis_state((0, 1), d=2) * mi,
            wh_basis_state((0, 0), d=2).lift(4),
            wh_basis_state((1, 0), d=2) * mi,
        ]
        cols = [c.lift(4) for c in cols]
        return ExactMatrix(np.concatenate([c.coeffs for c in cols], axis=1), 4, 2)

    def brackets(self) -> dict:
        """Check the commutation relations; returns a name -> bool map."""
        br = lambda a, b: a @ b - b @ a
        cyc = [(-1, 0, 1), (0, 1, -1), (1, -1, 0)]
        J, K = self.J, self.K
        return {
            "[J,J]=J": all(np.array_equal(br(J[a], J[b]), J[c]) for a, b, c in cyc),
            "[K,K]=J": all(np.array_equal(br(K[a], K[b]), J[c]) for a, b, c in cyc),
            "[J,K]=K": all(np.array_equal(br(J[a], K[b]), K[c]) for a, b, c in cyc),
            "[L,R]=0": all(not br(self.L(m), self.R(n)).any() for m in J for n in J),
        }

    def local_images(self) -> dict:
        """Express the traceless local qubit observables in the quaternionic basis.

        Returns, for each side, whether all images are antisymmetric and which
        of ``span{L_m}`` / ``span{R_m}`` they span.
        """
        B = self.basis_states()
        Bd = B.dagger()
        paulis = {
            "X": shift(2, 1),
            "Z": clock(2, 1),
            "Y": (shift(2, 1) @ clock(2, 1)) * CycScalar.from_terms(4, {1: 1}),
        }
        I2 = ExactMatrix.identity(2)
        out = {}
        for side in ("left", "right"):
            images = []
            for s in paulis.values():
                op = s.kron(I2) if side == "left" else I2.kron(s)
                images.append(Bd @ op @ B)
            antisym = all(M == -M.transpose() for M in images)
            spans = {}
            for name, fam in (("L", self.L), ("R", self.R)):
                target = _stack([ExactMatrix.from_int(fam(m)) for m in (-1, 0, 1)])
                spans[name] = all(_in_span(M, target) for M in images)
            out[side] = {"antisymmetric": antisym, "span": [k for k, v in spans.items() if v]}
        return out


def _in_span(M: ExactMatrix, cols: ExactMatrix) -> bool:
    """``vec(M)`` lies in the span of mutually orthogonal integer columns."""
    v = _stack([M])
    G = cols.dagger() @ cols
    proj = cols.dagger() @ v  # coefficients times column norms
    n = cols.shape[1]
    norms = [int(G.coeffs[i, i, 0]) for i in range(n)]
    L = 1
    for x in norms:
        L = _lcm(L, x)
    # L * vec(M) == sum_i (L / norm_i) <c_i, M> c_i
    weights = ExactMatrix.from_int(np.diag([L // x for x in norms]))
    return cols @ weights @ proj == v * L


# ---------------------------------------------------------------------------
# sector analysis of the order-6 solutions


def _qubit_states() -> dict:
    """Normalised two-qubit states: singlet ``e`` and triplet ``-1, 0, 1``."""
    B = So4Frame.basis_states()
    return {k: ExactMatrix(B.coeffs[:, i : i + 1], B.conductor, B.scale) for i, k in enumerate(("e", -1, 0, 1))}


@dataclass
class SectorAnalysis:
    kind: str
    block_diagonal: bool
    controlled_w: bool
    expansion: Optional[bool]
    closed_form: Optional[bool]
    products: bool
    k_condition: bool
    j_condition: bool
    circuit_frame: dict
    W: dict = field(repr=False, default_factory=dict)

    @property
    def ok(self) -> bool:
        checks = [self.block_diagonal, self.controlled_w, self.products, self.k_condition, self.j_condition]
        checks += [x for x in (self.expansion, self.closed_form) if x is not None]
        for key in ("preimage", "z_maps_to_xx_dagger", "closed_form_xx", "products_xx_pow_m_minus_n"):
            if key in self.circuit_frame:
                checks.append(self.circuit_frame[key])
        return all(checks)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "block_diagonal": self.block_diagonal,
            "controlled_w": self.controlled_w,
            "expansion": self.expansion,
            "closed_form": self.closed_form,
            "products": self.products,
            "k_condition": self.k_condition,
            "j_condition": self.j_condition,
            "circuit_frame": self.circuit_frame,
            "ok": self.ok,
        }


def _partial_traces_vanish(Y: ExactMatrix, d: int) -> bool:
    """``Y`` is HS-orthogonal to ``M_d (x) 1`` and ``1 (x) M_d``."""
    c = Y.coeffs.reshape(d, d, d, d, -1)
    tr2 = np.einsum("ijkjx->ikx", c)
    tr1 = np.einsum("ijilx->jlx", c)
    return not tr2.any() and not tr1.any()


def _scalar_matrix(c: CycScalar, dim: int) -> ExactMatrix:
    den = 1
    for x in c.coeffs:
        den = _lcm(den, x.denominator)
    M = ExactMatrix.identity(dim) * (c * den)
    return ExactMatrix(M.coeffs, M.conductor, M.scale * den * den)


def _mpow(M: ExactMatrix, k: int) -> ExactMatrix:
    out = ExactMatrix.identity(M.shape[0])
    for _ in range(k % 3):
        out = out @ M
    return out


def sector_analysis(kind: str = "sparse") -> SectorAnalysis:
    """Controlled-``W_m`` structure of ``U_lambda`` for an order-6 solution.

    In the Chinese remainder frame (qutrit pair, qubit pair) ``U_lambda`` is
    block diagonal over the qubit states ``Phi_e, Phi_-1, Phi_0, Phi_1``, with
    blocks ``A_s``.  Then ``W_m = A_m A_e^dagger`` and

    (i)   ``U (1 (x) |m><e|) U^dagger = W_m (x) |m><e|`` with
          ``W_m = B diag(omega^Q(k,l,m)) B^dagger``, ``B = conj(U_WH)``;
    (ii)  for the sparse solution ``omega^(l^2 - lm + m^2) = sum_r f_m(r) omega^(rl)``
          with ``f_m(r) = (i/sqrt 3) omega^(-r^2 + rm)``;
    (iii) ``W_m = (i/sqrt 3)(1 + omega^-1 (omega^m T + omega^-m T^dagger))`` with
          ``T = B (1 (x) Z) B^dagger`` (sparse only);
    (iv)  ``W_m W_n^dagger = omega^(m^2 - n^2) T^(n - m)`` (sparse) or
          ``B diag(omega^(Q(.,m) - Q(.,n))) B^dagger`` in general;
    (v)   ``W_m + W_m^dagger`` and ``W_m W_n^dagger + W_n W_m^dagger`` (m != n) are
          orthogonal to both local qutrit algebras.
    """
    pair = {"sparse": SPARSE, "sym": SYMMETRIC, "symmetric": SYMMETRIC}.get(kind)
    if pair is None:
        raise ValueError(f"unknown kind {kind!r}")
    R = crt_reorder_36()
    U = R @ u_lambda(artisanal("sym" if pair is SYMMETRIC else "sparse")) @ R.dagger()
    Ud = U.dagger()
    states = _qubit_states()
    I9 = ExactMatrix.identity(9)
    emb = {k: I9.kron(v) for k, v in states.items()}
    blocks = {k: emb[k].dagger() @ U @ emb[k] for k in states}
    recon = None
    for k in states:
        term = emb[k] @ blocks[k] @ emb[k].dagger()
        recon = term if recon is None else recon + term
    block_diag = recon == U

    W = {m: blocks[m] @ blocks["e"].dagger() for m in (-1, 0, 1)}
    B = wh_unitary(3, 1).conj()
    Bd = B.dagger()

    def qdiag(fn) -> ExactMatrix:
        e = np.zeros((9, 9), dtype=np.int64)
        for k, l in itertools.product(range(3), repeat=2):
            e[k * 3 + l, k * 3 + l] = fn(k, l) % 3
        return ExactMatrix.from_exponents(e, 3, mask=np.eye(9, dtype=bool))

    Qf = lambda k, l, m: int(np.array([k, l, m % 3]) @ pair.Q @ np.array([k, l, m % 3]))
    W_formula = {m: B @ qdiag(lambda k, l, m=m: Qf(k, l, m)) @ Bd for m in (-1, 0, 1)}
    controlled = True
    for m in (-1, 0, 1):
        ket_bra = states[m] @ states["e"].dagger()
        lhs = U @ I9.kron(ket_bra) @ Ud
        rhs = W_formula[m].kron(ket_bra)
        controlled &= lhs == rhs and W[m] == W_formula[m]

    # T = B (1 (x) Z) B^dagger
    T = B @ I9.__class__.identity(3).kron(clock(3, 1)) @ Bd
    i_over_sqrt3 = gamma3() / 3
    expansion = closed = None
    if pair is SPARSE:
        expansion = True
        for m, r in itertools.product(range(3), repeat=2):
            f = sum(
                (root_of_unity(3, l * l - l * m + m * m - r * l) for l in range(3)), CycScalar.zero()
            ) / 3
            expansion &= f == i_over_sqrt3 * root_of_unity(3, -r * r + r * m)
        closed = True
        wbar = root_of_unity(3, -1)
        for m in (-1, 0, 1):
            inner = (
                ExactMatrix.identity(9)
                + _scalar_matrix(wbar * root_of_unity(3, m), 9) @ T
                + _scalar_matrix(wbar * root_of_unity(3, -m), 9) @ T.dagger()
            )
            closed &= W[m] == _scalar_matrix(i_over_sqrt3, 9) @ inner
    products = True
    for m, n in itertools.product((-1, 0, 1), repeat=2):
        P = W[m] @ W[n].dagger()
        if pair is SPARSE:
            expect = _scalar_matrix(root_of_unity(3, m * m - n * n), 9) @ _mpow(T, n - m)
        else:
            expect = B @ qdiag(lambda k, l: Qf(k, l, m) - Qf(k, l, n)) @ Bd
        products &= P == expect
    k_cond = all(_partial_traces_vanish(W[m] + W[m].dagger(), 3) for m in (-1, 0, 1))
    j_cond = all(
        _partial_traces_vanish(W[m] @ W[n].dagger() + W[n] @ W[m].dagger(), 3)
        for m, n in itertools.permutations((-1, 0, 1), 2)
    )
    circuit = _circuit_frame(pair) if pair is SPARSE else {}
    return SectorAnalysis(kind, block_diag, controlled, expansion, closed, products, k_cond, j_cond, circuit, W)


def _circuit_frame(pair) -> dict:
    """The same operators with the circuit ``C_2X_1 (1 (x) F)`` as basis change.

    ``W_m = omega^(m^2) C (1 (x) U_Q Z^-m) C^dagger`` with ``U_Q = diag(omega^(l^2))``.
    There ``1 (x) Z`` goes to ``(X (x) X)^dagger``, so the closed form holds with
    ``T = (X (x) X)^dagger`` and products are powers ``(X (x) X)^(m - n)``.
    """
    C = wh_circuit(3)
    Cd = C.dagger()
    e = np.zeros((9, 9), dtype=np.int64)
    XX = shift(3, 1).kron(shift(3, 1))

    def W(m):
        for k, l in itertools.product(range(3), repeat=2):
            x = np.array([k, l, m % 3])
            e[k * 3 + l, k * 3 + l] = int(x @ pair.Q @ x) % 3
        return C @ ExactMatrix.from_exponents(e.copy(), 3, mask=np.eye(9, dtype=bool)) @ Cd

    Ws = {m: W(m) for m in (-1, 0, 1)}
    image_of_z = C @ ExactMatrix.identity(3).kron(clock(3, 1)) @ Cd
    wbar = root_of_unity(3, -1)
    i3 = gamma3() / 3
    closed = all(
        Ws[m]
        == _scalar_matrix(i3, 9)
        @ (
            ExactMatrix.identity(9)
            + _scalar_matrix(wbar * root_of_unity(3, m), 9) @ XX.dagger()
            + _scalar_matrix(wbar * root_of_unity(3, -m), 9) @ XX
        )
        for m in (-1, 0, 1)
    )
    sign_n_minus_m = all(
        Ws[m] @ Ws[n].dagger() == _scalar_matrix(root_of_unity(3, m * m - n * n), 9) @ _mpow(XX, n - m)
        for m, n in itertools.product((-1, 0, 1), repeat=2)
    )
    sign_derived = all(
        Ws[m] @ Ws[n].dagger() == _scalar_matrix(root_of_unity(3, m * m - n * n), 9) @ _mpow(XX, m - n)
        for m, n in itertools.product((-1, 0, 1), repeat=2)
    )
    uq = np.zeros((3, 3), dtype=np.int64)
    uq[np.arange(3), np.arange(3)] = np.arange(3) ** 2 % 3
    UQ = ExactMatrix.from_exponents(uq, 3, mask=np.eye(3, dtype=bool))
    preimage = all(
        Ws[m]
        == _scalar_matrix(root_of_unity(3, m * m), 9)
        @ C
        @ ExactMatrix.identity(3).kron(UQ @ clock(3, -m))
        @ Cd
        for m in (-1, 0, 1)
    )
    return {
        "preimage": preimage,
        "z_maps_to_xx_dagger": image_of_z == XX.dagger(),
        "closed_form_xx": closed,
        "products_xx_pow_n_minus_m": sign_n_minus_m,
        "products_xx_pow_m_minus_n": sign_derived,
    }


# ---------------------------------------------------------------------------
# operator picture of the auto-correlation conditions


def _left_right_actions(d: int, n: int):
    """Superoperators of left multiplication by ``w(a)`` and right multiplication by ``w(c)^dagger``.

    Both are returned as stacks whose column ``a`` is the vectorised action in
    the (orthonormal) WH operator basis.
    """
    pts = _tables(d, n)[0]
    ops = [weyl(tuple(int(x) for x in a), d=d) for a in pts]
    D = d**n
    S = _stack(ops)  # D^2 x V: column b is vec(w(b))

    def action(f) -> ExactMatrix:
        # matrix of X -> f(X) in the WH basis: (w(b') | f(w(b))) * D
        cols = _stack([f(w) for w in ops])
        return S.dagger() @ cols

    L = [action(lambda X, A=A: A @ X) for A in ops]
    R = [action(lambda X, A=A: X @ A.dagger()) for A in ops]
    return L, R, D


def verify_operator_picture(lam: PhaseFunction) -> bool:
    """Recompute both auto-correlations as overlaps of superoperators.

    With ``U_lambda: w(b) -> lambda(b) w(b)``, checks
    ``tr(L_a^dagger U L_a' U^dagger) = delta_(a,a') (lambda * lambda)(a)`` and
    ``tr(R_-c^dagger U L_a U^dagger) = delta_(a,c) (twisted autocorrelation)(a)``.
    """
    d, n = lam.d, lam.n
    L, Rr, D = _left_right_actions(d, n)
    V = lam.size
    # U is diagonal in the WH basis; each action matrix carries a factor D from
    # the unnormalised basis, so both Gram matrices come out scaled by D^2.
    if lam.is_exponent:
        e = np.zeros((V, V), dtype=np.int64)
        e[np.arange(V), np.arange(V)] = lam.exponent_array()
        U = ExactMatrix.from_exponents(e, lam.base, mask=np.eye(V, dtype=bool))
    else:
        vals = lam.values_list()
        U = ExactMatrix.from_scalars([[vals[i] if i == j else CycScalar.zero() for j in range(V)] for i in range(V)])
    conj_L = [U @ x @ U.dagger() for x in L]
    TL = _stack(conj_L)
    SL = _stack(L)
    neg = _tables(d, n)[2]
    SR = _stack([Rr[int(neg[c])] for c in range(V)])
    G1 = SL.dagger() @ TL
    G2 = SR.dagger() @ TL
    plain = cross_corr(lam, lam, twisted=False)
    twisted = cross_corr(lam, lam, twisted=True)
    ok = True
    for a, ap in itertools.product(range(V), repeat=2):
        g1 = G1.entry(a, ap)
        g2 = G2.entry(ap, a)
        e1 = plain[a] * (D * D) if a == ap else CycScalar.zero()
        e2 = twisted[a] * (D * D) if a == ap else CycScalar.zero()
        if not (g1 == e1 and g2 == e2):
            ok = False
            break
    return ok
