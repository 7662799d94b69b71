import numpy as np
import pytest

from hexaperfect.algebra import (
    OperatorBasis,
    So4Frame,
    check_prop_equivalences,
    hs_inner,
    lemma_overlaps_float,
    local_bases_float,
    overlap_eta,
    overlap_eta_sq,
    overlap_eta_sq_float,
    random_unitary,
    schatten4,
    schatten4_float,
    sector_analysis,
    support_algebra_dim,
    verify_operator_picture,
)
from hexaperfect.doubly_perfect import PhaseFunction, artisanal, quadratic_lambda, u_lambda
from hexaperfect.matrix import ExactMatrix
from hexaperfect.pauli import clock, shift, wh_circuit
from hexaperfect.scalar import CycScalar, gamma3, root_of_unity
from hexaperfect.two_unitary import flip, linear_ols, ols_to_unitary, partial_transpose, realignment


# --- inner products and overlaps ------------------------------------------------


def test_hs_inner_examples():
    Z = clock(2, 1)
    I = ExactMatrix.identity(2)
    ZZ = Z.kron(Z)
    assert hs_inner(ZZ, ZZ) == CycScalar.one()
    for side in ("L", "R"):
        for e in OperatorBasis.local(2, side).elements:
            assert hs_inner(ZZ, e).is_zero()
    assert hs_inner(Z.kron(I), Z.kron(I)) == CycScalar.one()
    with pytest.raises(ValueError):
        hs_inner(Z, ZZ)


def test_local_bases_orthonormal():
    for d in (2, 3):
        assert OperatorBasis.local(d, "L").check_orthonormal()
        assert OperatorBasis.local(d, "R").check_orthonormal()


def test_eta_examples(u_sparse):
    L3, R3 = OperatorBasis.local(3, "L"), OperatorBasis.local(3, "R")
    assert overlap_eta_sq(L3, R3) == 1
    assert overlap_eta_sq(L3, L3) == 9
    assert overlap_eta(L3, L3) == pytest.approx(3.0)
    L6, R6 = OperatorBasis.local(6, "L"), OperatorBasis.local(6, "R")
    UL = L6.conjugated(u_sparse)
    assert overlap_eta_sq(UL, R6) == 1
    assert overlap_eta_sq(UL, L6) == 1


def test_eta_non_orthonormal_spanning_set():
    # a non-orthonormal spanning set of the same algebra gives the same overlap
    L = OperatorBasis.local(2, "L")
    R = OperatorBasis.local(2, "R")
    mixed = [L.elements[0], L.elements[0] + L.elements[1], L.elements[2], L.elements[3]]
    skew = OperatorBasis(4, mixed, "skew", orthonormal=False)
    assert overlap_eta_sq(skew, L) == 4
    assert overlap_eta_sq(skew, R) == 1


def test_eta_float_matches_exact(u_sparse):
    L, R = local_bases_float(3)
    assert overlap_eta_sq_float(L, R) == pytest.approx(1.0)
    assert overlap_eta_sq_float(L, L) == pytest.approx(9.0)
    U = ols_to_unitary(*linear_ols(3, 2)).to_numpy()
    UL = [U @ x @ U.conj().T for x in L]
    assert overlap_eta_sq_float(UL, L) == pytest.approx(1.0)


def test_schatten4():
    I9 = ExactMatrix.identity(9)
    assert schatten4(I9) == 1
    assert schatten4(realignment(I9)) == 9
    assert schatten4_float(realignment(np.eye(9))) == pytest.approx(9.0)


@pytest.mark.parametrize("d,count", [(2, 20), (3, 10)])
def test_overlap_equals_schatten_norm(d, count, rng):
    for _ in range(count):
        dev_gamma, dev_real = lemma_overlaps_float(random_unitary(d * d, rng))
        assert dev_gamma < 1e-9
        assert dev_real < 1e-9


def test_overlap_equals_schatten_norm_exact(u_sparse):
    for U in (flip(3), ExactMatrix.identity(9), ols_to_unitary(*linear_ols(3, 2))):
        L, R = OperatorBasis.local(3, "L"), OperatorBasis.local(3, "R")
        UL = L.conjugated(U)
        assert overlap_eta_sq(UL, R) == schatten4(partial_transpose(U))
        assert overlap_eta_sq(UL, L) == schatten4(realignment(U))


def test_random_unitary_is_unitary(rng):
    U = random_unitary(6, rng)
    assert np.allclose(U @ U.conj().T, np.eye(6))


def test_prop_equivalences(u_sparse):
    rep = check_prop_equivalences(u_sparse)
    assert rep.consistent and rep.two_unitary
    assert all(v == 1 for v in rep.eta_sq.values())
    rep = check_prop_equivalences(flip(3))
    assert rep.consistent and not rep.two_unitary
    assert rep.eta_sq["ULU_R"] == 9 and rep.eta_sq["ULU_L"] == 1
    rep = check_prop_equivalences(ols_to_unitary(*linear_ols(5, 2)))
    assert rep.consistent and rep.two_unitary


def test_prop_equivalences_float(rng):
    rep = check_prop_equivalences(random_unitary(9, rng), backend="float")
    assert rep.consistent and not rep.two_unitary
    rep = check_prop_equivalences(ols_to_unitary(*linear_ols(3, 2)), backend="float")
    assert rep.consistent and rep.two_unitary
    assert rep.to_json()["two_unitary"]


# --- support algebras ------------------------------------------------------------


def test_support_dims_sparse(u_sparse):
    qutrit_in_qubit, qubit_in_qutrit = support_algebra_dim(u_sparse, (3, 2))
    assert (qutrit_in_qubit.dim, qubit_in_qutrit.dim) == (4, 3)
    assert qutrit_in_qubit.closed and qubit_in_qutrit.closed
    assert qutrit_in_qubit.within_stabilizer


def test_support_identity():
    a, b = support_algebra_dim(ExactMatrix.identity(36), (3, 2))
    assert a.dim == 1 and b.dim == 1


def test_support_errors():
    with pytest.raises(ValueError):
        support_algebra_dim(ExactMatrix.identity(16), (2, 2))


def test_support_random_within_stabilizer(rng):
    for _ in range(3):
        lam = PhaseFunction.from_exponents(6, 1, 6, rng.integers(0, 6, 36))
        rep, _ = support_algebra_dim(u_lambda(lam), (3, 2), both=False)
        assert rep.within_stabilizer
        assert rep.dim <= 4


# --- so(4) and sectors -----------------------------------------------------------


def test_so4_brackets():
    frame = So4Frame()
    assert frame.brackets() == {"[J,J]=J": True, "[K,K]=J": True, "[J,K]=K": True, "[L,R]=0": True}
    # the bracket of two K's lands in J, not K
    br = frame.K[-1] @ frame.K[0] - frame.K[0] @ frame.K[-1]
    assert np.array_equal(br, frame.J[1])
    assert not np.array_equal(br, frame.K[1])


def test_so4_basis_and_images():
    B = So4Frame.basis_states()
    assert B.is_unitary()
    images = So4Frame().local_images()
    assert images["left"] == {"antisymmetric": True, "span": ["R"]}
    assert images["right"] == {"antisymmetric": True, "span": ["L"]}


def test_sector_analysis_sparse():
    rep = sector_analysis("sparse")
    assert rep.ok
    assert rep.block_diagonal and rep.controlled_w and rep.expansion and rep.closed_form
    assert rep.products and rep.k_condition and rep.j_condition
    cf = rep.circuit_frame
    assert cf["preimage"] and cf["z_maps_to_xx_dagger"] and cf["closed_form_xx"]
    assert cf["products_xx_pow_m_minus_n"]
    assert not cf["products_xx_pow_n_minus_m"]


def test_sector_analysis_sym():
    rep = sector_analysis("sym")
    assert rep.ok
    assert rep.expansion is None and rep.closed_form is None
    with pytest.raises(ValueError):
        sector_analysis("octonion")


def test_fourier_coefficient_value():
    # f_0(0) = (1/3) sum_l omega^(l^2) = (1 + 2 omega) / 3 = i / sqrt 3
    f = sum((root_of_unity(3, l * l) for l in range(3)), CycScalar.zero()) / 3
    assert f == (CycScalar.one() + root_of_unity(3, 1) * 2) / 3
    assert f == gamma3() / 3
    assert complex(f) == pytest.approx(1j / np.sqrt(3))


def test_w_product_example_float():
    # independent float computation in the circuit frame
    w = np.exp(2j * np.pi / 3)
    C = wh_circuit(3).to_numpy()
    UQ = np.diag([w ** (l * l) for l in range(3)])
    Z = np.diag([w**x for x in range(3)])

    def W(m):
        inner = np.kron(np.eye(3), UQ @ np.linalg.matrix_power(Z.conj().T, m % 3))
        return w ** (m * m) * C @ inner @ C.conj().T

    X = shift(3, 1).to_numpy()
    XX = np.kron(X, X)
    P = W(0) @ W(1).conj().T
    assert np.allclose(P, w**-1 * XX.conj().T)
    assert not np.allclose(P, w**-1 * XX)
    # closed form with T = (X (x) X)^dagger
    for m in (-1, 0, 1):
        closed = 1j / np.sqrt(3) * (np.eye(9) + w**-1 * (w**m * XX.conj().T + w**-m * XX))
        assert np.allclose(W(m), closed)


def test_operator_picture():
    assert verify_operator_picture(artisanal("sparse"))
    assert verify_operator_picture(PhaseFunction.constant(3))
    assert verify_operator_picture(quadratic_lambda(np.eye(2, dtype=int), 3))
