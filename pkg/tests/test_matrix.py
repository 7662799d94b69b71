import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hexaperfect.matrix import ExactMatrix
from hexaperfect.scalar import CycScalar, root_of_unity


def random_exact(rng, n, N=12, scale=1):
    e = rng.integers(0, N, size=(n, n))
    mask = rng.random((n, n)) < 0.7
    return ExactMatrix.from_exponents(e, N, mask=mask, scale=scale)


def test_identity_and_permutation():
    I = ExactMatrix.identity(4)
    assert I.is_unitary()
    P = ExactMatrix.permutation([2, 0, 3, 1])
    assert P.is_unitary()
    # column j goes to row perm[j]
    assert P.to_numpy()[2, 0] == 1
    assert (P @ P.dagger()) == I


def test_matmul_matches_numpy(rng):
    for N in (3, 4, 12):
        A = random_exact(rng, 5, N)
        B = random_exact(rng, 5, N, scale=4)
        assert np.allclose((A @ B).to_numpy(), A.to_numpy() @ B.to_numpy())
        assert np.allclose(A.kron(B).to_numpy(), np.kron(A.to_numpy(), B.to_numpy()))
        assert np.allclose(A.dagger().to_numpy(), A.to_numpy().conj().T)


def test_large_matmul_fast_path_is_exact(rng):
    # large enough to go through the float64 path
    A = random_exact(rng, 60, 12)
    B = random_exact(rng, 60, 12)
    C = A @ B
    D = ExactMatrix.from_scalars([[sum((A.entry(i, k) * B.entry(k, j) for k in range(60)), CycScalar.zero()) for j in range(3)] for i in range(3)])
    for i in range(3):
        for j in range(3):
            assert C.entry(i, j) == D.entry(i, j)


def test_trace_and_entries():
    M = ExactMatrix.from_scalars([[root_of_unity(3, 1), CycScalar.zero()], [CycScalar.one(), root_of_unity(3, 2)]])
    assert M.trace() == CycScalar.from_rational(-1)
    assert M.entry(1, 0) == CycScalar.one()


def test_scaled_equality():
    I = ExactMatrix.identity(3)
    two_over_two = ExactMatrix.from_int(2 * np.eye(3, dtype=int), scale=4)
    assert I == two_over_two


def test_json_round_trip(rng):
    A = random_exact(rng, 4, 6, scale=9)
    assert ExactMatrix.from_json(A.to_json()) == A


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([3, 4, 6, 12]))
def test_dagger_is_antihomomorphism(seed, N):
    rng = np.random.default_rng(seed)
    A = random_exact(rng, 4, N)
    B = random_exact(rng, 4, N)
    assert (A @ B).dagger() == B.dagger() @ A.dagger()
    assert A.kron(B).dagger() == A.dagger().kron(B.dagger())
