import itertools

import numpy as np
import pytest

from hexaperfect.phase_space import (
    PhasePoint,
    ShapeError,
    SymplecticMap,
    all_points,
    compose6,
    crt_merge,
    crt_split,
    decompose6,
    enumerate_group,
    galois_similitude,
    lift_gl3_to_z6,
    mat_det_mod,
    rank1_symmetric_orbits,
    symp_form,
    symplectic_j,
)


def test_symp_form_examples():
    assert symp_form(PhasePoint.of(6, 1, 0), PhasePoint.of(6, 0, 1)) == 1
    assert symp_form(PhasePoint.of(3, 1, 0, 0, 0), PhasePoint.of(3, 0, 0, 1, 0)) == 1
    with pytest.raises(ShapeError):
        symp_form(PhasePoint.of(6, 1, 0), PhasePoint.of(3, 1, 0))


def test_symp_form_antisymmetric_at_d6():
    pts = [PhasePoint(6, 1, a) for a in all_points(6, 1)]
    for a in pts:
        assert symp_form(a, a) == 0
        for b in pts:
            assert (symp_form(a, b) + symp_form(b, a)) % 6 == 0


def test_crt_split_and_merge():
    assert crt_split(5) == (2, 1)
    assert crt_merge(2, 1) == 5
    assert crt_split(0) == (0, 0)
    for a in range(6):
        assert crt_merge(*crt_split(a)) == a


def test_decompose6_examples():
    d = decompose6(PhasePoint.of(6, 3, 3))
    assert (d.sector, d.k, d.l) == ("singlet", 0, 0)
    d = decompose6(PhasePoint.of(6, 1, 0))
    assert (d.sector, d.k, d.l, d.m) == ("triplet", 1, 0, 1)


def test_decompose6_is_bijection():
    images = [decompose6(PhasePoint(6, 1, a)) for a in all_points(6, 1)]
    assert sum(x.sector == "singlet" for x in images) == 9
    assert sum(x.sector == "triplet" for x in images) == 27
    assert len(set(images)) == 36
    for a in all_points(6, 1):
        assert compose6(decompose6(PhasePoint(6, 1, a))).coords == a
    with pytest.raises(ShapeError):
        decompose6(PhasePoint.of(3, 1, 0))


def test_group_orders():
    assert len(enumerate_group("SL3_2")) == 24
    assert len(enumerate_group("GL3_2")) == 48
    # brute force oracle for GL
    count = sum(
        1 for e in itertools.product(range(3), repeat=4) if (e[0] * e[3] - e[1] * e[2]) % 3 != 0
    )
    assert count == 48
    I = np.eye(2, dtype=np.int64)
    for name in ("GL3_2", "SL3_2", "O3_2", "SO3_2"):
        group = enumerate_group(name)
        assert any(np.array_equal(G, I) for G in group)
        assert len({G.tobytes() for G in group}) == len(group)
    with pytest.raises(ValueError):
        enumerate_group("GL5_2")


def test_lift_to_z6():
    assert np.array_equal(lift_gl3_to_z6(np.eye(2, dtype=int)), np.eye(2))
    assert np.array_equal(lift_gl3_to_z6([[1, 2], [2, 2]]), [[1, 2], [2, 5]])
    for G in enumerate_group("GL3_2"):
        L = lift_gl3_to_z6(G)
        assert mat_det_mod(L, 6) in (1, 5)
        assert np.array_equal(L % 3, G)
        assert np.array_equal(L % 2, np.eye(2))
    with pytest.raises(ValueError):
        lift_gl3_to_z6([[1, 1], [1, 1]])


def test_rank1_orbits():
    census = rank1_symmetric_orbits()
    assert len(census.sizes) == 4
    # brute-force oracle: nonzero symmetric [[a, b], [b, c]] with ac = b^2 over Z_3
    brute = sum(
        1 for a, b, c in itertools.product(range(3), repeat=3) if (a, b, c) != (0, 0, 0) and (a * c - b * b) % 3 == 0
    )
    assert brute == 8
    assert census.total == brute

    def orbit_of(S):
        key = tuple((np.asarray(S) % 3).ravel())
        return next(i for i, orb in enumerate(census.orbits) if any(tuple(T.ravel()) == key for T in orb))

    for a in (1, 2):
        sparse = np.diag([0, a])
        sym = (-a * np.ones((2, 2), dtype=int)) % 3
        assert orbit_of(sparse) != orbit_of(sym)


def test_symplectic_maps_valid():
    J = SymplecticMap(6, 1, symplectic_j(1))
    assert J.is_valid()
    for k in (1, 5):
        assert galois_similitude(6, 1, k).is_valid()
    S = galois_similitude(6, 2, 5)
    assert (S @ S.inverse()).matrix.tolist() == np.eye(4, dtype=int).tolist()
    assert PhasePoint.from_json(PhasePoint.of(6, 7, -1).to_json()) == PhasePoint.of(6, 1, 5)
