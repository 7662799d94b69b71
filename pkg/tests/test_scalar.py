import cmath
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexaperfect.scalar import (
    CycScalar,
    InvalidConductorError,
    gamma3,
    gauss_sum,
    gauss_sum_closed_form_3,
    root_of_unity,
    sqrt_int,
    tau,
    to_complex,
)


def z(N, k=1):
    return cmath.exp(2j * cmath.pi * k / N)


def test_roots_of_unity_relations():
    assert (root_of_unity(3, 0) + root_of_unity(3, 1) + root_of_unity(3, 2)).is_zero()
    assert root_of_unity(12, 1) * root_of_unity(12, 1) == root_of_unity(6, 1)
    assert root_of_unity(2, 1) == CycScalar.from_rational(-1)
    assert root_of_unity(5, 7) == root_of_unity(5, 2)


def test_invalid_conductor():
    with pytest.raises(InvalidConductorError):
        root_of_unity(0, 1)


def test_tau_values():
    assert tau(2) == root_of_unity(4, 1)
    assert tau(3) == root_of_unity(3, 2)
    assert tau(6) == root_of_unity(12, 1)
    for d in range(1, 9):
        # (-1)^d e^{i pi/d}
        assert abs(complex(tau(d)) - (-1) ** d * cmath.exp(1j * cmath.pi / d)) < 1e-12
        assert tau(d) * tau(d) == root_of_unity(d, 1)


def test_gauss_sum_examples():
    assert gauss_sum(1, 0, 0, 3) == CycScalar.from_terms(3, {0: 1, 1: 2})
    assert gauss_sum(0, 1, 0, 3).is_zero()
    # brute force: omega + omega + omega^2 = omega - 1
    assert gauss_sum(2, 1, 1, 3) == root_of_unity(3, 1) - 1
    assert gauss_sum(2, 1, 1, 3) == -gamma3() * root_of_unity(3, 2)


def test_gamma_is_i_sqrt3():
    assert abs(complex(gamma3()) - 1j * 3**0.5) < 1e-12
    assert gamma3() * gamma3() == CycScalar.from_rational(-3)


@pytest.mark.parametrize("a,b,c", [(a, b, c) for a in (1, 2) for b in range(3) for c in range(3)])
def test_gauss_sum_closed_form(a, b, c):
    assert gauss_sum(a, b, c, 3) == gauss_sum_closed_form_3(a, b, c)
    brute = sum(z(3, a * x * x + b * x + c) for x in range(3))
    assert abs(complex(gauss_sum(a, b, c, 3)) - brute) < 1e-12


def test_to_complex():
    assert to_complex(root_of_unity(4, 1)).close_to(1j)
    assert to_complex(gamma3()).close_to(1j * 3**0.5)
    assert to_complex(CycScalar.zero()).is_zero()


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5, 6, 8, 12, 18, 36])
def test_sqrt_int(r):
    s = sqrt_int(r)
    assert s * s == CycScalar.from_rational(r)
    assert abs(complex(s) - r**0.5) < 1e-12


def test_conjugate_and_inverse():
    x = CycScalar.from_terms(12, {1: 2, 5: -1, 0: 3})
    assert x * x.inverse() == CycScalar.one()
    assert abs(complex(x.conjugate()) - complex(x).conjugate()) < 1e-12
    for e in range(12):
        r = root_of_unity(12, e)
        assert r.conjugate() * r == CycScalar.one()


def test_json_round_trip():
    x = CycScalar.from_terms(24, {3: 1, 7: -2, 11: 5}) / 7
    assert CycScalar.from_json(x.to_json()) == x


coeffs = st.dictionaries(st.integers(0, 23), st.integers(-5, 5), max_size=6)
conductors = st.sampled_from([12, 24])


@settings(max_examples=200, deadline=None)
@given(conductors, coeffs, conductors, coeffs, coeffs)
def test_field_axioms(N1, t1, N2, t2, t3):
    x = CycScalar.from_terms(N1, {k % N1: v for k, v in t1.items()})
    y = CycScalar.from_terms(N2, {k % N2: v for k, v in t2.items()})
    w = CycScalar.from_terms(12, {k % 12: v for k, v in t3.items()})
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * w == x * (y * w)
    assert x * (y + w) == x * y + x * w
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-9
    # exact zero test agrees with the float embedding
    diff = x * y - y * x + w - w
    assert diff.is_zero() and abs(complex(diff)) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 4, 6, 12]), st.integers(1, 4), coeffs)
def test_lift_preserves_value(N, k, t):
    x = CycScalar.from_terms(N, {e % N: v for e, v in t.items()})
    assert abs(complex(x.lift(N * k)) - complex(x)) < 1e-9
    assert x.lift(N * k) == x


def test_zero_test_matches_float_on_small_sums():
    # every signed subset sum of 12th roots: exact zero iff numerically zero
    for signs in itertools.product((-1, 0, 1), repeat=6):
        x = CycScalar.from_terms(12, {2 * i: s for i, s in enumerate(signs)})
        val = sum(s * z(12, 2 * i) for i, s in enumerate(signs))
        assert x.is_zero() == (abs(val) < 1e-9)


def test_galois_action():
    x = root_of_unity(12, 1) + 2
    assert x.galois(5) == root_of_unity(12, 5) + 2
    assert np.isclose(complex(gamma3().galois(2)), -1j * 3**0.5)
