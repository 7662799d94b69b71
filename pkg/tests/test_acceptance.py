"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``.  The lines are written to the
terminal even when pytest captures output.
"""

import itertools
import time

import numpy as np
import pytest

from hexaperfect.algebra import (
    OperatorBasis,
    lemma_overlaps_float,
    overlap_eta_sq,
    random_unitary,
    sector_analysis,
    support_algebra_dim,
)
from hexaperfect.doubly_perfect import (
    act,
    artisanal,
    classification_scan,
    gf2n_lambda,
    is_doubly_perfect,
    kite_matrix_check,
    quadratic_criterion,
    quadratic_lambda,
    u_lambda,
)
from hexaperfect.hadamard import build_hadamard, verify_gamma_link, verify_h_factorization
from hexaperfect.matrix import ExactMatrix
from hexaperfect.pauli import random_clifford
from hexaperfect.phase_space import all_points, mat_det_mod
from hexaperfect.scalar import CycScalar, gauss_sum, gauss_sum_closed_form_3, root_of_unity
from hexaperfect.two_unitary import (
    box_product,
    exhaustive_ols_search,
    flip,
    is_two_unitary,
    linear_ols,
    ols_to_unitary,
)


@pytest.fixture
def report(capsys):
    def _report(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return _report


def symmetric_matrices(size, d):
    tri = [(i, j) for i in range(size) for j in range(i, size)]
    for vals in itertools.product(range(d), repeat=len(tri)):
        N = np.zeros((size, size), dtype=np.int64)
        for (i, j), v in zip(tri, vals):
            N[i, j] = N[j, i] = v
        yield N


def test_criterion_01_artisanal_two_unitary(report):
    details, ok = [], True
    for kind in ("sparse", "sym"):
        start = time.perf_counter()
        flags = is_two_unitary(u_lambda(artisanal(kind)))
        elapsed = time.perf_counter() - start
        ok &= flags.two_unitary and elapsed < 10
        details.append(f"{kind}: {flags.to_json()} in {elapsed:.4f}s")
    report(1, "artisanal unitaries are two-unitary (exact, < 10 s each)", ok, "; ".join(details))


def test_criterion_02_traces(report):
    i_sqrt3 = root_of_unity(3, 1) * 2 + 1  # i sqrt 3
    one = CycScalar.one()
    t_sparse = u_lambda(artisanal("sparse")).trace()
    t_sym = u_lambda(artisanal("sym")).trace()
    ok = t_sparse == (one + i_sqrt3) * -3 and t_sym == (one - i_sqrt3) * -3
    report(2, "traces -3(1 + i sqrt 3) and -3(1 - i sqrt 3)", ok, f"{complex(t_sparse):.4f}, {complex(t_sym):.4f}")


def test_criterion_03_classification_scan(report):
    ok = True
    details = []
    outputs = []
    for threads, budget in ((1, 300.0), (8, 60.0)):
        start = time.perf_counter()
        rep = classification_scan(threads=threads)
        elapsed = time.perf_counter() - start
        sizes = sorted(o.size for o in rep.orbits)
        contains = sorted(c for o in rep.orbits for c in o.contains)
        per_orbit = [len(o.contains) for o in rep.orbits]
        ok &= (
            rep.candidates == 19683
            and len(rep.survivors) == 48
            and sizes == [24, 24]
            and contains == ["sparse", "sym"]
            and per_orbit == [1, 1]
            and elapsed < budget
        )
        outputs.append(rep.to_json())
        details.append(f"threads={threads}: {len(rep.survivors)} survivors, orbits {sizes}, {elapsed:.1f}s < {budget:.0f}s")
    ok &= outputs[0] == outputs[1]
    report(3, "scan finds 48 functions in two orbits of 24", ok, "; ".join(details))


def test_criterion_04_hadamard(report):
    lam = artisanal("sparse")
    pair = build_hadamard(lam)
    fg, fh = pair.flags()
    entries = 0
    for M in (pair.G, pair.H):
        unscaled = ExactMatrix(M.coeffs, M.conductor, 1)
        entries = min(entries or 10**9, int(np.count_nonzero(unscaled.entrywise_abs_sq() == 1)))
    fac = verify_h_factorization(lam)
    gamma = verify_gamma_link(lam)
    ok = fg.two_unitary and fh.two_unitary and entries == 1296 and fac.ok and gamma
    detail = (
        f"G {fg.two_unitary}, H {fh.two_unitary}, unimodular entries {entries}/1296, "
        f"factorization {fac.ok}, gamma link {gamma}, opposite orientation {fac.opposite_orientation}"
    )
    report(4, "G/6 and H/6 two-unitary Hadamards; factorization and gamma link exact", ok, detail)


def test_criterion_05_symmetry_closure(report):
    lam = artisanal("sparse")
    counts = {}
    ok = True

    def check(name, img):
        nonlocal ok
        counts[name] = counts.get(name, 0) + 1
        ok &= is_doubly_perfect(img).doubly

    for S in itertools.product(range(6), repeat=4):
        S = np.array(S).reshape(2, 2)
        if mat_det_mod(S, 6) == 1:
            check("symplectic", act("symplectic", lam, S=S))
    check("pt", act("pt", lam))
    for b in all_points(6, 1):
        check("shift", act("shift", lam, b=b))
        check("character", act("character", lam, b=b))
    for k in (1, 5):
        check("galois", act("galois", lam, k=k))
    for e in range(12):
        check("phase", act("phase", lam, base=12, exponent=e))
    check("fourier", act("fourier", lam))
    ok &= len(counts) == 7 and counts["symplectic"] == 144
    report(5, "all seven symmetry actions keep the sparse solution doubly perfect", ok, str(counts))


def test_criterion_06_quadratic_and_gf2n(report):
    mismatches = 0
    cases = 0
    for d, size in ((3, 2), (2, 2), (2, 4)):
        for N in symmetric_matrices(size, d):
            cases += 1
            mismatches += quadratic_criterion(N, d) != is_doubly_perfect(quadratic_lambda(N, d)).doubly
    gf_ok = True
    orders = []
    for n in (2, 3):
        for alpha in range(1, 2**n - 1):
            U = u_lambda(gf2n_lambda(n, alpha))
            orders.append(int(round(U.shape[0] ** 0.5)))
            gf_ok &= is_two_unitary(U).two_unitary
    kite = [kite_matrix_check(n) for n in (2, 3, 4, 5, 6)]
    ok = mismatches == 0 and gf_ok and set(orders) == {4, 8} and kite == [True, True, False, True, True]
    report(
        6,
        "quadratic criterion exhaustive; GF(2^n) two-unitaries of order 4 and 8; kite pattern",
        ok,
        f"{cases} symmetric N, {mismatches} mismatches; gf2n {gf_ok}; kite n=2..6 {kite}",
    )


def test_criterion_07_algebraic_picture(report):
    L, R = OperatorBasis.local(6, "L"), OperatorBasis.local(6, "R")
    etas = {}
    for kind in ("sparse", "sym"):
        UL = L.conjugated(u_lambda(artisanal(kind)))
        etas[kind] = (str(overlap_eta_sq(UL, L)), str(overlap_eta_sq(UL, R)))
    eta_ok = all(v == ("1", "1") for v in etas.values())
    rng = np.random.default_rng(7)
    worst = 0.0
    for d, count in ((2, 20), (3, 10)):
        for _ in range(count):
            worst = max(worst, *lemma_overlaps_float(random_unitary(d * d, rng)))
    a, b = support_algebra_dim(u_lambda(artisanal("sparse")), (3, 2))
    sectors = sector_analysis("sparse")
    five = [sectors.controlled_w, sectors.expansion, sectors.closed_form, sectors.products, sectors.k_condition and sectors.j_condition]
    ok = eta_ok and worst < 1e-9 and (a.dim, b.dim) == (4, 3) and all(five) and sectors.ok
    detail = f"eta^2 {etas}; max overlap deviation {worst:.1e} over 30; support ({a.dim}, {b.dim}); W_m checks {five}"
    report(7, "overlaps, support dimensions and W_m sector checks", ok, detail)


def test_criterion_08_classical_layer(report):
    ols_ok = True
    for d in (3, 5, 7):
        K, L = linear_ols(d, 2)
        ols_ok &= K.orthogonal_to(L) and is_two_unitary(ols_to_unitary(K, L)).two_unitary
    none_of_two = exhaustive_ols_search(2) == []
    U3 = ols_to_unitary(*linear_ols(3, 2))
    B = box_product(U3, U3)
    box_ok = B.shape == (81, 81) and is_two_unitary(B).two_unitary
    ok = ols_ok and none_of_two and box_ok
    report(8, "linear OLS, no order-2 OLS, box product of order-3 two-unitaries", ok, f"{ols_ok}, {none_of_two}, {box_ok}")


def test_criterion_09_negative_controls(report):
    rng = np.random.default_rng(2024)
    failures = sum(not is_two_unitary(random_clifford(6, 2, 20, rng)).two_unitary for _ in range(50))
    ident = is_two_unitary(ExactMatrix.identity(36))
    sw = is_two_unitary(flip(6))
    # documented patterns: identity {unitary, not dual, not Gamma-dual}; flip {unitary, dual, not Gamma-dual}
    ident_ok = (ident.unitary, ident.dual, ident.gamma_dual) == (True, False, False)
    flip_ok = (sw.unitary, sw.dual, sw.gamma_dual) == (True, True, False)
    ok = failures == 50 and ident_ok and flip_ok
    detail = (
        f"{failures}/50 Cliffords fail; identity {ident.to_json()} (documented: dual False, gamma_dual False); "
        f"flip {sw.to_json()}"
    )
    report(9, "random d=6 Cliffords fail; identity and flip flag patterns", ok, detail)


def test_criterion_10_gauss_sums(report):
    triples = [(a, b, c) for a in (1, 2) for b in range(3) for c in range(3)]
    bad = [t for t in triples if gauss_sum(*t, 3) != gauss_sum_closed_form_3(*t)]
    report(10, "quadratic Gauss sums over Z_3 match the closed form", len(triples) == 18 and not bad, f"18 triples, {len(bad)} mismatches")
