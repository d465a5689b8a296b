"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict that the session summary prints."""
import os
import time
from fractions import Fraction as F

import pytest

from conftest import ACCEPTANCE
from qkdv.boson import schur_basis
from qkdv.checks import verify_commute, verify_dubrovin, verify_oracle
from qkdv.hierarchy import Hierarchy
from qkdv.lab import (compare_reference, fit_shifted_symmetric, eigenvalue_tables, fit_eigenvalues, fit_fdnu, q_bracket,
                      quasimodular_check, shape_check)
from qkdv.partitions import Partition
from qkdv.shifted import QExpr, evalQ
from qkdv.spectral import (InsufficientFamily, hodge_closed_form_s1, hodge_integral, perturb, theorem1_value,
                           theorem2_vector, verify_theorem1, verify_theorem2)

P = Partition
JOBS = max(1, min(4, os.cpu_count() or 1))


def record(n, ok, text):
    ACCEPTANCE[n] = (bool(ok), text)
    assert ok, text


def test_criterion_01_golden_tables():
    t0 = time.perf_counter()
    H = Hierarchy(cache_dir=None)
    g0 = H.differential_polynomial(0).terms
    g1 = H.differential_polynomial(1).terms
    dt = time.perf_counter() - t0
    want0 = {(0, 0, (0, 0)): F(1, 2), (1, 0, (2,)): F(1, 24), (0, 1, ()): F(-1, 24)}
    want1 = {(0, 0, (0, 0, 0)): F(1, 6), (1, 0, (2, 0)): F(1, 24), (2, 0, (4,)): F(1, 1152),
             (0, 1, (2,)): F(1, 24), (0, 1, (0,)): F(-1, 24), (1, 1, ()): F(1, 2880)}
    ok = g0 == want0 and g1 == want1 and dt < 1
    record(1, ok, f"g_0 and g_1 reproduced coefficient by coefficient in {dt:.3f} s")


def test_criterion_02_dubrovin(H):
    rep = verify_dubrovin(8, 8, H)
    record(2, rep.ok, f"order-zero Hamiltonians diagonal with entries Q_(k+2): {rep.checked} blocks, "
                      f"{len(rep.mismatches)} mismatches")


def test_criterion_03_first_order_eigenvalues(H):
    reps = [verify_theorem1(n, 6, hierarchy=H) for n in range(9)]
    bad = [m for r in reps for m in r.mismatches]
    record(3, not bad, f"E_k^[1] closed form for |lambda| <= 8, k <= 6: {sum(r.checked for r in reps)} values, "
                       f"{len(bad)} mismatches")


def test_criterion_04_first_order_eigenvectors(H):
    reps = [verify_theorem2(n, hierarchy=H) for n in range(9)]
    bad = [m for r in reps for m in r.mismatches]
    d10 = perturb(10, 1, hierarchy=H)
    lam, mu = P((7, 2, 1)), P((4, 2, 2, 2))
    got = d10.entry(lam).r[1][schur_basis(10).index[mu]]
    worked = got == F(10, 63) == theorem2_vector(lam)[mu]
    record(4, not bad and worked,
           f"border-strip formula for r^[1] at |lambda| <= 8: {sum(r.checked for r in reps)} coefficients, "
           f"{len(bad)} mismatches; <s_(4,2,2,2), r^[1]_(7,2,1)> = {got}")


def test_criterion_05_oracle(H):
    rep = verify_oracle(6, 6, H)
    record(5, rep.ok, f"recursion vs fermionic orders 0 and 1, k, n <= 6: {rep.checked} matrices, "
                      f"{len(rep.mismatches)} mismatches")


def test_criterion_06_commutativity(H):
    rep = verify_commute(4, 6, hierarchy=H)
    record(6, rep.ok, f"[G_k, G_l] = 0 through every computed order, k, l <= 4, n <= 6: {rep.checked} "
                      f"commutators, {len(rep.mismatches)} nonzero")


@pytest.fixture(scope="module")
def fits_k10(cache_dir):
    T = eigenvalue_tables(10, 3, 9, cache=cache_dir, jobs=JOBS)
    return fit_eigenvalues(T, 10, 3)


def test_criterion_07_reference_table(fits_k10):
    records, shapes_ok = [], True
    for m in range(4):
        fm = {k: fits_k10[(k, m)] for k in range(11)}
        shapes_ok &= shape_check(fm, m).ok
        records += fit_fdnu(fm, m)
    rows = compare_reference(records, 3)
    failed = [r for r in rows if r.status != "PASS"]
    degrees_ok = all(r.status == "EXACT" and r.degree <= 2 * r.D for r in records)
    detail = "; ".join(f"nu={r.nu} D={r.D}: table {[str(x) for x in r.expected]} vs fitted "
                       f"{[str(x) for x in (r.record.poly if r.record else [])]}" for r in failed)
    record(7, shapes_ok and degrees_ok and not failed,
           f"{len(rows) - len(failed)}/{len(rows)} reference rows with D+|nu| <= 3 reproduced, all fits exact "
           f"with deg <= 2D: {degrees_ok}" + (f"; differing: {detail}" if failed else ""))


def test_criterion_08_hodge(H):
    vals = [hodge_integral(g, 1, H) for g in range(2, 7)]
    ok = all(v.value == hodge_closed_form_s1(v.g) and v.label == "theorem" for v in vals)
    ok &= vals[0].value == F(1, 2880)
    record(8, ok, f"lambda_1 lambda_g integrals for 2 <= g <= 6 match the closed form; g=2 gives {vals[0].value}")


def test_criterion_09_quasimodularity(cache_dir):
    T = eigenvalue_tables(6, 6, 9, cache=cache_dir, jobs=JOBS)
    results = []
    for k in range(7):
        for m in range(7 - k):
            f = fit_shifted_symmetric(T[(k, m)], k + 2 + m)
            ok = isinstance(f, QExpr) and quasimodular_check(q_bracket(f, 40), k + 2 + m, 40).ok
            results.append(((k, m), ok))
    bad = [km for km, ok in results if not ok]
    record(9, not bad, f"<E_k^[m]>_q quasimodular of weight k+2+m at N=40 for k+m <= 6: "
                       f"{len(results) - len(bad)}/{len(results)} series")


def test_criterion_10_degenerate_pair(H):
    a, b = P((4, 2, 1, 1)), P((3, 3, 2))
    sep = a.conjugate == a and b.conjugate == b and evalQ(3, a) == evalQ(3, b) == 0 and evalQ(4, a) != evalQ(4, b)
    try:
        perturb(8, 1, kset=(1,), hierarchy=H)
        raised = False
    except InsufficientFamily:
        raised = True
    d = perturb(8, 1, kset=(1, 2, 3), ks=range(7), hierarchy=H)
    parts = schur_basis(8).partitions
    ok = sep and raised
    for lam in (a, b):
        e = d.entry(lam)
        ok &= all(e.E[(k, 1)] == theorem1_value(k, lam) for k in range(7))
        want = theorem2_vector(lam)
        ok &= all(v == want.get(mu, 0) for mu, v in zip(parts, e.r[1]))
    record(10, ok, "self-conjugate pair (4,2,1,1), (3,3,2) at n=8: level 1 alone refuses, "
                   "levels {1,2,3} separate it and both entries satisfy criteria 3 and 4")
