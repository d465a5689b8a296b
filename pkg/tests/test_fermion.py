import random
from fractions import Fraction as F
from itertools import product
from math import factorial

import pytest

from qkdv.boson import BosonVector, operator_matrix, schur
from qkdv.fermion import (WedgeVector, ab_polynomials, apply_alpha, apply_xi2, apply_xi4, apply_xi4_direct,
                          gamma_const, ghat0_matrix, ghat1_matrix, phi, phi_inverse, r_hat, r_poly)
from qkdv.partitions import Partition, border_strips, enumerate_partitions, partitions_upto
from qkdv.shifted import beta, evalQ

P = Partition
v = WedgeVector.basis
E = P(())


def test_xi2_examples():
    assert apply_xi2(1, 1, v(P((1,)))) == v(P((1,)))
    assert apply_xi2(-1, -1, v(P((1,)))) == v(P((1,))).scale(-1)
    for a2 in range(-9, 10, 2):
        assert apply_xi2(a2, a2, WedgeVector.vacuum()) == WedgeVector(0)


def test_xi2_diagonal_is_content_indicator():
    for lam in partitions_upto(6):
        C2 = lam.frobenius.C2
        for a2 in range(-13, 14, 2):
            sgn = (1 if a2 > 0 else -1) if a2 in C2 else 0
            assert apply_xi2(a2, a2, v(lam)) == v(lam).scale(sgn)


def test_xi4_wick_matches_direct():
    rng = random.Random(5)
    modes = list(range(-7, 8, 2))
    for lam in partitions_upto(4):
        for _ in range(25):
            q = [rng.choice(modes) for _ in range(4)]
            assert apply_xi4(*q, v(lam)) == apply_xi4_direct(*q, v(lam))


def test_xi4_diagonal_matrix_elements():
    modes = list(range(-7, 8, 2))
    for lam in partitions_upto(4):
        C2 = lam.frobenius.C2
        sgn = {c: (1 if c > 0 else -1) for c in C2}
        for a, b in product(modes, repeat=2):
            if a == b:
                continue
            got = apply_xi4(a, b, b, a, v(lam)).inner(v(lam))
            assert got == -sgn.get(a, 0) * sgn.get(b, 0)
        for a, b, c, d in product(modes[2:6], repeat=4):
            if (a == b and c == d) or (a == d and b == c):
                continue
            assert apply_xi4(a, b, c, d, v(lam)).inner(v(lam)) == 0


def test_xi4_adjacent_swap():
    rng = random.Random(9)
    modes = list(range(-5, 6, 2))
    for lam in partitions_upto(3):
        for _ in range(10):
            a, b, c, d = (rng.choice(modes) for _ in range(4))
            assert apply_xi4(a, b, c, d, v(lam)) == apply_xi4(c, b, a, d, v(lam)).scale(-1)


def test_alpha_examples():
    assert apply_alpha(-2, v(P((2,)))) == WedgeVector.vacuum()
    assert apply_alpha(-2, v(P((1, 1)))) == WedgeVector.vacuum().scale(-1)
    assert apply_alpha(-1, v(P((1,)))) == WedgeVector.vacuum()


def test_alpha_double_strip_sum():
    for lam, mu in product(enumerate_partitions(4), repeat=2):
        for n in range(1, 5):
            got = apply_alpha(-n, v(mu)).inner(apply_alpha(-n, v(lam)))
            want = 0
            for g in border_strips(lam, n):
                for gp in border_strips(mu, n):
                    if g.result == gp.result:
                        want += (-1) ** (g.height + gp.height)
            assert got == want


def test_boson_fermion_dictionary():
    assert phi(v(P((2, 1)))) == schur(P((2, 1)))
    for n in range(1, 5):
        for deg in range(7):
            for lam in enumerate_partitions(deg):
                w = v(lam)
                assert phi(apply_alpha(n, w)) == BosonVector.p(n) * schur(lam)
                if deg >= n:
                    assert phi(apply_alpha(-n, w)) == schur(lam).derivative(n).scale(n)
                assert phi_inverse(schur(lam)) == w


def test_ab_polynomials():
    assert ab_polynomials(0).A.is_zero()
    x = ab_polynomials(0).B
    assert x(1, 1) == 0 and x(F(7, 2), F(7, 2)) == 0
    assert gamma_const(2) == 2 * beta(2) * beta(3) + 10 * beta(5) == 0
    for k in range(0, 9):
        d = ab_polynomials(k)
        if k >= 1:
            assert d.A.degree() == k + 1
        assert d.B.degree() == k + 2
        assert d.gamma == gamma_const(k)
        for a, b, c in [(1, 2, 3), (F(1, 2), F(-3, 2), F(5, 2)), (4, -1, 2)]:
            assert d.A(a, a, c, c) == 0
            want = F((a - b) * (a ** k - b ** k)) / factorial(k) if k else 0
            assert d.A(a, b, b, a) == want


def test_r_poly_matches_finite_sum():
    for k in range(6):
        R = r_poly(k)
        for a2, b2 in product(range(-7, 8, 2), repeat=2):
            a, b = F(a2, 2), F(b2, 2)
            assert R(a, b) == r_hat(k, a, b)


def test_ghat0_examples():
    for n in range(5):
        M = ghat0_matrix(0, n)
        assert M.is_diagonal() and all(x == n - F(1, 24) for x in M.diagonal())
    assert ghat0_matrix(1, 2).diagonal() == [1, -1]
    assert ghat0_matrix(0, 0, 1).diagonal() == [F(1, 2) - F(1, 24)]


def test_ghat0_is_q():
    for k in range(7):
        for n in range(7):
            from qkdv.boson import schur_basis
            assert ghat0_matrix(k, n).diagonal() == [evalQ(k + 2, lam) for lam in schur_basis(n).partitions]


def test_ghat1_examples():
    assert ghat1_matrix(1, 1)[0, 0] == F(241, 120)
    M = ghat1_matrix(1, 2)
    # basis order (2), (1,1)
    assert M[1, 0] == -6
    for k in range(11):
        assert ghat1_matrix(k, 0)[0, 0] == gamma_const(k)


def _g11(v):
    out = v.scale(F(1, 120))
    for m in range(1, v.degree + 1):
        out = out + (BosonVector.p(m) * v.derivative(m)).scale(2 * m ** 3)
    return out


def test_ghat1_level_one_is_cut_and_join():
    for n in range(9):
        assert ghat1_matrix(1, n) == operator_matrix(n, _g11)
