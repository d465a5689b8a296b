import random
from fractions import Fraction as F
from math import factorial

from qkdv.partitions import Partition, partitions_upto
from qkdv.shifted import (QExpr, basis_monomials, beta, beta_closed, dubrovin_eigenvalue, evalQ, evalQ_rows,
                          evalQExpr, monomial_basis)

P = Partition


def test_beta_values():
    assert beta(0) == 1
    assert beta(2) == F(-1, 24)
    assert beta(4) == F(7, 5760)


def test_beta_against_bernoulli():
    assert all(beta(k) == beta_closed(k) for k in range(21))


def test_q_examples():
    for lam in partitions_upto(8):
        assert evalQ(2, lam) == lam.size - F(1, 24)
        assert evalQ(1, lam) == 0
    assert evalQ(3, P((2,))) == 1
    assert evalQ(3, P((1, 1))) == -1
    assert evalQ(3, P((1,))) == 0
    assert all(evalQ(k, P(())) == beta(k) for k in range(12))


def test_two_q_formulas_agree():
    for lam in partitions_upto(8):
        for k in range(1, 13):
            assert evalQ(k, lam) == evalQ_rows(k, lam)


def test_conjugation_parity():
    for lam in partitions_upto(8):
        lc = lam.conjugate
        for k in range(1, 6):
            assert evalQ(2 * k, lc) == evalQ(2 * k, lam)
            assert evalQ(2 * k + 1, lc) == -evalQ(2 * k + 1, lam)


def test_qexpr_evaluation():
    assert evalQExpr(QExpr.Q(2), P((3, 1)), 7) == F(95, 24)
    f = QExpr.c(2) * F(1, 2) + QExpr.Q(2)
    assert f(P(()), 1) == F(11, 24)
    assert QExpr.const(1)(P((5, 2)), F(3, 7)) == 1


def _names(weight):
    out = set()
    for e, idx in basis_monomials(weight):
        out.add((e, idx))
    return out


def test_monomial_basis():
    assert _names(2) == {(2, ()), (0, (2,))}
    assert _names(3) == {(3, ()), (1, (2,)), (0, (3,))}
    assert _names(5) == {(5, ()), (3, (2,)), (2, (3,)), (1, (4,)), (1, (2, 2)), (0, (5,)), (0, (3, 2))}
    assert len(monomial_basis(5)) == 7


def test_dubrovin_eigenvalue_weight():
    for k in range(8):
        f = dubrovin_eigenvalue(k)
        assert f.is_homogeneous and f.weight == k + 2
        lam = P((3, 2))
        c = F(2, 3)
        assert f(lam, c) == sum(c ** (k + 2 - j) / factorial(k + 2 - j) * evalQ(j, lam) for j in range(k + 3))


def test_qexpr_json_roundtrip():
    rng = random.Random(2)
    for _ in range(20):
        f = QExpr()
        for m in basis_monomials(rng.randint(0, 6)):
            f = f + QExpr({m: F(rng.randint(-5, 5), rng.randint(1, 9))})
        assert QExpr.from_json(f.to_json()) == f
