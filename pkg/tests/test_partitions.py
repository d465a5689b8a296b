from collections import Counter
from fractions import Fraction as F
from itertools import product

import pytest

from qkdv.partitions import (Partition, border_strips, enumerate_partitions, hamming_distance,
                             modified_frobenius, neighborhood, partitions_upto, strip_pairs, witness)

P = Partition


def test_counts():
    assert enumerate_partitions(0) == (P(()),)
    assert len(enumerate_partitions(4)) == 5
    assert len(enumerate_partitions(8)) == 22


def test_modified_frobenius_examples():
    # arms 6, 0 and legs 2, 0 of the two diagonal cells
    assert modified_frobenius(P((7, 2, 1))).C == [F(13, 2), F(1, 2), F(-1, 2), F(-5, 2)]
    assert modified_frobenius(P((1,))).C == [F(1, 2), F(-1, 2)]
    assert modified_frobenius(P(())).C == []


def test_hamming_examples():
    assert hamming_distance(P((7, 2, 1)), P((4, 2, 2, 2))) == 2
    assert hamming_distance(P((3, 1)), P((3, 1))) == 0
    assert hamming_distance(P((2,)), P((1, 1))) == 2


def test_metric_axioms_up_to_8():
    parts = partitions_upto(6)
    for a, b in product(parts, repeat=2):
        d = hamming_distance(a, b)
        assert d == hamming_distance(b, a)
        assert (d == 0) == (a == b)
        if a.size == b.size:
            assert d != 1
    sample = partitions_upto(5)
    for a, b, c in product(sample, repeat=3):
        assert hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c)
    for n in (7, 8):
        ps = enumerate_partitions(n)
        assert all(hamming_distance(a, b) != 1 for a, b in product(ps, repeat=2))


def test_frobenius_sums():
    for lam in partitions_upto(9):
        C = lam.frobenius.C2
        assert sum((1 if x > 0 else -1) * x for x in C) == 2 * lam.size
        assert sum(1 for x in C if x > 0) == sum(1 for x in C if x < 0)


def test_neighborhood_examples():
    nb = dict(neighborhood(P((7, 2, 1))))
    w = nb[P((4, 2, 2, 2))]
    assert (w.a, w.b, w.a_, w.b_) == (1, 4, 1, 3)
    nb2 = neighborhood(P((2,)))
    assert [m for m, _ in nb2] == [P((1, 1))]
    w = nb2[0][1]
    assert (w.a, w.b, w.a_, w.b_) == (1, 2, 1, 2)
    assert neighborhood(P(())) == []


def test_neighborhood_is_distance_two():
    for n in range(1, 8):
        ps = enumerate_partitions(n)
        for lam in ps:
            got = {m for m, _ in neighborhood(lam)}
            want = {m for m in ps if hamming_distance(lam, m) == 2}
            assert got == want


def test_strip_pairs_examples():
    sp = strip_pairs(P((7, 2, 1)), P((4, 2, 2, 2)))
    assert (sp.g1.size, sp.g2.size) == (3, 7)
    assert (sp.g1.height, sp.g1p.height, sp.g2.height, sp.g2p.height) == (0, 1, 1, 3)
    assert sp.w == 1
    sp = strip_pairs(P((2,)), P((1, 1)))
    assert (sp.g1.size, sp.g2.size, sp.g1.height, sp.g1p.height, sp.w) == (1, 2, 0, 0, 1)


def test_strip_pairs_swap_symmetry():
    for n in range(2, 8):
        for lam in enumerate_partitions(n):
            for mu, _ in neighborhood(lam):
                a, b = strip_pairs(lam, mu), strip_pairs(mu, lam)
                assert a.w == -b.w
                assert {a.g1.size, a.g2.size} == {b.g1.size, b.g2.size}
                assert sorted([a.g1.height + a.g1p.height, a.g2.height + a.g2p.height]) == \
                    sorted([b.g1.height + b.g1p.height, b.g2.height + b.g2p.height])


def test_strip_structure():
    # gamma_1 in gamma_2 for both sides, equal sizes across primes
    for n in range(2, 9):
        for lam in enumerate_partitions(n):
            for mu, _ in neighborhood(lam):
                sp = strip_pairs(lam, mu)
                assert sp.g1.size == sp.g1p.size and sp.g2.size == sp.g2p.size
                assert sp.g1.cells <= sp.g2.cells
                assert sp.g1p.cells <= sp.g2p.cells


def test_height_formula_matches_maya():
    for lam in partitions_upto(8):
        for s in range(1, lam.size + 1):
            for st in border_strips(lam, s):
                assert st.height == st.maya_height


def test_small_strips():
    (st,) = border_strips(P((2,)), 2)
    assert st.height == 0
    (st,) = border_strips(P((1, 1)), 2)
    assert st.height == 1


def test_strip_hook_bijection():
    for lam in partitions_upto(10):
        strips = Counter((st.size, st.height) for s in range(1, lam.size + 1) for st in border_strips(lam, s))
        hooks = Counter()
        conj = lam.conjugate
        for i, j in lam.cells():
            arm, leg = lam[i] - j, conj[j] - i
            hooks[(arm + leg + 1, leg)] += 1
        assert strips == hooks, lam


def test_strips_of_size_three_for_721():
    lam = P((7, 2, 1))
    conj = lam.conjugate
    n3 = sum(1 for i, j in lam.cells() if lam[i] - j + conj[j] - i + 1 == 3)
    assert len(border_strips(lam, 3)) == n3


def test_witness_rejects_far_pairs():
    with pytest.raises(ValueError):
        witness(P((6,)), P((2, 2, 2)))
