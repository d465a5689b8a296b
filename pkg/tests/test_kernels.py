import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from qkdv import _kernels_py as ref
from qkdv import kernels

compiled = pytest.importorskip("qkdv._kernels")

ops = st.lists(st.tuples(st.integers(0, 1), st.integers(0, 40)), min_size=1, max_size=6)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 41 - 1), ops)
def test_apply_word_agrees(mask, word):
    assert compiled.apply_word(mask, word) == ref.apply_word(mask, word)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 2 ** 20 - 1), min_size=1, max_size=12),
       st.lists(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 19)), min_size=1, max_size=4),
                min_size=1, max_size=6))
def test_word_table_agrees(masks, words):
    words = [tuple(w) for w in words]
    assert sorted(compiled.word_table(masks, words)) == sorted(ref.word_table(masks, words))


def test_wide_masks_fall_back():
    mask = (1 << 70) | 5
    word = ((0, 70), (1, 66))
    assert compiled.apply_word(mask, word) == ref.apply_word(mask, word)


def test_moments_agree():
    for n in range(10):
        assert [sorted(map(tuple, rows)) for rows in compiled.moments_by_size(n, 6)] == \
            [sorted(map(tuple, rows)) for rows in ref.moments_by_size(n, 6)]
    assert compiled.signed_moments((4, 2, 1), 5) == ref.signed_moments((4, 2, 1), 5)


def test_moments_are_content_sums():
    from qkdv.partitions import Partition
    from qkdv.shifted import signed_power_sum2
    for parts in [(), (1,), (3, 1), (4, 4, 2, 1)]:
        m = ref.signed_moments(parts, 5)
        assert m == [signed_power_sum2(Partition(parts), e) for e in range(6)]


def test_pure_python_switch():
    env = dict(os.environ, QKDV_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from qkdv import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("cython", "python")


def test_backends_give_same_matrices():
    from qkdv.fermion import ghat1_matrix
    code = "from qkdv.fermion import ghat1_matrix; print(ghat1_matrix(3, 5).rows)"
    env = dict(os.environ, QKDV_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == str(ghat1_matrix(3, 5).rows)
