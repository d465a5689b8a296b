"""Backend selection for the integer kernels.

The compiled module is used when it imports; QKDV_PURE_PYTHON=1 forces the
reference implementation.
"""
import os

from . import _kernels_py

if os.environ.get("QKDV_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
apply_word = _impl.apply_word
word_table = _impl.word_table
signed_moments = _impl.signed_moments
moments_by_size = _impl.moments_by_size
