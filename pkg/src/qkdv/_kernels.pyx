# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the integer hot loops in _kernels_py (same API)."""

BACKEND = "cython"

ctypedef unsigned long long u64


cdef inline int _apply(u64 mask, int* kinds, int* bits, int nops, u64* out) nogil:
    cdef int sign = 1
    cdef int i, bit
    cdef u64 b
    for i in range(nops - 1, -1, -1):
        bit = bits[i]
        b = (<u64>1) << bit
        if kinds[i]:
            if mask & b:
                return 0
        elif not (mask & b):
            return 0
        if bit < 63 and (__builtin_popcountll(mask >> (bit + 1)) & 1):
            sign = -sign
        mask ^= b
    out[0] = mask
    return sign


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def apply_word(mask, word):
    cdef int kinds[16]
    cdef int bits[16]
    cdef int n = len(word)
    cdef u64 res = 0
    cdef int s
    if n > 16 or mask >= (1 << 64):
        from . import _kernels_py
        return _kernels_py.apply_word(mask, word)
    for i, (k, b) in enumerate(word):
        if b >= 63:
            from . import _kernels_py
            return _kernels_py.apply_word(mask, word)
        kinds[i] = k
        bits[i] = b
    s = _apply(<u64>mask, kinds, bits, n, &res)
    if s == 0:
        return 0, 0
    return s, res


def word_table(masks, words):
    cdef Py_ssize_t nm = len(masks), nw = len(words)
    cdef int kinds[16]
    cdef int bits[16]
    cdef int nops, s
    cdef Py_ssize_t wi, si
    cdef u64 res
    cdef u64[::1] mv
    import array
    for m in masks:
        if m >= (1 << 63):
            from . import _kernels_py
            return _kernels_py.word_table(masks, words)
    marr = array.array("Q", masks) if nm else array.array("Q")
    out = []
    if nm == 0:
        return out
    mv = marr
    for wi in range(nw):
        word = words[wi]
        nops = len(word)
        if nops > 16:
            from . import _kernels_py
            return _kernels_py.word_table(masks, words)
        for i, (k, b) in enumerate(word):
            if b >= 63:
                from . import _kernels_py
                return _kernels_py.word_table(masks, words)
            kinds[i] = k
            bits[i] = b
        for si in range(nm):
            s = _apply(mv[si], kinds, bits, nops, &res)
            if s != 0:
                out.append((wi, si, s, res))
    return out


cdef void _moments(int* parts, int n, int emax, long long* acc) nogil:
    cdef int i = 0, j, col, e
    cdef long long x, p
    for e in range(emax + 1):
        acc[e] = 0
    while i < n and parts[i] > i:
        x = 2 * (parts[i] - i) - 1
        p = 1
        for e in range(emax + 1):
            acc[e] += p
            p *= x
        i += 1
    for j in range(i):
        col = 0
        while col < n and parts[col] > j:
            col += 1
        x = -(2 * (col - j) - 1)
        p = 1
        for e in range(emax + 1):
            acc[e] -= p
            p *= x


def signed_moments(parts, emax):
    cdef int buf[256]
    cdef long long acc[32]
    cdef int n = len(parts)
    if n > 256 or emax > 31:
        from . import _kernels_py
        return _kernels_py.signed_moments(parts, emax)
    for i in range(n):
        buf[i] = parts[i]
    _moments(buf, n, emax, acc)
    return [acc[e] for e in range(emax + 1)]


def moments_by_size(int nmax, int emax):
    """Partitions of each n <= nmax enumerated in C; moments must fit in int64
    (callers keep (2 nmax)^emax * nmax below 2^63)."""
    cdef int parts[256]
    cdef int maxp[256]
    cdef long long acc[32]
    cdef int n, depth, rem, p, e
    if nmax > 250 or emax > 31:
        from . import _kernels_py
        return _kernels_py.moments_by_size(nmax, emax)
    out = []
    for n in range(nmax + 1):
        rows = []
        if n == 0:
            _moments(parts, 0, emax, acc)
            rows.append([acc[e] for e in range(emax + 1)])
            out.append(rows)
            continue
        # iterative generation in reverse-lex order: start with (n)
        depth = 1
        parts[0] = n
        while True:
            _moments(parts, depth, emax, acc)
            rows.append([acc[e] for e in range(emax + 1)])
            # next partition in reverse lexicographic order
            rem = 0
            while depth > 0 and parts[depth - 1] == 1:
                rem += 1
                depth -= 1
            if depth == 0:
                break
            parts[depth - 1] -= 1
            rem += 1
            p = parts[depth - 1]
            while rem > p:
                parts[depth] = p
                depth += 1
                rem -= p
            parts[depth] = rem
            depth += 1
        out.append(rows)
    return out
