"""Reference implementations of the integer hot loops.

A Maya state is an int bitmask over a window of half-integer positions; every
position below the window is occupied.  A fermionic word is a tuple of
(kind, bit) pairs applied right to left, kind 1 = psi (insert), 0 = psi* (remove).
"""
from __future__ import annotations

BACKEND = "python"


def apply_word(mask: int, word) -> tuple[int, int]:
    sign = 1
    for kind, bit in reversed(word):
        b = 1 << bit
        occupied = mask & b
        if kind:
            if occupied:
                return 0, 0
        elif not occupied:
            return 0, 0
        if (mask >> (bit + 1)).bit_count() & 1:
            sign = -sign
        mask ^= b
    return sign, mask


def word_table(masks, words) -> list[tuple[int, int, int, int]]:
    """All nonzero (word index, mask index, sign, new mask)."""
    out = []
    for wi, word in enumerate(words):
        for si, m in enumerate(masks):
            s, nm = apply_word(m, word)
            if s:
                out.append((wi, si, s, nm))
    return out


def signed_moments(parts, emax: int) -> list[int]:
    """[sum_{c in C} sgn(c) (2c)^e for e = 0..emax] for one partition."""
    out = [0] * (emax + 1)
    i = 0
    n = len(parts)
    while i < n and parts[i] > i:
        x = 2 * (parts[i] - i) - 1
        p = 1
        for e in range(emax + 1):
            out[e] += p
            p *= x
        i += 1
    d = i
    # legs: conjugate parts minus index
    for j in range(d):
        col = 0
        while col < n and parts[col] > j:
            col += 1
        y = -(2 * (col - j) - 1)
        p = 1
        for e in range(emax + 1):
            out[e] -= p
            p *= y
    return out


def moments_by_size(nmax: int, emax: int) -> list[list[list[int]]]:
    """For each n <= nmax, the signed moment vectors of all partitions of n."""
    out = []
    for n in range(nmax + 1):
        rows = []
        stack = [(n, n, ())]
        while stack:
            rem, maxp, pre = stack.pop()
            if rem == 0:
                rows.append(signed_moments(pre, emax))
                continue
            for p in range(1, min(rem, maxp) + 1):
                stack.append((rem - p, p, pre + (p,)))
        out.append(rows)
    return out
