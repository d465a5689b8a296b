"""Partitions with Frobenius/Maya data, border strips and the Hamming metric.

Half-integers are stored doubled (2x is an odd int) everywhere in this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterator, Sequence


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        p = tuple(int(x) for x in self.parts)
        if any(x <= 0 for x in p) or any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise ValueError(f"not a partition: {self.parts}")
        object.__setattr__(self, "parts", p)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        text = text.strip()
        if text in ("", "0", "()", "[]"):
            return cls(())
        return cls(tuple(int(x) for x in text.replace(",", "+").split("+")))

    def __str__(self) -> str:
        return "+".join(map(str, self.parts)) if self.parts else "0"

    def __repr__(self) -> str:
        return f"Partition({self.parts})"

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i: int) -> int:
        """1-based part access, zero beyond the length."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def __lt__(self, other: "Partition") -> bool:
        return order_key(self) < order_key(other)

    def to_json(self) -> list[int]:
        return list(self.parts)

    @classmethod
    def from_json(cls, obj) -> "Partition":
        return cls(tuple(obj))

    @cached_property
    def size(self) -> int:
        return sum(self.parts)

    @cached_property
    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for x in self.parts if x > j) for j in range(self.parts[0])))

    def cells(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.parts, 1) for j in range(1, row + 1)]

    def hook(self, i: int, j: int) -> tuple[int, int]:
        """(hook length, leg length) of cell (i, j), 1-based."""
        arm = self[i] - j
        leg = self.conjugate[j] - i
        return arm + leg + 1, leg

    @cached_property
    def frobenius(self) -> "FrobeniusData":
        conj = self.conjugate
        d = sum(1 for i, x in enumerate(self.parts, 1) if x >= i)
        a = tuple(self[i] - i for i in range(1, d + 1))
        b = tuple(conj[i] - i for i in range(1, d + 1))
        return FrobeniusData(d, a, b)

    @cached_property
    def maya(self) -> "MayaSequence":
        f = self.frobenius
        return MayaSequence(tuple(2 * x + 1 for x in f.a), tuple(-2 * y - 1 for y in f.b))

    def maya_prefix(self, length: int) -> list[int]:
        """Doubled s_j = 2(lambda_j - j) + 1 for j = 1..length."""
        return [2 * (self[j] - j) + 1 for j in range(1, length + 1)]


def order_key(lam: Partition) -> tuple:
    # reverse lexicographic within a size; smaller sizes first
    return (lam.size, tuple(-x for x in lam.parts))


@dataclass(frozen=True)
class FrobeniusData:
    d: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def C2(self) -> frozenset[int]:
        """Modified Frobenius coordinates, doubled."""
        return frozenset([2 * x + 1 for x in self.a] + [-2 * y - 1 for y in self.b])

    @property
    def C(self) -> list[Fraction]:
        return sorted((Fraction(x, 2) for x in self.C2), reverse=True)


@dataclass(frozen=True)
class MayaSequence:
    """S = particles (positive, in S) together with all negatives except holes."""

    particles: tuple[int, ...]  # decreasing, positive doubled positions in S
    holes: tuple[int, ...]      # increasing in |.|, negative doubled positions not in S

    def __contains__(self, x2: int) -> bool:
        if x2 > 0:
            return x2 in self.particles
        return x2 not in self.holes

    def count_above(self, x2: int) -> int:
        """Number of elements of S strictly greater than x2."""
        if x2 > 0:
            return sum(1 for p in self.particles if p > x2)
        below_zero = (-x2 - 1) // 2  # negative half-integers in (x, 0)
        return len(self.particles) + below_zero - sum(1 for h in self.holes if h > x2)

    def count_between(self, lo2: int, hi2: int) -> int:
        """Elements of S strictly between lo and hi."""
        return self.count_above(lo2) - self.count_above(hi2) - (1 if hi2 in self else 0)

    def swap(self, remove2: Sequence[int], add2: Sequence[int]) -> "MayaSequence":
        P = set(self.particles)
        H = set(self.holes)
        for x in remove2:
            if x not in self:
                raise ValueError(f"{x}/2 not in S")
            if x > 0:
                P.discard(x)
            else:
                H.add(x)
        for y in add2:
            if (y > 0 and y in P) or (y < 0 and y not in H):
                raise ValueError(f"{y}/2 already in S")
            if y > 0:
                P.add(y)
            else:
                H.discard(y)
        if len(P) != len(H):
            raise ValueError("charge changed")
        return MayaSequence(tuple(sorted(P, reverse=True)), tuple(sorted(H, reverse=True)))

    def to_partition(self) -> Partition:
        lowest = min(self.holes, default=-1)
        elems = list(self.particles) + [x for x in range(-1, lowest - 1, -2) if x not in self.holes]
        parts = [(s - 1) // 2 + j for j, s in enumerate(elems, 1)]
        return Partition(tuple(x for x in parts if x > 0))

    def window(self) -> tuple[int, int]:
        lo = min(self.holes, default=-1)
        hi = max(self.particles, default=1)
        return lo, hi


# ---------------------------------------------------------------- enumeration


def _gen(n: int, maxp: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for p in range(min(n, maxp), 0, -1):
        for rest in _gen(n - p, p):
            yield (p,) + rest


@lru_cache(maxsize=None)
def partition_tuples(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(_gen(n, n))


@lru_cache(maxsize=None)
def enumerate_partitions(n: int) -> tuple[Partition, ...]:
    if n < 0:
        raise ValueError("n must be >= 0")
    return tuple(Partition(p) for p in partition_tuples(n))


def partitions_upto(n: int) -> list[Partition]:
    return [lam for m in range(n + 1) for lam in enumerate_partitions(m)]


def modified_frobenius(lam: Partition) -> FrobeniusData:
    return lam.frobenius


# ------------------------------------------------------------------- Hamming


def hamming_distance(lam: Partition, mu: Partition) -> int:
    sym = lam.frobenius.C2 ^ mu.frobenius.C2
    return len(sym) // 2


@dataclass(frozen=True)
class Witness:
    a: int
    b: int
    a_: int
    b_: int


def _s_index(lam: Partition, x2: int) -> int:
    """1-based j with 2(lam_j - j) + 1 = x2."""
    for j in range(1, len(lam) + max(0, (-x2 + 1) // 2) + 2):
        if 2 * (lam[j] - j) + 1 == x2:
            return j
    raise ValueError("position not in Maya sequence")


def _diff_sets(lam: Partition, mu: Partition) -> tuple[list[int], list[int]]:
    L = max(len(lam), len(mu)) + 1
    S1, S2 = set(lam.maya_prefix(L)), set(mu.maya_prefix(L))
    return sorted(S1 - S2, reverse=True), sorted(S2 - S1, reverse=True)


def witness(lam: Partition, mu: Partition) -> Witness:
    x, y = _diff_sets(lam, mu)
    if len(x) != 2 or lam.size != mu.size:
        raise ValueError(f"{mu} is not in the neighborhood of {lam}")
    return Witness(_s_index(lam, x[0]), _s_index(lam, x[1]), _s_index(mu, y[0]), _s_index(mu, y[1]))


def neighborhood(lam: Partition) -> list[tuple[Partition, Witness]]:
    """All mu with |mu| = |lam| and d(lam, mu) = 2, via double Maya swaps."""
    if lam.size == 0:
        return []
    n = lam.size
    M = lam.maya
    lo, hi = -2 * n - 1, 2 * n + 1
    black = [x for x in range(hi, lo - 1, -2) if x in M]
    white = [x for x in range(hi, lo - 1, -2) if x not in M]
    white_set = set(white)
    out = {}
    for x1, x2 in combinations(black, 2):
        s = x1 + x2
        for y1 in white:
            y2 = s - y1
            if y2 >= y1 or y2 not in white_set:
                continue
            mu = M.swap((x1, x2), (y1, y2)).to_partition()
            out[mu] = witness(lam, mu)
    return sorted(out.items(), key=lambda t: order_key(t[0]))


# ------------------------------------------------------------- border strips


@dataclass(frozen=True)
class BorderStrip:
    host: Partition
    frm: int  # doubled Maya position of the moved black dot
    to: int   # doubled position it moves to
    result: Partition

    @property
    def size(self) -> int:
        return (self.frm - self.to) // 2

    @cached_property
    def height(self) -> int:
        rows = {i for i, _ in self.cells}
        return len(rows) - 1

    @cached_property
    def cells(self) -> frozenset[tuple[int, int]]:
        return frozenset(set(self.host.cells()) - set(self.result.cells()))

    @property
    def maya_height(self) -> int:
        return self.host.maya.count_between(self.to, self.frm)


def _move(lam: Partition, x2: int, y2: int) -> BorderStrip:
    res = lam.maya.swap((x2,), (y2,)).to_partition()
    return BorderStrip(lam, x2, y2, res)


def border_strips(lam: Partition, n: int) -> list[BorderStrip]:
    if n < 1:
        raise ValueError("strip size must be positive")
    M = lam.maya
    top = 2 * lam.size + 1
    out = []
    for x in range(top, -top - 2 * n - 2, -2):
        if x in M and (x - 2 * n) not in M:
            out.append(_move(lam, x, x - 2 * n))
    return out


@dataclass(frozen=True)
class StripPairs:
    g1: BorderStrip
    g2: BorderStrip
    g1p: BorderStrip
    g2p: BorderStrip
    w: int


def strip_sign(lam: Partition, mu: Partition) -> int:
    for i in range(1, max(len(lam), len(mu)) + 1):
        if lam[i] != mu[i]:
            return 1 if lam[i] > mu[i] else -1
    raise ValueError("equal partitions")


def strip_pairs(lam: Partition, mu: Partition) -> StripPairs:
    x, y = _diff_sets(lam, mu)
    if len(x) != 2 or lam.size != mu.size:
        raise ValueError(f"{mu} is not in the neighborhood of {lam}")
    (Xa, Xb), (Ya, Yb) = x, y
    if Xa > Ya:
        g1, g2 = _move(lam, Xa, Ya), _move(lam, Xa, Yb)
        g1p, g2p = _move(mu, Yb, Xb), _move(mu, Ya, Xb)
    else:
        g1, g2 = _move(lam, Xb, Yb), _move(lam, Xa, Yb)
        g1p, g2p = _move(mu, Ya, Xa), _move(mu, Ya, Xb)
    return StripPairs(g1, g2, g1p, g2p, strip_sign(lam, mu))
