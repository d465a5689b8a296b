"""The algebra Q[c, Q_2, Q_3, ...] of shifted symmetric functions on partitions."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping

from .exact import HalfOverSinhHalf, fmt_q, series_coeff
from .partitions import Partition, partition_tuples


@lru_cache(maxsize=None)
def _beta_series(prec: int) -> tuple[Fraction, ...]:
    return tuple(series_coeff(HalfOverSinhHalf(), k) for k in range(prec + 1))


def beta(k: int) -> Fraction:
    """Coefficient of y^k in (y/2)/sinh(y/2)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    prec = max(16, 1 << (k.bit_length()))
    return _beta_series(prec)[k]


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    # B_0 = 1, sum_{j<=k} C(k+1, j) B_j = 0; B_1 = -1/2
    if k == 0:
        return Fraction(1)
    return -sum((comb(k + 1, j) * bernoulli(j) for j in range(k)), Fraction(0)) / (k + 1)


def beta_closed(k: int) -> Fraction:
    return (Fraction(2) ** (1 - k) - 1) * bernoulli(k) / factorial(k)


def signed_power_sum2(lam: Partition, e: int) -> int:
    """sum over C_lam of sgn(c) (2c)^e."""
    return sum((1 if x > 0 else -1) * x ** e for x in lam.frobenius.C2)


_QCACHE: dict[tuple[int, Partition], Fraction] = {}


def evalQ(k: int, lam: Partition) -> Fraction:
    """Q_k(lam) = beta_k + (1/(k-1)!) sum_{c in C_lam} sgn(c) c^(k-1)."""
    if k == 0:
        return Fraction(1)
    if k < 0:
        raise ValueError("k must be >= 0")
    key = (k, lam)
    v = _QCACHE.get(key)
    if v is None:
        s = signed_power_sum2(lam, k - 1)
        v = beta(k) + Fraction(s, 2 ** (k - 1) * factorial(k - 1))
        _QCACHE[key] = v  # idempotent write
    return v


def evalQ_rows(k: int, lam: Partition) -> Fraction:
    """Row form: beta_k + (1/(k-1)!) sum_i [(lam_i - i + 1/2)^(k-1) - (-i + 1/2)^(k-1)]."""
    if k == 0:
        return Fraction(1)
    s = sum((Fraction(2 * (x - i) + 1, 2) ** (k - 1) - Fraction(-2 * i + 1, 2) ** (k - 1)
            for i, x in enumerate(lam.parts, 1)), Fraction(0))
    return beta(k) + s / factorial(k - 1)


# --------------------------------------------------------------------- QExpr

Monomial = tuple[int, tuple[int, ...]]  # (c exponent, sorted Q indices)


def _canon(mono) -> Monomial:
    e, idx = mono
    idx = tuple(sorted((i for i in idx if i != 0), reverse=True))
    return int(e), idx


class QExpr:
    """Rational combination of monomials c^e Q_{i1} Q_{i2} ... (indices >= 2).

    Q_1 is identically zero on partitions and Q_0 = 1; both are eliminated on
    construction.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        t: dict[Monomial, Fraction] = {}
        for mono, c in items:
            e, idx = _canon(mono)
            if 1 in idx or not c:
                continue
            key = (e, idx)
            t[key] = t.get(key, 0) + Fraction(c)
        self.terms = {k: v for k, v in t.items() if v}

    @classmethod
    def Q(cls, *indices: int) -> "QExpr":
        return cls({(0, indices): 1})

    @classmethod
    def c(cls, e: int = 1) -> "QExpr":
        return cls({(e, ()): 1})

    @classmethod
    def const(cls, v) -> "QExpr":
        return cls({(0, ()): v})

    def __add__(self, other):
        if not isinstance(other, QExpr):
            other = QExpr.const(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return QExpr(t)

    __radd__ = __add__

    def __neg__(self):
        return QExpr({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QExpr):
            return QExpr({k: v * other for k, v in self.terms.items()})
        t: dict = {}
        for (e1, i1), v1 in self.terms.items():
            for (e2, i2), v2 in other.terms.items():
                key = _canon((e1 + e2, i1 + i2))
                t[key] = t.get(key, 0) + v1 * v2
        return QExpr(t)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, QExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @staticmethod
    def monomial_weight(mono: Monomial) -> int:
        return mono[0] + sum(mono[1])

    def weights(self) -> set[int]:
        return {self.monomial_weight(m) for m in self.terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.weights()) <= 1

    @property
    def weight(self) -> int | None:
        w = self.weights()
        return next(iter(w)) if len(w) == 1 else None

    def coeff(self, mono) -> Fraction:
        return self.terms.get(_canon(mono), Fraction(0))

    def __call__(self, lam: Partition, c=0) -> Fraction:
        return evalQExpr(self, lam, c)

    def to_json(self) -> list[dict]:
        return [{"cExp": e, "qIndices": list(idx), "coeff": fmt_q(v)}
                for (e, idx), v in sorted(self.terms.items(), key=lambda t: _mono_order(t[0]))]

    @classmethod
    def from_json(cls, obj) -> "QExpr":
        return cls({(m["cExp"], tuple(m["qIndices"])): Fraction(m["coeff"]) for m in obj})

    def __repr__(self):
        if not self.terms:
            return "0"
        out = []
        for mono, v in sorted(self.terms.items(), key=lambda t: _mono_order(t[0])):
            e, idx = mono
            f = ([f"c^{e}" if e > 1 else "c"] if e else []) + [f"Q{i}" for i in idx]
            out.append(fmt_q(v) + ("*" + "*".join(f) if f else ""))
        return " + ".join(out)


def evalQExpr(f: QExpr, lam: Partition, c=0) -> Fraction:
    c = Fraction(c)
    total = Fraction(0)
    for (e, idx), v in f.terms.items():
        m = v * c ** e if e else v
        for i in idx:
            m *= evalQ(i, lam)
        total += m
    return total


def _mono_order(mono: Monomial):
    e, idx = mono
    w = e + sum(idx)
    return (w, -e, tuple(-i for i in idx))


def _parts_ge2(n: int) -> list[tuple[int, ...]]:
    return [p for p in partition_tuples(n) if all(x >= 2 for x in p)]


def monomial_basis(weight: int, with_c: bool = True) -> list[QExpr]:
    """Monomials c^e prod Q_{m_i} (m_i >= 2) of the given weight, c-degree descending."""
    out = []
    for e in (range(weight, -1, -1) if with_c else [0]):
        for p in _parts_ge2(weight - e):
            out.append(QExpr({(e, p): 1}))
    return out


def basis_monomials(weight: int, with_c: bool = True) -> list[Monomial]:
    return [next(iter(m.terms)) for m in monomial_basis(weight, with_c)]


def dubrovin_eigenvalue(k: int) -> QExpr:
    """E_k^[0](.; c) = sum_j c^(k+2-j)/(k+2-j)! Q_j."""
    return QExpr({(k + 2 - j, (j,)): Fraction(1, factorial(k + 2 - j)) for j in range(k + 3)})


def theorem_one_eigenvalue(k: int) -> QExpr:
    """First-order eigenvalue (coefficient of eps) at general c."""
    out = QExpr()
    for l in range(k + 1):
        inner = (QExpr.Q(2) * QExpr.Q(k + 1 - l) * 2
                 + QExpr.Q(k + 3 - l) * ((k - l) * (k - l + 3)))
        out = out + inner * QExpr.c(l) * Fraction(1, factorial(l))
    return out * Fraction(1, 24)
