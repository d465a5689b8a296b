"""Bosonic Fock space Q[p_1, p_2, ...], Schur functions and the representation rho_c."""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .exact import ExactMatrix, fmt_q
from .partitions import Partition, border_strips, enumerate_partitions

Key = tuple[int, ...]  # a p-monomial p_{k1} p_{k2} ... stored as a partition tuple


def _merge(a: Key, b: Key) -> Key:
    return tuple(sorted(a + b, reverse=True))


class BosonVector:
    """Homogeneous element of B_n in the monomial basis p_lambda."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Mapping[Key, object] | None = None):
        self.degree = degree
        t = {}
        for k, v in (terms or {}).items():
            k = tuple(sorted(k, reverse=True))
            if sum(k) != degree:
                raise ValueError(f"monomial {k} has weight {sum(k)} != {degree}")
            if v:
                t[k] = t.get(k, 0) + Fraction(v)
        self.terms: dict[Key, Fraction] = {k: v for k, v in t.items() if v}

    @classmethod
    def p(cls, *parts: int) -> "BosonVector":
        return cls(sum(parts), {tuple(parts): 1})

    @classmethod
    def one(cls) -> "BosonVector":
        return cls(0, {(): 1})

    def __add__(self, other: "BosonVector") -> "BosonVector":
        if other.degree != self.degree and self.terms and other.terms:
            raise ValueError("degree mismatch")
        deg = self.degree if self.terms else other.degree
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return BosonVector(deg, t)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, s) -> "BosonVector":
        s = Fraction(s)
        return BosonVector(self.degree, {k: v * s for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, BosonVector):
            t: dict[Key, Fraction] = {}
            for k1, v1 in self.terms.items():
                for k2, v2 in other.terms.items():
                    k = _merge(k1, k2)
                    t[k] = t.get(k, 0) + v1 * v2
            return BosonVector(self.degree + other.degree, t)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BosonVector):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self, b: int) -> "BosonVector":
        """d/dp_b."""
        t: dict[Key, Fraction] = {}
        for k, v in self.terms.items():
            m = k.count(b)
            if m:
                lst = list(k)
                lst.remove(b)
                nk = tuple(lst)
                t[nk] = t.get(nk, 0) + v * m
        return BosonVector(self.degree - b, t)

    def to_json(self, basis: str = "p") -> dict:
        if basis == "p":
            items = sorted(self.terms.items(), key=lambda t: tuple(-x for x in t[0]))
        elif basis == "schur":
            sb = schur_basis(self.degree)
            coeffs = sb.to_schur(self)
            items = [(lam.parts, c) for lam, c in zip(sb.partitions, coeffs) if c]
        else:
            raise ValueError(basis)
        return {"degree": self.degree, "basis": basis,
                "terms": [{"key": list(k), "coeff": fmt_q(v)} for k, v in items]}

    @classmethod
    def from_json(cls, obj) -> "BosonVector":
        n = obj["degree"]
        if obj["basis"] == "p":
            return cls(n, {tuple(t["key"]): Fraction(t["coeff"]) for t in obj["terms"]})
        out = cls(n)
        for t in obj["terms"]:
            out = out + schur(Partition(tuple(t["key"]))).scale(Fraction(t["coeff"]))
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{fmt_q(v)}*p{list(k)}" for k, v in sorted(self.terms.items()))


def z_factor(key: Sequence[int]) -> int:
    out = 1
    for part, m in Counter(key).items():
        out *= part ** m * factorial(m)
    return out


def inner_product(u: BosonVector, v: BosonVector) -> Fraction:
    if u.degree != v.degree:
        return Fraction(0)
    return sum((c * v.terms[k] * z_factor(k) for k, c in u.terms.items() if k in v.terms), Fraction(0))


@lru_cache(maxsize=None)
def complete_homogeneous(l: int) -> BosonVector:
    """h_l from l h_l = sum_{r=1}^{l} p_r h_{l-r}."""
    if l < 0:
        return BosonVector(0)
    if l == 0:
        return BosonVector.one()
    acc = BosonVector(l)
    for r in range(1, l + 1):
        acc = acc + BosonVector.p(r) * complete_homogeneous(l - r)
    return acc.scale(Fraction(1, l))


@lru_cache(maxsize=None)
def schur(lam: Partition) -> BosonVector:
    """Jacobi-Trudi determinant det(h_{lam_i - i + j}), Laplace expansion with memo."""
    parts = lam.parts
    r = len(parts)
    if r == 0:
        return BosonVector.one()
    memo: dict[tuple[int, frozenset], BosonVector] = {}

    def minor(row: int, cols: frozenset) -> BosonVector:
        if row == r:
            return BosonVector.one()
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = None
        sign = 1
        for j in sorted(cols):
            h = complete_homogeneous(parts[row] - (row + 1) + (j + 1))
            if not h.is_zero():
                term = (h * minor(row + 1, cols - {j})).scale(sign)
                acc = term if acc is None else acc + term
            sign = -sign
        if acc is None:
            acc = BosonVector(sum(parts[row:]))
        memo[key] = acc
        return acc

    out = minor(0, frozenset(range(r)))
    return BosonVector(lam.size, out.terms)


@lru_cache(maxsize=None)
def character(lam: Partition, mu: Partition) -> int:
    """Murnaghan-Nakayama: chi^lam evaluated on cycle type mu."""
    if lam.size != mu.size:
        raise ValueError("size mismatch")
    if lam.size == 0:
        return 1
    first, rest = mu.parts[0], Partition(mu.parts[1:])
    return sum((-1) ** s.height * character(s.result, rest) for s in border_strips(lam, first))


def schur_mn(lam: Partition) -> BosonVector:
    return BosonVector(lam.size, {mu.parts: Fraction(character(lam, mu), z_factor(mu.parts))
                                  for mu in enumerate_partitions(lam.size)})


class SchurBasis:
    """Ordered Schur basis of B_n with exact change-of-basis matrices."""

    def __init__(self, n: int):
        self.n = n
        self.partitions = list(enumerate_partitions(n))
        self.index = {lam: i for i, lam in enumerate(self.partitions)}
        self.keys = [lam.parts for lam in self.partitions]
        self.key_index = {k: i for i, k in enumerate(self.keys)}
        svecs = [schur(lam) for lam in self.partitions]
        # T[kappa][nu]: coefficient of p_kappa in s_nu
        self.T = ExactMatrix([[svecs[j].terms.get(k, 0) for j in range(len(svecs))] for k in self.keys])
        self.zs = [z_factor(k) for k in self.keys]
        # U[nu][kappa] = <s_nu, p_kappa> = T[kappa][nu] z_kappa
        self.U = ExactMatrix([[self.T[i, j] * self.zs[i] for i in range(len(self.keys))]
                              for j in range(len(self.keys))])

    @property
    def dim(self) -> int:
        return len(self.partitions)

    def to_schur(self, v: BosonVector) -> list[Fraction]:
        vec = [v.terms.get(k, Fraction(0)) for k in self.keys]
        return self.U @ vec

    def from_schur(self, coeffs: Sequence) -> BosonVector:
        vec = self.T @ list(coeffs)
        return BosonVector(self.n, dict(zip(self.keys, vec)))

    def p_to_schur_matrix(self, M: ExactMatrix) -> ExactMatrix:
        """Conjugate an operator given in the p-basis (columns = images of p_kappa)."""
        return self.U @ M @ self.T


@lru_cache(maxsize=None)
def schur_basis(n: int) -> SchurBasis:
    return SchurBasis(n)


# ---------------------------------------------------------- representation


def is_normal_ordered(modes: Sequence[int]) -> bool:
    seen_negative = False
    for a in modes:
        if a < 0:
            seen_negative = True
        elif seen_negative:
            return False
    return True


def apply_omega_monomial(modes: Sequence[int], c, v: BosonVector, hbar_power: int = 0) -> BosonVector:
    """rho_c(:omega_{a1}...omega_{an}:) with hbar = 1.

    Modes must already be in normal order (nonnegative ones left of negative ones).
    """
    if not is_normal_ordered(modes):
        raise ValueError(f"modes {tuple(modes)} are not normal ordered")
    out = v
    for a in reversed(modes):
        if a < 0:
            out = out.derivative(-a).scale(-a)
        elif a == 0:
            out = out.scale(c)
        else:
            out = BosonVector.p(a) * out
    return out


def operator_matrix(n: int, op: Callable[[BosonVector], BosonVector]) -> ExactMatrix:
    """Matrix of a degree-preserving operator on B_n in the Schur basis."""
    sb = schur_basis(n)
    cols = [sb.to_schur(op(schur(lam))) for lam in sb.partitions]
    return ExactMatrix([[cols[j][i] for j in range(sb.dim)] for i in range(sb.dim)], sb.dim)


def p_basis_matrix(n: int, images: Mapping[Key, Mapping[Key, Fraction]]) -> ExactMatrix:
    """Assemble a p-basis matrix from images[kappa] = {key: coeff}."""
    sb = schur_basis(n)
    M = [[Fraction(0)] * sb.dim for _ in range(sb.dim)]
    for j, k in enumerate(sb.keys):
        for key, c in images.get(k, {}).items():
            M[sb.key_index[key]][j] += c
    return ExactMatrix(M, sb.dim)
