"""Charge-zero semi-infinite wedge space, fermionic operators and the
closed-form quadratic/quartic Hamiltonians.

Basis vectors v_lambda are identified with Maya sets S(lambda); a state is a
bitmask over a finite window of doubled half-integer positions (all positions
below the window are occupied).  Mode arguments are doubled odd ints
throughout this module (``a2 = 2a``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping, Sequence

from . import kernels
from .boson import BosonVector, schur, schur_basis
from .exact import (Const, DiffOp, ExactMatrix, ExpLinear, HalfOverSinhHalf, MultiPoly, Prod,
                    Sum, ZPow, fmt_q, series_coeff)
from .partitions import Partition, enumerate_partitions
from .shifted import beta

PSI, PSISTAR = 1, 0


def _check_half(x2: int):
    if x2 % 2 == 0:
        raise ValueError(f"mode {x2}/2 is not a half-integer")


def half(x2: int) -> Fraction:
    return Fraction(x2, 2)


def doubled(x) -> int:
    """Half-integer (Fraction, str like '3/2', or float) -> doubled odd int."""
    v = Fraction(x) * 2
    if v.denominator != 1 or v.numerator % 2 == 0:
        raise ValueError(f"{x} is not a half-integer")
    return v.numerator


# ---------------------------------------------------------------- Maya codec


class MayaCodec:
    """Bit i <-> doubled position 2i - 2W + 1, i = 0 .. 2W-1."""

    def __init__(self, W: int):
        self.W = W
        self.lo2 = -2 * W + 1
        self.hi2 = 2 * W - 1

    def bit(self, x2: int) -> int:
        if not self.lo2 <= x2 <= self.hi2:
            raise ValueError(f"mode {x2}/2 outside window of half-width {self.W}")
        return (x2 + 2 * self.W - 1) // 2

    def encode(self, lam: Partition) -> int:
        if lam.size and (lam.parts[0] > self.W or len(lam) > self.W):
            raise ValueError(f"{lam} does not fit window {self.W}")
        mask = 0
        for j in range(1, self.W + 1):
            mask |= 1 << self.bit(2 * (lam[j] - j) + 1)
        return mask

    def decode(self, mask: int) -> Partition:
        if mask.bit_count() != self.W:
            raise ValueError("state left the charge-zero sector")
        parts = []
        j = 0
        for i in range(2 * self.W - 1, -1, -1):
            if mask >> i & 1:
                j += 1
                s2 = 2 * i - 2 * self.W + 1
                parts.append((s2 - 1) // 2 + j)
        return Partition(tuple(x for x in parts if x > 0))


def _is_creator(kind: int, x2: int) -> bool:
    return (kind == PSI and x2 > 0) or (kind == PSISTAR and x2 < 0)


def normal_order(ops: Sequence[tuple[int, int]]) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Sign and reordered operator list (creators first, stable)."""
    inv = 0
    seen_ann = 0
    for kind, x2 in ops:
        if _is_creator(kind, x2):
            inv += seen_ann
        else:
            seen_ann += 1
    cre = tuple(o for o in ops if _is_creator(*o))
    ann = tuple(o for o in ops if not _is_creator(*o))
    return (-1) ** inv, cre + ann


@dataclass(frozen=True)
class FermionOpSpec:
    """A normally ordered fermionic monomial with its reordering sign folded in."""
    kind: str                       # "xi2", "xi4" or "alpha"
    modes: tuple[int, ...]          # doubled modes as given
    sign: int
    ops: tuple[tuple[int, int], ...]  # normal-ordered (kind, doubled mode)

    @classmethod
    def xi(cls, *modes2: int) -> "FermionOpSpec":
        if len(modes2) not in (2, 4):
            raise ValueError("Xi takes 2 or 4 modes")
        for x in modes2:
            _check_half(x)
        raw = [(PSI if i % 2 == 0 else PSISTAR, x) for i, x in enumerate(modes2)]
        s, ops = normal_order(raw)
        return cls("xi2" if len(modes2) == 2 else "xi4", tuple(modes2), s, ops)

    def energy(self) -> int:
        """Degree change (in boxes)."""
        return sum((x if k == PSI else -x) for k, x in self.ops) // 2

    def word(self, codec: MayaCodec):
        return tuple((k, codec.bit(x)) for k, x in self.ops)


# ------------------------------------------------------------------ vectors


class WedgeVector:
    """Element of the charge-zero wedge space of fixed degree, basis v_lambda."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Mapping[Partition, object] | None = None):
        self.degree = degree
        t = {}
        for lam, c in (terms or {}).items():
            if not isinstance(lam, Partition):
                lam = Partition(tuple(lam))
            if lam.size != degree:
                raise ValueError(f"{lam} is not of size {degree}")
            if c:
                t[lam] = t.get(lam, 0) + Fraction(c)
        self.terms: dict[Partition, Fraction] = {k: v for k, v in t.items() if v}

    @classmethod
    def basis(cls, lam: Partition) -> "WedgeVector":
        return cls(lam.size, {lam: 1})

    @classmethod
    def vacuum(cls) -> "WedgeVector":
        return cls(0, {Partition(()): 1})

    def __add__(self, other: "WedgeVector") -> "WedgeVector":
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError("degree mismatch")
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return WedgeVector(self.degree if self.terms else other.degree, t)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s) -> "WedgeVector":
        return WedgeVector(self.degree, {k: v * s for k, v in self.terms.items()})

    def __rmul__(self, s):
        return self.scale(s)

    def __eq__(self, other):
        if not isinstance(other, WedgeVector):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def inner(self, other: "WedgeVector") -> Fraction:
        return sum((c * other.terms.get(k, 0) for k, c in self.terms.items()), Fraction(0))

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "terms": [{"partition": list(k.parts), "coeff": fmt_q(v)}
                          for k, v in sorted(self.terms.items(), key=lambda t: t[0].parts, reverse=True)]}

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{fmt_q(v)}*v{list(k.parts)}" for k, v in self.terms.items())


def _window_for(degree: int, modes2: Iterable[int], extra: int = 0) -> MayaCodec:
    m = max((abs(x) for x in modes2), default=1)
    return MayaCodec(max(degree + extra, (m + 1) // 2) + 1)


def apply_spec(spec: FermionOpSpec, v: WedgeVector) -> WedgeVector:
    e = spec.energy()
    out_deg = v.degree + e
    if out_deg < 0:
        return WedgeVector(0)
    codec = _window_for(max(v.degree, out_deg), spec.modes)
    word = spec.word(codec)
    acc: dict[Partition, Fraction] = {}
    for lam, c in v.terms.items():
        s, m = kernels.apply_word(codec.encode(lam), word)
        if s:
            mu = codec.decode(m)
            acc[mu] = acc.get(mu, 0) + s * spec.sign * c
    return WedgeVector(out_deg, acc)


def apply_xi2(a2: int, b2: int, v: WedgeVector) -> WedgeVector:
    """:psi_a psi*_b: v."""
    return apply_spec(FermionOpSpec.xi(a2, b2), v)


def delta_minus(x2: int, y2: int) -> int:
    return 1 if x2 == y2 and x2 < 0 else 0


def delta_plus(x2: int, y2: int) -> int:
    return 1 if x2 == y2 and x2 > 0 else 0


def apply_xi4(a2: int, b2: int, u2: int, v2: int, v: WedgeVector) -> WedgeVector:
    """:psi_a psi*_b psi_u psi*_v: through the quadratic Wick rearrangement."""
    out = apply_xi2(a2, b2, apply_xi2(u2, v2, v))
    dm, dp = delta_minus(a2, v2), delta_plus(b2, u2)
    if dm:
        out = out + apply_xi2(u2, b2, v)
    if dp:
        out = out - apply_xi2(a2, v2, v)
    if dm and dp:
        out = out - v
    return out


def apply_xi4_direct(a2: int, b2: int, c2: int, d2: int, v: WedgeVector) -> WedgeVector:
    return apply_spec(FermionOpSpec.xi(a2, b2, c2, d2), v)


def apply_psi(kind: int, x2: int, lam: Partition) -> tuple[int, Partition | None, int]:
    """Single psi / psi* on v_lambda: (sign, Maya mask result, charge change).

    Leaves the charge-zero sector, so the result is reported as a raw Maya set.
    """
    codec = _window_for(lam.size, [x2], 1)
    s, m = kernels.apply_word(codec.encode(lam), ((kind, codec.bit(x2)),))
    return s, m, (1 if kind == PSI else -1)


def apply_alpha(n: int, v: WedgeVector) -> WedgeVector:
    """alpha_n = sum_a :psi_a psi*_{a-n}:."""
    if n == 0:
        raise ValueError("alpha_0 is zero on the charge-zero sector; n must be nonzero")
    out_deg = v.degree + n
    if out_deg < 0:
        return WedgeVector(0)
    codec = MayaCodec(max(v.degree, out_deg) + abs(n) + 1)
    acc: dict[Partition, Fraction] = {}
    for a2 in range(codec.lo2, codec.hi2 + 1, 2):
        b2 = a2 - 2 * n
        if not codec.lo2 <= b2 <= codec.hi2:
            continue
        spec = FermionOpSpec.xi(a2, b2)
        word = spec.word(codec)
        for lam, c in v.terms.items():
            s, m = kernels.apply_word(codec.encode(lam), word)
            if s:
                mu = codec.decode(m)
                acc[mu] = acc.get(mu, 0) + s * spec.sign * c
    return WedgeVector(out_deg, acc)


def phi(v: WedgeVector) -> BosonVector:
    out = BosonVector(v.degree)
    for lam, c in v.terms.items():
        out = out + schur(lam).scale(c)
    return out


def phi_inverse(b: BosonVector) -> WedgeVector:
    sb = schur_basis(b.degree)
    return WedgeVector(b.degree, dict(zip(sb.partitions, sb.to_schur(b))))


# --------------------------------------------------------- A_k, B_k engine

ABCD = ("a", "b", "c", "d")
AB = ("a", "b")


@dataclass(frozen=True)
class ABPolyData:
    k: int
    A: MultiPoly
    B: MultiPoly
    P: MultiPoly
    R: MultiPoly
    T: MultiPoly
    gamma: Fraction

    def to_json(self) -> dict:
        return {"k": self.k, "A": self.A.to_json(), "B": self.B.to_json(), "P": self.P.to_json(),
                "R": self.R.to_json(), "T": self.T.to_json(), "gamma": fmt_q(self.gamma)}


def gamma_const(k: int) -> Fraction:
    return 2 * beta(2) * beta(k + 1) + k * (k + 3) * beta(k + 3)


def p_poly(k: int) -> MultiPoly:
    a, b, c, d = MultiPoly.gens(ABCD)
    s = ((a - b) ** 2 * ((-a + b + c + d) ** k - (a - b + c + d) ** k)
         + (c - d) ** 2 * ((a + b - c + d) ** k - (a + b + c - d) ** k))
    return s * Fraction(1, factorial(k) * 2 ** k)


def r_poly(k: int) -> MultiPoly:
    a, b = MultiPoly.gens(AB)
    t = a - b
    one = MultiPoly.const(AB, 1)
    inner = Prod((Sum((Const(one), Prod((Const(-one), ExpLinear(-t))))),
                  Const(Fraction(2)), ZPow(-1), HalfOverSinhHalf()))
    expr = Prod((ExpLinear(t * Fraction(1, 2)),
                 DiffOp((b * b - t * t, b * (-2), one), inner)))
    v = series_coeff(expr, k)
    return v if isinstance(v, MultiPoly) else MultiPoly.const(AB, v)


def t_poly(k: int) -> MultiPoly:
    a, b = MultiPoly.gens(AB)
    q = Fraction(1, 4)
    return (b * (b * b - q) - a * (a * a - q)) * ((a + b) * Fraction(1, 2)) ** k * Fraction(2, 3 * factorial(k))


def r_hat(k: int, a, b) -> Fraction:
    """Finite-sum form of R_k at half-integer points (independent check)."""
    a, b = Fraction(a), Fraction(b)
    t = a - b
    tot = Fraction(0)
    # c in F^- with c + t > 0
    c = Fraction(-1, 2)
    while c + t > 0:
        tot += ((b - c) ** 2 - t * t) * ((a + 2 * c - b) / 2) ** k
        c -= 1
    c = Fraction(1, 2)
    while c + t < 0:
        tot -= ((b - c) ** 2 - t * t) * ((a + 2 * c - b) / 2) ** k
        c += 1
    return tot * Fraction(2, factorial(k))


@lru_cache(maxsize=None)
def ab_polynomials(k: int) -> ABPolyData:
    if k < -1:
        raise ValueError("k must be >= -1")
    if k == -1:
        z4, z2 = MultiPoly(ABCD), MultiPoly(AB)
        return ABPolyData(-1, z4, z2, z4, z2, z2, Fraction(0))
    prev = ab_polynomials(k - 1)
    a, b, c, d = MultiPoly.gens(ABCD)
    P = p_poly(k)
    rhsA = (a * a - b * b + c * c - d * d) * Fraction(1, 2) * prev.A - P
    A = rhsA.divexact((a - b + c - d) * (k + 2))
    a2, b2 = MultiPoly.gens(AB)
    R, T = r_poly(k), t_poly(k)
    rhsB = (a2 * a2 - b2 * b2) * Fraction(1, 2) * prev.B - R - T
    B = rhsB.divexact((a2 - b2) * (k + 2))
    return ABPolyData(k, A, B, P, R, T, gamma_const(k))


@lru_cache(maxsize=None)
def _a_reduced(k: int) -> MultiPoly:
    """A_k(a, b, c, a + c - b) as a polynomial in (a, b, c)."""
    vs = ("a", "b", "c")
    a, b, c = MultiPoly.gens(vs)
    return ab_polynomials(k).A.substitute({"a": a, "b": b, "c": c, "d": a + c - b}, vs)


@lru_cache(maxsize=None)
def _b_diag(k: int) -> MultiPoly:
    x = MultiPoly.var(("a",), "a")
    return ab_polynomials(k).B.substitute({"a": x, "b": x}, ("a",))


# --------------------------------------------------------- matrix assembly


class _Space:
    def __init__(self, n: int, W: int):
        self.n = n
        self.codec = MayaCodec(W)
        self.partitions = list(schur_basis(n).partitions) if n else [Partition(())]
        self.masks = [self.codec.encode(l) for l in self.partitions]
        self.index = {m: i for i, m in enumerate(self.masks)}


def _xi_table(space: _Space, specs: Sequence[FermionOpSpec]):
    words = [s.word(space.codec) for s in specs]
    return kernels.word_table(space.masks, words)


def _quads(L2: int) -> list[tuple[int, int, int, int]]:
    r = range(-L2, L2 + 1, 2)
    return [(a, b, c, a + c - b) for a in r for b in r for c in r if abs(a + c - b) <= L2]


def xi4_zero_mode_table(n: int, L2: int):
    """Nonzero matrix elements of all zero-energy quartic Xi with |modes| <= L2/2."""
    space = _Space(n, n + (L2 + 1) // 2 + 1)
    quads = _quads(L2)
    specs = [FermionOpSpec.xi(*q) for q in quads]
    hits = _xi_table(space, specs)
    return space, quads, specs, hits


class CutoffViolation(AssertionError):
    pass


def _assemble_quartic(n: int, L2: int, k: int, space: _Space | None = None):
    """{(row, col): value} of sum A_k Xi_{abcd}, plus the set of quads that acted."""
    sp, quads, specs, hits = xi4_zero_mode_table(n, L2)
    Ared = _a_reduced(k)
    acc: dict[tuple[int, int], Fraction] = {}
    acted = set()
    cache: dict[int, Fraction] = {}
    for wi, si, s, nm in hits:
        q = quads[wi]
        acted.add(q)
        val = cache.get(wi)
        if val is None:
            val = Ared.evaluate((half(q[0]), half(q[1]), half(q[2])))
            cache[wi] = val
        if not val:
            continue
        key = (sp.index[nm], si)
        acc[key] = acc.get(key, 0) + s * specs[wi].sign * val
    return sp, acc, acted


def _xi_diag_values(n: int, L2: int) -> tuple[_Space, dict[int, list[tuple[int, int, int]]]]:
    """Xi_{aa} action: {a2: [(row, col, sign)]}."""
    sp = _Space(n, n + (L2 + 1) // 2 + 1)
    modes = list(range(-L2, L2 + 1, 2))
    specs = [FermionOpSpec.xi(a, a) for a in modes]
    out: dict[int, list] = {a: [] for a in modes}
    for wi, si, s, nm in _xi_table(sp, specs):
        out[modes[wi]].append((sp.index[nm], si, s * specs[wi].sign))
    return sp, out


def _to_matrix(dim: int, acc: Mapping[tuple[int, int], Fraction]) -> ExactMatrix:
    rows = [[Fraction(0)] * dim for _ in range(dim)]
    for (i, j), v in acc.items():
        rows[i][j] += v
    return ExactMatrix(rows, dim)


def ghat0_matrix_c0(k: int, n: int) -> ExactMatrix:
    """beta_{k+2} + (1/(k+1)!) sum_a a^{k+1} Xi_aa on the degree-n space."""
    L2 = 2 * n + 1
    sp, diag = _xi_diag_values(n, L2)
    dim = len(sp.partitions)
    acc: dict[tuple[int, int], Fraction] = {(i, i): beta(k + 2) for i in range(dim)}
    f = Fraction(1, factorial(k + 1))
    for a2, hits in diag.items():
        w = f * half(a2) ** (k + 1)
        for i, j, s in hits:
            acc[(i, j)] = acc.get((i, j), 0) + s * w
    return _to_matrix(dim, acc)


def ghat0_matrix(k: int, n: int, c=0) -> ExactMatrix:
    """Epsilon-free Hamiltonian at central charge parameter c, Schur basis of B_n.

    The c-dependence follows from rho_c = rho_0 after the shift omega_0 -> omega_0 + c
    and the string equation; besides the levels k..0 this also reaches
    G_{-1} = omega_0 (killed by rho_0) and its derivative 1, which contributes
    c^{k+2}/(k+2)!.
    """
    if k < -1:
        raise ValueError("k must be >= -1")
    c = Fraction(c)
    dim = schur_basis(n).dim if n else 1
    out = ExactMatrix.identity(dim).scale(c ** (k + 2) / factorial(k + 2))
    for l in range(k + 1):
        if c == 0 and l > 0:
            break
        out = out + ghat0_matrix_c0(k - l, n).scale(c ** l / factorial(l))
    return out


def ghat1_matrix(k: int, n: int, check_cutoff: bool = True) -> ExactMatrix:
    """First-order (coefficient of eps/24) Hamiltonian on the Schur basis of B_n."""
    if k < 0:
        raise ValueError("k must be >= 0")
    L2 = 2 * n + 1
    sp, acc, _ = _assemble_quartic(n, L2, k)
    dim = len(sp.partitions)
    Bd = _b_diag(k)
    _, diag = _xi_diag_values(n, L2)
    for a2, hits in diag.items():
        w = Bd.evaluate((half(a2),))
        for i, j, s in hits:
            acc[(i, j)] = acc.get((i, j), 0) + s * w
    g = gamma_const(k)
    for i in range(dim):
        acc[(i, i)] = acc.get((i, i), 0) + g
    if check_cutoff:
        _check_cutoff(n, L2)
    return _to_matrix(dim, acc)


def _check_cutoff(n: int, L2: int):
    """Every quad or diagonal term touching the ring |mode| = L2/2 + 1 must act by zero."""
    ring = L2 + 2
    sp, quads, specs, hits = xi4_zero_mode_table(n, ring)
    for wi, *_ in hits:
        if max(abs(x) for x in quads[wi]) > L2:
            raise CutoffViolation(f"quad {quads[wi]} beyond cutoff acts on degree {n}")
    _, diag = _xi_diag_values(n, ring)
    for a2 in (ring, -ring):
        if diag[a2]:
            raise CutoffViolation(f"Xi_aa with a={a2}/2 acts on degree {n}")


def wedge_operator_matrix(n: int, op) -> ExactMatrix:
    """Matrix of a degree-preserving WedgeVector operator in the v_lambda basis."""
    parts = list(schur_basis(n).partitions) if n else [Partition(())]
    idx = {p: i for i, p in enumerate(parts)}
    rows = [[Fraction(0)] * len(parts) for _ in parts]
    for j, lam in enumerate(parts):
        img = op(WedgeVector.basis(lam))
        for mu, c in img.terms.items():
            rows[idx[mu]][j] += c
    return ExactMatrix(rows, len(parts))
