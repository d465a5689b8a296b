"""Coefficient tables of the quantum KdV generating functions g_k^[j](z) and the
Hamiltonians they induce on B_n.

A table for (k, j) maps shapes (n, h) to a symmetric even polynomial F in n mode
variables, meaning the term

    hbar^h / n! * sum_{a in Z^n} F(a) z^{a_1 + ... + a_n} :omega_{a_1} ... omega_{a_n}:

of the coefficient of (eps/24)^j.  F is stored in the power-sum basis p_nu with
l(nu) <= n, |nu| even; the n = 0 term is a plain constant.  Level k+1 is obtained
from level k by evaluating the commutator with G_1 at integer mode tuples and
interpolating (held-out nodes certify every fit).
"""
from __future__ import annotations

import hashlib
import json
import os
import random
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial, prod
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .boson import schur_basis
from .exact import ExactMatrix, MultiPoly, first_independent_rows, fmt_q, rational_inverse
from .partitions import partition_tuples

ENGINE_VERSION = "qkdv-ps-interp-1"
HELD_OUT = 5

Shape = tuple[int, int]   # (number of omegas, hbar power)
Nu = tuple[int, ...]


class InterpolationFailure(ArithmeticError):
    """The commutator values are not matched by a polynomial of the expected degree."""


class StringEquationFailure(AssertionError):
    pass


# ------------------------------------------------------- symmetric polynomials


def power_sums(point: Sequence[int], D: int) -> list[int]:
    out = [len(point)]
    pw = [1] * len(point)
    for _ in range(D):
        pw = [p * x for p, x in zip(pw, point)]
        out.append(sum(pw))
    return out


class SymPoly:
    """Symmetric polynomial in `nvars` variables as {nu: coeff} over power sums p_nu."""

    __slots__ = ("nvars", "coeffs", "_compiled")

    def __init__(self, nvars: int, coeffs: Mapping[Nu, object] | None = None):
        self.nvars = nvars
        self.coeffs: dict[Nu, Fraction] = {tuple(k): Fraction(v) for k, v in (coeffs or {}).items() if v}
        self._compiled = None

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _compile(self):
        if self._compiled is None:
            den = 1
            for v in self.coeffs.values():
                den = den * v.denominator // _gcd(den, v.denominator)
            terms = [(int(v * den), k) for k, v in self.coeffs.items()]
            self._compiled = (terms, den, max(self.degree, 0))
        return self._compiled

    def eval_ps(self, ps: Sequence[int]) -> Fraction:
        terms, den, _ = self._compile()
        tot = 0
        for c, nu in terms:
            for t in nu:
                c *= ps[t]
            tot += c
        return Fraction(tot, den)

    def __call__(self, *point: int) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} arguments")
        terms, den, D = self._compile()
        if all(isinstance(x, int) for x in point):
            return self.eval_ps(power_sums(point, D))
        ps = [Fraction(len(point))] + [sum(Fraction(x) ** r for x in point) for r in range(1, D + 1)]
        return sum((Fraction(c, den) * prod(ps[t] for t in nu) for c, nu in terms), Fraction(0))

    def to_multipoly(self, scale=1) -> MultiPoly:
        names = tuple(f"a{i}" for i in range(1, self.nvars + 1))
        if not names:
            return MultiPoly((), {(): self.coeffs.get((), 0) * scale})
        gens = MultiPoly.gens(names)
        ps_cache: dict[int, MultiPoly] = {}

        def p(r):
            if r not in ps_cache:
                ps_cache[r] = sum((g ** r for g in gens), MultiPoly(names))
            return ps_cache[r]

        out = MultiPoly(names)
        for nu, c in self.coeffs.items():
            m = MultiPoly.const(names, c * scale)
            for t in nu:
                m = m * p(t)
            out = out + m
        return out

    def monomial_coeff(self, mu: Sequence[int]) -> Fraction:
        """Coefficient of a_1^{mu_1} ... a_n^{mu_n} (mu padded with zeros to n)."""
        mu = tuple(mu) + (0,) * (self.nvars - len(mu))
        return sum((c * _assign_count(nu, mu) for nu, c in self.coeffs.items()), Fraction(0))

    def to_json(self) -> list[dict]:
        return [{"nu": list(k), "coeff": fmt_q(v)} for k, v in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, nvars: int, obj) -> "SymPoly":
        return cls(nvars, {tuple(t["nu"]): Fraction(t["coeff"]) for t in obj})

    def __eq__(self, other):
        return isinstance(other, SymPoly) and self.nvars == other.nvars and self.coeffs == other.coeffs

    def __repr__(self):
        return f"SymPoly({self.nvars}, {self.to_multipoly()!r})"


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@lru_cache(maxsize=None)
def _assign_count(nu: Nu, mu: tuple[int, ...]) -> int:
    """Ways to place the parts of nu into the slots of mu so that each slot sum matches."""
    if not nu:
        return 1 if all(x == 0 for x in mu) else 0
    first, rest = nu[0], nu[1:]
    total = 0
    for i, m in enumerate(mu):
        if m >= first:
            total += _assign_count(rest, tuple(sorted(mu[:i] + (m - first,) + mu[i + 1:], reverse=True)))
    return total


def ps_keys(N: int, D: int) -> list[Nu]:
    return [nu for s in range(0, D + 1, 2) for nu in partition_tuples(s) if len(nu) <= N]


class PSBasis:
    """Interpolation data for symmetric even polynomials of degree <= D in N variables."""

    def __init__(self, N: int, D: int):
        self.N, self.D = N, D
        self.keys = ps_keys(N, D)
        dim = len(self.keys)
        rng = random.Random(7919 * N + D)
        R = 1
        while _multiset_count(N, R) < 3 * (dim + HELD_OUT) + 4:
            R += 1
        seen: set[tuple[int, ...]] = set()
        chosen: list[tuple[int, ...]] = []
        held: list[tuple[int, ...]] = []
        pool: list[tuple[int, ...]] = []
        while len(chosen) < dim:
            target = 2 * (dim + HELD_OUT) + len(pool)
            guard = 0
            while len(pool) < target and guard < 50 * target:
                guard += 1
                node = tuple(sorted((rng.randint(-R, R) for _ in range(N)), reverse=True))
                if sum(node) == 0 or node in seen:
                    continue
                seen.add(node)
                pool.append(node)
            rows = [self.row(nd) for nd in pool]
            idx = first_independent_rows(rows, dim)
            if len(idx) < dim:
                R += 1
                continue
            chosen = [pool[i] for i in idx]
            held = [nd for i, nd in enumerate(pool) if i not in set(idx)][:HELD_OUT]
        self.nodes = chosen
        self.held_out = held
        self.inverse = rational_inverse([self.row(nd) for nd in chosen])

    def row(self, node: Sequence[int]) -> list[int]:
        ps = power_sums(node, self.D)
        return [prod(ps[t] for t in nu) for nu in self.keys]

    def fit(self, values: Sequence[Fraction]) -> SymPoly:
        coeffs = {}
        for nu, inv_row in zip(self.keys, self.inverse):
            s = sum((a * b for a, b in zip(inv_row, values) if a and b), Fraction(0))
            if s:
                coeffs[nu] = s
        return SymPoly(self.N, coeffs)


def _multiset_count(N: int, R: int) -> int:
    from math import comb
    return comb(2 * R + 1 + N - 1, N)


@lru_cache(maxsize=None)
def ps_basis(N: int, D: int) -> PSBasis:
    return PSBasis(N, D)


# ------------------------------------------------------------------- tables


@dataclass
class GTable:
    k: int
    j: int
    shapes: dict[Shape, SymPoly] = field(default_factory=dict)
    constant: Fraction | None = None   # pure (eps, hbar) constant, None when absent
    constant_hbar: int | None = None

    def poly(self, n: int, h: int) -> MultiPoly:
        """Coefficient of hbar^h :omega_{a_1}..omega_{a_n}: z^{sum a} (1/n! included)."""
        if n == 0:
            c = self.constant if h == self.constant_hbar and self.constant is not None else 0
            return MultiPoly((), {(): c})
        F = self.shapes.get((n, h))
        if F is None:
            return MultiPoly(tuple(f"a{i}" for i in range(1, n + 1)))
        return F.to_multipoly(Fraction(1, factorial(n)))

    def to_json(self) -> dict:
        shapes = []
        for (n, h), F in sorted(self.shapes.items()):
            shapes.append({"n": n, "hbar": h, "poly": self.poly(n, h).to_json(), "powerSums": F.to_json()})
        const = None
        if self.constant is not None:
            const = {"hbar": self.constant_hbar, "value": fmt_q(self.constant)}
        return {"k": self.k, "j": self.j, "engine": ENGINE_VERSION, "shapes": shapes, "constant": const}

    @classmethod
    def from_json(cls, obj) -> "GTable":
        t = cls(obj["k"], obj["j"])
        for s in obj["shapes"]:
            t.shapes[(s["n"], s["hbar"])] = SymPoly.from_json(s["n"], s["powerSums"])
        if obj.get("constant"):
            t.constant = Fraction(obj["constant"]["value"])
            t.constant_hbar = obj["constant"]["hbar"]
        return t


def initial_table(j: int = 0) -> GTable:
    t = GTable(-1, j)
    if j == 0:
        t.shapes[(1, 0)] = SymPoly(1, {(): 1})
    return t


def output_shapes(k: int, j: int) -> list[Shape]:
    """Nonconstant shapes allowed at level k, order j (n + 2h + j = k + 2)."""
    out = []
    h = 0
    while True:
        n = k + 2 - j - 2 * h
        if n < 1:
            break
        if 2 * (h + j) - 1 + n > 0:
            out.append((n, h))
        h += 1
    return out


# ---------------------------------------------------- commutator channels
#
# For an input term hbar^h F (1/n! convention) the commutator with the cubic part
# of G_1 has a single-contraction channel (n+1, h+1) and a double-contraction
# channel (n-1, h+2); the quadratic eps-part contributes (n, h+1).  Dividing by
# -hbar (k+2+j) sum(m) gives the three terms below.


def merge_channel(F: SymPoly, m: Sequence[int]) -> Fraction:
    """sum_{i<l} (m_i + m_l) F(m_i + m_l, rest)."""
    tot = Fraction(0)
    N = len(m)
    for i, l in combinations(range(N), 2):
        s = m[i] + m[l]
        if s == 0:
            continue
        rest = [m[r] for r in range(N) if r != i and r != l]
        tot += s * F(s, *rest)
    return tot


def split_value(F: SymPoly, y: int, rest: Sequence[int]) -> Fraction:
    """W(y) = sum_{x1+x2=y} x1 x2 [x1,x2<0] - [x1,x2>0] F(x1, x2, rest)."""
    terms, den, D = F._compile()
    base = power_sums(rest, D)
    base[0] += 2
    tot = 0
    if y >= 2:
        xs, sgn = range(1, y), -1
    elif y <= -2:
        xs, sgn = range(y + 1, 0), 1
    else:
        return Fraction(0)
    for x in xs:
        x2 = y - x
        ps = list(base)
        a, b = x, x2
        for r in range(1, D + 1):
            ps[r] += a + b
            a *= x
            b *= x2
        val = 0
        for c, nu in terms:
            for t in nu:
                c *= ps[t]
            val += c
        tot += sgn * x * x2 * val
    return Fraction(tot, den)


def split_channel(F: SymPoly, m: Sequence[int]) -> Fraction:
    """sum_i W(m_i; rest)."""
    return sum((split_value(F, m[i], [m[r] for r in range(len(m)) if r != i]) for i in range(len(m))),
               Fraction(0))


def cube_channel(F: SymPoly, m: Sequence[int]) -> Fraction:
    return 2 * sum(x ** 3 for x in m) * F(*m)


def recursion_rhs(prev: GTable, prev_lower: GTable | None, shape: Shape, m: Sequence[int]) -> Fraction:
    """F_{k+1}^{(N,h)}(m) for level k = prev.k, order j = prev.j."""
    N, h = shape
    k, j = prev.k, prev.j
    tot = Fraction(0)
    Fm = prev.shapes.get((N - 1, h))
    if Fm is not None and N >= 2:
        tot += merge_channel(Fm, m)
    Fs = prev.shapes.get((N + 1, h - 1)) if h >= 1 else None
    if Fs is not None:
        tot -= split_channel(Fs, m) / 2
    if prev_lower is not None:
        Fp = prev_lower.shapes.get((N, h))
        if Fp is not None:
            tot += cube_channel(Fp, m)
    return tot / ((k + 2 + j) * sum(m))


def br_step(prev: GTable, prev_lower: GTable | None) -> GTable:
    """Nonconstant shapes of level prev.k + 1 at order prev.j."""
    k1, j = prev.k + 1, prev.j
    out = GTable(k1, j)
    for shape in output_shapes(k1, j):
        N, h = shape
        sources = [prev.shapes.get((N - 1, h)), prev.shapes.get((N + 1, h - 1)) if h else None,
                   prev_lower.shapes.get((N, h)) if prev_lower is not None else None]
        if all(s is None for s in sources):
            continue
        basis = ps_basis(N, 2 * (h + j))
        vals = [recursion_rhs(prev, prev_lower, shape, nd) for nd in basis.nodes]
        F = basis.fit(vals)
        for nd in basis.held_out:
            if F(*nd) != recursion_rhs(prev, prev_lower, shape, nd):
                raise InterpolationFailure(f"held-out mismatch at level {k1}, order {j}, shape {shape}, node {nd}")
        if not F.is_zero():
            out.shapes[shape] = F
    return out


def string_check(upper: GTable, lower: GTable, samples: int = 4) -> None:
    """dg_{k+1}/d omega_0 = g_k on every shape with n >= 2."""
    rng = random.Random(31 * upper.k + upper.j)
    for (N, h), F in upper.shapes.items():
        if N < 2:
            continue
        G = lower.shapes.get((N - 1, h))
        for _ in range(samples):
            pt = [rng.randint(-5, 5) for _ in range(N - 1)]
            lhs = F(0, *pt)
            rhs = G(*pt) if G is not None else 0
            if lhs != rhs:
                raise StringEquationFailure(f"string equation fails at level {upper.k}, shape {(N, h)}")


# --------------------------------------------------------------- hierarchy


def content_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def default_cache_dir() -> Path | None:
    env = os.environ.get("QKDV_CACHE")
    return Path(env) if env else None


class Hierarchy:
    """Lazily computed tables g_k^[j] with an optional on-disk JSON cache."""

    def __init__(self, cache_dir: str | os.PathLike | None = None, check_string: bool = True):
        self.cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
        self.check_string = check_string
        self._shapes: dict[tuple[int, int], GTable] = {}
        self._tables: dict[tuple[int, int], GTable] = {}
        self._hams: dict[tuple[int, int, int], ExactMatrix] = {}
        self.stats = {"loaded": 0, "computed": 0, "rebuilt": 0}

    # -- cache
    @staticmethod
    def cache_key(k: int, j: int) -> str:
        blob = json.dumps({"k": k, "j": j, "engine": ENGINE_VERSION}, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:20]

    def _cache_path(self, k: int, j: int) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"gtable-k{k}-j{j}-{self.cache_key(k, j)}.json"

    def _load(self, k, j) -> GTable | None:
        p = self._cache_path(k, j)
        if p is None or not p.exists():
            return None
        try:
            obj = json.loads(p.read_text())
            stored = obj.pop("contentHash")
            if stored != content_hash(obj):
                raise ValueError("content hash mismatch")
            if obj.get("engine") != ENGINE_VERSION:
                return None
            t = GTable.from_json(obj)
        except (ValueError, KeyError, TypeError) as e:
            warnings.warn(f"corrupt cache entry {p.name} ({e}); rebuilding", RuntimeWarning, stacklevel=3)
            self.stats["rebuilt"] += 1
            return None
        self.stats["loaded"] += 1
        return t

    def _store(self, t: GTable):
        p = self._cache_path(t.k, t.j)
        if p is None:
            return
        p.parent.mkdir(parents=True, exist_ok=True)
        obj = t.to_json()
        obj["contentHash"] = content_hash(obj)
        tmp = p.with_suffix(f".{os.getpid()}.tmp")
        tmp.write_text(json.dumps(obj, sort_keys=True))
        os.replace(tmp, p)  # identical content from any writer

    def manifest(self, keys: Iterable[tuple[int, int]]) -> dict:
        rows = []
        for k, j in sorted(keys):
            t = self.table(k, j)
            rows.append({"k": k, "j": j, "file": self._cache_path(k, j).name if self.cache_dir else None,
                         "contentHash": content_hash(t.to_json())})
        return {"engine": ENGINE_VERSION, "tables": rows}

    # -- computation
    def shapes(self, k: int, j: int) -> GTable:
        if k < -1 or j < 0:
            raise ValueError("need k >= -1, j >= 0")
        key = (k, j)
        if key in self._shapes:
            return self._shapes[key]
        if k == -1:
            t = initial_table(j)
        elif j > k + 1:
            t = GTable(k, j)
        else:
            t = br_step(self.shapes(k - 1, j), self.shapes(k - 1, j - 1) if j >= 1 else None)
            self.stats["computed"] += 1
            if self.check_string:
                string_check(t, self.shapes(k - 1, j))
        self._shapes[key] = t
        return t

    def table(self, k: int, j: int) -> GTable:
        key = (k, j)
        if key in self._tables:
            return self._tables[key]
        t = self._load(k, j)
        if t is None:
            base = self.shapes(k, j)
            t = GTable(k, j, dict(base.shapes))
            if (k + 2 - j) % 2 == 0 and k + 2 - j >= 2:
                h0 = (k + 2 - j) // 2
                up = self.shapes(k + 1, j).shapes.get((1, h0))
                t.constant = up(0) if up is not None else Fraction(0)
                t.constant_hbar = h0
            self._store(t)
        else:
            self._shapes.setdefault(key, GTable(k, j, dict(t.shapes)))
        self._tables[key] = t
        return t

    # -- Hamiltonians
    def hamiltonian(self, k: int, j: int, n: int, c=0) -> ExactMatrix:
        """Coefficient of (eps/24)^j in rho_c(G_k) on B_n, Schur basis, via the c-shift."""
        c = Fraction(c)
        dim = schur_basis(n).dim
        out = ExactMatrix.zeros(dim, dim)
        for l in range(k + 1):
            if c == 0 and l > 0:
                break
            if j > k - l:
                continue
            out = out + self._ham0(k - l, j, n).scale(c ** l / factorial(l))
        if j == 0 and c != 0:
            out = out + ExactMatrix.identity(dim).scale(c ** (k + 2) / factorial(k + 2))
        return out

    def _ham0(self, k: int, j: int, n: int) -> ExactMatrix:
        key = (k, j, n)
        if key not in self._hams:
            self._hams[key] = rho_matrix(self.table(k, j), n, 0)
        return self._hams[key]

    def hamiltonian_direct(self, k: int, j: int, n: int, c=0) -> ExactMatrix:
        """rho_c(G_k) computed straight from the table, zero modes included."""
        return rho_matrix(self.table(k, j), n, Fraction(c))

    def differential_polynomial(self, k: int, jmax: int | None = None) -> "DiffPoly":
        jmax = k + 1 if jmax is None else jmax
        terms: dict[tuple[int, int, tuple[int, ...]], Fraction] = {}
        for j in range(0, jmax + 1):
            t = self.table(k, j) if k >= 0 else initial_table(j)
            scale = Fraction(1, 24 ** j)
            for (N, h), F in t.shapes.items():
                for s in range(0, 2 * (h + j) + 1, 2):
                    for mu in partition_tuples(s):
                        if len(mu) > N:
                            continue
                        d = F.monomial_coeff(mu)
                        if not d:
                            continue
                        full = tuple(mu) + (0,) * (N - len(mu))
                        mult = prod(factorial(v) for v in Counter(full).values())
                        key = (j, h, tuple(sorted(full, reverse=True)))
                        terms[key] = terms.get(key, 0) + d * scale / mult
                for r in range(1, 2 * (h + j) + 2, 2):
                    # odd total degree would break evenness
                    for mu in partition_tuples(r):
                        if len(mu) <= N and F.monomial_coeff(mu):
                            raise ArithmeticError(f"odd-degree residue in level {k} shape {(N, h)}")
            if t.constant:
                key = (j, t.constant_hbar, ())
                terms[key] = terms.get(key, 0) + t.constant * scale
        return DiffPoly(terms)


# ------------------------------------------------------------ representation


def _submultisets(kappa: Sequence[int]):
    cnt = sorted(Counter(kappa).items(), reverse=True)
    for choice in product(*(range(m + 1) for _, m in cnt)):
        beta = []
        falling = 1
        for (part, m), t in zip(cnt, choice):
            beta += [part] * t
            falling *= factorial(m) // factorial(m - t)
        yield tuple(beta), falling


def _mult_factorial(parts: Iterable[int]) -> int:
    return prod(factorial(v) for v in Counter(parts).values())


def rho_matrix(table: GTable, n: int, c=0) -> ExactMatrix:
    """Schur-basis matrix of the z^0 part of the table under rho_c on B_n (hbar = 1)."""
    c = Fraction(c)
    sb = schur_basis(n)
    dim = sb.dim
    M = [[Fraction(0)] * dim for _ in range(dim)]
    for (N, h), F in table.shapes.items():
        zs = range(0, N + 1) if c else [0]
        for z in zs:
            cz = c ** z / factorial(z) if z else Fraction(1)
            for col, kappa in enumerate(sb.keys):
                for beta, falling in _submultisets(kappa):
                    r = N - z - len(beta)
                    s = sum(beta)
                    if r < 0 or (s == 0) != (r == 0):
                        continue
                    rest = list(kappa)
                    for b in beta:
                        rest.remove(b)
                    w = cz * falling * prod(beta) / _mult_factorial(beta)
                    for alpha in (partition_tuples(s) if s else [()]):
                        if len(alpha) != r:
                            continue
                        val = F(*alpha, *(-b for b in beta), *([0] * z))
                        if not val:
                            continue
                        target = tuple(sorted(rest + list(alpha), reverse=True))
                        M[sb.key_index[target]][col] += w * val / _mult_factorial(alpha)
    P = ExactMatrix(M, dim)
    out = sb.p_to_schur_matrix(P)
    if table.constant:
        out = out + ExactMatrix.identity(dim).scale(table.constant)
    return out


# --------------------------------------------------------- differential polys


class DiffPoly:
    """Polynomial in u_0, u_1, ... with coefficients in Q[eps, hbar].

    Keys are (eps power, hbar power, sorted tuple of u-indices)."""

    def __init__(self, terms: Mapping[tuple[int, int, tuple[int, ...]], Fraction]):
        self.terms = {k: Fraction(v) for k, v in terms.items() if v}

    def __eq__(self, other):
        return isinstance(other, DiffPoly) and self.terms == other.terms

    def is_even(self) -> bool:
        return all(sum(u) % 2 == 0 for _, _, u in self.terms)

    def to_json(self) -> list[dict]:
        return [{"eps": e, "hbar": h, "u": list(u), "coeff": fmt_q(v)}
                for (e, h, u), v in sorted(self.terms.items())]

    def __repr__(self):
        if not self.terms:
            return "0"
        out = []
        for (e, h, u), v in sorted(self.terms.items()):
            f = ([f"eps^{e}" if e > 1 else "eps"] if e else []) + ([f"hbar^{h}" if h > 1 else "hbar"] if h else [])
            f += [f"u{i}" for i in u]
            out.append(fmt_q(v) + ("*" + "*".join(f) if f else ""))
        return " + ".join(out)
