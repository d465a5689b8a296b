"""Exact rational arithmetic: polynomials, truncated series, dense matrices, solving."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

try:  # fast exact linear algebra when available
    import flint as _flint
except ImportError:  # pragma: no cover
    _flint = None

LINALG_BACKEND = "flint" if _flint is not None else "python"

Rational = Fraction
Scalar = Union[int, Fraction]


def fmt_q(x: Scalar) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_q(s: str | int) -> Fraction:
    return Fraction(s)


# ---------------------------------------------------------------- polynomials


class MultiPoly:
    """Sparse polynomial over Q in a declared, ordered tuple of variables."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, Scalar] | None = None):
        self.vars = tuple(variables)
        clean = {}
        if terms:
            n = len(self.vars)
            for e, c in terms.items():
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match variables {self.vars}")
                if c:
                    clean[tuple(e)] = Fraction(c)
        self.terms: dict[tuple, Fraction] = clean
        self._hash = None

    @classmethod
    def const(cls, variables, c: Scalar) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name: str) -> "MultiPoly":
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): 1})

    @classmethod
    def gens(cls, variables) -> list["MultiPoly"]:
        return [cls.var(variables, v) for v in variables]

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable universes differ: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return MultiPoly(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return MultiPoly(self.vars, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self.divexact(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = MultiPoly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.vars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        return sorted(self.terms.items(), reverse=True)

    def __call__(self, *values, **named):
        return self.evaluate(values if values else named)

    def evaluate(self, values) -> Fraction:
        if isinstance(values, Mapping):
            values = [values[v] for v in self.vars]
        total = Fraction(0)
        for e, c in self.terms.items():
            m = c
            for x, k in zip(values, e):
                if k:
                    m *= x ** k
            total += m
        return total

    def substitute(self, mapping: Mapping[str, "MultiPoly | Scalar"], variables=None) -> "MultiPoly":
        """Replace variables by polynomials living in `variables` (default: same universe)."""
        variables = tuple(variables) if variables is not None else self.vars
        images = []
        for v in self.vars:
            if v in mapping:
                img = mapping[v]
                if not isinstance(img, MultiPoly):
                    img = MultiPoly.const(variables, img)
            else:
                img = MultiPoly.var(variables, v)
            images.append(img)
        powers: dict[tuple[int, int], MultiPoly] = {}

        def pw(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = images[i] ** k
            return powers[key]

        out = MultiPoly(variables)
        for e, c in self.terms.items():
            m = MultiPoly.const(variables, c)
            for i, k in enumerate(e):
                if k:
                    m = m * pw(i, k)
            out = out + m
        return out

    def leading(self) -> tuple[tuple, Fraction]:
        e = max(self.terms)
        return e, self.terms[e]

    def divexact(self, d: "MultiPoly") -> "MultiPoly":
        """Exact quotient self/d in lex order; raises ArithmeticError when not exact."""
        d = self._coerce(d)
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        de, dc = d.leading()
        q: dict[tuple, Fraction] = {}
        r = MultiPoly(self.vars, self.terms)
        while not r.is_zero():
            re_, rc = r.leading()
            diff = tuple(a - b for a, b in zip(re_, de))
            if diff and min(diff) < 0:
                raise ArithmeticError("polynomial division is not exact")
            qc = rc / dc
            q[diff] = q.get(diff, 0) + qc
            r = r - MultiPoly(self.vars, {diff: qc}) * d
        return MultiPoly(self.vars, q)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if not mono:
                parts.append(fmt_q(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{fmt_q(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"vars": list(self.vars),
                "terms": [{"exp": list(e), "coeff": fmt_q(c)} for e, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, obj) -> "MultiPoly":
        return cls(obj["vars"], {tuple(t["exp"]): Fraction(t["coeff"]) for t in obj["terms"]})


# ------------------------------------------------------------ series expressions
#
# A small closed set of nodes for truncated Laurent series in one variable z
# whose coefficients live in Q or in a MultiPoly ring.


class SeriesExpr:
    def shift_budget(self) -> int:
        return 0


@dataclass(frozen=True)
class Const(SeriesExpr):
    value: object  # Fraction or MultiPoly


@dataclass(frozen=True)
class ZPow(SeriesExpr):
    exponent: int


@dataclass(frozen=True)
class ExpLinear(SeriesExpr):
    """exp(t*z) with t a scalar or MultiPoly."""
    t: object


@dataclass(frozen=True)
class HalfOverSinhHalf(SeriesExpr):
    """(z/2)/sinh(z/2)."""


@dataclass(frozen=True)
class Prod(SeriesExpr):
    factors: tuple

    def __post_init__(self):
        for f in self.factors:
            _check_node(f)


@dataclass(frozen=True)
class Sum(SeriesExpr):
    terms: tuple

    def __post_init__(self):
        for f in self.terms:
            _check_node(f)


@dataclass(frozen=True)
class DiffOp(SeriesExpr):
    """Apply sum_i coeffs[i] * d^i/dz^i to `arg`."""
    coeffs: tuple
    arg: SeriesExpr

    def __post_init__(self):
        _check_node(self.arg)


_NODES = (Const, ZPow, ExpLinear, HalfOverSinhHalf, Prod, Sum, DiffOp)


def _check_node(node):
    if not isinstance(node, _NODES):
        raise TypeError(f"unsupported series node: {type(node).__name__}")


def _budget(node) -> int:
    if isinstance(node, ZPow):
        return max(0, -node.exponent)
    if isinstance(node, Prod):
        return sum(_budget(f) for f in node.factors)
    if isinstance(node, Sum):
        return max((_budget(f) for f in node.terms), default=0)
    if isinstance(node, DiffOp):
        return len(node.coeffs) - 1 + _budget(node.arg)
    return 0


def _one_like(sample):
    if isinstance(sample, MultiPoly):
        return MultiPoly.const(sample.vars, 1)
    return Fraction(1)


def _sinh_half_series(prec: int) -> list[Fraction]:
    # (z/2)/sinh(z/2) = 1 / (sum_{m>=0} (z/2)^{2m}/(2m+1)!), inverted by long division
    den = [Fraction(0)] * (prec + 1)
    fact = 1
    for m in range(prec + 1):
        if m > 0:
            fact *= (2 * m) * (2 * m + 1)
        if 2 * m <= prec:
            den[2 * m] = Fraction(1, fact * 4 ** m)
    out = [Fraction(0)] * (prec + 1)
    for i in range(prec + 1):
        s = Fraction(1 if i == 0 else 0) - sum(out[j] * den[i - j] for j in range(i))
        out[i] = s / den[0]
    return out


def _eval(node, prec: int) -> dict[int, object]:
    """Coefficients {power: coeff} valid for all powers <= prec."""
    if isinstance(node, Const):
        return {0: node.value}
    if isinstance(node, ZPow):
        return {node.exponent: Fraction(1)}
    if isinstance(node, HalfOverSinhHalf):
        return {i: c for i, c in enumerate(_sinh_half_series(max(prec, 0))) if c}
    if isinstance(node, ExpLinear):
        out = {}
        term = _one_like(node.t)
        for i in range(max(prec, 0) + 1):
            out[i] = term
            term = term * node.t * Fraction(1, i + 1)
        return out
    if isinstance(node, Sum):
        out: dict[int, object] = {}
        for t in node.terms:
            for p, c in _eval(t, prec).items():
                out[p] = out[p] + c if p in out else c
        return out
    if isinstance(node, Prod):
        pad = _budget(node)
        out = {0: Fraction(1)}
        for f in node.factors:
            fs = _eval(f, prec + pad)
            new: dict[int, object] = {}
            for p1, c1 in out.items():
                for p2, c2 in fs.items():
                    p = p1 + p2
                    if p <= prec + pad:
                        new[p] = new[p] + c1 * c2 if p in new else c1 * c2
            out = new
        return out
    if isinstance(node, DiffOp):
        base = _eval(node.arg, prec + len(node.coeffs))
        out = {}
        for order, coef in enumerate(node.coeffs):
            cur = dict(base)
            for _ in range(order):
                cur = {p - 1: c * p for p, c in cur.items() if p != 0}
            for p, c in cur.items():
                v = coef * c
                out[p] = out[p] + v if p in out else v
        return out
    raise TypeError(f"unsupported series node: {type(node).__name__}")


def series_coeff(expr: SeriesExpr, k: int):
    """Exact coefficient of z^k in the expansion of `expr`."""
    _check_node(expr)
    if k < 0:
        raise ValueError("k must be >= 0")
    vals = _eval(expr, k + _budget(expr) + 2)
    return vals.get(k, Fraction(0))


# ------------------------------------------------------------------- matrices


class ExactMatrix:
    """Dense matrix of Fractions."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Iterable[Iterable[Scalar]], ncols: int | None = None):
        self.rows = [[Fraction(x) for x in r] for r in rows]
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    @classmethod
    def zeros(cls, m: int, n: int) -> "ExactMatrix":
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, entries: Sequence[Scalar]) -> "ExactMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, s: Scalar) -> "ExactMatrix":
        s = Fraction(s)
        return ExactMatrix([[a * s for a in r] for r in self.rows], self.ncols)

    def transpose(self) -> "ExactMatrix":
        m, n = self.shape
        return ExactMatrix([[self.rows[i][j] for i in range(m)] for j in range(n)], m)

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != len(other.rows):
                raise ValueError("shape mismatch")
            cols = list(zip(*other.rows)) if other.rows else []
            out = []
            for r in self.rows:
                nz = [(k, a) for k, a in enumerate(r) if a]
                out.append([sum((a * col[k] for k, a in nz), Fraction(0)) for col in cols])
            return ExactMatrix(out, other.ncols)
        vec = list(other)
        if len(vec) != self.ncols:
            raise ValueError("shape mismatch")
        return [sum((a * x for a, x in zip(r, vec) if a and x), Fraction(0)) for r in self.rows]

    def commutator(self, other: "ExactMatrix") -> "ExactMatrix":
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def is_diagonal(self) -> bool:
        return all(not x for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def diagonal(self) -> list[Fraction]:
        return [self.rows[i][i] for i in range(min(self.shape))]

    def inverse(self) -> "ExactMatrix":
        n = len(self.rows)
        if n != self.ncols:
            raise ValueError("square matrix required")
        cols = [solve_exact(self, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
        return ExactMatrix([[cols[j][i] for j in range(n)] for i in range(n)], n)

    def to_json(self) -> dict:
        return {"rows": len(self.rows), "cols": self.ncols,
                "entries": [[fmt_q(x) for x in r] for r in self.rows]}

    @classmethod
    def from_json(cls, obj) -> "ExactMatrix":
        return cls([[Fraction(x) for x in r] for r in obj["entries"]], obj["cols"])

    def __repr__(self):
        return "ExactMatrix(" + ", ".join("[" + " ".join(fmt_q(x) for x in r) + "]" for r in self.rows) + ")"


class InconsistentSystem(ArithmeticError):
    """Raised when Ax=b has no solution; `rows` lists offending equations."""

    def __init__(self, rows: list[int]):
        super().__init__(f"inconsistent linear system; offending rows {rows}")
        self.rows = rows


class RankDeficient(ArithmeticError):
    def __init__(self, rank: int, cols: int):
        super().__init__(f"rank {rank} < {cols} unknowns")
        self.rank = rank
        self.cols = cols


def _integer_rows(A, b) -> list[list[int]]:
    out = []
    for row, rhs in zip(A, b):
        vals = [Fraction(x) for x in row] + [Fraction(rhs)]
        den = 1
        for v in vals:
            den = lcm(den, v.denominator)
        out.append([v.numerator * (den // v.denominator) for v in vals])
    return out


def bareiss_echelon(M: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int], list[int]]:
    """Fraction-free forward elimination on the first `ncols` columns of an
    integer matrix (extra columns are carried along). Returns the reduced
    rows, pivot columns and the permutation of original row indices."""
    M = [list(r) for r in M]
    order = list(range(len(M)))
    m = len(M)
    prev = 1
    r = 0
    pivots = []
    for col in range(ncols):
        piv = next((i for i in range(r, m) if M[i][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        order[r], order[piv] = order[piv], order[r]
        p = M[r][col]
        rowr = M[r]
        for i in range(r + 1, m):
            rowi = M[i]
            f = rowi[col]
            if f:
                for j in range(col, len(rowi)):
                    rowi[j] = (p * rowi[j] - f * rowr[j]) // prev
            else:
                for j in range(col, len(rowi)):
                    rowi[j] = (p * rowi[j]) // prev
        prev = p
        pivots.append(col)
        r += 1
        if r == m:
            break
    return M, pivots, order


def solve_exact(A, b: Sequence[Scalar], require_unique: bool = True) -> list[Fraction]:
    """Solve A x = b exactly (A may be overdetermined)."""
    rows = A.rows if isinstance(A, ExactMatrix) else [list(r) for r in A]
    ncols = A.ncols if isinstance(A, ExactMatrix) else (len(rows[0]) if rows else 0)
    if len(rows) != len(b):
        raise ValueError("right-hand side length mismatch")
    M, pivots, order = bareiss_echelon(_integer_rows(rows, b), ncols)
    rank = len(pivots)
    bad = sorted(order[i] for i in range(rank, len(M)) if M[i][ncols])
    if bad:
        raise InconsistentSystem(bad)
    if require_unique and rank < ncols:
        raise RankDeficient(rank, ncols)
    x = [Fraction(0)] * ncols
    for i in range(rank - 1, -1, -1):
        col = pivots[i]
        s = Fraction(M[i][ncols])
        for j in range(col + 1, ncols):
            if M[i][j] and x[j]:
                s -= M[i][j] * x[j]
        x[col] = s / M[i][col]
    return x


def rank_of(A) -> int:
    rows = A.rows if isinstance(A, ExactMatrix) else [list(r) for r in A]
    if not rows:
        return 0
    ncols = len(rows[0])
    _, pivots, _ = bareiss_echelon(_integer_rows(rows, [0] * len(rows)), ncols)
    return len(pivots)


def independent_rows(A, target: int | None = None) -> list[int]:
    """Indices of a maximal set of linearly independent rows (first-come)."""
    rows = A.rows if isinstance(A, ExactMatrix) else [list(r) for r in A]
    if not rows:
        return []
    T = [list(c) for c in zip(*rows)]  # columns of A^T are rows of A
    _, pivots, _ = bareiss_echelon(_integer_rows(T, [0] * len(T)), len(rows))
    return pivots if target is None else pivots[:target]


def content_gcd(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g


def integer_inverse(M: Sequence[Sequence[int]]) -> tuple[list[list[int]], int]:
    """Fraction-free Gauss-Jordan on [M | I]: returns (X, d) with M^{-1} = X / d.

    Raises RankDeficient for singular M.
    """
    n = len(M)
    A = [list(map(int, row)) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(M)]
    prev = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col]), None)
        if piv is None:
            raise RankDeficient(col, n)
        A[col], A[piv] = A[piv], A[col]
        rowk = A[col]
        p = rowk[col]
        for i in range(n):
            if i == col:
                continue
            rowi = A[i]
            f = rowi[col]
            if f:
                A[i] = [(p * x - f * y) // prev for x, y in zip(rowi, rowk)]
            else:
                A[i] = [(p * x) // prev for x in rowi]
        prev = p
    d = prev
    return [row[n:] for row in A], d


def rational_inverse(rows: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Inverse of a nonsingular integer matrix, as Fractions."""
    n = len(rows)
    if _flint is not None:
        M = _flint.fmpz_mat([list(map(int, r)) for r in rows])
        if M.rank() < n:
            raise RankDeficient(M.rank(), n)
        Q = _flint.fmpq_mat(M).inv()
        return [[Fraction(int(Q[i, j].p), int(Q[i, j].q)) for j in range(n)] for i in range(n)]
    X, d = integer_inverse(rows)
    return [[Fraction(x, d) for x in row] for row in X]


def first_independent_rows(rows: Sequence[Sequence[int]], target: int) -> list[int]:
    """Greedy (first-come) indices of up to `target` independent integer rows."""
    if not rows:
        return []
    if _flint is not None:
        T = _flint.fmpz_mat([list(map(int, c)) for c in zip(*rows)])
        R, _, rank = T.rref()
        piv = []
        ncols = len(rows)
        for i in range(rank):
            for j in range(ncols):
                if R[i, j] != 0:
                    piv.append(j)
                    break
        return piv[:target]
    return independent_rows(rows, target)
