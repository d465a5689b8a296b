"""Fitting computed eigenvalues in Q[c, Q_2, Q_3, ...], the f_{D,nu}(k) polynomials,
and q-brackets against level-one quasimodular forms."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .exact import (InconsistentSystem, MultiPoly, RankDeficient, fmt_q, parse_q, solve_exact)
from .hierarchy import Hierarchy
from .kernels import moments_by_size
from .partitions import Partition, partition_tuples
from .shifted import QExpr, basis_monomials, bernoulli, beta, evalQ, evalQExpr


class IncreaseN(ArithmeticError):
    """The evaluation matrix on the available partitions is rank deficient."""


@dataclass(frozen=True)
class Falsified:
    witness: Partition
    detail: str = ""

    def __bool__(self):
        return False


# ------------------------------------------------------------- fits in Lambda*


def fit_shifted_symmetric(values: dict[Partition, Fraction], weight: int, with_c: bool = False):
    """Unique QExpr of the given weight matching every value, or Falsified."""
    if with_c:
        raise ValueError("values carry no c-dependence; fit at c = 0")
    monos = basis_monomials(weight, with_c)
    pts = sorted(values, key=lambda l: (l.size, l.parts))
    if not monos:
        bad = next((l for l in pts if values[l]), None)
        return QExpr() if bad is None else Falsified(bad, "nonzero value in odd weight")
    A = [[evalQExpr(QExpr({m: 1}), lam) for m in monos] for lam in pts]
    b = [Fraction(values[lam]) for lam in pts]
    try:
        x = solve_exact(A, b)
    except RankDeficient as e:
        raise IncreaseN(f"weight {weight}: rank {e.rank} < {e.cols} on partitions of size "
                        f"<= {max(l.size for l in pts) if pts else 0}; increase N") from None
    except InconsistentSystem as e:
        return Falsified(pts[e.rows[0]], "no weight-homogeneous element matches")
    return QExpr(dict(zip(monos, x)))


def _perturb_job(args):
    from .spectral import perturb
    n, mmax, kmax, kset, cache = args
    data = perturb(n, mmax, kset=kset, ks=range(0, kmax + 1), hierarchy=Hierarchy(cache_dir=cache))
    return n, [(e.lam.parts, {key: v for key, v in e.E.items()}) for e in data.entries]


def eigenvalue_tables(kmax: int, mmax: int, nmax: int, kset=(1, 2, 3), cache=None, jobs: int = 1):
    """{(k, m): {lam: E_k^[m](lam; 0)}} for |lam| <= nmax."""
    tasks = [(n, mmax, kmax, tuple(kset), cache) for n in range(nmax + 1)]
    if jobs > 1:
        # make sure the tables exist once, not once per worker
        H = Hierarchy(cache_dir=cache)
        for k in range(kmax + 1):
            for j in range(min(mmax, k + 1) + 1):
                H.table(k, j)
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_perturb_job, tasks))
    else:
        results = [_perturb_job(t) for t in tasks]
    out: dict[tuple[int, int], dict[Partition, Fraction]] = {}
    for _, rows in sorted(results):
        for parts, E in rows:
            lam = Partition(parts)
            for (k, m), v in E.items():
                if k <= kmax:
                    out.setdefault((k, m), {})[lam] = v
    return out


def fit_eigenvalues(tables, kmax: int, mmax: int) -> dict[tuple[int, int], object]:
    return {(k, m): fit_shifted_symmetric(tables[(k, m)], k + 2 + m)
            for k in range(kmax + 1) for m in range(mmax + 1)}


# ------------------------------------------------------------- f_{D,nu}(k)


def poly_interpolate(xs, ys) -> list[Fraction]:
    """Ascending coefficients of the interpolating polynomial (Newton form)."""
    xs = [Fraction(x) for x in xs]
    coef = [Fraction(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # out = out * (x - xs[i]) + coef[i]
        nxt = [Fraction(0)] * n
        for d in range(n - 1):
            nxt[d + 1] += out[d]
            nxt[d] -= xs[i] * out[d]
        nxt[0] += coef[i]
        out = nxt
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def poly_eval(coeffs, x) -> Fraction:
    acc = Fraction(0)
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def poly_degree(coeffs) -> int:
    d = len(coeffs) - 1
    while d >= 0 and coeffs[d] == 0:
        d -= 1
    return d


def designated_pairs(m: int) -> list[tuple[tuple[int, ...], int]]:
    """All (nu, D) with D + |nu| = m."""
    return [(nu, m - s) for s in range(m + 1) for nu in partition_tuples(s)]


def designated_monomial(k: int, D: int, nu: tuple[int, ...]):
    """Canonical monomial Q_{k+D+2-l(nu)} prod Q_{nu_i+1}; None when it vanishes or is undefined."""
    a = k + D + 2 - len(nu)
    if a < 0:
        return None
    q = QExpr.Q(a, *(x + 1 for x in nu))
    if not q.terms:
        return None
    return next(iter(q.terms))


def identifiable(k: int, m: int) -> dict[tuple, tuple]:
    """(nu, D) -> monomial for the pairs whose coefficient can be read off at this k."""
    monos = {}
    for nu, D in designated_pairs(m):
        mono = designated_monomial(k, D, nu)
        if mono is not None:
            monos.setdefault(mono, []).append((nu, D))
    return {owners[0]: mono for mono, owners in monos.items() if len(owners) == 1}


@dataclass
class FitRecord:
    nu: tuple[int, ...]
    D: int
    poly: list[Fraction]
    ks: list[int]
    degree: int
    status: str            # EXACT | FALSIFIED | UNDERDETERMINED
    note: str = ""

    def __call__(self, k) -> Fraction:
        return poly_eval(self.poly, k)

    def to_json(self) -> dict:
        return {"nu": list(self.nu), "D": self.D, "poly": [fmt_q(c) for c in self.poly],
                "kRange": self.ks, "degree": self.degree, "status": self.status, "note": self.note}

    @classmethod
    def from_json(cls, obj) -> "FitRecord":
        return cls(tuple(obj["nu"]), obj["D"], [parse_q(c) for c in obj["poly"]], list(obj["kRange"]),
                   obj["degree"], obj["status"], obj.get("note", ""))


@dataclass
class ShapeReport:
    m: int
    checked: list[int] = field(default_factory=list)
    violations: list[tuple] = field(default_factory=list)   # (k, monomial, coeff)

    @property
    def ok(self):
        return not self.violations


def shape_check(fits: dict[int, QExpr], m: int) -> ShapeReport:
    """Every monomial in the fitted E_k^[m] must be one of the designated ones."""
    rep = ShapeReport(m)
    for k, f in sorted(fits.items()):
        if not isinstance(f, QExpr):
            rep.violations.append((k, None, "fit falsified"))
            continue
        rep.checked.append(k)
        allowed = {designated_monomial(k, D, nu) for nu, D in designated_pairs(m)}
        for mono, v in f.terms.items():
            if mono not in allowed:
                rep.violations.append((k, mono, v))
    return rep


def fit_fdnu(fits: dict[int, QExpr], m: int) -> list[FitRecord]:
    """Interpolate the coefficient of every designated monomial across k."""
    out = []
    for nu, D in designated_pairs(m):
        pts = []
        for k in sorted(fits):
            f = fits[k]
            if not isinstance(f, QExpr):
                continue
            mono = identifiable(k, m).get((nu, D))
            if mono is not None:
                pts.append((k, f.coeff(mono)))
        ks = [k for k, _ in pts]
        if not pts:
            out.append(FitRecord(nu, D, [], ks, -1, "UNDERDETERMINED", "no usable k"))
            continue
        poly = poly_interpolate(ks, [v for _, v in pts])
        deg = poly_degree(poly)
        if deg > 2 * D:
            status, note = "FALSIFIED", f"observed degree {deg} > {2 * D}"
        elif len(pts) < 2 * D + 2:
            status, note = "UNDERDETERMINED", f"{len(pts)} points for degree <= {2 * D}; no surplus"
        else:
            status, note = "EXACT", f"{len(pts) - 2 * D - 1} surplus points verified"
        out.append(FitRecord(nu, D, poly, ks, deg, status, note))
    return out


def records_csv(records: list[FitRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["nu", "D", "poly", "degree", "status", "kRange"])
    for r in records:
        w.writerow([" ".join(map(str, r.nu)) or "-", r.D, " ".join(fmt_q(c) for c in r.poly),
                    r.degree, r.status, f"{min(r.ks)}..{max(r.ks)}" if r.ks else ""])
    return buf.getvalue()


# --------------------------------------------------------------- reference rows

# (nu, D, denominator, integer polynomial in k)
_REFERENCE_ROWS = [
    ((), 0, 1, "1"),
    ((), 1, 24, "k*(k+3)"),
    ((), 2, 3456, "k*(k+4)*(3*k**2+16*k+17)"),
    ((), 3, 1244160, "k*(k+5)*(15*k**4+210*k**3+896*k**2+1405*k+50)"),
    ((), 4, 597196800, "k*(k+6)*(75*k**6+1950*k**5+17570*k**4+68042*k**3+89913*k**2-100568*k-277382)"),
    ((), 5, 300987187200, "k*(k+7)*(315*k**8+13020*k**7+199920*k**6+1433012*k**5+4539665*k**4"
                          "+142128*k**3-39506516*k**2-99890840*k-59164224)"),
    ((1,), 0, 12, "1"),
    ((1,), 1, 288, "k**2+2*k-1"),
    ((1,), 2, 207360, "(k+1)*(15*k**3+95*k**2-148*k-616)"),
    ((1,), 3, 14929920, "15*k**6+240*k**5+467*k**4-5229*k**3-24476*k**2-33159*k-7482"),
    ((1,), 4, 50164531200, "525*k**8+14700*k**7+91910*k**6-448826*k**5-5919635*k**4"
                           "-17900130*k**3-11934720*k**2+25552736*k+32402640"),
    ((2,), 0, 288, "1"),
    ((2,), 1, 103680, "15*k**2+323*k+278"),
    ((2,), 2, 4976640, "15*k**4+696*k**3+3170*k**2+3631*k-30"),
    ((2,), 3, 2508226560, "105*k**6+7833*k**5+85309*k**4+27485*k**3-1345564*k**2-3262016*k-1993680"),
    ((1, 1), 0, 288, "1"),
    ((1, 1), 1, 6912, "k*(k+1)"),
    ((1, 1), 2, 4976640, "15*k**4+80*k**3-421*k**2-486*k-60"),
    ((1, 1), 3, 358318080, "15*k**6+195*k**5-832*k**4-9599*k**3-24029*k**2-22834*k-4056"),
    ((3,), 0, 6912, "-1"),
    ((3,), 1, 165888, "-k*(k+1)"),
    ((3,), 2, 119439360, "-15*k**4-80*k**3+421*k**2+486*k+60"),
    ((2, 1), 0, 3456, "1"),
    ((2, 1), 1, 1244160, "15*k**2+308*k+30"),
    ((2, 1), 2, 59719680, "15*k**4+666*k**3+1690*k**2+2271*k+1052"),
    ((1, 1, 1), 0, 10368, "1"),
    ((1, 1, 1), 1, 248832, "k**2+3"),
    ((1, 1, 1), 2, 179159040, "15*k**4+50*k**3-699*k**2+994*k+60"),
    ((4,), 0, 829440, "-967"),
    ((4,), 1, 418037760, "-20307*k**2-290329*k-229408"),
    ((3, 1), 0, 622080, "-109"),
    ((3, 1), 1, 29859840, "-218*k**2+1247*k-1488"),
    ((2, 2), 0, 165888, "1"),
    ((2, 2), 1, 59719680, "15*k**2+601*k+1232"),
    ((2, 1, 1), 0, 82944, "1"),
    ((2, 1, 1), 1, 29859840, "15*k**2+293*k-188"),
    ((1, 1, 1, 1), 0, 497664, "1"),
    ((1, 1, 1, 1), 1, 11943936, "k**2-k+8"),
    ((5,), 0, 2903040, "253"),
    ((4, 1), 0, 238878720, "967"),
    ((3, 2), 0, 8599633920, "-109"),
    ((3, 1, 1), 0, 206391214080, "109"),
    ((2, 2, 1), 0, 660451885056, "1"),
    ((2, 1, 1, 1), 0, 23776267862016, "-1"),
    ((1, 1, 1, 1, 1), 0, 5706304286883840, "1"),
]


def _kpoly(expr: str) -> list[Fraction]:
    k = MultiPoly.var(("k",), "k")
    p = eval(expr, {"__builtins__": {}}, {"k": k})  # trusted literals above
    if isinstance(p, int):
        p = MultiPoly.const(("k",), p)
    deg = max((e[0] for e in p.terms), default=0)
    return [p.terms.get((d,), Fraction(0)) for d in range(deg + 1)]


@lru_cache(maxsize=None)
def reference_table() -> dict[tuple[tuple[int, ...], int], tuple[Fraction, ...]]:
    return {(nu, D): tuple(c / den for c in _kpoly(expr)) for nu, D, den, expr in _REFERENCE_ROWS}


@dataclass
class ReferenceRow:
    nu: tuple[int, ...]
    D: int
    expected: tuple[Fraction, ...]
    record: FitRecord | None

    @property
    def status(self) -> str:
        if self.record is None or self.record.status == "UNDERDETERMINED":
            return "NOT-COVERED"
        if self.record.status == "FALSIFIED":
            return "FAIL"
        return "PASS" if list(self.expected) == _trim(self.record.poly) else "FAIL"

    def to_json(self):
        return {"nu": list(self.nu), "D": self.D, "expected": [fmt_q(c) for c in self.expected],
                "fitted": self.record.to_json() if self.record else None, "status": self.status}


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def compare_reference(records: list[FitRecord], max_order: int) -> list[ReferenceRow]:
    by = {(r.nu, r.D): r for r in records}
    return [ReferenceRow(nu, D, coeffs, by.get((nu, D)))
            for (nu, D), coeffs in reference_table().items() if D + sum(nu) <= max_order]


def conjectural_eigenvalue(k: int, m: int, lam: Partition, records: list[FitRecord] | None = None) -> Fraction:
    """E_k^[m](lam; 0) assembled from f_{D,nu}(k); conjecture-dependent."""
    polys = ({(r.nu, r.D): r.poly for r in records} if records is not None else reference_table())
    total = Fraction(0)
    for nu, D in designated_pairs(m):
        if (nu, D) not in polys:
            raise KeyError(f"no polynomial for nu={nu}, D={D}")
        a = k + D + 2 - len(nu)
        if a < 0:
            raise ValueError(f"index {a} < 0 at k={k}")
        f = poly_eval(polys[(nu, D)], k)
        if f:
            term = f * evalQ(a, lam)
            for x in nu:
                term *= evalQ(x + 1, lam)
            total += term
    return total


def hodge_lambda2_closed(g: int) -> Fraction:
    """Closed form for the lambda_2 lambda_g psi^{2g-4} integral implied by the order-2 formula (g > 2)."""
    return Fraction((-1) ** g, 576) * (beta(2 * g - 4) / 288
                                      - Fraction(4 * g * g - 12 * g + 7, 12) * beta(2 * g - 2)
                                      + Fraction(2 * g * (g - 2) * (12 * g * g - 16 * g + 1), 3) * beta(2 * g))


# ------------------------------------------------------------------ q-series


@dataclass(frozen=True)
class QSeries:
    coeffs: tuple[Fraction, ...]   # q^0 .. q^N
    weight: int | None = None

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "QSeries") -> "QSeries":
        n = min(self.N, other.N)
        return QSeries(tuple(a + b for a, b in zip(self.coeffs[:n + 1], other.coeffs[:n + 1])))

    def scale(self, s) -> "QSeries":
        return QSeries(tuple(a * s for a in self.coeffs), self.weight)

    def __mul__(self, other: "QSeries") -> "QSeries":
        n = min(self.N, other.N)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[:n + 1]):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return QSeries(tuple(out))

    def to_json(self):
        return {"N": self.N, "weight": self.weight, "coeffs": [fmt_q(c) for c in self.coeffs]}


def one(N) -> QSeries:
    return QSeries(tuple([Fraction(1)] + [Fraction(0)] * N), 0)


@lru_cache(maxsize=None)
def euler_product(N: int) -> tuple[int, ...]:
    """prod_{n>=1} (1 - q^n) to order q^N."""
    c = [1] + [0] * N
    for n in range(1, N + 1):
        for i in range(N, n - 1, -1):
            c[i] -= c[i - n]
    return tuple(c)


def sigma(r: int, n: int) -> int:
    return sum(d ** r for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def eisenstein(w: int, N: int) -> QSeries:
    """E_w = 1 - (2w / B_w) sum sigma_{w-1}(n) q^n."""
    if w < 2 or w % 2:
        raise ValueError("weight must be even and >= 2")
    f = -Fraction(2 * w) / bernoulli(w)
    return QSeries(tuple([Fraction(1)] + [f * sigma(w - 1, n) for n in range(1, N + 1)]), w)


@lru_cache(maxsize=None)
def _moment_rows(N: int, emax: int):
    if emax and (2 * N) ** emax * N >= 2 ** 62:
        raise OverflowError("moments exceed 64-bit range; lower the truncation")
    return moments_by_size(N, emax)


def _moment_sums(N: int, exps: list[tuple[int, ...]]) -> dict[tuple[int, ...], list[int]]:
    """sum over |lam| = n of prod_e t_e(lam), for every exponent multiset."""
    emax = max((max(e) for e in exps if e), default=0)
    rows = _moment_rows(N, emax)
    out = {e: [0] * (N + 1) for e in exps}
    for n in range(N + 1):
        for t in rows[n]:
            for e in exps:
                p = 1
                for x in e:
                    p *= t[x]
                out[e][n] += p
    return out


def q_bracket(f, N: int) -> QSeries:
    """<f>_q to order q^N; f is a c-free QExpr or a dict {partition: value} covering |lam| <= N."""
    if isinstance(f, QExpr):
        if any(e for e, _ in f.terms):
            raise ValueError("q-bracket is taken at c = 0")
        # Q_i = beta_i + t_{i-1} / (2^{i-1} (i-1)!)
        expanded: dict[tuple[int, ...], Fraction] = {}
        for (_, idx), v in f.terms.items():
            for mask in range(1 << len(idx)):
                coef = Fraction(v)
                ex = []
                for b, i in enumerate(idx):
                    if mask >> b & 1:
                        coef /= 2 ** (i - 1) * factorial(i - 1)
                        ex.append(i - 1)
                    else:
                        coef *= beta(i)
                if coef:
                    key = tuple(sorted(ex))
                    expanded[key] = expanded.get(key, 0) + coef
        sums = _moment_sums(N, list(expanded))
        num = [sum((c * sums[e][n] for e, c in expanded.items()), Fraction(0)) for n in range(N + 1)]
        w = f.weight
    else:
        num = [Fraction(0)] * (N + 1)
        for n in range(N + 1):
            for lam in _parts_of(n):
                if lam not in f:
                    raise KeyError(f"value missing for {lam}")
                num[n] += Fraction(f[lam])
        w = None
    e = euler_product(N)
    out = [sum((num[i] * e[n - i] for i in range(n + 1)), Fraction(0)) for n in range(N + 1)]
    return QSeries(tuple(out), w)


def _parts_of(n):
    return [Partition(p) for p in partition_tuples(n)]


class Underdetermined(ValueError):
    pass


def eisenstein_monomials(w: int) -> list[tuple[int, int, int]]:
    if w < 0 or w % 2:
        return []
    return [(a, b, c) for c in range(w // 6 + 1) for b in range((w - 6 * c) // 4 + 1)
            for a in [(w - 6 * c - 4 * b) // 2]]


@dataclass
class QuasimodularResult:
    ok: bool
    weight: int
    N: int
    dim: int
    decomposition: dict[tuple[int, int, int], Fraction]

    def to_json(self):
        return {"ok": self.ok, "weight": self.weight, "N": self.N, "dim": self.dim,
                "decomposition": [{"E2": a, "E4": b, "E6": c, "coeff": fmt_q(v)}
                                  for (a, b, c), v in sorted(self.decomposition.items())]}


MARGIN = 10


def quasimodular_check(s: QSeries, w: int, N: int | None = None) -> QuasimodularResult:
    """Express s in E2^a E4^b E6^c (weight w) and verify every remaining coefficient."""
    N = s.N if N is None else N
    if N > s.N:
        raise Underdetermined(f"series known to q^{s.N} only")
    basis = eisenstein_monomials(w)
    dim = len(basis)
    if N <= dim + MARGIN:
        raise Underdetermined(f"N={N} too small for dimension {dim} plus margin {MARGIN}")
    target = list(s.coeffs[:N + 1])
    if not basis:
        return QuasimodularResult(not any(target), w, N, 0, {})
    cols = []
    for a, b, c in basis:
        p = one(N)
        for _ in range(a):
            p = p * eisenstein(2, N)
        for _ in range(b):
            p = p * eisenstein(4, N)
        for _ in range(c):
            p = p * eisenstein(6, N)
        cols.append(p.coeffs)
    A = [[col[n] for col in cols] for n in range(N + 1)]
    try:
        x = solve_exact(A, target)
    except InconsistentSystem:
        return QuasimodularResult(False, w, N, dim, {})
    return QuasimodularResult(True, w, N, dim, {m: v for m, v in zip(basis, x) if v})
