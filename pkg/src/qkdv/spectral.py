"""Order-by-order simultaneous diagonalisation of the commuting Hamiltonians on B_n."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .boson import BosonVector, schur_basis
from .exact import ExactMatrix, fmt_q
from .hierarchy import Hierarchy
from .partitions import Partition, neighborhood, strip_pairs
from .shifted import beta, evalQ, theorem_one_eigenvalue

EPS_SCALE = Fraction(1, 24)   # tables are in powers of eps/24, public data in powers of eps


class InsufficientFamily(ArithmeticError):
    def __init__(self, lam: Partition, mu: Partition, kset):
        self.pair = (lam, mu)
        super().__init__(f"no level in {sorted(kset)} separates {lam} from {mu}; enlarge the level set")


class PerturbationInconsistency(AssertionError):
    pass


def eps_matrices(H: Hierarchy, k: int, n: int, mmax: int, c=0) -> list[ExactMatrix]:
    """[H^(0), ..., H^(mmax)]: coefficients of eps^m (the single normalisation point)."""
    dim = schur_basis(n).dim
    out = []
    for m in range(mmax + 1):
        if m > k + 1:
            out.append(ExactMatrix.zeros(dim, dim))
        else:
            out.append(H.hamiltonian(k, m, n, c).scale(EPS_SCALE ** m))
    return out


@dataclass
class EigenEntry:
    lam: Partition
    E: dict[tuple[int, int], Fraction] = field(default_factory=dict)     # (k, m) -> E_k^[m]
    r: list[list[Fraction]] = field(default_factory=list)                # r[m] in Schur coordinates

    def r_vector(self, m: int) -> BosonVector:
        return schur_basis(self.lam.size).from_schur(self.r[m])


@dataclass
class EigenData:
    n: int
    c: Fraction
    mmax: int
    kset: tuple[int, ...]
    ks: tuple[int, ...]
    entries: list[EigenEntry]

    def entry(self, lam: Partition) -> EigenEntry:
        for e in self.entries:
            if e.lam == lam:
                return e
        raise KeyError(lam)

    def c_table(self) -> dict[tuple[Partition, Partition], Fraction]:
        """c(lambda, mu) with r^[1]_lambda = (1/24) sum c(lambda, mu) s_mu."""
        parts = schur_basis(self.n).partitions
        out = {}
        for e in self.entries:
            for mu, v in zip(parts, e.r[1] if self.mmax >= 1 else []):
                if v:
                    out[(e.lam, mu)] = 24 * v
        return out

    def to_json(self) -> dict:
        parts = schur_basis(self.n).partitions
        ents = []
        for e in self.entries:
            ents.append({
                "lambda": list(e.lam.parts),
                "E": {f"{k},{m}": fmt_q(v) for (k, m), v in sorted(e.E.items())},
                "r": {str(m): {"degree": self.n, "basis": "schur",
                               "terms": [{"key": list(mu.parts), "coeff": fmt_q(v)}
                                         for mu, v in zip(parts, vec) if v]}
                      for m, vec in enumerate(e.r)},
            })
        return {"n": self.n, "c": fmt_q(self.c), "mMax": self.mmax, "kSet": list(self.kset),
                "entries": ents}


def perturb(n: int, mmax: int, kset: Iterable[int] = (1, 2, 3), ks: Iterable[int] | None = None,
            c=0, hierarchy: Hierarchy | None = None, check: bool = True) -> EigenData:
    """Eigenvalues E_k^[m](lambda; c) for k in `ks` and eigenvectors r_lambda^[m], m <= mmax."""
    H = hierarchy or Hierarchy()
    c = Fraction(c)
    kset = tuple(sorted(set(kset)))
    ks = tuple(sorted(set(ks if ks is not None else kset) | set(kset)))
    sb = schur_basis(n)
    parts = sb.partitions
    dim = sb.dim
    mats = {k: eps_matrices(H, k, n, mmax, c) for k in ks}
    for k in ks:
        if not mats[k][0].is_diagonal():
            raise PerturbationInconsistency(f"zeroth-order Hamiltonian of level {k} is not diagonal")
    diag = {k: mats[k][0].diagonal() for k in ks}

    entries = []
    for li, lam in enumerate(parts):
        r = [[Fraction(int(i == li)) for i in range(dim)]]
        E = {k: [diag[k][li]] for k in ks}
        for m in range(1, mmax + 1):
            # S_k = sum_{i=1}^m H_k^(i) r^(m-i)
            S = {}
            for k in ks:
                acc = [Fraction(0)] * dim
                for i in range(1, m + 1):
                    v = mats[k][i] @ r[m - i]
                    acc = [a + b for a, b in zip(acc, v)]
                S[k] = acc
            for k in ks:
                E[k].append(S[k][li])
            new = [Fraction(0)] * dim
            for mi, mu in enumerate(parts):
                if mi == li:
                    continue
                val = None
                for k in kset:
                    rhs = S[k][mi] - sum((E[k][i] * r[m - i][mi] for i in range(1, m)), Fraction(0))
                    gap = diag[k][li] - diag[k][mi]
                    if gap:
                        cand = rhs / gap
                        if val is None:
                            val = cand
                        elif cand != val:
                            raise PerturbationInconsistency(
                                f"levels disagree on <s_{mu}, r^[{m}]_{lam}>: {val} vs {cand}")
                    elif rhs and check:
                        raise PerturbationInconsistency(
                            f"degenerate level {k} equation violated for {lam}, {mu} at order {m}")
                if val is None:
                    raise InsufficientFamily(lam, mu, kset)
                new[mi] = val
            r.append(new)
        ent = EigenEntry(lam, {(k, m): E[k][m] for k in ks for m in range(mmax + 1)}, r)
        entries.append(ent)
    data = EigenData(n, c, mmax, kset, ks, entries)
    if check:
        check_residual(data, mats)
    return data


def check_residual(data: EigenData, mats) -> None:
    """sum_{i+j=m} (H^(i) - E^(i)) r^(j) = 0 for every level, order and lambda."""
    for e in data.entries:
        for k in data.ks:
            for m in range(data.mmax + 1):
                acc = [Fraction(0)] * len(e.r[0])
                for i in range(m + 1):
                    v = mats[k][i] @ e.r[m - i]
                    Ei = e.E[(k, i)]
                    acc = [a + b - Ei * x for a, b, x in zip(acc, v, e.r[m - i])]
                if any(acc):
                    raise PerturbationInconsistency(f"eigen-residual at {e.lam}, level {k}, order {m}")
        for m in range(1, data.mmax + 1):
            li = schur_basis(data.n).index[e.lam]
            if e.r[m][li]:
                raise PerturbationInconsistency(f"gauge violated at {e.lam}, order {m}")


# ------------------------------------------------------------------ theorems


def theorem1_value(k: int, lam: Partition, c=0) -> Fraction:
    if Fraction(c) == 0:
        return (2 * evalQ(2, lam) * evalQ(k + 1, lam) + k * (k + 3) * evalQ(k + 3, lam)) / 24
    return theorem_one_eigenvalue(k)(lam, c)


@dataclass
class Report:
    name: str
    checked: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.checked > 0

    def to_json(self) -> dict:
        return {"name": self.name, "checked": self.checked, "ok": self.ok,
                "mismatches": [[str(x) for x in m] for m in self.mismatches]}


def verify_theorem1(n: int, kmax: int, c=0, hierarchy: Hierarchy | None = None) -> Report:
    rep = Report(f"first-order eigenvalues, n={n}, k<={kmax}", 0)
    data = perturb(n, 1, ks=range(0, kmax + 1), c=c, hierarchy=hierarchy)
    for e in data.entries:
        for k in range(0, kmax + 1):
            rep.checked += 1
            want = theorem1_value(k, e.lam, c)
            got = e.E[(k, 1)]
            if got != want:
                rep.mismatches.append((e.lam, k, got, want))
    return rep


def theorem2_vector(lam: Partition) -> dict[Partition, Fraction]:
    """Closed form of the first-order eigenvector correction in Schur coordinates."""
    out = {}
    for mu, _ in neighborhood(lam):
        sp = strip_pairs(lam, mu)
        a, b = sp.g1.size, sp.g2.size
        sign = (-1) ** (sp.g1.height + sp.g1p.height)
        out[mu] = Fraction(sp.w * sign, 12) * (Fraction(a, b) - Fraction(b, a))
    return out


def verify_theorem2(n: int, hierarchy: Hierarchy | None = None, kset=(1, 2, 3)) -> Report:
    rep = Report(f"first-order eigenvectors, n={n}", 0)
    data = perturb(n, 1, kset=kset, hierarchy=hierarchy)
    parts = schur_basis(n).partitions
    for e in data.entries:
        want = theorem2_vector(e.lam)
        for mu, got in zip(parts, e.r[1]):
            rep.checked += 1
            if got != want.get(mu, 0):
                rep.mismatches.append((e.lam, mu, got, want.get(mu, 0)))
    return rep


# ---------------------------------------------------------------- Hodge


@dataclass(frozen=True)
class HodgeResult:
    g: int
    s: int
    value: Fraction
    label: str    # "theorem" (constant of the recursion table) or "conjectural"

    def to_json(self):
        return {"g": self.g, "s": self.s, "value": fmt_q(self.value), "label": self.label}


def hodge_closed_form_s1(g: int) -> Fraction:
    return Fraction((-1) ** g, 24) * (2 * g * (2 * g - 3) * beta(2 * g) - beta(2 * g - 2) / 12)


def hodge_integral(g: int, s: int, hierarchy: Hierarchy | None = None, source: str = "tables") -> HodgeResult:
    """(-1)^g E^[s]_{2g-2-s}(empty; 0): integral of lambda_s lambda_g psi^{2g-2-s} over M_{g,1}."""
    if g < 2 or not 1 <= s < g:
        raise ValueError("need g >= 2 and 1 <= s < g")
    k = 2 * g - 2 - s
    if k < 0:
        raise ValueError("dimension mismatch")
    if source == "tables":
        H = hierarchy or Hierarchy()
        t = H.table(k, s)
        const = t.constant or Fraction(0)
        return HodgeResult(g, s, (-1) ** g * const * EPS_SCALE ** s, "theorem")
    if source == "conjecture":
        from .lab import conjectural_eigenvalue
        val = conjectural_eigenvalue(k, s, Partition(()))
        return HodgeResult(g, s, (-1) ** g * val, "conjectural")
    raise ValueError(f"unknown source {source!r}")
