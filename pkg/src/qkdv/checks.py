"""Matrix-level verifiers shared by the CLI and the tests."""
from __future__ import annotations

from fractions import Fraction

from .boson import schur_basis
from .exact import ExactMatrix
from .fermion import ghat0_matrix, ghat1_matrix
from .hierarchy import Hierarchy
from .shifted import evalQ
from .spectral import Report


def verify_dubrovin(kmax: int, nmax: int, hierarchy: Hierarchy | None = None) -> Report:
    """Order-zero Hamiltonians are diagonal in the Schur basis with entries Q_{k+2}."""
    H = hierarchy or Hierarchy()
    rep = Report(f"order-zero spectrum, k<={kmax}, n<={nmax}", 0)
    for k in range(kmax + 1):
        for n in range(nmax + 1):
            M = H.hamiltonian(k, 0, n)
            rep.checked += 1
            want = ExactMatrix.zeros(*M.shape)
            for i, lam in enumerate(schur_basis(n).partitions):
                want.rows[i][i] = evalQ(k + 2, lam)
            if M != want:
                rep.mismatches.append((k, n))
    return rep


def verify_oracle(kmax: int, nmax: int, hierarchy: Hierarchy | None = None, c=0) -> Report:
    """Recursion-derived orders 0 and 1 against the fermionic closed forms."""
    H = hierarchy or Hierarchy()
    rep = Report(f"recursion vs fermionic forms, k<={kmax}, n<={nmax}", 0)
    for k in range(kmax + 1):
        for n in range(nmax + 1):
            rep.checked += 1
            if H.hamiltonian(k, 0, n, c) != ghat0_matrix(k, n, c):
                rep.mismatches.append((k, n, 0))
            if Fraction(c) == 0:
                rep.checked += 1
                if H.hamiltonian(k, 1, n) != ghat1_matrix(k, n):
                    rep.mismatches.append((k, n, 1))
    return rep


def verify_commute(kmax: int, nmax: int, order: int | None = None, hierarchy: Hierarchy | None = None,
                   c=0) -> Report:
    """sum_{i+j=m} [H_k^(i), H_l^(j)] = 0 for all m up to `order` (default: every computed order)."""
    H = hierarchy or Hierarchy()
    rep = Report(f"commutativity, k,l<={kmax}, n<={nmax}", 0)
    for n in range(nmax + 1):
        mats = {k: [H.hamiltonian(k, j, n, c) for j in range(k + 2)] for k in range(kmax + 1)}
        for k in range(kmax + 1):
            for l in range(k + 1, kmax + 1):
                top = k + l + 2 if order is None else order
                for m in range(top + 1):
                    acc = None
                    for i in range(max(0, m - l - 1), min(m, k + 1) + 1):
                        term = mats[k][i].commutator(mats[l][m - i])
                        acc = term if acc is None else acc + term
                    rep.checked += 1
                    if acc is not None and not acc.is_zero():
                        rep.mismatches.append((k, l, n, m))
    return rep
