"""Dense Hermitian LDL^H factorization on mpmath scalars.

Runs at the ambient mpmath precision; callers wrap invocations in
``precision.working``. Matrices are lists of row lists holding mpf/mpc.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import NSingular


def _real(x):
    return x.real if hasattr(x, "real") and not isinstance(x, mpf) else x


def _check_square(A) -> int:
    n = len(A)
    if n == 0 or any(len(row) != n for row in A):
        raise ValueError("matrix must be square and nonempty")
    return n


@dataclass(frozen=True)
class LDLFactors:
    """P A P^T = L D L^H; perm[i] is the source index of permuted row i."""

    L: list
    d: list
    perm: list


def ldl_factor(A, pivot: bool = True) -> LDLFactors:
    n = _check_square(A)
    M = [list(row) for row in A]
    perm = list(range(n))
    L = [[mpf(1) if i == j else mpf(0) for j in range(n)] for i in range(n)]
    d = [mpf(0)] * n
    for j in range(n):
        if pivot:
            p = max(range(j, n), key=lambda i: _real(M[i][i]))
            if p != j:
                M[j], M[p] = M[p], M[j]
                for row in M:
                    row[j], row[p] = row[p], row[j]
                perm[j], perm[p] = perm[p], perm[j]
                for c in range(j):
                    L[j][c], L[p][c] = L[p][c], L[j][c]
        dj = _real(M[j][j])
        d[j] = dj
        if dj == 0:
            continue  # PSD remainder is (numerically) zero; skip the update
        for i in range(j + 1, n):
            L[i][j] = M[i][j] / dj
        for i in range(j + 1, n):
            row = M[i]
            c = L[i][j] * dj
            for k in range(j + 1, n):
                row[k] = row[k] - c * mp.conj(L[k][j])
    return LDLFactors(L=L, d=d, perm=perm)


def ldl_solve(f: LDLFactors, b):
    """Solve A x = b given factors of A."""
    n = len(f.d)
    if len(b) != n:
        raise ValueError(f"rhs length {len(b)} does not match order {n}")
    for i, dv in enumerate(f.d):
        if dv == 0:
            raise NSingular(i, dv)
    y = [b[f.perm[i]] for i in range(n)]
    z = [mpf(0)] * n
    for i in range(n):
        acc = y[i]
        for k in range(i):
            acc = acc - f.L[i][k] * z[k]
        z[i] = acc
    w = [z[i] / f.d[i] for i in range(n)]
    x = [mpf(0)] * n
    for i in reversed(range(n)):
        acc = w[i]
        for k in range(i + 1, n):
            acc = acc - mp.conj(f.L[k][i]) * x[k]
        x[i] = acc
    out = [mpf(0)] * n
    for i in range(n):
        out[f.perm[i]] = x[i]
    return out


def ldl_pivot_stream(A):
    """Unpivoted pivots d_j = det(A_j)/det(A_{j-1}) over leading minors.

    Stops after the first pivot <= 0 (the trailing minor ratios are then
    meaningless for the PSD matrices this is used on). The stopping pivot is
    included in the returned list.
    """
    n = _check_square(A)
    M = [list(row) for row in A]
    piv = []
    for j in range(n):
        dj = _real(M[j][j])
        piv.append(dj)
        if dj <= 0:
            break
        if j + 1 == n:
            break
        col = [M[i][j] / dj for i in range(j + 1, n)]
        for ii, i in enumerate(range(j + 1, n)):
            row = M[i]
            c = col[ii] * dj
            for kk, k in enumerate(range(j + 1, n)):
                row[k] = row[k] - c * mp.conj(col[kk])
    return piv


def det_from_pivots(pivots):
    out = mpf(1)
    for p in pivots:
        out = out * p
    return out
