"""Orthonormal system and reproducing kernels in weighted L^2 on the line.

The measure is (1/2pi) dt / (1/4 + t^2). Against it the monomials x^{it}
integrate to min(x, 1/x)^{1/2}, and the differenced powers

    psi_1 = 1,   psi_n(t) = n^{1/2 - it} - (n-1)^{1/2 - it}   (n >= 2)

form an orthonormal family. K_n is the order-n reproducing kernel; the
min-norm problem interpolates 1 at a finite set of ordinates and its optimal
value 1^T H^{-1} 1 lower-bounds the approximation distances computed in
``distance`` when the ordinates come from zeros on the critical line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from mpmath import mp, mpc, mpf

from .errors import DuplicateOrdinates, NSingular
from .exact import to_mp
from .linalg import ldl_factor, ldl_solve
from .precision import resolve_bits, working

_DUPLICATE_GUARD = "1e-9"


def _pw(k: int, w):
    # 0^w with Re(w) > 0 is 0; avoid asking mpmath about it
    return mpf(0) if k == 0 else mp.power(k, w)


def psi_eval(n: int, t, bits: Optional[int] = None):
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n == 1:
        return mpf(1)
    bits = resolve_bits(bits)
    with working(bits):
        t_mp = to_mp(t)
        if t_mp == 0:
            return mp.sqrt(n) - mp.sqrt(n - 1)
        w = mpc(mpf(1) / 2, -t_mp)
        return mp.power(n, w) - mp.power(n - 1, w)


def monomial_weighted_inner(x, bits: Optional[int] = None):
    """Integral of x^{it} against the weight: min(x, 1/x)^{1/2}."""
    bits = resolve_bits(bits)
    with working(bits):
        x_mp = to_mp(x)
        if not x_mp > 0:
            raise ValueError(f"need x > 0, got {x}")
        ratio = x_mp if x_mp <= 1 else 1 / x_mp
        return mp.sqrt(ratio)


def _four_term(a: int, b: int, sq) -> mpf:
    # sqrt(a) sqrt(b) <(a/b)^{it}>_w with the weighted inner as sq[lo]/sq[hi]
    if a == 0 or b == 0:
        return mpf(0)
    lo, hi = (a, b) if a <= b else (b, a)
    return sq[a] * sq[b] * (sq[lo] / sq[hi])


def psi_inner(n: int, m: int, bits: Optional[int] = None):
    """<psi_n, psi_m> in the weighted space; delta_{nm} up to rounding."""
    if n < 1 or m < 1:
        raise ValueError(f"need indices >= 1, got ({n}, {m})")
    bits = resolve_bits(bits)
    with working(bits):
        top = max(n, m)
        sq = {k: mp.sqrt(k) for k in {n, m, n - 1, m - 1, top} if k > 0}
        sq[0] = mpf(0)
        return (_four_term(n, m, sq) - _four_term(n, m - 1, sq)
                - _four_term(n - 1, m, sq) + _four_term(n - 1, m - 1, sq))


def psi_inner_max_deviation(n_max: int, bits: Optional[int] = None):
    """max_{n,m <= n_max} |<psi_n, psi_m> - delta_{nm}|, one shared sqrt table."""
    if n_max < 1:
        raise ValueError(f"need n_max >= 1, got {n_max}")
    bits = resolve_bits(bits)
    with working(bits):
        sq = [mpf(0)] * (n_max + 1)
        inv = [mpf(0)] * (n_max + 1)
        for k in range(1, n_max + 1):
            sq[k] = mp.sqrt(k)
            inv[k] = 1 / sq[k]

        def term(a, b):
            if a == 0 or b == 0:
                return mpf(0)
            lo, hi = (a, b) if a <= b else (b, a)
            return sq[a] * sq[b] * sq[lo] * inv[hi]

        worst = mpf(0)
        for n in range(1, n_max + 1):
            for m in range(1, n + 1):
                val = term(n, m) - term(n, m - 1) - term(n - 1, m) + term(n - 1, m - 1)
                dev = abs(val - 1) if n == m else abs(val)
                if dev > worst:
                    worst = dev
        return worst


def kernel(n: int, u, v, bits: Optional[int] = None):
    """K_n(u, v) = sum_{k<=n} psi_k(u) conj(psi_k(v))."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    bits = resolve_bits(bits)
    with working(bits):
        u_mp = to_mp(u)
        v_mp = to_mp(v)
        if u_mp == 0 and v_mp == 0:
            acc = mpf(0)
            prev = mpf(0)
            for k in range(1, n + 1):
                s = mp.sqrt(k)
                d = 1 / (s + prev)       # sqrt(k) - sqrt(k-1)
                acc = acc + d * d
                prev = s
            return acc
        if u_mp == v_mp:
            w = mpc(mpf(1) / 2, -u_mp)
            acc = mpf(0)
            prev = mpf(0)
            for k in range(1, n + 1):
                cur = _pw(k, w)
                acc = acc + abs(cur - prev) ** 2
                prev = cur
            return acc
        wu = mpc(mpf(1) / 2, -u_mp)
        wv = mpc(mpf(1) / 2, -v_mp)
        acc = mpf(0)
        pu = pv = mpf(0)
        for k in range(1, n + 1):
            cu = _pw(k, wu)
            cv = _pw(k, wv)
            acc = acc + (cu - pu) * mp.conj(cv - pv)
            pu, pv = cu, cv
        return acc


@dataclass(frozen=True)
class KernelMatrix:
    n: int
    t: tuple
    H: list


def kernel_matrix(n: int, t: Sequence, bits: Optional[int] = None) -> KernelMatrix:
    """H[i][j] = K_n(t_i, t_j) over distinct real ordinates."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not t:
        raise ValueError("ordinate list is empty")
    bits = resolve_bits(bits)
    with working(bits):
        t_mp = [to_mp(x) for x in t]
        for x in t_mp:
            if isinstance(x, mpc):
                raise ValueError(f"ordinates must be real, got {x}")
        guard = mpf(_DUPLICATE_GUARD)
        l = len(t_mp)
        for i in range(l):
            for j in range(i + 1, l):
                if abs(t_mp[i] - t_mp[j]) < guard:
                    raise DuplicateOrdinates(
                        f"ordinates {i} and {j} closer than {_DUPLICATE_GUARD}")
        ws = [mpc(mpf(1) / 2, -x) for x in t_mp]
        H = [[mpf(0)] * l for _ in range(l)]
        prev = [mpf(0)] * l
        for k in range(1, n + 1):
            cur = [_pw(k, w) for w in ws]
            psi = [cur[i] - prev[i] for i in range(l)]
            for i in range(l):
                for j in range(i, l):
                    H[i][j] = H[i][j] + psi[i] * mp.conj(psi[j])
            prev = cur
        for i in range(l):
            for j in range(i):
                H[i][j] = mp.conj(H[j][i])
        return KernelMatrix(n=n, t=tuple(t_mp), H=H)


@dataclass(frozen=True)
class MinNormSolution:
    value: mpf
    coeffs: Optional[list]
    n: int
    t: tuple


def min_norm(n: int, t: Sequence, bits: Optional[int] = None,
             with_coeffs: bool = False) -> MinNormSolution:
    """Least-norm coefficients with sum_k c_k psi_k(t_i) = 1 at each ordinate.

    The optimum is value = 1^T H^{-1} 1; it lower-bounds the squared
    approximation distances whenever the t_i are ordinates of critical-line
    zeros and H is the corresponding kernel matrix.
    """
    bits = resolve_bits(bits)
    km = kernel_matrix(n, t, bits=bits)
    with working(bits):
        f = ldl_factor(km.H, pivot=True)
        for i, d in enumerate(f.d):
            if not d > 0:
                raise NSingular(i, d)
        ones = [mpf(1)] * len(km.t)
        x = ldl_solve(f, ones)
        value = mp.re(mp.fsum(x))
        coeffs = None
        if with_coeffs:
            ws = [mpc(mpf(1) / 2, -ti) for ti in km.t]
            prev = [mpf(0)] * len(km.t)
            coeffs = []
            for k in range(1, n + 1):
                cur = [_pw(k, w) for w in ws]
                ck = mp.fsum(mp.conj(cur[i] - prev[i]) * x[i] for i in range(len(km.t)))
                coeffs.append(ck)
                prev = cur
        return MinNormSolution(value=value, coeffs=coeffs, n=n, t=km.t)


@dataclass(frozen=True)
class KernelAsymptoticsRow:
    n: int
    value: mpf
    ratio: mpf


def kernel_asymptotics_report(u, n_grid: Sequence[int],
                              bits: Optional[int] = None) -> list:
    """K_n(u, u) and K_n(u, u)/((1/4) log n) along an increasing n grid."""
    grid = [int(n) for n in n_grid]
    if not grid or any(n < 2 for n in grid) or any(a >= b for a, b in zip(grid, grid[1:])):
        raise ValueError("n_grid must be strictly increasing with entries >= 2")
    bits = resolve_bits(bits)
    targets = set(grid)
    rows = []
    with working(bits):
        u_mp = to_mp(u)
        acc = mpf(0)
        if u_mp == 0:
            prev = mpf(0)
            for k in range(1, grid[-1] + 1):
                s = mp.sqrt(k)
                d = 1 / (s + prev)
                acc = acc + d * d
                prev = s
                if k in targets:
                    rows.append(KernelAsymptoticsRow(
                        n=k, value=acc, ratio=acc / (mp.log(k) / 4)))
        else:
            w = mpc(mpf(1) / 2, -u_mp)
            prev = mpf(0)
            for k in range(1, grid[-1] + 1):
                cur = _pw(k, w)
                acc = acc + abs(cur - prev) ** 2
                prev = cur
                if k in targets:
                    rows.append(KernelAsymptoticsRow(
                        n=k, value=acc, ratio=acc / (mp.log(k) / 4)))
    return rows
