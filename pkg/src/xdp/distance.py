"""Approximation distances in L^2(0,1].

The generators are rho_k(x) = kappa_r(1/(k x)), step functions supported on
(0, 1/k]. Every inner product is a finite sum over the common breakpoint
partition, with exact rational breakpoints; when the kappa profile itself is
exact the Gram data is computed in Gaussian-rational arithmetic and rounded
once at the end.

d_{n,r}^2 = min_b || 1 - sum_{k<=n} b_k rho_k ||^2 = 1 - g* G^{-1} g, and by
the determinant lemma equally det(G - g g*)/det(G), which yields the whole
profile n = 1..n_max from two unpivoted pivot streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from mpmath import mp, mpf

from .dpcore import DirichletPolynomial, KappaProfile, dp_eval, kappa_partial_sums
from .errors import NSingular, PrecisionExhausted
from .exact import GaussianRational, as_fraction, fraction_to_mpf, to_mp
from .linalg import LDLFactors, ldl_factor, ldl_pivot_stream
from .precision import resolve_bits, working

_ESCALATION_LIMIT = 3


# =========================================================================
# inner products
# =========================================================================

def _pair_inner(prof: KappaProfile, j: int, k: int):
    """<rho_j, rho_k>; GaussianRational when the profile is exact, else mp."""
    m = prof.m
    S = prof.S
    top = Fraction(1, max(j, k))
    bot = Fraction(1, m * max(j, k))
    pts = sorted(p for p in ({Fraction(1, j * a) for a in range(1, m + 1)}
                             | {Fraction(1, k * a) for a in range(1, m + 1)})
                 if bot <= p <= top)
    if prof.exact:
        tail = S[m - 1] * S[m - 1].conjugate()
        total = tail * bot
        for lo, hi in zip(pts, pts[1:]):
            mid = (lo + hi) / 2
            a = min(int(1 / (j * mid)), m)
            b = min(int(1 / (k * mid)), m)
            total = total + S[a - 1] * S[b - 1].conjugate() * (hi - lo)
        return total
    total = S[m - 1] * mp.conj(S[m - 1]) * fraction_to_mpf(bot)
    for lo, hi in zip(pts, pts[1:]):
        mid = (lo + hi) / 2
        a = min(int(1 / (j * mid)), m)
        b = min(int(1 / (k * mid)), m)
        total = total + S[a - 1] * mp.conj(S[b - 1]) * fraction_to_mpf(hi - lo)
    return total


def _indicator_inner_profile(prof: KappaProfile, k: int):
    """<rho_k, 1> = (1/k) [sum_{a<m} S_a (1/a - 1/(a+1)) + S_m / m]."""
    m = prof.m
    S = prof.S
    if prof.exact:
        total = S[m - 1] * Fraction(1, m)
        for a in range(1, m):
            total = total + S[a - 1] * (Fraction(1, a) - Fraction(1, a + 1))
        return total * Fraction(1, k)
    total = S[m - 1] / m
    for a in range(1, m):
        total = total + S[a - 1] * (fraction_to_mpf(Fraction(1, a) - Fraction(1, a + 1)))
    return total / k


def rho_inner(P: DirichletPolynomial, r, j: int, k: int, bits: Optional[int] = None):
    """<rho_j, rho_k> at the requested precision."""
    if j < 1 or k < 1:
        raise ValueError(f"generator indices must be >= 1, got ({j}, {k})")
    bits = resolve_bits(bits)
    prof = kappa_partial_sums(P, r, bits=bits)
    with working(bits):
        v = _pair_inner(prof, j, k)
        return to_mp(v) if isinstance(v, GaussianRational) else v


def indicator_inner(P: DirichletPolynomial, r, k: int, bits: Optional[int] = None):
    """<rho_k, 1> at the requested precision."""
    if k < 1:
        raise ValueError(f"generator index must be >= 1, got {k}")
    bits = resolve_bits(bits)
    prof = kappa_partial_sums(P, r, bits=bits)
    with working(bits):
        v = _indicator_inner_profile(prof, k)
        return to_mp(v) if isinstance(v, GaussianRational) else v


# =========================================================================
# Gram system
# =========================================================================

@dataclass(frozen=True)
class GramSystem:
    """G[j][k] = <rho_{k+1}, rho_{j+1}>, g[k] = <1, rho_{k+1}>, mp entries."""

    n: int
    G: list
    g: list
    precision_bits: int
    min_pivot: mpf
    dropped: int
    factors: LDLFactors


def _build_gram(P: DirichletPolynomial, r, n: int, bits: int):
    """(G, g) at the given precision; exact intermediates when available."""
    prof = kappa_partial_sums(P, r, bits=bits)
    with working(bits):
        G = [[mpf(0)] * n for _ in range(n)]
        for j in range(1, n + 1):
            for k in range(j, n + 1):
                v = _pair_inner(prof, j, k)       # <rho_j, rho_k>
                if isinstance(v, GaussianRational):
                    v = to_mp(v)
                # G[row j][col k] = <rho_k, rho_j> = conj of the above
                G[j - 1][k - 1] = mp.conj(v)
                G[k - 1][j - 1] = v
        g = []
        for k in range(1, n + 1):
            v = _indicator_inner_profile(prof, k)
            if isinstance(v, GaussianRational):
                v = to_mp(v)
            g.append(mp.conj(v))                  # <1, rho_k>
    return G, g


def gram_system(P: DirichletPolynomial, r, n: int, bits: Optional[int] = None) -> GramSystem:
    """Gram data plus a pivoted factorization, with precision escalation.

    Pivots below 2^{-p/2} * max_pivot are counted as dropped (numerically
    dependent generators). A pivot in the indeterminate band
    [2^{-p/2}, 2^{-p/4}) * max_pivot forces a retry at doubled precision,
    at most three times.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    cur = resolve_bits(bits)
    for _ in range(_ESCALATION_LIMIT + 1):
        G, g = _build_gram(P, r, n, cur)
        with working(cur):
            f = ldl_factor(G, pivot=True)
            max_p = max(f.d)
            min_p = min(f.d)
            if max_p <= 0:
                raise NSingular(0, max_p)
            drop_at = max_p * mpf(2) ** (-(cur // 2))
            band_at = max_p * mpf(2) ** (-(cur // 4))
            dropped = sum(1 for d in f.d if d < drop_at)
            indeterminate = any(drop_at <= d < band_at for d in f.d)
        if not indeterminate:
            return GramSystem(n=n, G=G, g=g, precision_bits=cur,
                              min_pivot=min_p, dropped=dropped, factors=f)
        cur *= 2
    raise PrecisionExhausted(
        f"Gram pivots stayed in the indeterminate band up to {cur // 2} bits")


def _solve_keeping(f: LDLFactors, b, drop_at):
    """LDL^H solve that zeroes components with pivots below the drop threshold."""
    n = len(f.d)
    y = [b[f.perm[i]] for i in range(n)]
    z = [mpf(0)] * n
    for i in range(n):
        acc = y[i]
        for k in range(i):
            acc = acc - f.L[i][k] * z[k]
        z[i] = acc
    w = [z[i] / f.d[i] if f.d[i] >= drop_at else mpf(0) for i in range(n)]
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


# =========================================================================
# distances
# =========================================================================

@dataclass(frozen=True)
class DistanceResult:
    n: int
    r: Fraction
    d_squared: mpf
    method: str
    coeffs: Optional[list]
    precision_bits: int


def _clamp01(x):
    if x < 0:
        return mpf(0)
    if x > 1:
        return mpf(1)
    return x


def _profile_from_streams(G, g, n_max: int):
    """d^2 for n = 1..n_max out of the pivot streams of G and B = G - g g*.

    Returns (values, pivots) where pivots is G's unpivoted leading-minor
    ratio stream, exposed so callers can report conditioning per n.
    """
    n = len(g)
    B = [[G[i][j] - g[i] * mp.conj(g[j]) for j in range(n)] for i in range(n)]
    p = ldl_pivot_stream(G)
    q = ldl_pivot_stream(B)
    out = []
    acc = mpf(1)
    frozen = False
    for i in range(n_max):
        if not frozen:
            if i >= len(p) or p[i] <= 0:
                raise NSingular(i, p[i] if i < len(p) else mpf(0))
            if i >= len(q) or q[i] <= 0:
                frozen = True
            else:
                acc = acc * (q[i] / p[i])
        out.append(mpf(0) if frozen else _clamp01(acc))
    return out, p


def distance_squared(P: DirichletPolynomial, r, n: int, method: str = "det-ratio",
                     bits: Optional[int] = None) -> DistanceResult:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if method not in ("det-ratio", "projection"):
        raise ValueError(f"unknown method {method!r}")
    bits = resolve_bits(bits)
    r_q = as_fraction(r)
    if method == "projection":
        gs = gram_system(P, r, n, bits=bits)
        with working(gs.precision_bits):
            drop_at = max(gs.factors.d) * mpf(2) ** (-(gs.precision_bits // 2))
            x = _solve_keeping(gs.factors, gs.g, drop_at)
            inner = mp.fsum(mp.conj(gv) * xv for gv, xv in zip(gs.g, x))
            d2 = _clamp01(mp.re(mpf(1) - inner))
        return DistanceResult(n=n, r=r_q, d_squared=d2, method=method,
                              coeffs=x, precision_bits=gs.precision_bits)
    with working(bits):
        G, g = _build_gram(P, r, n, bits)
        d2 = _profile_from_streams(G, g, n)[0][-1]
    return DistanceResult(n=n, r=r_q, d_squared=d2, method=method,
                          coeffs=None, precision_bits=bits)


def distance_profile(P: DirichletPolynomial, r, n_max: int,
                     bits: Optional[int] = None) -> list:
    """d^2 for every n = 1..n_max from one Gram build and two pivot streams."""
    if n_max < 1:
        raise ValueError(f"need n_max >= 1, got {n_max}")
    bits = resolve_bits(bits)
    r_q = as_fraction(r)
    with working(bits):
        G, g = _build_gram(P, r, n_max, bits)
        vals, _ = _profile_from_streams(G, g, n_max)
    return [DistanceResult(n=i + 1, r=r_q, d_squared=v, method="det-ratio",
                           coeffs=None, precision_bits=bits)
            for i, v in enumerate(vals)]


def approximant_distance(P: DirichletPolynomial, r, b: Sequence,
                         bits: Optional[int] = None):
    """|| 1 - sum b_k rho_k ||^2 = 1 - 2 Re(b* g) + b* G b for explicit b."""
    if not b:
        raise ValueError("coefficient vector is empty")
    bits = resolve_bits(bits)
    n = len(b)
    with working(bits):
        G, g = _build_gram(P, r, n, bits)
        bv = [to_mp(x) for x in b]
        cross = mp.fsum(mp.conj(bv[k]) * g[k] for k in range(n))
        quad = mp.fsum(mp.conj(bv[j]) * G[j][k] * bv[k]
                       for j in range(n) for k in range(n))
        return mp.re(mpf(1) - 2 * mp.re(cross) + quad)


def mellin_identity_residual(P: DirichletPolynomial, r, b: Sequence, s,
                             bits: Optional[int] = None):
    """| M[sum b_k rho_k](s) - P(s + r - 1/2)/s * sum b_k k^{-s} |, Re(s) > 0.

    The Mellin transform of each step generator telescopes to the shifted
    polynomial, so the residual is pure numeric noise; it is the cheapest
    end-to-end audit of profile, generators, and evaluation agreeing.
    """
    if not b:
        raise ValueError("coefficient vector is empty")
    bits = resolve_bits(bits)
    r_q = as_fraction(r)
    prof = kappa_partial_sums(P, r, bits=bits)
    m = P.m
    with working(bits):
        s_mp = to_mp(s)
        if not mp.re(s_mp) > 0:
            raise ValueError(f"Mellin identity needs Re(s) > 0, got {s}")
        S = [to_mp(v) if isinstance(v, GaussianRational) else v for v in prof.S]
        lhs = mpf(0)
        dirichlet = mpf(0)
        for k, bk in enumerate(b, start=1):
            bk = to_mp(bk)
            piece = S[m - 1] * mp.power(k * m, -s_mp)
            for a in range(1, m):
                piece = piece + S[a - 1] * (mp.power(k * a, -s_mp)
                                            - mp.power(k * (a + 1), -s_mp))
            lhs = lhs + bk * piece / s_mp
            dirichlet = dirichlet + bk * mp.power(k, -s_mp)
        shift = fraction_to_mpf(r_q - Fraction(1, 2))
        rhs = dp_eval(P, s_mp + shift, bits=bits) / s_mp * dirichlet
        return abs(lhs - rhs)
