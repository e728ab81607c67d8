"""Inner products, Gram systems, and approximation distances.

Pinned closed forms (derived by hand, checked against quadrature here):
for P = 1 - 2^{-s} at r = 0 the single-generator data is
  <rho_1, rho_1> = 2 - sqrt(2),   <rho_1, 1> = 1 - sqrt(2)/2,
  d_1^2 = (2 + sqrt(2))/4,        optimal b_1 = 1/2,  E([1]) = 1.
Independent oracles: tanh-sinh quadrature of the step products over their
breakpoint partition, and k * <rho_k, 1> = P(r + 1/2).
"""

import random
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from xdp.dpcore import DirichletPolynomial, dp_eval, kappa_eval, kappa_partial_sums
from xdp.distance import (
    approximant_distance,
    distance_profile,
    distance_squared,
    gram_system,
    indicator_inner,
    mellin_identity_residual,
    rho_inner,
)
from xdp.exact import to_mp
from xdp.precision import working

P_ONE = DirichletPolynomial.parse("1:1")
P_BASE = DirichletPolynomial.parse("1:1,2:-1")
P_MIX = DirichletPolynomial.parse("1:1,2:1i,3:-1/2")


def quad_rho_inner(P, r, j, k, bits=256):
    """Quadrature oracle for the generator inner product."""
    prof = kappa_partial_sums(P, r, bits=bits)
    with working(bits):
        pts = sorted({mpf(1) / (j * a) for a in range(1, P.m + 1)}
                     | {mpf(1) / (k * a) for a in range(1, P.m + 1)})

        def f(x):
            u = to_mp(kappa_eval(prof, 1 / (j * x)))
            v = to_mp(kappa_eval(prof, 1 / (k * x)))
            return u * mp.conj(v)

        return mp.quad(f, [mpf(0)] + pts)


def test_rho_inner_pinned():
    with working(256):
        v = rho_inner(P_BASE, 0, 1, 1, bits=256)
        assert abs(v - (2 - mp.sqrt(2))) < mpf(2) ** -245


def test_rho_inner_against_quadrature():
    cases = [(P_BASE, 0, 1, 1), (P_BASE, 0, 2, 3), (P_BASE, Fraction(1, 2), 2, 5),
             (P_MIX, 0, 1, 2), (P_MIX, -1, 3, 4), (P_ONE, Fraction(1, 2), 1, 7)]
    with working(256):
        for (P, r, j, k) in cases:
            got = rho_inner(P, r, j, k, bits=256)
            want = quad_rho_inner(P, r, j, k)
            assert abs(got - want) < mpf(10) ** -40, (P.to_text(), r, j, k)


def test_rho_inner_conjugate_symmetry():
    with working(192):
        for (j, k) in [(1, 2), (2, 5), (3, 3)]:
            a = rho_inner(P_MIX, 0, j, k, bits=192)
            b = rho_inner(P_MIX, 0, k, j, bits=192)
            assert abs(a - mp.conj(b)) < mpf(2) ** -180


def test_indicator_inner_pinned_and_mellin_at_one():
    with working(256):
        v = indicator_inner(P_BASE, 0, 1, bits=256)
        assert abs(v - (1 - mp.sqrt(2) / 2)) < mpf(2) ** -245
        # k * <rho_k, 1> = P(r + 1/2), any P, r
        for P in (P_BASE, P_MIX, P_ONE):
            for r in (0, Fraction(1, 2), -1):
                want = dp_eval(P, Fraction(r) + Fraction(1, 2), bits=256)
                for k in (1, 2, 7):
                    got = k * indicator_inner(P, r, k, bits=256)
                    assert abs(got - want) < mpf(10) ** -70


def test_gram_system_reciprocal_max_structure():
    # P == 1: rho_k is the indicator of (0, 1/k], so G[j][k] = 1/max(j+1,k+1)
    # (0-indexed) and g[k] = 1/(k+1)
    gs = gram_system(P_ONE, 0, 6, bits=256)
    assert gs.n == 6
    assert gs.dropped == 0
    assert gs.min_pivot > 0
    assert gs.precision_bits == 256
    with working(256):
        for i in range(6):
            for j in range(6):
                assert abs(gs.G[i][j] - mpf(1) / max(i + 1, j + 1)) < mpf(2) ** -250
        for k in range(6):
            assert abs(gs.g[k] - mpf(1) / (k + 1)) < mpf(2) ** -250


def test_gram_system_hermitian_psd():
    gs = gram_system(P_MIX, 0, 8, bits=192)
    with working(192):
        for i in range(8):
            assert abs(mp.im(gs.G[i][i])) < mpf(2) ** -180
            for j in range(8):
                assert abs(gs.G[i][j] - mp.conj(gs.G[j][i])) < mpf(2) ** -180
        assert gs.min_pivot > 0


def test_distance_squared_pinned():
    for method in ("projection", "det-ratio"):
        res = distance_squared(P_BASE, 0, 1, method=method, bits=256)
        with working(256):
            want = (2 + mp.sqrt(2)) / 4
            assert abs(res.d_squared - want) < mpf(10) ** -30
        assert res.n == 1
        assert res.method == method
        assert 0 <= res.d_squared <= 1
    res = distance_squared(P_BASE, 0, 1, method="projection", bits=256)
    assert res.coeffs is not None
    with working(256):
        assert abs(res.coeffs[0] - mpf(1) / 2) < mpf(2) ** -245


def test_distance_constant_polynomial_is_zero():
    for r in (0, Fraction(1, 2), -1):
        for method in ("projection", "det-ratio"):
            res = distance_squared(P_ONE, r, 5, method=method, bits=256)
            assert res.d_squared < mpf(10) ** -50


def test_methods_agree_and_profile_monotone():
    rng = random.Random(7)
    with working(256):
        for _ in range(6):
            m = rng.randint(2, 4)
            coeffs = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(m)]
            coeffs[0] = Fraction(rng.randint(1, 3))
            if coeffs[-1] == 0:
                coeffs[-1] = Fraction(1)
            P = DirichletPolynomial(coeffs)
            r = rng.choice([0, Fraction(1, 2), Fraction(-1, 2)])
            prof = distance_profile(P, r, 6, bits=256)
            assert len(prof) == 6
            for i, res in enumerate(prof):
                assert res.n == i + 1
                assert 0 <= res.d_squared <= 1
                alt = distance_squared(P, r, res.n, method="projection", bits=256)
                denom = max(res.d_squared, mpf(2) ** -200)
                assert abs(res.d_squared - alt.d_squared) / denom < mpf(2) ** -128
            for a, b in zip(prof, prof[1:]):
                assert b.d_squared <= a.d_squared + mpf(2) ** -200


def test_approximant_distance_pinned():
    with working(256):
        # E([1]) = 1 - 2(1 - sqrt2/2) + (2 - sqrt2) = 1, exactly
        e1 = approximant_distance(P_BASE, 0, [1], bits=256)
        assert abs(e1 - 1) < mpf(2) ** -245
        # at the optimum it matches d^2 and dominates it nearby
        opt = distance_squared(P_BASE, 0, 1, method="projection", bits=256)
        e_opt = approximant_distance(P_BASE, 0, opt.coeffs, bits=256)
        assert abs(e_opt - opt.d_squared) < mpf(2) ** -200
        for delta in ("0.01", "-0.02"):
            e = approximant_distance(P_BASE, 0, [opt.coeffs[0] + mpf(delta)], bits=256)
            assert e > e_opt - mpf(2) ** -200


def test_approximant_distance_multi_n():
    with working(192):
        opt = distance_squared(P_MIX, 0, 4, method="projection", bits=192)
        e = approximant_distance(P_MIX, 0, opt.coeffs, bits=192)
        assert abs(e - opt.d_squared) < mpf(2) ** -150


def test_mellin_identity_pinned_and_random():
    with working(256):
        # P == 1, b = [1], r = 0: both sides are 1/s
        assert mellin_identity_residual(P_ONE, 0, [1], mp.mpc(0.5, 3), bits=256) < mpf(2) ** -240
        rng = random.Random(11)
        for _ in range(5):
            m = rng.randint(2, 5)
            coeffs = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(m)]
            coeffs[0], coeffs[-1] = Fraction(1), Fraction(rng.randint(1, 2))
            P = DirichletPolynomial(coeffs)
            b = [Fraction(rng.randint(-2, 2), 2) for _ in range(rng.randint(1, 6))]
            for s in (mpf("0.5"), mp.mpc(0.5, 1), mp.mpc(0.5, 10)):
                res = mellin_identity_residual(P, Fraction(1, 2), b, s, bits=256)
                assert res < mpf(2) ** -200
    with pytest.raises(ValueError):
        mellin_identity_residual(P_ONE, 0, [1], mp.mpc(-1, 2), bits=128)


def test_input_validation():
    with pytest.raises(ValueError):
        distance_squared(P_BASE, 0, 0)
    with pytest.raises(ValueError):
        distance_squared(P_BASE, 0, 3, method="nope")
    with pytest.raises(ValueError):
        gram_system(P_BASE, 0, 0)
    with pytest.raises(ValueError):
        approximant_distance(P_BASE, 0, [])
