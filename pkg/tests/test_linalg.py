"""Pivoted/unpivoted LDL^H on mpmath matrices, solves, determinants.

Oracle values: exact Hilbert-matrix determinant, hand-computed 2x2 Hermitian
factorizations, and reconstruction residuals checked against the inputs.
"""

import random
from fractions import Fraction

import pytest
from mpmath import mp, mpc, mpf

from xdp.errors import NSingular
from xdp.linalg import det_from_pivots, ldl_factor, ldl_pivot_stream, ldl_solve
from xdp.precision import working


def hilbert(n):
    with working(256):
        return [[mpf(1) / (i + j + 1) for j in range(n)] for i in range(n)]


def mat_apply(A, x):
    return [sum((A[i][j] * x[j] for j in range(len(x))), mpf(0)) for i in range(len(A))]


def reconstruct(f):
    """L D L^H in the permuted frame."""
    n = len(f.d)
    out = [[mpf(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = mpf(0)
            for k in range(min(i, j) + 1):
                acc += f.L[i][k] * f.d[k] * mp.conj(f.L[j][k])
            out[i][j] = acc
    return out


def test_hand_hermitian_2x2():
    with working(256):
        A = [[mpf(2), mpc(0, 1)], [mpc(0, -1), mpf(2)]]
        f = ldl_factor(A, pivot=False)
        assert f.perm == [0, 1]
        assert abs(f.d[0] - 2) < mpf(2) ** -250
        assert abs(f.d[1] - mpf(3) / 2) < mpf(2) ** -250
        assert abs(f.L[1][0] - mpc(0, -0.5)) < mpf(2) ** -250
        assert abs(det_from_pivots(f.d) - 3) < mpf(2) ** -248
        # A^{-1} [1, 0]^T = [2/3, i/3]
        x = ldl_solve(f, [mpf(1), mpf(0)])
        assert abs(x[0] - mpf(2) / 3) < mpf(2) ** -248
        assert abs(x[1] - mpc(0, 1) / 3) < mpf(2) ** -248


def test_hilbert_determinant():
    with working(256):
        f = ldl_factor(hilbert(4), pivot=False)
        exact = mpf(1) / 6048000
        assert abs(det_from_pivots(f.d) - exact) / exact < mpf(2) ** -230
        # pivoted factorization reorders but keeps the determinant
        g = ldl_factor(hilbert(4), pivot=True)
        assert abs(det_from_pivots(g.d) - exact) / exact < mpf(2) ** -230


def test_pivoting_picks_max_diagonal():
    with working(128):
        A = [[mpf(1), mpf("0.1"), mpf("0.1")],
             [mpf("0.1"), mpf(5), mpf("0.1")],
             [mpf("0.1"), mpf("0.1"), mpf(3)]]
        f = ldl_factor(A, pivot=True)
        assert f.perm[0] == 1
        R = reconstruct(f)
        for i in range(3):
            for j in range(3):
                assert abs(R[i][j] - A[f.perm[i]][f.perm[j]]) < mpf(2) ** -120


def test_random_hermitian_roundtrip():
    rng = random.Random(20240817)
    n = 5
    with working(256):
        B = [[mpc(mpf(rng.randint(-8, 8)) / 3, mpf(rng.randint(-8, 8)) / 3)
              for _ in range(n)] for _ in range(n)]
        A = [[sum((mp.conj(B[k][i]) * B[k][j] for k in range(n)), mpf(0))
              for j in range(n)] for i in range(n)]
        for i in range(n):
            A[i][i] = A[i][i] + 1
        f = ldl_factor(A, pivot=True)
        R = reconstruct(f)
        scale = max(abs(A[i][j]) for i in range(n) for j in range(n))
        for i in range(n):
            for j in range(n):
                assert abs(R[i][j] - A[f.perm[i]][f.perm[j]]) < scale * mpf(2) ** -240
        assert all(dv > 0 for dv in f.d)
        rhs = [mpc(1, -1)] * n
        x = ldl_solve(f, rhs)
        back = mat_apply(A, x)
        for i in range(n):
            assert abs(back[i] - rhs[i]) < scale * mpf(2) ** -230


def test_pivot_stream_leading_minor_ratios():
    with working(128):
        A = [[mpf(2), mpf(1)], [mpf(1), mpf(3)]]
        s = ldl_pivot_stream(A)
        assert abs(s[0] - 2) < mpf(2) ** -120
        assert abs(s[1] - mpf(5) / 2) < mpf(2) ** -120
        # rank-1 matrix: second pivot exactly zero, stream stops there
        s = ldl_pivot_stream([[mpf(1), mpf(1)], [mpf(1), mpf(1)]])
        assert len(s) == 2
        assert s[0] == 1
        assert s[1] == 0
        # Hilbert pivots are the classical minor ratios: det H_3 / det H_2
        s = ldl_pivot_stream(hilbert(3))
        d3, d2 = mpf(1) / 2160, mpf(1) / 12
        assert abs(s[2] - d3 / d2) < mpf(2) ** -110


def test_singular_solve_raises():
    with working(128):
        f = ldl_factor([[mpf(1), mpf(1)], [mpf(1), mpf(1)]], pivot=False)
        with pytest.raises(NSingular) as exc:
            ldl_solve(f, [mpf(1), mpf(0)])
        assert exc.value.index == 1


def test_shape_validation():
    with pytest.raises(ValueError):
        ldl_factor([[mpf(1), mpf(2)]])
    with pytest.raises(ValueError):
        ldl_factor([])
