import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import freedim as fd
from conftest import random_hermitian


# ---------------------------------------------------------------------------
# scalar family
# ---------------------------------------------------------------------------

def test_clamp_fixes_inner_interval():
    assert fd.cutoff_eval(1.0, 0.5) == 0.5
    xs = np.linspace(-1.0, 1.0, 101)
    np.testing.assert_array_equal(fd.cutoff_eval(1.0, xs), xs)


def test_clamp_tail_value():
    val = fd.cutoff_eval(1.0, 10.0)
    assert abs(val - (2.0 - np.exp(-9.0))) <= 1e-15
    assert val <= 2.0  # R + 1


def test_quotient_grid_bound():
    s = np.linspace(-20.0, 20.0, 512)
    G = fd.quotient_eval(1.0, s[:, None], s[None, :])
    assert np.abs(G).max() <= 1.0 + 1e-12  # 1-Lipschitz profile


@settings(max_examples=40, deadline=None)
@given(R=st.floats(min_value=0.05, max_value=50.0),
       smooth=st.booleans())
def test_family_conditions_random_scale(R, smooth):
    fam = fd.CutoffFamily(R, smooth=smooth)
    inner = np.linspace(-R, R, 41)
    np.testing.assert_array_equal(fam.f(inner), inner)  # condition 1
    wide = np.linspace(-30 * R, 30 * R, 301)
    assert np.abs(fam.f(wide)).max() <= R + 1.0 + 1e-12  # condition 2
    grid = np.linspace(-8 * R, 8 * R, 81)
    G = fam.g(grid[:, None], grid[None, :])
    assert np.abs(G).max() <= 2.0 + 1e-12  # condition 3


def test_smooth_profile_is_continuous_at_the_knee():
    fam = fd.CutoffFamily(1.0, smooth=True)
    eps = np.array([1e-9, 1e-7, 1e-5])
    np.testing.assert_allclose(fam.f(1.0 + eps), 1.0 + eps, atol=1e-10)
    np.testing.assert_allclose(fam.fprime(1.0 + eps), 1.0, atol=1e-4)


def test_quotient_diagonal_uses_derivative():
    fam = fd.CutoffFamily(2.0)
    assert fam.g(0.5, 0.5) == 1.0
    assert abs(fam.g(3.0, 3.0) - np.exp(2.0 - 3.0)) <= 1e-12
    # near-diagonal switch
    assert abs(fam.g(3.0, 3.0 + 1e-10) - np.exp(-1.0)) <= 1e-8


# ---------------------------------------------------------------------------
# matrix clamp
# ---------------------------------------------------------------------------

def test_apply_cutoff_identity_inside_radius():
    rng = np.random.default_rng(0)
    A = random_hermitian(rng, 6)
    R = float(np.abs(np.linalg.eigvalsh(A)).max())
    out = fd.apply_cutoff(A, R + 0.5)
    np.testing.assert_array_equal(out, A)  # bitwise: clamp is exact inside


def test_apply_cutoff_scalar_evaluation():
    R = 1.5
    A = np.diag([0.0, 3 * R]).astype(complex)
    out = fd.apply_cutoff(A, R)
    expected = np.diag([0.0, R + 1.0 - np.exp(-2.0 * R)])
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_apply_cutoff_zero():
    out = fd.apply_cutoff(np.zeros((4, 4)), 2.0)
    np.testing.assert_array_equal(out, np.zeros((4, 4)))


def test_apply_cutoff_rejects_non_self_adjoint():
    with pytest.raises(fd.NotSelfAdjoint):
        fd.apply_cutoff(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


# ---------------------------------------------------------------------------
# the commutator identity
# ---------------------------------------------------------------------------

def test_commutator_identity_random():
    rng = np.random.default_rng(1)
    for _ in range(5):
        A = random_hermitian(rng, 8)
        X = random_hermitian(rng, 8)
        assert fd.commutator_identity_check(A, X, 2.0) <= 1e-9


def test_commutator_identity_cubic_polynomial():
    rng = np.random.default_rng(2)
    A = random_hermitian(rng, 6)
    X = random_hermitian(rng, 6)
    fam = fd.ScalarFamily(f=lambda x: x**3, g=lambda s, t: s * s + s * t + t * t)
    assert fd.commutator_identity_check(A, X, fam) <= 1e-9


def test_commutator_identity_degenerate_spectrum():
    rng = np.random.default_rng(3)
    Q = np.linalg.qr(rng.standard_normal((6, 6))
                     + 1j * rng.standard_normal((6, 6)))[0]
    lam = np.array([1.0, 1.0, 2.0, 2.0, 2.0, -3.0])
    A = (Q * lam) @ Q.conj().T
    X = random_hermitian(rng, 6)
    assert fd.commutator_identity_check(A, X, 1.5) <= 1e-9


# ---------------------------------------------------------------------------
# the convergence sweep
# ---------------------------------------------------------------------------

def _with_radius(rng, d, rho):
    lam = rng.uniform(-rho, rho, size=d)
    lam[0] = rho
    lam[1] = -rho if d > 1 else rho
    Q = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))[0]
    return (Q * lam) @ Q.conj().T


def test_sweep_zero_beyond_spectral_radius():
    rng = np.random.default_rng(4)
    A = _with_radius(rng, 8, 5.0)
    X = [random_hermitian(rng, 8)]
    rows = fd.convergence_sweep(A, X, list(range(1, 9)))
    for R, err in rows:
        if R >= 5.0:
            assert err <= 1e-10
        else:
            assert err > 1e-6


def test_sweep_zero_input():
    rows = fd.convergence_sweep(np.zeros((4, 4)), [np.eye(4)], [1.0, 2.0])
    assert all(err == 0.0 for _, err in rows)


def test_sweep_threshold_scales_with_dilation():
    rng = np.random.default_rng(5)
    A = _with_radius(rng, 6, 2.0)
    X = [random_hermitian(rng, 6)]
    grid = [0.5 * k for k in range(1, 13)]

    def first_zero(rows):
        return min(R for R, err in rows if err <= 1e-10)

    base = first_zero(fd.convergence_sweep(A, X, grid))
    doubled = first_zero(fd.convergence_sweep(2.0 * A, X, [2 * r for r in grid]))
    assert abs(doubled - 2.0 * base) <= 1e-9


def test_sweep_errors_non_increasing():
    rng = np.random.default_rng(6)
    A = _with_radius(rng, 7, 4.0)
    X = [random_hermitian(rng, 7), random_hermitian(rng, 7)]
    grid = np.linspace(0.25, 6.0, 24)
    rows = fd.convergence_sweep(A, X, grid)
    errs = [e for _, e in rows]
    for a, b in zip(errs, errs[1:]):
        assert b <= a + 1e-12
