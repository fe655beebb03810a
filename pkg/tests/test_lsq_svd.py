import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causalfc.lsq_svd import ABSOLUTE, RELATIVE, RankZeroError, solve_min_norm, svd


def normal_equations(A, rhs):
    return np.linalg.solve(A.T @ A, A.T @ rhs)


def test_identity_singulars():
    assert np.allclose(svd(np.eye(2)).singulars, [1, 1])


def test_diagonal_singulars():
    assert np.array_equal(svd(np.diag([3.0, 0.0])).singulars, [3.0, 0.0])


def test_random_reconstruction():
    A = np.random.default_rng(1).standard_normal((6, 3))
    fac = svd(A)
    assert np.max(np.abs(A - fac.reconstruct())) <= 1e-12 * fac.singulars[0]


@pytest.mark.parametrize("bad", [np.array([[np.nan, 1.0]]), np.array([[np.inf]]), np.zeros((0, 2))])
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        svd(bad)


def test_rejects_complex():
    with pytest.raises(ValueError, match="real"):
        svd(np.eye(2) * 1j)


def test_identity_solve():
    sol = solve_min_norm(svd(np.eye(2)), [1, 2], 1e-13)
    assert np.allclose(sol.coeffs, [1, 2]) and sol.K == 0


def test_zero_mode_dropped():
    sol = solve_min_norm(svd(np.diag([1.0, 0.0])), [1, 1], 1e-13)
    assert np.allclose(sol.coeffs, [1, 0]) and sol.K == 1 and sol.kept_count == 1


def test_rank_zero():
    with pytest.raises(RankZeroError, match="rank zero"):
        solve_min_norm(svd(np.zeros((3, 2))), [1, 1, 1], 1e-13)


def test_tie_is_kept():
    fac = svd(np.diag([1.0, 0.5]))
    assert solve_min_norm(fac, [1, 1], 0.5, RELATIVE).K == 0
    assert solve_min_norm(fac, [1, 1], 0.5, ABSOLUTE).K == 0


def test_absolute_and_relative_thresholds():
    fac = svd(np.diag([10.0, 1e-3]))
    assert solve_min_norm(fac, [1, 1], 1e-3, ABSOLUTE).K == 0
    assert solve_min_norm(fac, [1, 1], 1e-3, RELATIVE).K == 1


def test_overdetermined_matches_normal_equations():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((8, 3))
    rhs = rng.standard_normal(8)
    sol = solve_min_norm(svd(A), rhs, 1e-13)
    assert np.allclose(sol.coeffs, normal_equations(A, rhs), rtol=0, atol=1e-10)


def test_rhs_shape_checked():
    with pytest.raises(ValueError, match="shape"):
        solve_min_norm(svd(np.eye(3)), [1, 2], 1e-13)


@pytest.mark.parametrize("xi", [0.0, 1.0, -1e-3])
def test_xi_range(xi):
    with pytest.raises(ValueError, match="xi"):
        solve_min_norm(svd(np.eye(2)), [1, 1], xi)


def test_min_norm_among_minimizers():
    rng = np.random.default_rng(3)
    B = rng.standard_normal((10, 3))
    A = np.hstack([B, B[:, :1] + B[:, 1:2]])  # rank 3, 4 columns
    rhs = rng.standard_normal(10)
    sol = solve_min_norm(svd(A), rhs, 1e-10, RELATIVE)
    assert np.allclose(sol.coeffs, np.linalg.pinv(A) @ rhs, atol=1e-10)
    null = np.array([1.0, 1.0, 0.0, -1.0])
    other = sol.coeffs + 0.3 * null
    assert np.allclose(A @ other, A @ sol.coeffs)
    assert np.linalg.norm(other) > np.linalg.norm(sol.coeffs)


@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(0, 12))
def test_factor_invariants(seed, cols, extra):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((cols + extra, cols))
    fac = svd(A)
    s = fac.singulars
    assert np.all(s >= 0) and np.all(np.diff(s) <= 0)
    assert np.max(np.abs(A - fac.reconstruct())) <= 1e-10 * s[0]
    assert np.allclose(fac.V.T @ fac.V, np.eye(fac.V.shape[1]), atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_norm_nonincreasing_in_xi(seed):
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.standard_normal((12, 6)))
    V, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    A = U @ np.diag(10.0 ** -np.arange(6)) @ V.T
    fac = svd(A)
    rhs = rng.standard_normal(12)
    norms = [np.linalg.norm(solve_min_norm(fac, rhs, xi).coeffs) for xi in 10.0 ** -np.arange(7, 0, -1)]
    assert all(a >= b * (1 - 1e-12) for a, b in zip(norms, norms[1:]))


@given(st.integers(0, 2**32 - 1))
def test_duplicate_row_keeps_fit_quality(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((9, 4))
    rhs = rng.standard_normal(9)
    base = solve_min_norm(svd(A), rhs, 1e-13).coeffs
    dup = solve_min_norm(svd(np.vstack([A, A[:1]])), np.append(rhs, rhs[0]), 1e-13).coeffs
    r0 = np.linalg.norm(A @ base - rhs)
    r1 = np.linalg.norm(A @ dup - rhs)
    # weighting one row twice can move the fit, but only modestly
    assert r1 <= 2 * r0 + 1e-12
