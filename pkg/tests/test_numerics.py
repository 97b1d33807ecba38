import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import charpoly, charpoly_roots, cofactor_det, random_spd

from graphpoincare.errors import (
    BadParams,
    DimensionTooLarge,
    LengthMismatch,
    NotPositiveDefinite,
    ObjectiveNaN,
)
from graphpoincare.numerics import (
    Cholesky,
    active_set_oracle,
    clamp_psd,
    max_linear_over_nonneg_ellipsoid,
    minimize_over_simplex,
    nelder_mead,
    project_to_floored_simplex,
    simplex_starts,
    solve_spd,
    symmetric_eigen,
)


# --- Cholesky / solve_spd ---------------------------------------------------

@pytest.mark.parametrize("A, b, x", [
    (np.eye(2), [1, 2], [1, 2]),
    (np.diag([2.0, 4.0]), [2, 4], [1, 1]),
    ([[2, -1], [-1, 2]], [1, 0], [2 / 3, 1 / 3]),
])
def test_solve_spd_examples(A, b, x):
    np.testing.assert_allclose(solve_spd(A, b), x, rtol=1e-15, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_solve_spd_residual(n, seed):
    rng = np.random.default_rng(seed)
    A = random_spd(rng, n)
    b = rng.normal(size=n)
    x = solve_spd(A, b)
    assert np.abs(A @ x - b).max() <= 1e-9 * max(1.0, np.abs(A).max() * np.abs(x).max())


def test_cholesky_matrix_rhs_and_inverse():
    rng = np.random.default_rng(1)
    A = random_spd(rng, 5)
    np.testing.assert_allclose(Cholesky(A).inverse() @ A, np.eye(5), atol=1e-10)
    B = rng.normal(size=(5, 3))
    np.testing.assert_allclose(A @ Cholesky(A).solve(B), B, atol=1e-10)


def test_cholesky_rejects():
    with pytest.raises(NotPositiveDefinite):
        Cholesky([[1, 1], [1, 1]])
    with pytest.raises(NotPositiveDefinite):
        Cholesky([[-1.0]])
    with pytest.raises(BadParams):
        Cholesky([[1, 0.5], [0, 1]])
    with pytest.raises(LengthMismatch):
        Cholesky(np.eye(2)).solve([1, 2, 3])


# --- Jacobi eigensolver -----------------------------------------------------

@pytest.mark.parametrize("A, vals", [
    (np.diag([3.0, 1.0, 2.0]), [1, 2, 3]),
    (np.zeros((2, 2)), [0, 0]),
    ([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], [0, 3, 3]),
])
def test_eigen_examples(A, vals):
    np.testing.assert_allclose(symmetric_eigen(A).values, vals, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_eigen_trace_and_cofactor_determinant(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(-4, 5, size=(n, n))
    M = M + M.T
    vals = symmetric_eigen(M).values
    det = float(cofactor_det([[Fraction(int(x)) for x in row] for row in M]))
    scale = max(1.0, float(np.abs(vals).max())) ** n
    assert vals.sum() == pytest.approx(np.trace(M), rel=1e-8, abs=1e-8 * n)
    assert abs(np.prod(vals) - det) <= 1e-8 * scale


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_eigen_matches_characteristic_polynomial(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(-5, 6, size=(n, n))
    M = (M + M.T).tolist()
    np.testing.assert_allclose(symmetric_eigen(M).values, charpoly_roots(M), rtol=0, atol=1e-10)


def test_charpoly_oracle_sanity():
    # [[2,1],[1,2]]: t^2 - 4t + 3
    assert charpoly([[2, 1], [1, 2]]) == [1, -4, 3]
    np.testing.assert_allclose(charpoly_roots([[2, 1], [1, 2]]), [1, 3])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_eigenvectors(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    A = A + A.T
    spec = symmetric_eigen(A, vectors=True)
    V = spec.vectors
    assert np.all(np.diff(spec.values) >= 0)
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-10)
    assert np.abs(A @ V - V * spec.values).max() <= 1e-8 * np.abs(A).max()


def test_clamp_psd():
    np.testing.assert_array_equal(clamp_psd(np.array([-1e-12, 1.0]), 1.0), [0.0, 1.0])
    with pytest.raises(BadParams):
        clamp_psd(np.array([-1e-3, 1.0]), 1.0)


# --- nonnegative ellipsoid QP ---------------------------------------------

@pytest.mark.parametrize("Q, c, value, argmax", [
    (np.eye(2), [1, 0], 1.0, [1, 0]),
    (np.eye(2), [1, -1], 1.0, [1, 0]),
    ([[2.0]], [1], 1 / math.sqrt(2), [1 / math.sqrt(2)]),
])
def test_qp_examples(Q, c, value, argmax):
    v, f = max_linear_over_nonneg_ellipsoid(Q, c)
    assert v == pytest.approx(value, rel=1e-12)
    np.testing.assert_allclose(f, argmax, atol=1e-12)


@pytest.mark.parametrize("Q, c, value", [
    (np.eye(2), [1, 1], math.sqrt(2)),
    (np.eye(3), [-1, 0, -2], 0.0),
    ([[2.0]], [1], 1 / math.sqrt(2)),
])
def test_oracle_examples(Q, c, value):
    assert active_set_oracle(Q, c) == pytest.approx(value, rel=1e-12)


def test_qp_nonpositive_c():
    v, f = max_linear_over_nonneg_ellipsoid(np.eye(3), [-1, 0, -2])
    assert v == 0 and not f.any()


def test_oracle_dimension_cap():
    with pytest.raises(DimensionTooLarge):
        active_set_oracle(np.eye(13), np.ones(13))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_qp_matches_oracle(n, seed):
    rng = np.random.default_rng(seed)
    Q = random_spd(rng, n, eps=0.1)
    c = rng.normal(size=n)
    v, f = max_linear_over_nonneg_ellipsoid(Q, c)
    ref = active_set_oracle(Q, c)
    assert abs(v - ref) <= 1e-6 * max(1.0, ref)
    assert f.min() >= 0
    assert f @ Q @ f <= 1 + 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_qp_beats_random_feasible_points(seed):
    rng = np.random.default_rng(seed)
    n = 6
    Q = random_spd(rng, n, eps=0.1)
    c = rng.normal(size=n)
    v, _ = max_linear_over_nonneg_ellipsoid(Q, c)
    U = np.abs(rng.normal(size=(100_000, n))) * (rng.random((100_000, n)) < 0.6)
    U = U[U.any(axis=1)]
    norms = np.sqrt(np.einsum("ij,jk,ik->i", U, Q, U))
    assert (U @ c / norms).max() <= v + 1e-9


def test_qp_on_laplacian_block():
    # grounded P3: Omega = {middle}, c = e_mid gives sqrt(1/2)
    v, _ = max_linear_over_nonneg_ellipsoid([[2.0]], [1.0])
    assert v**2 == pytest.approx(0.5, rel=1e-15)


# --- simplex search -------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10), st.sampled_from([1e-2, 1e-3, 1e-5]), st.integers(0, 2**32 - 1))
def test_projection_lands_in_floored_simplex(n, floor, seed):
    y = np.random.default_rng(seed).normal(size=n) * 3
    m = project_to_floored_simplex(y, floor)
    assert m.sum() == pytest.approx(1.0, abs=1e-12)
    assert m.min() >= floor * (1 - 1e-9)
    # idempotent
    np.testing.assert_allclose(project_to_floored_simplex(m, floor), m, atol=1e-12)


def test_nelder_mead_quadratic():
    x, f, _ = nelder_mead(lambda p: float(((p - [1.0, -2.0]) ** 2).sum()), [0.0, 0.0], 0.5)
    np.testing.assert_allclose(x, [1, -2], atol=1e-5)
    assert f < 1e-10


def test_simplex_starts_composition():
    starts = simplex_starts(4, np.random.default_rng(0), n_starts=20)
    assert len(starts) == 20
    np.testing.assert_allclose(starts[0], 0.25)
    for s in starts:
        assert s.sum() == pytest.approx(1.0)


def test_minimize_inverse_sum():
    m, v = minimize_over_simplex(lambda m: float((1 / m).sum()), 2, 1e-3)
    np.testing.assert_allclose(m, [0.5, 0.5], atol=1e-4)
    assert v == pytest.approx(4.0, rel=1e-8)


def test_minimize_constant_objective():
    m, v = minimize_over_simplex(lambda m: 7.5, 4, 1e-2)
    assert v == 7.5
    assert m.sum() == pytest.approx(1.0)


def test_minimize_point_simplex():
    m, v = minimize_over_simplex(lambda m: 3.0 * m[0], 1, 1e-3)
    assert v == 3.0 and m.tolist() == [1.0]


def test_minimize_prefers_floor_corner():
    # linear objective: the minimum sits at the vertex with the smallest coefficient
    c = np.array([3.0, 1.0, 2.0])
    m, v = minimize_over_simplex(lambda m: float(c @ m), 3, 1e-3)
    assert v == pytest.approx(1.0 + 1e-3 * (3 + 2 - 2 * 1), abs=1e-6)


def test_minimize_errors():
    with pytest.raises(BadParams):
        minimize_over_simplex(lambda m: 0.0, 3, 0.5)
    with pytest.raises(BadParams):
        minimize_over_simplex(lambda m: 0.0, 200, 1e-2)
    with pytest.raises(ObjectiveNaN):
        minimize_over_simplex(lambda m: float("nan"), 3, 1e-2)
