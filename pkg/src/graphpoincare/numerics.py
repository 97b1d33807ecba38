"""Dense numeric kernels.

Cholesky solves, a cyclic Jacobi eigensolver, the nonnegative ellipsoid
linear maximization (with a brute-force active-set oracle) and a multistart
Nelder-Mead search over floored probability simplices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numba
import numpy as np

from .errors import (
    BadParams,
    DimensionTooLarge,
    LengthMismatch,
    NoConvergence,
    NotPositiveDefinite,
    ObjectiveNaN,
)

SYMMETRY_TOL = 1e-12
PIVOT_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
ORACLE_MAX_DIM = 12


def as_symmetric(A) -> np.ndarray:
    """Validate ``max|A - A^T| <= 1e-12 * max(1, max|A|)`` and return a float copy."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise LengthMismatch(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if np.abs(A - A.T).max(initial=0.0) > SYMMETRY_TOL * scale:
        raise BadParams("matrix is not symmetric")
    return A


# --------------------------------------------------------------------------
# Cholesky

@numba.njit(cache=True)
def _cholesky_kernel(A, rel_tol):
    n = A.shape[0]
    L = np.zeros_like(A)
    scale = 0.0
    for j in range(n):
        scale = max(scale, abs(A[j, j]))
    for j in range(n):
        pivot = A[j, j]
        for k in range(j):
            pivot -= L[j, k] * L[j, k]
        if not pivot > rel_tol * scale:
            return L, j, pivot
        d = math.sqrt(pivot)
        L[j, j] = d
        for i in range(j + 1, n):
            acc = A[i, j]
            for k in range(j):
                acc -= L[i, k] * L[j, k]
            L[i, j] = acc / d
    return L, -1, 0.0


@numba.njit(cache=True)
def _cholesky_solve_kernel(L, B):
    n, m = B.shape
    Y = B.copy()
    for col in range(m):
        for i in range(n):
            acc = Y[i, col]
            for k in range(i):
                acc -= L[i, k] * Y[k, col]
            Y[i, col] = acc / L[i, i]
        for i in range(n - 1, -1, -1):
            acc = Y[i, col]
            for k in range(i + 1, n):
                acc -= L[k, i] * Y[k, col]
            Y[i, col] = acc / L[i, i]
    return Y


class Cholesky:
    """Lower Cholesky factor ``A = L L^T`` of a symmetric positive definite matrix.

    Raises :class:`NotPositiveDefinite` when a pivot drops to
    ``1e-13 * max(diag A)`` or below.
    """

    def __init__(self, A, *, check: bool = True):
        A = as_symmetric(A) if check else np.asarray(A, dtype=float)
        if A.shape[0] == 0:
            raise LengthMismatch("empty matrix")
        L, col, pivot = _cholesky_kernel(np.ascontiguousarray(A), PIVOT_TOL)
        if col >= 0:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at column {col}")
        self.L = L

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def solve(self, rhs) -> np.ndarray:
        b = np.asarray(rhs, dtype=float)
        if b.shape[0] != self.n:
            raise LengthMismatch(f"rhs has {b.shape[0]} rows, matrix has {self.n}")
        B = b.reshape(self.n, -1)
        return _cholesky_solve_kernel(self.L, np.ascontiguousarray(B)).reshape(b.shape)

    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(self.n))


def solve_spd(A, rhs) -> np.ndarray:
    """Solve ``A x = rhs`` for symmetric positive definite ``A`` (vector or matrix rhs)."""
    return Cholesky(A).solve(rhs)


# --------------------------------------------------------------------------
# Jacobi eigensolver

@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues; eigenvectors (if kept) are the columns of ``vectors``."""

    values: np.ndarray
    vectors: np.ndarray | None = None
    sweeps: int = 0

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]


@numba.njit(cache=True)
def _jacobi_sweeps(a, v, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if math.sqrt(2.0 * off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1


@numba.njit(cache=True)
def jacobi_eigenvalues(a):
    """Fast path: ascending eigenvalues of a symmetric matrix (no checks).

    Returns an empty array when the sweep cap is hit.
    """
    n = a.shape[0]
    work = a.copy()
    v = np.eye(n)
    fro = math.sqrt(np.sum(work * work))
    if _jacobi_sweeps(work, v, 1e-14 * fro, JACOBI_MAX_SWEEPS) < 0:
        return np.empty(0)
    return np.sort(np.diag(work).copy())


def symmetric_eigen(A, *, vectors: bool = False, psd: bool = False) -> Spectrum:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm is at most
    ``1e-14 * ||A||_F``; more than 100 sweeps raises :class:`NoConvergence`.
    With ``psd=True`` the matrix is known to be positive semidefinite and
    eigenvalues within ``-1e-9 * max(1, ||A||_F)`` of zero are clamped to 0.
    """
    a = as_symmetric(A)
    n = a.shape[0]
    if n == 0:
        raise LengthMismatch("empty matrix")
    a = np.ascontiguousarray(0.5 * (a + a.T))
    fro = float(np.linalg.norm(a))
    v = np.eye(n)
    sweeps = _jacobi_sweeps(a, v, 1e-14 * fro, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    if psd:
        vals = clamp_psd(vals, fro)
    return Spectrum(vals, v[:, order] if vectors else None, sweeps)


def clamp_psd(vals: np.ndarray, scale: float) -> np.ndarray:
    floor = -1e-9 * max(1.0, scale)
    if vals[0] < floor:
        raise BadParams(f"matrix declared PSD has eigenvalue {vals[0]:.3e}")
    return np.where(vals < 0.0, 0.0, vals)


# --------------------------------------------------------------------------
# sup { c.f : f^T Q f <= 1, f >= 0 }

def max_linear_over_nonneg_ellipsoid(
    Q, c, *, max_iter: int = 10_000, polish_every: int = 5, tol: float = 1e-12
) -> tuple[float, np.ndarray]:
    """Maximize ``c . f`` over ``{f >= 0, f^T Q f <= 1}`` for SPD ``Q``.

    Works on the equivalent convex problem ``min 1/2 g^T Q g - c . g`` over
    ``g >= 0``: its minimizer satisfies ``g^T Q g = c . g`` so the optimal
    value is ``sqrt(c . g)``, attained at ``f = g / sqrt(c . g)``.  Projected
    gradient steps with backtracking locate the active set; every
    ``polish_every`` steps the equality-constrained problem on the current
    support is solved exactly and accepted once it satisfies the KKT
    conditions.
    """
    Q = as_symmetric(Q)
    c = np.asarray(c, dtype=float).ravel()
    n = Q.shape[0]
    if c.shape != (n,):
        raise LengthMismatch(f"c has length {c.size}, Q is {n}x{n}")
    chol = Cholesky(Q)  # raises NotPositiveDefinite
    zero = np.zeros(n)
    if not np.any(c > 0):
        return 0.0, zero

    cscale = float(np.abs(c).max())
    diag = np.diag(Q)

    def phi(g):
        return 0.5 * g @ Q @ g - c @ g

    def polish(support):
        if not support.any():
            return None
        idx = np.flatnonzero(support)
        try:
            sub = Q[np.ix_(idx, idx)]
            gs = Cholesky(sub, check=False).solve(c[idx]) if idx.size < n else chol.solve(c)
        except NotPositiveDefinite:
            return None
        if gs.min() < -tol * max(1.0, np.abs(gs).max()):
            return None
        g = zero.copy()
        g[idx] = np.maximum(gs, 0.0)
        grad = Q @ g - c
        out = ~support
        if out.any() and grad[out].min() < -1e-10 * cscale:
            return None
        return g

    # first guess: the unconstrained maximizer's positive part
    g = np.maximum(chol.solve(c), 0.0)
    found = polish(g > 0)
    if found is None:
        found = polish(c > 0)
    step = 1.0 / diag.max()
    it = 0
    while found is None and it < max_iter:
        it += 1
        val = phi(g)
        grad = Q @ g - c
        while True:
            g_new = np.maximum(g - step * grad, 0.0)
            d = g_new - g
            if phi(g_new) <= val + grad @ d + (0.5 / step) * (d @ d) + 1e-300:
                break
            step *= 0.5
        g = g_new
        if it % polish_every == 0:
            found = polish(g > tol * max(1.0, g.max()))
        if not np.any(d):
            found = polish(g > 0) if found is None else found
            if found is None:
                break
    if found is not None:
        g = found

    value2 = float(c @ g)
    if value2 <= 0.0:
        return 0.0, zero
    value = math.sqrt(value2)
    f = g / value
    quad = float(f @ Q @ f)
    if quad > 1.0:
        f = f / math.sqrt(quad)
    return float(c @ f), f


def active_set_oracle(Q, c) -> float:
    """Brute-force value of ``sup {c . f : f >= 0, f^T Q f <= 1}``.

    Enumerates every support ``S``, takes the stationary point
    ``Q_SS^{-1} c_S`` scaled to the ellipsoid boundary, keeps it when it is
    componentwise nonnegative (``>= -1e-12``) and returns the best value.
    Dimension is capped at 12.
    """
    Q = np.asarray(Q, dtype=float)
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    if n > ORACLE_MAX_DIM:
        raise DimensionTooLarge(f"oracle enumerates 2**n supports; n={n} > {ORACLE_MAX_DIM}")
    best = 0.0
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            idx = list(S)
            cs = c[idx]
            try:
                x = np.linalg.solve(Q[np.ix_(idx, idx)], cs)
            except np.linalg.LinAlgError:
                continue
            kappa = float(cs @ x)
            if kappa <= 0.0:
                continue
            f = x / math.sqrt(kappa)
            if f.min() >= -1e-12:
                best = max(best, math.sqrt(kappa))
    return best


# --------------------------------------------------------------------------
# Nelder-Mead over floored simplices

@numba.njit(cache=True)
def project_to_floored_simplex(y, floor):
    """Euclidean projection of ``y`` onto ``{m : m >= floor, sum m = 1}``."""
    n = y.size
    budget = 1.0 - n * floor
    z = y - floor
    u = np.sort(z)[::-1]
    css = np.cumsum(u) - budget
    theta = css[0]
    for k in range(n):
        if u[k] - css[k] / (k + 1) > 0:
            theta = css[k] / (k + 1)
    m = np.maximum(z - theta, 0.0) + floor
    return m / m.sum()


def nelder_mead(
    func: Callable[[np.ndarray], float],
    x0,
    step: float,
    *,
    max_evals: int = 2000,
    xtol: float = 1e-10,
    ftol: float = 1e-12,
) -> tuple[np.ndarray, float, int]:
    """Plain Nelder-Mead (reflect 1, expand 2, contract 1/2, shrink 1/2)."""
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    simplex = np.vstack([x0, x0 + step * np.eye(dim)])
    fvals = np.array([func(p) for p in simplex])
    evals = dim + 1
    while evals < max_evals:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if (np.abs(simplex[1:] - simplex[0]).max() <= xtol
                or fvals[-1] - fvals[0] <= ftol * max(1.0, abs(fvals[0]))):
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = func(xr)
        evals += 1
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = func(xe)
            evals += 1
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (worst - centroid)
            fc = func(xc)
            evals += 1
            if fc < min(fr, fvals[-1]):
                simplex[-1], fvals[-1] = xc, fc
            else:
                simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                fvals[1:] = [func(p) for p in simplex[1:]]
                evals += dim
    best = int(np.argmin(fvals))
    return simplex[best], float(fvals[best]), evals


def simplex_starts(
    n: int,
    rng: np.random.Generator,
    *,
    n_starts: int = 8,
    max_pair_starts: int = 28,
    initial: Sequence = (),
) -> list[np.ndarray]:
    """Start points: supplied ones, uniform, vertex pairs, single vertices, random."""
    uniform = np.full(n, 1.0 / n)
    starts = [np.asarray(m, dtype=float) for m in initial]
    starts.append(uniform)
    pairs = list(itertools.combinations(range(n), 2))
    if len(pairs) > max_pair_starts:
        chosen = rng.choice(len(pairs), size=max_pair_starts, replace=False)
        pairs = [pairs[k] for k in sorted(chosen)]
    for i, j in pairs:
        m = 0.2 * uniform
        m[i] += 0.4
        m[j] += 0.4
        starts.append(m)
    if n <= max_pair_starts:
        for i in range(n):
            m = 0.2 * uniform
            m[i] += 0.8
            starts.append(m)
    while len(starts) < n_starts:
        starts.append(rng.dirichlet(np.ones(n)))
    return starts


def minimize_over_simplex(
    objective: Callable[[np.ndarray], float],
    n: int,
    floor: float,
    *,
    n_starts: int = 8,
    max_pair_starts: int = 28,
    seed: int | None = 0,
    initial: Sequence = (),
    max_evals: int = 3000,
) -> tuple[np.ndarray, float]:
    """Multistart Nelder-Mead minimization over ``{m : m_i >= floor, sum m = 1}``.

    The search variables are the first ``n - 1`` masses; a point is mapped to
    the floored simplex by Euclidean projection, and the squared projection
    distance is added as a penalty so the simplex does not drift.  Each start
    runs Nelder-Mead twice (the second run restarts from the first's best
    point).  Returns the best ``(masses, value)``; ties keep the earliest start.
    """
    if n < 1:
        raise BadParams("dimension must be positive")
    if not 1e-8 <= floor <= 1e-2:
        raise BadParams(f"floor {floor} outside [1e-8, 1e-2]")
    if n * floor >= 1.0:
        raise BadParams(f"floor {floor} too large for dimension {n}")

    def evaluate(m):
        v = float(objective(m))
        if math.isnan(v):
            raise ObjectiveNaN(f"objective returned NaN at {m}")
        return v

    if n == 1:
        m = np.ones(1)
        return m, evaluate(m)

    def penalized(x):
        y = np.empty(n)
        y[:-1] = x
        y[-1] = 1.0 - x.sum()
        m = project_to_floored_simplex(y, floor)
        v = evaluate(m)
        gap = y - m
        return v + max(1.0, abs(v)) * float(gap @ gap)

    rng = np.random.default_rng(seed)
    starts = simplex_starts(n, rng, n_starts=n_starts, max_pair_starts=max_pair_starts,
                            initial=initial)
    best_m, best_v = None, math.inf
    for start in starts:
        x0 = project_to_floored_simplex(np.asarray(start, dtype=float), floor)[:-1]
        x, _, _ = nelder_mead(penalized, x0, 0.1, max_evals=max_evals)
        x, _, _ = nelder_mead(penalized, x, 0.01, max_evals=max_evals)
        m = project_to_floored_simplex(np.append(x, 1.0 - x.sum()), floor)
        v = evaluate(m)
        if v < best_v:
            best_m, best_v = m, v
    return best_m, best_v
