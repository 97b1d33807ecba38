"""Finite realizations of the Neumann and Omega-restricted Laplacians.

For a measure ``m`` the operator of the energy form on ``l2(X, m)`` is the
pencil ``(L, diag(m))``.  It is realized as the symmetric matrix
``D^{-1/2} L D^{-1/2}``, which has the same eigenvalues; the Rayleigh quotient
of that matrix at ``D^{1/2} f`` is ``E(f) / ||f||_2**2``.

On a finite graph every function has finite support, so the Dirichlet and
Neumann realizations coincide; only the Neumann and Omega-restricted ones are
built here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numba
import numpy as np

from .errors import IndexOutOfRange, LengthMismatch, NoConvergence, NonpositiveMass
from .graph import Measure, VertexSubset, WeightedGraph, as_subset
from .numerics import Spectrum, clamp_psd, jacobi_eigenvalues, symmetric_eigen


@dataclass(frozen=True, eq=False)
class RealizedOperator:
    kind: str  # "neumann" or "omega_restricted"
    matrix: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)
    omega: VertexSubset | None = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> Spectrum:
        return symmetric_eigen(self.matrix, vectors=True, psd=True)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.values

    def rayleigh(self, f) -> float:
        """``E(f)/||f||_2**2`` for ``f`` on the operator's vertex set."""
        h = np.sqrt(self.masses) * np.asarray(f, dtype=float)
        return float(h @ self.matrix @ h / (h @ h))


def _masses(m, size: int) -> np.ndarray:
    masses = m.masses if isinstance(m, Measure) else np.asarray(m, dtype=float).ravel()
    if masses.size != size:
        raise LengthMismatch(f"measure has {masses.size} entries, expected {size}")
    if not np.all(masses > 0):
        raise NonpositiveMass("masses must be strictly positive")
    return masses


def _pencil(L: np.ndarray, masses: np.ndarray) -> np.ndarray:
    s = 1.0 / np.sqrt(masses)
    A = s[:, None] * L * s[None, :]
    return 0.5 * (A + A.T)


def neumann_operator(g: WeightedGraph, m) -> RealizedOperator:
    """Matrix ``D_m^{-1/2} L D_m^{-1/2}`` for a full-support (finite) measure ``m``."""
    masses = _masses(m, g.n)
    return RealizedOperator("neumann", _pencil(g.laplacian, masses), masses)


def omega_operator(g: WeightedGraph, omega, m) -> RealizedOperator:
    """Energy form restricted to functions vanishing outside Omega.

    ``m`` may be given on all of X (only its Omega entries are used, and they
    must be positive) or directly as ``|Omega|`` masses in vertex order.
    """
    sub = as_subset(g, omega)
    idx = sub.indices
    raw = m.masses if isinstance(m, Measure) else np.asarray(m, dtype=float).ravel()
    if raw.size == g.n:
        raw = raw[idx]
    masses = _masses(raw, idx.size)
    L = g.laplacian[np.ix_(idx, idx)]
    return RealizedOperator("omega_restricted", _pencil(L, masses), masses, sub)


def eigenvalue_k(op: RealizedOperator, k: int) -> float:
    """``k``-th smallest eigenvalue (from 0, multiplicities counted)."""
    if not 0 <= k < op.dimension:
        raise IndexOutOfRange(f"k={k} outside 0..{op.dimension - 1}")
    return float(op.eigenvalues[k])


@numba.njit(cache=True)
def _pencil_eigenvalues(L, masses):
    s = 1.0 / np.sqrt(masses)
    n = masses.size
    A = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            A[i, j] = s[i] * L[i, j] * s[j]
            A[j, i] = A[i, j]
    return jacobi_eigenvalues(A), math.sqrt(np.sum(A * A))


def pencil_eigenvalue(L: np.ndarray, masses, k: int) -> float:
    """``k``-th eigenvalue of the pencil ``(L, diag(masses))`` without building an operator.

    The hot path of the measure searches; ``L`` must be a C-contiguous float array.
    """
    vals, scale = _pencil_eigenvalues(L, np.ascontiguousarray(masses, dtype=float))
    if vals.size == 0:
        raise NoConvergence("Jacobi did not converge")
    return float(clamp_psd(vals, scale)[k])
