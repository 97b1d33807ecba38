"""Best topological Poincare constants and numerical checks of their theory.

Constants:

* ``c_P``: smallest ``c`` with ``(sup f - inf f)**2 <= c E(f)``; equals the
  resistance diameter.
* ``c_P^Omega``: smallest ``c`` with ``max f**2 <= c E(f)`` for ``f``
  vanishing off Omega; equals the diameter (and the Omega-inradius) of
  ``r_Omega``.
* ``c_P^0``: the finitely-supported version on an infinite graph, reported
  only as a sequence over growing finite truncations.

The spectral characterizations (infima of eigenvalues over probability
measures) are approximated by floored simplex searches at decreasing mass
floors, followed by a linear extrapolation ``v(floor) = v_inf + a * floor``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadF, BadFamily, BadParams, InternalIdentityViolation, UnknownTheoremId
from .graph import (
    Measure,
    WeightedGraph,
    as_subset,
    comb_label,
    generate_family,
    uniform_measure,
    variational_seminorm,
)
from .metrics import (
    diameter,
    grounded_green,
    inradius,
    path_metric,
    resistance_metric,
    restricted_metric,
    sup_restricted_metric,
)
from .numerics import minimize_over_simplex
from .spectral import eigenvalue_k, neumann_operator, omega_operator, pencil_eigenvalue

DEFAULT_FLOORS = (1e-2, 1e-3, 1e-4, 1e-5)
VARIATIONAL_TOL = 0.02
IDENTITY_TOL = 1e-8
INEQUALITY_SLACK = 1e-9
R_PRIME_TOL = 1e-6
QUARTER_TOL = 1e-12


@dataclass
class VerificationReport:
    """Outcome of one check.

    For identities ``residual`` is the (relative, where stated) gap between
    ``lhs`` and ``rhs``.  For inequalities ``lhs >= rhs`` it is the signed
    violation ``rhs - lhs`` (negative means slack).  ``passed`` is
    ``residual <= tolerance``.
    """

    theorem: str
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    relation: str = "="
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "notes": self.notes,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.theorem}: lhs={self.lhs:.12g} {self.relation} "
                f"rhs={self.rhs:.12g} (residual {self.residual:.3e}, tol {self.tolerance:.1e})")


def _inequality(theorem: str, lhs: float, rhs: float, notes=None) -> VerificationReport:
    tol = INEQUALITY_SLACK * max(1.0, abs(rhs))
    return VerificationReport(theorem, lhs, rhs, rhs - lhs, tol, ">=", notes or {})


# --------------------------------------------------------------------------
# constants

def best_constant_global(g: WeightedGraph) -> float:
    """``c_P`` as the diameter of the resistance metric."""
    return diameter(resistance_metric(g))


def best_constant_omega(g: WeightedGraph, omega) -> float:
    """``c_P^Omega``, computed both as diameter and as Omega-inradius of ``r_Omega``."""
    sub = as_subset(g, omega)
    pm = restricted_metric(g, sub)
    diam = diameter(pm)
    inr = inradius(pm, sub)
    if abs(diam - inr) > IDENTITY_TOL * max(1.0, diam):
        raise InternalIdentityViolation(
            f"diam_r_Omega = {diam!r} but Inr_r_Omega(Omega) = {inr!r}"
        )
    return diam


@dataclass
class Exhaustion:
    """``c_P^{Omega_n}`` along nested truncations of an infinite family."""

    family: str
    params: tuple
    pad: int
    sequence: list[tuple[int, float]]
    converged: bool | None

    @property
    def verdict(self) -> str:
        if self.converged is None:
            return "undetermined"
        return "converged" if self.converged else "growing"


EXHAUSTION_FAMILIES = ("path", "geometric_halfline", "comb")


def exhaustion_instance(family: str, params: Sequence[int], n: int, pad: int = 1):
    """Host graph and the labels of the truncation ``Omega_n`` inside it.

    ``path`` and ``geometric_halfline``: ``Omega_n`` is vertices ``0..n-1`` of a
    half-line with ``pad`` extra vertices.  ``comb`` (one parameter, the tooth
    depth ``K``): ``Omega_n`` is the columns ``-n..n``, the host is
    ``comb(n + pad, K)``.
    """
    if n < 1 or pad < 1:
        raise BadParams("truncation index and pad must be >= 1")
    if family == "path":
        host = generate_family("path", n + pad)
        omega = [str(k) for k in range(n)]
    elif family == "geometric_halfline":
        host = generate_family("geometric_halfline", n + pad - 1)
        omega = [str(k) for k in range(n)]
    elif family == "comb":
        if len(params) != 1:
            raise BadFamily("comb exhaustion takes the tooth depth K as its only parameter")
        (K,) = params
        host = generate_family("comb", n + pad, K)
        omega = [comb_label(i, k) for i in range(-n, n + 1) for k in range(K + 1)]
    else:
        raise BadFamily(f"no exhaustion defined for {family!r}; use one of {EXHAUSTION_FAMILIES}")
    return host, omega


def best_constant_zero_exhaustion(
    family: str, params: Sequence[int] = (), n_max: int = 10, *, pad: int = 1,
    n_min: int = 1, converge_tol: float = 1e-4,
) -> Exhaustion:
    seq = []
    for n in range(n_min, n_max + 1):
        host, omega = exhaustion_instance(family, params, n, pad)
        seq.append((n, best_constant_omega(host, omega)))
    converged = None
    if len(seq) >= 2:
        converged = seq[-1][1] - seq[-2][1] < converge_tol
    return Exhaustion(family, tuple(params), pad, seq, converged)


@dataclass
class PoincareConstants:
    c_P: float
    c_P_omega: dict = field(default_factory=dict)
    c_P_zero_sequence: list = field(default_factory=list)


def poincare_constants(g: WeightedGraph, omegas: Sequence = ()) -> PoincareConstants:
    out = PoincareConstants(best_constant_global(g))
    for omega in omegas:
        sub = as_subset(g, omega)
        out.c_P_omega[tuple(sub.labels(g))] = best_constant_omega(g, sub)
    return out


# --------------------------------------------------------------------------
# measure-variational infima

@dataclass
class FloorResult:
    floor: float
    masses: np.ndarray
    value: float


REFINE_PAIR_STARTS = 4


def _floored_search(objective, dim, floors, *, seed, n_starts, max_pair_starts):
    # the largest floor explores broadly; smaller floors refine from its optimum
    results: list[FloorResult] = []
    previous = []
    pair_starts = max_pair_starts
    for floor in sorted(floors, reverse=True):
        masses, value = minimize_over_simplex(
            objective, dim, floor, n_starts=n_starts, max_pair_starts=pair_starts,
            seed=seed, initial=previous,
        )
        results.append(FloorResult(floor, masses, value))
        previous = [masses]
        pair_starts = min(max_pair_starts, REFINE_PAIR_STARTS)
    return results


def infimize_lambda1(
    g: WeightedGraph, floors: Sequence[float] = DEFAULT_FLOORS, *, seed: int = 0,
    n_starts: int = 8, max_pair_starts: int = 28,
) -> list[FloorResult]:
    """Minimize the spectral gap ``lambda_1(m)`` over floored probability simplices.

    Floors are visited from largest to smallest and each search is seeded with
    the previous optimum, which is feasible for the smaller floor; the values
    are therefore nonincreasing along the returned list.
    """
    L = np.ascontiguousarray(g.laplacian)
    return _floored_search(lambda m: pencil_eigenvalue(L, m, 1), g.n, floors, seed=seed,
                           n_starts=n_starts, max_pair_starts=max_pair_starts)


def infimize_lambda0_omega(
    g: WeightedGraph, omega, floors: Sequence[float] = DEFAULT_FLOORS, *, seed: int = 0,
    n_starts: int = 8, max_pair_starts: int = 28,
) -> list[FloorResult]:
    """Minimize the lowest eigenvalue of the Omega operator over measures on Omega."""
    idx = as_subset(g, omega).indices
    L = np.ascontiguousarray(g.laplacian[np.ix_(idx, idx)])
    return _floored_search(lambda m: pencil_eigenvalue(L, m, 0), idx.size, floors, seed=seed,
                           n_starts=n_starts, max_pair_starts=max_pair_starts)


def extrapolate(results: Sequence[FloorResult]) -> float:
    """Intercept of the least-squares line ``value = v_inf + a * floor``."""
    if len(results) == 1:
        return results[0].value
    x = np.array([r.floor for r in results])
    y = np.array([r.value for r in results])
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


# --------------------------------------------------------------------------
# small standalone checks

def zero_mean_ratio(f, masses) -> float:
    """``||f - m(f)||_2**2 / ||f||_V**2`` for nonnegative masses summing to one."""
    f = np.asarray(f, dtype=float)
    m = np.asarray(masses, dtype=float)
    f = f - f @ m
    return float((f * f) @ m / variational_seminorm(f) ** 2)


def extremal_function(g: WeightedGraph) -> np.ndarray:
    """Potential of a resistance-diametral pair, centred so that ``sup f = -inf f``.

    It saturates ``||f||_V**2 <= c_P E(f)``.
    """
    R = resistance_metric(g).distances
    x, y = np.unravel_index(int(np.argmax(R)), R.shape)
    G = grounded_green(g)
    f = G[:, x] - G[:, y]
    return f - 0.5 * (f.max() + f.min())


# --------------------------------------------------------------------------
# theorem checks

THEOREMS = (
    "thm-computing",
    "spectral-theory-omega",
    "char-inradius",
    "cor-textbook",
    "finite-measure",
    "r-prime-equals-r",
    "quarter-inequality",
    "higher-eigenvalues",
)
ALIASES = {"char-c-null": "spectral-theory-omega"}


def default_omega(g: WeightedGraph):
    """All vertices but the last one."""
    mask = np.ones(g.n, dtype=bool)
    mask[-1] = False
    return mask


def default_f(g: WeightedGraph):
    mask = np.zeros(g.n, dtype=bool)
    mask[0] = True
    return mask


def verify_theorem(
    g: WeightedGraph,
    which: str,
    *,
    measure: Measure | None = None,
    omega=None,
    F=None,
    floors: Sequence[float] = DEFAULT_FLOORS,
    seed: int = 0,
    n_starts: int = 8,
    n_samples: int = 10_000,
) -> VerificationReport:
    """Run one named check on ``g``.

    ``omega`` defaults to all vertices but the last, ``F`` to the first vertex,
    ``measure`` to the uniform one; ``seed`` only drives random starts and
    random samples.
    """
    which = ALIASES.get(which, which)
    if which not in THEOREMS:
        raise UnknownTheoremId(f"unknown theorem {which!r}; known: {', '.join(THEOREMS)}")
    m = measure if measure is not None else uniform_measure(g)

    if which == "thm-computing":
        c_P = best_constant_global(g)
        runs = infimize_lambda1(g, floors, seed=seed, n_starts=n_starts)
        lhs, rhs = 4.0 / c_P, extrapolate(runs)
        return VerificationReport(which, lhs, rhs, abs(lhs - rhs) / lhs, VARIATIONAL_TOL, "=", {
            "c_P": c_P,
            "floors": [r.floor for r in runs],
            "values": [r.value for r in runs],
            "best_measure": runs[-1].masses.tolist(),
            "seed": seed,
        })

    if which == "spectral-theory-omega":
        sub = as_subset(g, omega if omega is not None else default_omega(g))
        c_om = best_constant_omega(g, sub)
        runs = infimize_lambda0_omega(g, sub, floors, seed=seed, n_starts=n_starts)
        lhs, rhs = 1.0 / c_om, extrapolate(runs)
        tol = 1e-10 if len(sub) == 1 else VARIATIONAL_TOL
        return VerificationReport(which, lhs, rhs, abs(lhs - rhs) / lhs, tol, "=", {
            "omega": sub.labels(g),
            "c_P_omega": c_om,
            "floors": [r.floor for r in runs],
            "values": [r.value for r in runs],
            "seed": seed,
        })

    if which == "char-inradius":
        sub = as_subset(g, omega if omega is not None else default_omega(g))
        pm = restricted_metric(g, sub)
        lhs, rhs = diameter(pm), inradius(pm, sub)
        return VerificationReport(which, lhs, rhs, abs(lhs - rhs), IDENTITY_TOL, "=",
                                  {"omega": sub.labels(g)})

    if which == "cor-textbook":
        lam1 = eigenvalue_k(neumann_operator(g, m), 1)
        diam_d = diameter(path_metric(g))
        return _inequality(which, lam1, 4.0 / diam_d, {"diam_d": diam_d})

    if which == "finite-measure":
        sub = as_subset(g, omega if omega is not None else default_omega(g))
        lam = eigenvalue_k(omega_operator(g, sub, m), 0)
        inr_d = inradius(path_metric(g), sub)
        m_omega = m.total(sub.membership)
        return _inequality(which, lam, 1.0 / (inr_d * m_omega), {
            "omega": sub.labels(g), "inr_d": inr_d, "m_omega": m_omega,
        })

    if which == "r-prime-equals-r":
        gap = float(np.abs(sup_restricted_metric(g).distances
                           - resistance_metric(g).distances).max())
        return VerificationReport(which, gap, 0.0, gap, R_PRIME_TOL, "=",
                                  {"lhs": "max |r' - r|"})

    if which == "quarter-inequality":
        rng = np.random.default_rng(seed)
        masses = rng.dirichlet(np.ones(g.n), size=n_samples)
        f = rng.normal(size=(n_samples, g.n))
        f -= np.sum(f * masses, axis=1, keepdims=True)
        norm2 = np.sum(f * f * masses, axis=1)
        var2 = (f.max(axis=1) - f.min(axis=1)) ** 2
        lhs = float((norm2 / var2).max())
        return VerificationReport(which, lhs, 0.25, lhs - 0.25, QUARTER_TOL, "<=",
                                  {"samples": n_samples, "seed": seed, "lhs": "max ||f||^2/||f||_V^2"})

    # higher-eigenvalues
    return higher_eigenvalue_bounds(g, m, F if F is not None else default_f(g))


def higher_eigenvalue_bounds(g: WeightedGraph, m, F) -> VerificationReport:
    """Lower bounds for ``lambda_{|F|+1}`` of the Neumann operator.

    Checked: ``lambda_{n+1} >= lambda_{X\\F}``; (a)
    ``lambda_{n+1} >= 4 / (c_P m(X\\F))``; (b)
    ``lambda_{n+1} >= 1 / (c_P^{X\\F} m(X\\F))``, together with the two steps
    behind it, ``lambda_{X\\F} >= 1 / (c_P^{X\\F} m(X\\F))`` and
    ``c_P^{X\\F} <= c_P``.  The report's ``lhs`` is ``lambda_{n+1}``, its
    ``rhs`` the larger of the two bounds, and its residual the worst scaled
    violation over all checks.  ``notes['informational']`` carries
    ``lambda_{X\\F} - bound(a)``, which is not implied by the theory and can be
    negative.
    """
    if not isinstance(m, Measure):
        m = Measure(m)
    mask = np.asarray(as_subset(g, F).membership)
    k = int(mask.sum())
    if not 1 <= k <= g.n - 2:
        raise BadF(f"|F| = {k} must satisfy 1 <= |F| <= n - 2 (n = {g.n})")
    rest = ~mask
    lam_next = eigenvalue_k(neumann_operator(g, m), k + 1)
    lam_rest = eigenvalue_k(omega_operator(g, rest, m), 0)
    c_P = best_constant_global(g)
    c_rest = best_constant_omega(g, rest)
    m_rest = m.total(rest)
    bound_a = 4.0 / (c_P * m_rest)
    bound_b = 1.0 / (c_rest * m_rest)

    checks = {
        "lambda_next>=lambda_rest": (lam_next, lam_rest),
        "(a) lambda_next>=4/(c_P m(rest))": (lam_next, bound_a),
        "(b) lambda_next>=1/(c_P_rest m(rest))": (lam_next, bound_b),
        "lambda_rest>=1/(c_P_rest m(rest))": (lam_rest, bound_b),
        "c_P>=c_P_rest": (c_P, c_rest),
    }
    violations = {
        name: (rhs - lhs) / max(1.0, abs(rhs)) for name, (lhs, rhs) in checks.items()
    }
    residual = max(violations.values())
    return VerificationReport(
        "higher-eigenvalues", lam_next, max(bound_a, bound_b), residual, INEQUALITY_SLACK, ">=",
        {
            "F": [g.labels[i] for i in np.flatnonzero(mask)],
            "index": k + 1,
            "lambda_next": lam_next,
            "lambda_rest": lam_rest,
            "bound_a": bound_a,
            "bound_b": bound_b,
            "c_P": c_P,
            "c_P_rest": c_rest,
            "m_rest": m_rest,
            "slacks": {name: lhs - rhs for name, (lhs, rhs) in checks.items()},
            "informational": {"lambda_rest-bound_a": lam_rest - bound_a},
        },
    )
