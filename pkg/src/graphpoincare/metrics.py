"""Pseudometrics on a weighted graph and the diameters/inradii built from them.

* ``path_d``: path length with edge length ``1/b``.
* ``resistance_r``: effective resistance, the smallest ``r`` with
  ``|f(x)-f(y)|**2 <= r(x,y) E(f)``.
* ``restricted_r_omega``: the same supremum over ``f >= 0`` vanishing off Omega.
* ``sup_restricted_r_prime``: supremum of ``r_Omega`` over proper subsets.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadParams, OmegaNotProper
from .graph import VertexSubset, WeightedGraph, as_subset
from .numerics import Cholesky, max_linear_over_nonneg_ellipsoid

KINDS = ("path_d", "resistance_r", "restricted_r_omega", "sup_restricted_r_prime")


@dataclass(frozen=True, eq=False)
class PseudometricMatrix:
    kind: str
    distances: np.ndarray
    labels: tuple[str, ...]
    omega: VertexSubset | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadParams(f"unknown pseudometric kind {self.kind!r}")
        D = np.array(self.distances, dtype=float)
        D = np.triu(D, 1)
        D = D + D.T
        D.setflags(write=False)
        object.__setattr__(self, "distances", D)

    @property
    def n(self) -> int:
        return self.distances.shape[0]

    def __call__(self, x: str, y: str) -> float:
        i, j = self.labels.index(str(x)), self.labels.index(str(y))
        return float(self.distances[i, j])

    def sqrt(self) -> np.ndarray:
        """Entrywise square root (the metric whose square is this one)."""
        return np.sqrt(self.distances)

    def triangle_violation(self) -> float:
        """``max_{x,y,z} d(x,z) - d(x,y) - d(y,z)`` (nonpositive for a pseudometric)."""
        D = self.distances
        worst = -np.inf
        for y in range(self.n):
            worst = max(worst, float((D - D[:, [y]] - D[[y], :]).max()))
        return worst


# --------------------------------------------------------------------------
# path metric

def _dijkstra(g: WeightedGraph, source: int):
    """Distances and predecessors from ``source`` with edge length ``1/b``."""
    dist = np.full(g.n, np.inf)
    pred = np.full(g.n, -1, dtype=np.intp)
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = np.zeros(g.n, dtype=bool)
    while heap:
        dx, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w in g.adjacency[x]:
            nd = dx + 1.0 / w
            if nd < dist[y]:
                dist[y] = nd
                pred[y] = x
                heapq.heappush(heap, (nd, y))
    return dist, pred


def path_metric(g: WeightedGraph) -> PseudometricMatrix:
    D = np.vstack([_dijkstra(g, s)[0] for s in range(g.n)])
    # both triangles come from independent runs; keep the smaller rounding
    D = np.minimum(D, D.T)
    return PseudometricMatrix("path_d", D, g.labels)


def shortest_path(g: WeightedGraph, x: int, y: int) -> list[int]:
    """Vertex indices of a shortest ``x -> y`` path."""
    _, pred = _dijkstra(g, x)
    path = [y]
    while path[-1] != x:
        path.append(int(pred[path[-1]]))
    return path[::-1]


def path_length(g: WeightedGraph, path) -> float:
    W = g.weight_matrix
    return float(sum(1.0 / W[a, b] for a, b in zip(path, path[1:])))


# --------------------------------------------------------------------------
# resistance metric

def grounded_green(g: WeightedGraph, ground: int = 0) -> np.ndarray:
    """Inverse of the Laplacian with ``ground``'s row and column removed, zero-padded.

    ``G[x, x] + G[y, y] - 2 G[x, y]`` is the effective resistance between x and y.
    """
    keep = np.delete(np.arange(g.n), ground)
    L = g.laplacian[np.ix_(keep, keep)]
    G = np.zeros((g.n, g.n))
    G[np.ix_(keep, keep)] = Cholesky(L).inverse()
    return G


def resistance_metric(g: WeightedGraph) -> PseudometricMatrix:
    G = grounded_green(g)
    d = np.diag(G)
    R = d[:, None] + d[None, :] - 2.0 * G
    R = np.maximum(R, 0.0)
    return PseudometricMatrix("resistance_r", R, g.labels)


def harmonic_potential(g: WeightedGraph, x: int, y: int) -> np.ndarray:
    """The potential ``L^+ (e_x - e_y)`` up to a constant (unit current from y to x)."""
    G = grounded_green(g)
    return G[:, x] - G[:, y]


# --------------------------------------------------------------------------
# restricted metrics

def restricted_metric(g: WeightedGraph, omega) -> PseudometricMatrix:
    """``r_Omega(x,y) = sup{|f(x)-f(y)|**2 : f >= 0, f = 0 off Omega, E(f) <= 1}``.

    Each pair needs two nonnegative ellipsoid maximizations, one per sign of
    ``f(x) - f(y)``, with the quadratic form ``L[Omega, Omega]``.
    """
    sub = as_subset(g, omega)
    idx = sub.indices
    pos = {int(v): k for k, v in enumerate(idx)}
    Q = g.laplacian[np.ix_(idx, idx)]
    R = np.zeros((g.n, g.n))
    for x, y in itertools.combinations(range(g.n), 2):
        if x not in pos and y not in pos:
            continue
        c = np.zeros(idx.size)
        if x in pos:
            c[pos[x]] += 1.0
        if y in pos:
            c[pos[y]] -= 1.0
        v_plus, _ = max_linear_over_nonneg_ellipsoid(Q, c)
        v_minus, _ = max_linear_over_nonneg_ellipsoid(Q, -c)
        R[x, y] = max(v_plus, v_minus) ** 2
    return PseudometricMatrix("restricted_r_omega", R, g.labels, sub)


def sup_restricted_metric(g: WeightedGraph) -> PseudometricMatrix:
    """``r'`` as the entrywise maximum of ``r_Omega`` over ``Omega = X \\ {p}``.

    ``r_Omega`` grows with Omega, so the maximal proper subsets suffice.
    """
    R = np.zeros((g.n, g.n))
    for p in range(g.n):
        mask = np.ones(g.n, dtype=bool)
        mask[p] = False
        R = np.maximum(R, restricted_metric(g, mask).distances)
    return PseudometricMatrix("sup_restricted_r_prime", R, g.labels)


def green_restricted_metric(g: WeightedGraph, omega) -> PseudometricMatrix:
    """Closed-form ``r_Omega`` from Dirichlet Green functions.

    For ``x`` in Omega and ``y`` outside, ``r_Omega(x,y) = G_Omega(x,x)``; for
    ``x, y`` in Omega the optimum vanishes at one endpoint, so
    ``r_Omega(x,y) = max(G_{Omega-y}(x,x), G_{Omega-x}(y,y))``, where
    ``G_A = L[A, A]^{-1}``.  Used as an independent check on the QP route.
    """
    sub = as_subset(g, omega)
    inside = set(int(v) for v in sub.indices)
    L = g.laplacian

    def green_diag(A):
        A = sorted(A)
        if not A:
            return {}
        Ginv = np.linalg.inv(L[np.ix_(A, A)])
        return {v: Ginv[k, k] for k, v in enumerate(A)}

    full = green_diag(inside)
    minus = {y: green_diag(inside - {y}) for y in inside}
    R = np.zeros((g.n, g.n))
    for x, y in itertools.combinations(range(g.n), 2):
        if x in inside and y in inside:
            R[x, y] = max(minus[y][x], minus[x][y])
        elif x in inside:
            R[x, y] = full[x]
        elif y in inside:
            R[x, y] = full[y]
    return PseudometricMatrix("restricted_r_omega", R, g.labels, sub)


# --------------------------------------------------------------------------
# geometric quantities

def diameter(pm: PseudometricMatrix) -> float:
    return float(pm.distances.max())


def inradius(pm: PseudometricMatrix, omega) -> float:
    """``max_{x in Omega} min_{y not in Omega} delta(x, y)``.

    The open ball ``U_s(x)`` lies inside Omega exactly when ``s`` is at most
    the distance from x to the complement, so the supremum defining the
    inradius reduces to this max-min.
    """
    mask = _mask(pm, omega)
    D = pm.distances[np.ix_(mask, ~mask)]
    return float(D.min(axis=1).max())


def _mask(pm: PseudometricMatrix, omega) -> np.ndarray:
    if isinstance(omega, VertexSubset):
        mask = omega.membership
    else:
        items = omega if isinstance(omega, np.ndarray) else list(omega)
        arr = np.asarray(items)
        if arr.dtype == bool:
            mask = arr
        else:
            mask = np.zeros(pm.n, dtype=bool)
            for lab in items:
                mask[pm.labels.index(str(lab))] = True
    mask = np.asarray(mask, dtype=bool)
    if mask.size != pm.n or not (0 < mask.sum() < pm.n):
        raise OmegaNotProper("subset must be nonempty and proper")
    return mask


def dirichlet_inradius_d(host: WeightedGraph, omega) -> float:
    """d-inradius of a finite set Omega sitting inside a larger finite host graph."""
    sub = as_subset(host, omega)
    return inradius(path_metric(host), sub)
