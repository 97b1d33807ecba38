"""Weighted graphs, vertex functions, measures and graph families.

A graph is finite, undirected, connected and carries strictly positive edge
weights ``b(x, y)``.  Vertices are addressed by string labels externally and by
dense indices ``0..n-1`` internally; every vector and matrix in the package uses
the internal order (the order in which labels were first seen, unless an
explicit vertex order is supplied).
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadParams,
    DisconnectedGraph,
    DuplicateEdgeConflict,
    LengthMismatch,
    NonpositiveMass,
    NonpositiveWeight,
    OmegaNotProper,
    ParseError,
    SelfLoop,
    UnknownFamily,
)

MEASURE_SUM_TOL = 1e-12


class WeightedGraph:
    """Immutable connected weighted graph.

    Use :func:`build_graph` rather than calling the constructor directly.
    """

    def __init__(self, labels: Sequence[str], heads, tails, weights):
        self._labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self._labels)}
        self._heads = np.asarray(heads, dtype=np.intp)
        self._tails = np.asarray(tails, dtype=np.intp)
        self._weights = np.asarray(weights, dtype=float)
        for arr in (self._heads, self._tails, self._weights):
            arr.setflags(write=False)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def n(self) -> int:
        return len(self._labels)

    def __len__(self) -> int:
        return self.n

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown vertex label {label!r}") from None

    def edges(self) -> list[tuple[str, str, float]]:
        """Edges as ``(label, label, weight)`` in construction order."""
        return [
            (self._labels[i], self._labels[j], float(w))
            for i, j, w in zip(self._heads, self._tails, self._weights)
        ]

    @property
    def edge_arrays(self):
        """``(heads, tails, weights)`` index arrays, one entry per edge."""
        return self._heads, self._tails, self._weights

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        W = np.zeros((self.n, self.n))
        W[self._heads, self._tails] = self._weights
        W[self._tails, self._heads] = self._weights
        W.setflags(write=False)
        return W

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for i, j, w in zip(self._heads, self._tails, self._weights):
            adj[i].append((int(j), float(w)))
            adj[j].append((int(i), float(w)))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def laplacian(self) -> np.ndarray:
        """Weighted Laplacian ``L = diag(sum_y b(x, y)) - b``."""
        W = self.weight_matrix
        L = np.diag(W.sum(axis=1)) - W
        L.setflags(write=False)
        return L

    def weight(self, x, y) -> float:
        return float(self.weight_matrix[self.index(x), self.index(y)])

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, edges={len(self._weights)})"


def build_graph(edges: Iterable, vertices: Sequence[str] | None = None) -> WeightedGraph:
    """Build a connected weighted graph from ``(label, label, weight)`` triples.

    ``vertices`` fixes the internal vertex order (it must list exactly the labels
    appearing in ``edges``); otherwise labels are numbered by first appearance.
    Repeated pairs are accepted only when their weights agree.
    """
    order: dict[str, int] = {}
    if vertices is not None:
        for lab in vertices:
            lab = str(lab)
            if lab in order:
                raise BadParams(f"vertex {lab!r} listed twice")
            order[lab] = len(order)

    pairs: dict[tuple[int, int], float] = {}
    for item in edges:
        try:
            u, v, w = item
        except (TypeError, ValueError):
            raise BadParams(f"edge must be (label, label, weight), got {item!r}") from None
        u, v, w = str(u), str(v), float(w)
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u!r}")
        if not (w > 0) or not math.isfinite(w):
            raise NonpositiveWeight(f"edge ({u}, {v}) has weight {w}")
        for lab in (u, v):
            if lab not in order:
                if vertices is not None:
                    raise BadParams(f"edge uses vertex {lab!r} missing from vertex list")
                order[lab] = len(order)
        i, j = order[u], order[v]
        key = (i, j) if i < j else (j, i)
        if key in pairs and pairs[key] != w:
            raise DuplicateEdgeConflict(
                f"edge ({u}, {v}) given with weights {pairs[key]} and {w}"
            )
        pairs[key] = w

    if not pairs:
        raise BadParams("at least one edge is required")
    n = len(order)
    if n < 2:
        raise BadParams("graph needs at least two vertices")

    labels = sorted(order, key=order.__getitem__)
    heads = [k[0] for k in pairs]
    tails = [k[1] for k in pairs]
    g = WeightedGraph(labels, heads, tails, list(pairs.values()))
    _check_connected(g)
    return g


def _check_connected(g: WeightedGraph) -> None:
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y, _ in g.adjacency[x]:
            if not seen[y]:
                seen[y] = True
                queue.append(y)
    if not seen.all():
        missing = [g.labels[i] for i in np.flatnonzero(~seen)[:5]]
        raise DisconnectedGraph(f"graph is disconnected; unreachable from {g.labels[0]!r}: {missing}")


# --------------------------------------------------------------------------
# functions on vertices

def as_function(g: WeightedGraph, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n,):
        raise LengthMismatch(f"function has shape {f.shape}, graph has {g.n} vertices")
    return f


def energy(g: WeightedGraph, f) -> float:
    """Energy ``1/2 sum_{x,y} b(x,y) (f(x) - f(y))**2``."""
    f = as_function(g, f)
    heads, tails, w = g.edge_arrays
    diff = f[heads] - f[tails]
    return float(np.dot(w, diff * diff))


def energy_bilinear(g: WeightedGraph, f, h) -> float:
    """Polarized energy ``1/2 sum b(x,y) (f(x)-f(y)) (h(x)-h(y))``."""
    f = as_function(g, f)
    h = as_function(g, h)
    heads, tails, w = g.edge_arrays
    return float(np.dot(w, (f[heads] - f[tails]) * (h[heads] - h[tails])))


def variational_seminorm(f) -> float:
    """``sup f - inf f``."""
    f = np.asarray(f, dtype=float)
    if f.size == 0:
        raise LengthMismatch("empty function")
    return float(f.max() - f.min())


# --------------------------------------------------------------------------
# measures and vertex subsets

@dataclass(frozen=True, eq=False)
class Measure:
    """Strictly positive masses on the vertices.

    With ``probability=True`` (the default) the masses must sum to one within
    ``1e-12``; pass ``normalize=True`` to rescale arbitrary positive masses.
    """

    masses: np.ndarray
    probability: bool = True

    def __init__(self, masses, *, probability: bool = True, normalize: bool = False):
        m = np.array(masses, dtype=float).ravel()
        if m.size == 0:
            raise LengthMismatch("empty measure")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise NonpositiveMass("measure masses must be finite and strictly positive")
        if normalize:
            m = m / m.sum()
        if probability and abs(m.sum() - 1.0) > MEASURE_SUM_TOL:
            raise BadParams(f"probability masses sum to {m.sum()!r}, not 1")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "probability", probability)

    def __len__(self) -> int:
        return self.masses.size

    def total(self, mask=None) -> float:
        if mask is None:
            return float(self.masses.sum())
        return float(self.masses[np.asarray(mask, dtype=bool)].sum())


ProbabilityMeasure = Measure


def uniform_measure(g: WeightedGraph) -> Measure:
    return Measure(np.full(g.n, 1.0 / g.n))


@dataclass(frozen=True, eq=False)
class VertexSubset:
    """Boolean membership vector over the vertices of a graph."""

    membership: np.ndarray = field(repr=False)

    def __init__(self, membership):
        mask = np.array(membership, dtype=bool).ravel()
        mask.setflags(write=False)
        object.__setattr__(self, "membership", mask)

    @classmethod
    def from_labels(cls, g: WeightedGraph, labels: Iterable) -> "VertexSubset":
        mask = np.zeros(g.n, dtype=bool)
        for lab in labels:
            mask[g.index(lab)] = True
        return cls(mask)

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.membership)

    @property
    def complement_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.membership)

    def __len__(self) -> int:
        return int(self.membership.sum())

    def labels(self, g: WeightedGraph) -> list[str]:
        return [g.labels[i] for i in self.indices]


def as_subset(g: WeightedGraph, omega, *, proper: bool = True) -> VertexSubset:
    """Coerce labels, a boolean mask, or a :class:`VertexSubset` to a subset of ``g``.

    With ``proper=True`` the subset must be nonempty and miss at least one vertex.
    """
    if isinstance(omega, VertexSubset):
        sub = omega
    else:
        items = omega if isinstance(omega, np.ndarray) else list(omega)
        if np.asarray(items).dtype == bool:
            sub = VertexSubset(items)
        else:
            sub = VertexSubset.from_labels(g, items)
    if sub.membership.size != g.n:
        raise LengthMismatch(f"subset has length {sub.membership.size}, graph has {g.n} vertices")
    if proper and not (0 < len(sub) < g.n):
        raise OmegaNotProper(f"subset must be nonempty and proper, has {len(sub)} of {g.n} vertices")
    return sub


# --------------------------------------------------------------------------
# families

FAMILIES = ("path", "cycle", "complete", "star", "comb", "geometric_halfline")


def _need_int(name: str, params: Sequence, count: int) -> list[int]:
    if len(params) != count:
        raise BadParams(f"{name} takes {count} integer parameter(s), got {len(params)}")
    out = []
    for p in params:
        if isinstance(p, bool) or int(p) != p:
            raise BadParams(f"{name} parameters must be integers, got {p!r}")
        out.append(int(p))
    return out


def comb_label(i: int, k: int) -> str:
    return f"({i},{k})"


def generate_family(name: str, *params, printed_weights: bool = False) -> WeightedGraph:
    """Deterministic members of the built-in graph families.

    ``path(n)``, ``cycle(n)``, ``complete(n)`` and ``star(n)`` have ``n`` vertices
    and unit weights (``star`` has vertex ``center`` and leaves ``leaf1..``).
    ``geometric_halfline(n)`` has vertices ``0..n`` and weight ``2**(k+1)`` on
    ``(k, k+1)``.

    ``comb(N, K)`` has vertices ``(i,k)`` for ``-N <= i <= N``, ``0 <= k <= K``,
    unit weights along the spine ``k = 0`` and tooth edges
    ``((i,k), (i,k+1))`` of *length* ``1/2**(k+1)``, i.e. weight ``2**(k+1)``,
    so every tooth has total length below one.  ``printed_weights=True`` uses
    weight ``1/2**(k+1)`` on the tooth edges instead.
    """
    if name == "path":
        (n,) = _need_int(name, params, 1)
        if n < 2:
            raise BadParams("path needs n >= 2")
        edges = [(str(k), str(k + 1), 1.0) for k in range(n - 1)]
    elif name == "cycle":
        (n,) = _need_int(name, params, 1)
        if n < 3:
            raise BadParams("cycle needs n >= 3")
        edges = [(str(k), str((k + 1) % n), 1.0) for k in range(n)]
    elif name == "complete":
        (n,) = _need_int(name, params, 1)
        if n < 2:
            raise BadParams("complete needs n >= 2")
        edges = [(str(a), str(b), 1.0) for a in range(n) for b in range(a + 1, n)]
    elif name == "star":
        (n,) = _need_int(name, params, 1)
        if n < 2:
            raise BadParams("star needs n >= 2")
        edges = [("center", f"leaf{k}", 1.0) for k in range(1, n)]
    elif name == "geometric_halfline":
        (n,) = _need_int(name, params, 1)
        if n < 1:
            raise BadParams("geometric_halfline needs n >= 1")
        edges = [(str(k), str(k + 1), float(2 ** (k + 1))) for k in range(n)]
    elif name == "comb":
        N, K = _need_int(name, params, 2)
        if N < 0 or K < 0 or (N == 0 and K == 0):
            raise BadParams("comb needs N, K >= 0 and at least one edge")
        edges = [(comb_label(i, 0), comb_label(i + 1, 0), 1.0) for i in range(-N, N)]
        for i in range(-N, N + 1):
            for k in range(K):
                w = 0.5 ** (k + 1) if printed_weights else float(2 ** (k + 1))
                edges.append((comb_label(i, k), comb_label(i, k + 1), w))
    else:
        raise UnknownFamily(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")
    return build_graph(edges)


def parse_family_spec(spec: str) -> tuple[str, tuple[int, ...]]:
    """Split ``"comb:2,3"`` into ``("comb", (2, 3))``."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name not in FAMILIES:
        raise UnknownFamily(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")
    try:
        params = tuple(int(p) for p in rest.split(",") if p.strip())
    except ValueError:
        raise BadParams(f"bad family parameters in {spec!r}") from None
    return name, params


def family_from_spec(spec: str, **kwargs) -> WeightedGraph:
    name, params = parse_family_spec(spec)
    return generate_family(name, *params, **kwargs)


def random_connected_graph(
    rng: np.random.Generator,
    n: int,
    *,
    edge_prob: float = 0.4,
    weight_range: tuple[float, float] = (0.1, 10.0),
    tree: bool = False,
) -> WeightedGraph:
    """Random connected graph: a random spanning tree plus extra random edges."""
    lo, hi = weight_range
    order = rng.permutation(n)
    edges = {}
    for k in range(1, n):
        a, b = int(order[k]), int(order[rng.integers(k)])
        edges[(min(a, b), max(a, b))] = rng.uniform(lo, hi)
    if not tree:
        for a in range(n):
            for b in range(a + 1, n):
                if (a, b) not in edges and rng.random() < edge_prob:
                    edges[(a, b)] = rng.uniform(lo, hi)
    return build_graph(
        [(str(a), str(b), w) for (a, b), w in edges.items()],
        vertices=[str(k) for k in range(n)],
    )


# --------------------------------------------------------------------------
# text formats

_COMMENT = re.compile(r"#.*")


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT.sub("", raw).strip()
        if line:
            yield lineno, line.split()


def parse_graph(text: str) -> WeightedGraph:
    """Parse ``label label weight`` lines (``#`` comments, blank lines ignored)."""
    edges = []
    for lineno, parts in _data_lines(text):
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'label label weight'")
        try:
            w = float(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: bad weight {parts[2]!r}") from None
        edges.append((parts[0], parts[1], w))
    if not edges:
        raise ParseError("graph file contains no edges")
    return build_graph(edges)


def read_graph(path) -> WeightedGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_graph(g: WeightedGraph) -> str:
    return "".join(f"{u} {v} {w!r}\n" for u, v, w in g.edges())


def write_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")


def parse_measure(text: str, g: WeightedGraph, *, normalize: bool = False) -> Measure:
    """Parse ``label mass`` lines into a full-support measure on ``g``."""
    masses = np.full(g.n, np.nan)
    for lineno, parts in _data_lines(text):
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'label mass'")
        try:
            idx = g.index(parts[0])
        except KeyError:
            raise ParseError(f"line {lineno}: unknown vertex {parts[0]!r}") from None
        try:
            masses[idx] = float(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: bad mass {parts[1]!r}") from None
    missing = [g.labels[i] for i in np.flatnonzero(np.isnan(masses))]
    if missing:
        raise ParseError(f"measure misses vertices {missing[:5]}")
    return Measure(masses, normalize=normalize)


def read_measure(path, g: WeightedGraph, *, normalize: bool = False) -> Measure:
    return parse_measure(Path(path).read_text(encoding="utf-8"), g, normalize=normalize)
