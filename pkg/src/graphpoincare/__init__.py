"""Resistance, path and restricted metrics on weighted graphs, the Poincaré
constants they determine, and numerical checks of the spectral bounds built
from them."""
from .errors import GraphPoincareError
from .graph import (
    Measure,
    VertexSubset,
    WeightedGraph,
    build_graph,
    energy,
    generate_family,
    random_connected_graph,
    read_graph,
    read_measure,
    uniform_measure,
)
from .metrics import (
    diameter,
    inradius,
    path_metric,
    resistance_metric,
    restricted_metric,
    sup_restricted_metric,
)
from .poincare import (
    VerificationReport,
    best_constant_global,
    best_constant_omega,
    best_constant_zero_exhaustion,
    higher_eigenvalue_bounds,
    infimize_lambda0_omega,
    infimize_lambda1,
    verify_theorem,
)
from .spectral import eigenvalue_k, neumann_operator, omega_operator

__all__ = [name for name in dir() if not name.startswith("_")]
