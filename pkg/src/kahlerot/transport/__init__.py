from ..simplex import simplex_transform, to_natural, to_weights, uniform_probability
from .diagnostics import (
    MonotonicityReport,
    cyclical_monotonicity,
    displacement,
    dual_potentials,
    extract_map,
    modulus_of_continuity,
)
from .exact import solve_exact
from .measures import DiscreteMeasure, cost_matrix, grid_neighbours, simplex_grid
from .plan import PotentialPair, TransportMap, TransportPlan
from .sinkhorn import round_to_marginals, solve_sinkhorn

__all__ = [
    "DiscreteMeasure",
    "MonotonicityReport",
    "PotentialPair",
    "TransportMap",
    "TransportPlan",
    "cost_matrix",
    "cyclical_monotonicity",
    "displacement",
    "dual_potentials",
    "extract_map",
    "grid_neighbours",
    "modulus_of_continuity",
    "round_to_marginals",
    "simplex_grid",
    "simplex_transform",
    "solve_exact",
    "solve_sinkhorn",
    "to_natural",
    "to_weights",
    "uniform_probability",
]
