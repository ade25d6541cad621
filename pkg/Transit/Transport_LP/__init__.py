"""
Transport LP Layer

Dense revised simplex over the bounded-shape transportation polytope.

Every clustering is a vertex, every vertex is integral, and every walk
starts from the canonical basis of a known clustering (no phase 1).

Usage:
    from Transit.Transport_LP import optimize, simplex_step, ranging_breakpoint

    vertex, state = optimize(c, bounds)
    C_opt = vertex.clustering()

    # one improving move from a non-optimal clustering
    state = BasisState.at_clustering(C, bounds)
    vertex, state = simplex_step(state, c)

    # how far can c move towards c + dc before the basis changes?
    lam_star = ranging_breakpoint(state, c, dc)
"""

from .simplex_engine import (
    RevisedSimplex,
    LPSolution,
    solve_standard_lp,
    UnboundedLPError,
    InfeasibleLPError,
    SingularBasisError,
)
from .transport_lp import (
    StandardForm,
    TransportVertex,
    BasisState,
    OptimalVertexError,
    NotOptimalError,
    InfeasibleBoundsError,
    vertex_from_clustering,
    greedy_feasible_clustering,
    optimize,
    simplex_step,
    is_optimal,
    delta_z,
    parametric_entering,
    ranging_breakpoint,
    clustering_objective_gap,
    single_shape_bounds,
    shape_of,
)

__all__ = [
    "RevisedSimplex",
    "LPSolution",
    "solve_standard_lp",
    "UnboundedLPError",
    "InfeasibleLPError",
    "SingularBasisError",
    "StandardForm",
    "TransportVertex",
    "BasisState",
    "OptimalVertexError",
    "NotOptimalError",
    "InfeasibleBoundsError",
    "vertex_from_clustering",
    "greedy_feasible_clustering",
    "optimize",
    "simplex_step",
    "is_optimal",
    "delta_z",
    "parametric_entering",
    "ranging_breakpoint",
    "clustering_objective_gap",
    "single_shape_bounds",
    "shape_of",
]
