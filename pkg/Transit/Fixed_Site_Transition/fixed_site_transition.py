"""
====================================================
FIXED-SITE TRANSITION LAYER
====================================================

RESPONSIBILITY:
Walk from a constrained least-squares assignment (optimal for its own
shape) to a radial clustering (optimal over all shapes within the bounds)
for one fixed site vector, moving one sequential exchange per step.

STEP (repeated until the objective reaches the bounded-shape optimum):
  (a) one simplex step over the bounded-shape polytope from C_prev
  (b) re-optimize over the single-shape polytope of the new shape
  (c) split CDG(C_prev, C_opt) into path + cycles, keep the path
  (d) apply the path to C_prev

OUTPUT:
- C^0 = C, ..., C^r radial
- inducing diagrams P^0..P^r and shared diagrams Pbar^1..Pbar^r, all for
  the same sites; consecutive LPs reuse the previous basis

NO parametric walk (see Parametric_Transition).
====================================================
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from Transit.CDG import Exchange, apply_exchange, build_cdg, decompose, single_exchange, DecompositionError
from Transit.Config import TransitConfig, get_default_config
from Transit.Core import (
    Clustering,
    DataSet,
    InputValidationError,
    InternalInvariantError,
    ObjectiveMatrix,
    PreconditionError,
    SiteVector,
    SizeBounds,
    check_instance,
    count_shapes,
    objective_from_sites,
)
from Transit.Power_Diagram import PowerDiagram, max_margin_diagram, shared_diagram, warm_start_duals
from Transit.Transport_LP import (
    BasisState,
    InfeasibleBoundsError,
    OptimalVertexError,
    optimize,
    simplex_step,
    vertex_from_clustering,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FixedSiteResult:
    """Clusterings C^0..C^r with their diagrams and exchanges."""

    sites: SiteVector
    bounds: SizeBounds
    clusterings: Tuple[Clustering, ...]
    inducing: Tuple[PowerDiagram, ...]
    shared: Tuple[PowerDiagram, ...]
    exchanges: Tuple[Exchange, ...]
    objectives: Tuple[float, ...]

    @property
    def r(self) -> int:
        return len(self.clusterings) - 1

    @property
    def radial(self) -> Clustering:
        return self.clusterings[-1]

    def diagrams(self) -> List[PowerDiagram]:
        """P^0, Pbar^1, P^1, ..., Pbar^r, P^r."""
        ordered = [self.inducing[0]]
        for bar, full in zip(self.shared, self.inducing[1:]):
            ordered.extend([bar, full])
        return ordered


def lsa_gap(c: ObjectiveMatrix, C: Clustering, config: Optional[TransitConfig] = None) -> float:
    """Best objective over the single-shape polytope of C minus the objective of C."""
    single = SizeBounds.single_shape(C.shape)
    vertex, _ = optimize(c, single, vertex_from_clustering(C, single), config)
    return c.value(vertex.clustering()) - c.value(C)


def step_to_next_shape(
    C_prev: Clustering,
    state: BasisState,
    c: ObjectiveMatrix,
    bounds: SizeBounds,
    config: Optional[TransitConfig] = None,
) -> Clustering:
    """
    Next clustering of the fixed-site walk: an LSA for a neighboring shape
    that differs from C_prev by one sequential exchange.

    `state` must be a basis at the vertex of C_prev over `bounds`; it is advanced.

    Raises:
        OptimalVertexError: C_prev is already optimal over the bounds
        DecompositionError: CDG(C_prev, C_opt) has no single path
    """
    config = config or get_default_config()
    vertex, _ = simplex_step(state, c)
    stepped = vertex.clustering()
    if stepped.shape == C_prev.shape:
        raise InternalInvariantError(f"simplex step kept shape {C_prev.shape.sizes}; C_prev is not an LSA")

    single = SizeBounds.single_shape(stepped.shape)
    v_opt, _ = optimize(c, single, vertex, config)
    C_opt = v_opt.clustering()

    path, cycles = decompose(build_cdg(C_prev, C_opt))
    if path is None:
        raise DecompositionError("shapes differ but the CDG has no path")
    C_next = apply_exchange(C_prev, path)
    logger.debug(
        "shape %s -> %s: path of %d arcs, %d cycle(s) dropped",
        C_prev.shape.sizes, C_next.shape.sizes, len(path), len(cycles),
    )
    return C_next


def init_to_rad(
    ds: DataSet,
    C: Clustering,
    s_bar: SiteVector,
    bounds: SizeBounds,
    config: Optional[TransitConfig] = None,
) -> FixedSiteResult:
    """
    Transition the LSA C for sites s_bar to a radial clustering within `bounds`.

    Raises:
        PreconditionError: C is not optimal for its own shape (carries the gap)
        InfeasibleBoundsError: bounds infeasible or violated by C
    """
    config = config or get_default_config()
    check_instance(ds, [C], [s_bar])
    if bounds.k != C.k:
        raise InputValidationError(f"bounds have {bounds.k} clusters, clustering has {C.k}")
    if not bounds.is_feasible_for(ds.n):
        raise InfeasibleBoundsError(f"bounds admit no clustering of {ds.n} items")
    if not bounds.contains(C.shape):
        raise InfeasibleBoundsError(f"shape {C.shape.sizes} violates bounds {bounds.lower}..{bounds.upper}")

    c = objective_from_sites(ds, s_bar)
    tol = config.tol_opt * c.scale()

    gap = lsa_gap(c, C, config)
    if gap > tol:
        raise PreconditionError(f"clustering is not a least-squares assignment for its shape (objective gap {gap:.6g})")

    _, rad_state = optimize(c, bounds, vertex_from_clustering(C, bounds), config)
    zeta_rad = rad_state.objective(c)
    max_steps = count_shapes(bounds, ds.n)

    clusterings: List[Clustering] = [C]
    exchanges: List[Exchange] = []
    objectives: List[float] = [c.value(C)]

    while objectives[-1] < zeta_rad - tol:
        if len(clusterings) > max_steps:
            raise InternalInvariantError(f"fixed-site walk exceeded {max_steps} shapes")
        prev = clusterings[-1]
        state = BasisState.at_clustering(prev, bounds, config)
        try:
            nxt = step_to_next_shape(prev, state, c, bounds, config)
        except OptimalVertexError as e:
            raise InternalInvariantError(
                f"vertex reported optimal at objective {objectives[-1]:.9g} < {zeta_rad:.9g}"
            ) from e

        value = c.value(nxt)
        if value <= objectives[-1]:
            raise InternalInvariantError(f"objective did not increase: {objectives[-1]:.9g} -> {value:.9g}")
        try:
            exchanges.append(single_exchange(prev, nxt))
        except InputValidationError as e:
            raise InternalInvariantError(f"consecutive clusterings are not one exchange apart: {e}") from e
        clusterings.append(nxt)
        objectives.append(value)

    inducing: List[PowerDiagram] = []
    shared: List[PowerDiagram] = []
    previous_lp = None
    for C_i in clusterings:
        pd, _ = max_margin_diagram(ds, C_i, s_bar, config, warm_start_duals(previous_lp))
        inducing.append(pd)
        previous_lp = pd.lp
    previous_lp = None
    for prev, nxt in zip(clusterings, clusterings[1:]):
        bar = shared_diagram(ds, prev, nxt, s_bar, config, warm_start_duals(previous_lp))
        shared.append(bar)
        previous_lp = bar.lp

    logger.info(
        "fixed-site transition: %d step(s), shapes %s -> %s, objective %.6g -> %.6g",
        len(clusterings) - 1, C.shape.sizes, clusterings[-1].shape.sizes, objectives[0], objectives[-1],
    )
    return FixedSiteResult(
        sites=s_bar,
        bounds=bounds,
        clusterings=tuple(clusterings),
        inducing=tuple(inducing),
        shared=tuple(shared),
        exchanges=tuple(exchanges),
        objectives=tuple(objectives),
    )
