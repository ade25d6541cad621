"""
====================================================
PARAMETRIC TRANSITION LAYER
====================================================

RESPONSIBILITY:
Edge walk over the bounded-shape polytope following the objective

    c(s^lam) = c(s) + lam * (c(t) - c(s)),   lam in [0, 1]

from a radial clustering for s to a radial clustering for t. The walk
jumps from breakpoint to breakpoint (ranging), takes basis changes at a
breakpoint until the vertex actually moves, and emits one step per vertex
change.

OUTPUT (one TransitionStep per emitted clustering):
- step 0: lam = 0, C_s_rad, no exchange, no diagrams
- step r >= 1: lam_r, C^{lam_r}, the exchange from step r-1, the shared
  diagram Pbar^{lam_r} at sites s^{lam_r}
- steps 1..m-1 additionally carry the inducing diagram P^{lam_r} at sites
  (s^{lam_r} + s^{lam_{r+1}}) / 2; the endpoint diagrams belong to the
  fixed-site legs

BREAKPOINTS WITH SEVERAL VERTEX CHANGES:
Breakpoints closer than breakpoint_coalesce are one event and share one
exact lam. Every vertex change inside an event improves the c(t) - c(s)
objective; all but the last are optimal only at that lam, so their
inducing diagram uses the sites s^lam of the event itself. Sites that
coincide there get a merged-site diagram (margin 0).

TIES AT lam = 1:
If the walk ends on a vertex that ties with C_t_rad for c(t), zero-cost
pivots along the c(t)-optimal face maximize agreement with y(C_t_rad).
Each vertex change on that face is emitted at lam = 1. A move that leaves
the clustering vector unchanged (items at the origin) is folded into a
neighboring exchange whenever the result is still a single exchange.
====================================================
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from Transit.CDG import Exchange, is_single_exchange, single_exchange
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
    clustering_vector,
    objective_from_sites,
)
from Transit.Power_Diagram import (
    PowerDiagram,
    coincident_site_tol,
    max_margin_diagram,
    merged_site_diagram,
    shared_diagram,
)
from Transit.Transport_LP import (
    BasisState,
    InfeasibleBoundsError,
    TransportVertex,
    clustering_objective_gap,
    optimize,
    parametric_entering,
    vertex_from_clustering,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransitionStep:
    """One emitted clustering of the parametric walk."""

    lam: float
    clustering: Clustering
    sites: SiteVector
    exchange: Optional[Exchange] = None
    shared: Optional[PowerDiagram] = None
    inducing: Optional[PowerDiagram] = None


def advance_to_breakpoint(
    state: BasisState,
    c_s: ObjectiveMatrix,
    c_t: ObjectiveMatrix,
    lam_cur: float,
    config: Optional[TransitConfig] = None,
) -> Optional[Tuple[float, TransportVertex]]:
    """
    Move lam forward to the next breakpoint and pivot there until the vertex changes.

    Returns:
        (lam_next, new vertex), or None when the current vertex stays optimal up to lam = 1
    """
    config = config or get_default_config()
    dc = c_t - c_s
    engine = state.engine
    start = state.vertex()
    lam = lam_cur
    limit = 50 * (engine.m + engine.num_vars)

    for _ in range(limit):
        c_lam = c_s + dc.scaled(lam)
        step, entering = parametric_entering(state, c_lam, dc)
        if entering is None or lam + step > 1.0 + config.breakpoint_coalesce:
            return None
        if step > config.breakpoint_coalesce:
            lam = min(lam + step, 1.0)
        if lam >= 1.0 - config.breakpoint_coalesce:
            lam = 1.0
        theta = engine.enter(entering)
        if theta > config.tol_feas:
            vertex = state.vertex()
            if not vertex.same_assignment(start):
                logger.debug("breakpoint lam=%.12g after %d pivot(s)", lam, engine.pivots)
                return lam, vertex

    raise InternalInvariantError(f"no vertex change within {limit} pivots at lam={lam:.12g}")


def _walk_terminal_face(
    state: BasisState,
    c_t: ObjectiveMatrix,
    target: Clustering,
    config: TransitConfig,
) -> List[TransportVertex]:
    """Zero-cost pivots on the c(t)-optimal face towards y(target)."""
    direction = ObjectiveMatrix(target.indicator().astype(np.float64))
    engine = state.engine
    start = state.vertex()
    visited: List[TransportVertex] = []
    limit = 50 * (engine.m + engine.num_vars)

    for _ in range(limit):
        current = visited[-1] if visited else start
        if current.clustering() == target:
            return visited
        step, entering = parametric_entering(state, c_t, direction)
        if entering is None or step > config.breakpoint_coalesce:
            raise InternalInvariantError(
                "walk ended at lam=1 on a clustering that differs from the target radial clustering"
            )
        theta = engine.enter(entering)
        if theta > config.tol_feas:
            vertex = state.vertex()
            if not vertex.same_assignment(current):
                visited.append(vertex)

    raise InternalInvariantError(f"terminal face walk did not reach the target within {limit} pivots")


def _check_radial(c: ObjectiveMatrix, C: Clustering, bounds: SizeBounds, label: str, config: TransitConfig) -> None:
    gap = clustering_objective_gap(c, C, bounds, config)
    if gap > config.tol_opt * c.scale():
        raise PreconditionError(f"{label} clustering is not radial for its sites (objective gap {gap:.6g})")


def rad_to_rad(
    ds: DataSet,
    C_s_rad: Clustering,
    C_t_rad: Clustering,
    s: SiteVector,
    t: SiteVector,
    bounds: SizeBounds,
    config: Optional[TransitConfig] = None,
) -> List[TransitionStep]:
    """
    Parametric walk from C_s_rad (radial for s) to C_t_rad (radial for t).

    Raises:
        PreconditionError: an endpoint is not radial for its sites
        InternalInvariantError: the walk cannot reach C_t_rad
    """
    config = config or get_default_config()
    check_instance(ds, [C_s_rad, C_t_rad], [s, t])
    if bounds.k != C_s_rad.k:
        raise InputValidationError(f"bounds have {bounds.k} clusters, clusterings have {C_s_rad.k}")
    for label, C in (("initial", C_s_rad), ("target", C_t_rad)):
        if not bounds.contains(C.shape):
            raise InfeasibleBoundsError(f"{label} shape {C.shape.sizes} violates the size bounds")

    c_s = objective_from_sites(ds, s)
    c_t = objective_from_sites(ds, t)
    _check_radial(c_s, C_s_rad, bounds, "initial", config)
    _check_radial(c_t, C_t_rad, bounds, "target", config)

    vertex, state = optimize(c_s, bounds, vertex_from_clustering(C_s_rad, bounds), config)
    if vertex.clustering() != C_s_rad:
        raise InternalInvariantError("re-optimizing the initial radial clustering moved to a tied vertex")

    walk: List[Tuple[float, Clustering]] = [(0.0, C_s_rad)]
    lam = 0.0
    while walk[-1][1] != C_t_rad:
        advanced = advance_to_breakpoint(state, c_s, c_t, lam, config)
        if advanced is None:
            break
        lam, vertex = advanced
        walk.append((lam, vertex.clustering()))

    if walk[-1][1] != C_t_rad:
        for vertex in _walk_terminal_face(state, c_t, C_t_rad, config):
            walk.append((1.0, vertex.clustering()))

    walk = fold_zero_vector_moves(ds, walk)
    steps = _attach_diagrams(ds, walk, s, t, config)
    logger.info("parametric transition: %d vertex change(s), lambdas %s", len(steps) - 1,
                [round(step.lam, 6) for step in steps[1:]])
    return steps


def _attach_diagrams(
    ds: DataSet,
    walk: List[Tuple[float, Clustering]],
    s: SiteVector,
    t: SiteVector,
    config: TransitConfig,
) -> List[TransitionStep]:
    m = len(walk) - 1
    steps = [TransitionStep(lam=0.0, clustering=walk[0][1], sites=s)]
    for r in range(1, m + 1):
        lam, C = walk[r]
        prev = walk[r - 1][1]
        try:
            exchange = single_exchange(prev, C)
        except InputValidationError as e:
            raise InternalInvariantError(f"vertex change {r} is not a single exchange: {e}") from e
        sites = s.interpolate(t, lam)
        bar = shared_diagram(ds, prev, C, sites, config)

        inducing = None
        if r < m:
            mid = s.interpolate(t, 0.5 * (lam + walk[r + 1][0]))
            inducing = _inducing_diagram(ds, C, mid, config)
        steps.append(TransitionStep(lam=lam, clustering=C, sites=sites, exchange=exchange, shared=bar, inducing=inducing))
    return steps


def _same_vector(ds: DataSet, first: Clustering, second: Clustering) -> bool:
    a = clustering_vector(ds, first).w
    b = clustering_vector(ds, second).w
    return bool(np.all(np.abs(a - b) <= 1e-12 * (1.0 + float(np.abs(a).sum()))))


def fold_zero_vector_moves(ds: DataSet, walk: List[Tuple[float, Clustering]]) -> List[Tuple[float, Clustering]]:
    """
    Fold moves that keep w(C) into a neighboring exchange.

    Two clusterings with equal w have equal objective for every lam, so
    either one can stand in for the other at the other's breakpoint. The
    endpoints are never dropped; a move that cannot be folded is kept.
    """
    merged = list(walk)
    r = 1
    while r < len(merged):
        (lam_prev, prev), (_, C) = merged[r - 1], merged[r]
        if not _same_vector(ds, prev, C):
            r += 1
        elif r + 1 < len(merged) and is_single_exchange(prev, merged[r + 1][1]):
            del merged[r]
        elif r >= 2 and is_single_exchange(merged[r - 2][1], C):
            merged[r - 1] = (lam_prev, C)
            del merged[r]
            r -= 1
        else:
            logger.debug("zero-vector move at lam=%.12g kept; no single-exchange merge", merged[r][0])
            r += 1
    if len(merged) < len(walk):
        logger.debug("folded %d zero-vector move(s)", len(walk) - len(merged))
    return merged


def _inducing_diagram(ds: DataSet, C: Clustering, sites: SiteVector, config: TransitConfig) -> PowerDiagram:
    if sites.has_distinct_sites(coincident_site_tol(ds, sites, config)):
        diagram, _ = max_margin_diagram(ds, C, sites, config)
        return diagram
    return merged_site_diagram(ds, C, sites, config)
