"""
====================================================
TRANSPORTATION LP LAYER
====================================================

RESPONSIBILITY:
Linear optimization of c^T y over the bounded-shape transportation polytope

    sum_i y[i][j] = 1                    (partition, one row per item)
    sum_j y[i][j] - u_i = kappa-_i       (lower size bound, surplus u_i)
    sum_j y[i][j] + v_i = kappa+_i       (upper size bound, slack v_i)
    y, u, v >= 0

including clustering <-> vertex conversion, single simplex steps, the
dual-feasibility test and ranging for a parametric objective c + lam*dc.

VARIABLE LAYOUT:
    y[i][j] -> i*n + j,  u_i -> n*k + i,  v_i -> n*k + k + i

NO power diagrams.
NO transition bookkeeping.

CANONICAL BASIS:
For a clustering C the columns {y[a_j][j]} + {u_i} + {v_i} form a
nonsingular basis (n + 2k columns for n + 2k rows) whose basic solution is
exactly the vertex of C. Every walk in this package starts from such a basis.
====================================================
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from Transit.Config import TransitConfig, get_default_config
from Transit.Core import (
    Clustering,
    InputValidationError,
    InternalInvariantError,
    ObjectiveMatrix,
    PreconditionError,
    Shape,
    SizeBounds,
)
from Transit.Transport_LP.simplex_engine import RevisedSimplex, UnboundedLPError


logger = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-7


class OptimalVertexError(PreconditionError):
    """simplex_step was called at a vertex that is already optimal."""
    pass


class NotOptimalError(PreconditionError):
    """Ranging requested for a basis that is not dual feasible."""
    pass


class InfeasibleBoundsError(InputValidationError):
    """Size bounds admit no clustering, or a clustering violates them."""
    pass


# ====================================================
# STANDARD FORM
# ====================================================

@dataclass(frozen=True, eq=False)
class StandardForm:
    """Equality form of the bounded-shape transportation polytope."""

    n: int
    k: int
    bounds: SizeBounds
    A: np.ndarray
    b: np.ndarray

    @classmethod
    def build(cls, n: int, bounds: SizeBounds) -> "StandardForm":
        k = bounds.k
        num_vars = n * k + 2 * k
        A = np.zeros((n + 2 * k, num_vars), dtype=np.float64)
        for i in range(k):
            cols = np.arange(i * n, (i + 1) * n)
            A[np.arange(n), cols] = 1.0
            A[n + i, cols] = 1.0
            A[n + k + i, cols] = 1.0
            A[n + i, n * k + i] = -1.0
            A[n + k + i, n * k + k + i] = 1.0
        b = np.concatenate([
            np.ones(n),
            np.array(bounds.lower, dtype=np.float64),
            np.array(bounds.upper, dtype=np.float64),
        ])
        A.setflags(write=False)
        b.setflags(write=False)
        return cls(n=n, k=k, bounds=bounds, A=A, b=b)

    @property
    def num_vars(self) -> int:
        return self.n * self.k + 2 * self.k

    @property
    def num_rows(self) -> int:
        return self.n + 2 * self.k

    def y_index(self, i: int, j: int) -> int:
        return i * self.n + j

    def surplus_index(self, i: int) -> int:
        return self.n * self.k + i

    def slack_index(self, i: int) -> int:
        return self.n * self.k + self.k + i

    def describe(self, var: int) -> Tuple[str, int, int]:
        """('y', i, j), ('u', i, -1) or ('v', i, -1)."""
        nk = self.n * self.k
        if var < nk:
            return ("y", var // self.n, var % self.n)
        if var < nk + self.k:
            return ("u", var - nk, -1)
        return ("v", var - nk - self.k, -1)

    def cost_vector(self, c: ObjectiveMatrix) -> np.ndarray:
        if c.k != self.k or c.n != self.n:
            raise InputValidationError(
                f"objective is {c.k}x{c.n} but the polytope is for k={self.k}, n={self.n}"
            )
        return np.concatenate([c.c.reshape(-1), np.zeros(2 * self.k)])


@dataclass(frozen=True, eq=False)
class TransportVertex:
    """Integral vertex: assignment matrix y (k x n) plus surplus u and slack v."""

    y: np.ndarray
    surplus: np.ndarray
    slack: np.ndarray

    @property
    def k(self) -> int:
        return int(self.y.shape[0])

    @property
    def n(self) -> int:
        return int(self.y.shape[1])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.y.reshape(-1), self.surplus, self.slack])

    def clustering(self) -> Clustering:
        return Clustering(tuple(int(a) for a in np.argmax(self.y, axis=0)), self.k)

    def same_assignment(self, other: "TransportVertex") -> bool:
        return bool(np.array_equal(self.y, other.y))


def vertex_from_clustering(C: Clustering, bounds: SizeBounds) -> TransportVertex:
    """
    The vertex y(C) of the polytope with bounds `bounds`.

    Raises:
        InfeasibleBoundsError: shape(C) violates the bounds
    """
    if C.k != bounds.k:
        raise InputValidationError(f"clustering has {C.k} clusters, bounds have {bounds.k}")
    if not bounds.contains(C.shape):
        raise InfeasibleBoundsError(
            f"shape {C.shape.sizes} violates bounds lower={bounds.lower} upper={bounds.upper}"
        )
    sizes = C.shape.as_array()
    return TransportVertex(
        y=C.indicator(),
        surplus=sizes - np.array(bounds.lower, dtype=np.int64),
        slack=np.array(bounds.upper, dtype=np.int64) - sizes,
    )


def greedy_feasible_clustering(n: int, bounds: SizeBounds) -> Clustering:
    """Fill clusters to their lower bounds in order, then up to their upper bounds."""
    try:
        bounds.check_feasible(n)
    except InputValidationError as e:
        raise InfeasibleBoundsError(str(e)) from e
    sizes = list(bounds.lower)
    remaining = n - sum(sizes)
    for i, up in enumerate(bounds.upper):
        extra = min(up - sizes[i], remaining)
        sizes[i] += extra
        remaining -= extra
    assignment = [i for i, size in enumerate(sizes) for _ in range(size)]
    return Clustering(tuple(assignment), bounds.k)


# ====================================================
# BASIS STATE
# ====================================================

class BasisState:
    """A basis of the standard form together with its engine (single owner, mutable)."""

    def __init__(self, form: StandardForm, engine: RevisedSimplex):
        self.form = form
        self.engine = engine

    @classmethod
    def at_vertex(
        cls, vertex: TransportVertex, form: StandardForm, config: Optional[TransitConfig] = None
    ) -> "BasisState":
        assigned = np.argmax(vertex.y, axis=0)
        basis = [form.y_index(int(i), j) for j, i in enumerate(assigned)]
        basis += [form.surplus_index(i) for i in range(form.k)]
        basis += [form.slack_index(i) for i in range(form.k)]
        engine = RevisedSimplex(form.A, form.b, basis, config)
        return cls(form, engine)

    @classmethod
    def at_clustering(
        cls, C: Clustering, bounds: SizeBounds, config: Optional[TransitConfig] = None
    ) -> "BasisState":
        bounds = bounds.clamped(C.n)
        form = StandardForm.build(C.n, bounds)
        return cls.at_vertex(vertex_from_clustering(C, bounds), form, config)

    @property
    def config(self) -> TransitConfig:
        return self.engine.config

    @property
    def basic(self) -> Tuple[int, ...]:
        return tuple(self.engine.basis)

    @property
    def nonbasic(self) -> np.ndarray:
        return self.engine.nonbasic

    @property
    def x_B(self) -> np.ndarray:
        return self.engine.x_B.copy()

    @property
    def pivots(self) -> int:
        return self.engine.pivots

    def z_N(self, c: ObjectiveMatrix) -> np.ndarray:
        z = self.engine.reduced_costs(self.form.cost_vector(c))
        return z[self.nonbasic]

    def objective(self, c: ObjectiveMatrix) -> float:
        return self.engine.objective(self.form.cost_vector(c))

    def vertex(self) -> TransportVertex:
        """Round the basic solution and re-verify it exactly in integers."""
        x = self.engine.primal()
        rounded = np.rint(x)
        drift = float(np.max(np.abs(x - rounded))) if x.size else 0.0
        if drift > INTEGRALITY_TOL:
            raise InternalInvariantError(f"basic solution is not integral (max drift {drift:.3e})")
        x_int = rounded.astype(np.int64)
        residual = self.form.A.astype(np.int64) @ x_int - self.form.b.astype(np.int64)
        if np.any(residual != 0) or np.any(x_int < 0):
            raise InternalInvariantError("rounded basic solution violates A x = b, x >= 0")
        nk = self.form.n * self.form.k
        return TransportVertex(
            y=x_int[:nk].reshape(self.form.k, self.form.n),
            surplus=x_int[nk:nk + self.form.k],
            slack=x_int[nk + self.form.k:],
        )

    def clustering(self) -> Clustering:
        return self.vertex().clustering()

    def copy(self) -> "BasisState":
        return BasisState(self.form, self.engine.copy())


# ====================================================
# OPERATIONS
# ====================================================

def optimize(
    c: ObjectiveMatrix,
    bounds: SizeBounds,
    warm_start: Optional[TransportVertex] = None,
    config: Optional[TransitConfig] = None,
) -> Tuple[TransportVertex, BasisState]:
    """
    Maximize c^T y over the polytope given by `bounds`.

    A warm start is any vertex whose clustering satisfies the bounds; its
    slacks are recomputed for these bounds.

    Raises:
        InfeasibleBoundsError: bounds admit no clustering, or the warm start violates them
    """
    config = config or get_default_config()
    if c.k != bounds.k:
        raise InputValidationError(f"objective has {c.k} rows but bounds have {bounds.k} clusters")
    try:
        bounds = bounds.clamped(c.n)
    except InputValidationError as e:
        raise InfeasibleBoundsError(str(e)) from e

    if warm_start is not None:
        start = vertex_from_clustering(warm_start.clustering(), bounds)
    else:
        start = vertex_from_clustering(greedy_feasible_clustering(c.n, bounds), bounds)

    form = StandardForm.build(c.n, bounds)
    state = BasisState.at_vertex(start, form, config)
    pivots = state.engine.iterate(form.cost_vector(c))
    vertex = state.vertex()
    logger.debug(
        "optimize: n=%d k=%d pivots=%d warm=%s objective=%.6g",
        c.n, c.k, pivots, warm_start is not None, state.objective(c),
    )
    return vertex, state


def is_optimal(state: BasisState, c: ObjectiveMatrix) -> bool:
    """Dual feasibility: z_N >= -tol_opt for every nonbasic column."""
    z = state.z_N(c)
    return bool(np.all(z >= -state.config.tol_opt))


def simplex_step(state: BasisState, c: ObjectiveMatrix) -> Tuple[TransportVertex, BasisState]:
    """
    Pivot from the current vertex to an adjacent vertex with a larger objective.

    Degenerate pivots are taken as needed; the walk stops at the first pivot
    that changes y. `state` is advanced in place and returned.

    Raises:
        OptimalVertexError: the vertex is optimal (possibly discovered only
            after degenerate pivots)
    """
    if is_optimal(state, c):
        raise OptimalVertexError("current basis is already optimal")

    cost = state.form.cost_vector(c)
    engine = state.engine
    start = state.vertex()
    limit = 50 * (engine.m + engine.num_vars)

    for _ in range(limit):
        entering = engine.choose_entering(engine.reduced_costs(cost))
        if entering is None:
            raise OptimalVertexError("vertex is optimal; only degenerate pivots were available")
        try:
            theta = engine.enter(entering)
        except UnboundedLPError as e:
            raise InternalInvariantError(f"unbounded direction on a polytope: {e}") from e
        if theta > engine.config.tol_feas:
            vertex = state.vertex()
            if not vertex.same_assignment(start):
                return vertex, state

    raise InternalInvariantError(f"simplex step did not leave the vertex within {limit} pivots")


def delta_z(state: BasisState, dc: ObjectiveMatrix) -> np.ndarray:
    """dz_N = (B^-1 N)^T dc_B - dc_N, ordered like state.nonbasic."""
    return state.z_N(dc)


def parametric_entering(
    state: BasisState, c: ObjectiveMatrix, dc: ObjectiveMatrix
) -> Tuple[float, Optional[int]]:
    """
    Step t >= 0 at which the basis stops being optimal for c + t*dc, and the
    column that enters there (lowest index among coalesced ties).

    Returns (inf, None) if the basis stays optimal for every t >= 0.
    """
    config = state.config
    nonbasic = state.nonbasic
    z = state.z_N(c)
    dz = delta_z(state, dc)
    decreasing = dz < -config.tol_opt
    if not np.any(decreasing):
        return float("inf"), None

    cand = nonbasic[decreasing]
    z_cand = np.where(z[decreasing] <= config.tol_opt, 0.0, z[decreasing])
    steps = z_cand / -dz[decreasing]
    t = float(steps.min())
    tied = cand[steps <= t + config.breakpoint_coalesce]
    return t, int(tied.min())


def ranging_breakpoint(state: BasisState, c: ObjectiveMatrix, dc: ObjectiveMatrix) -> float:
    """
    Largest lam such that the basis stays optimal for c + lam*dc on [0, lam].

    Equals 1 / max_j(-dz_j / z_j) over nonbasic j with dz_j < 0; a zero z_j
    with dz_j < 0 gives 0 (degenerate breakpoint); +inf if no ratio is positive.

    Raises:
        NotOptimalError: the basis is not optimal for c
    """
    if not is_optimal(state, c):
        raise NotOptimalError("ranging needs a basis that is optimal for the base objective")
    t, _ = parametric_entering(state, c, dc)
    return t


def clustering_objective_gap(c: ObjectiveMatrix, C: Clustering, bounds: SizeBounds,
                             config: Optional[TransitConfig] = None) -> float:
    """max over the polytope minus c^T y(C) (>= 0 up to tolerance)."""
    vertex, _ = optimize(c, bounds, vertex_from_clustering(C, bounds), config)
    return c.value(vertex.clustering()) - c.value(C)


def single_shape_bounds(C: Clustering) -> SizeBounds:
    return SizeBounds.single_shape(C.shape)


def shape_of(vertex: TransportVertex) -> Shape:
    return Shape(tuple(int(v) for v in vertex.y.sum(axis=1)))
