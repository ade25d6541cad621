"""
====================================================
POWER DIAGRAM LAYER
====================================================

RESPONSIBILITY:
Construct and check power diagrams for fixed sites s:
- margin-maximizing diagram inducing one clustering
- shared diagram inducing two consecutive clusterings at once
- degenerate diagram for coincident sites (shared offsets, margin 0)
- membership test (does a diagram induce a clustering?)

CELL FORM:
    x in P_i  iff  (s_l - s_i)^T x <= gamma_l - gamma_i   for every l != i
with gamma_1 = 0. Equivalent power form ||x - s_i||^2 - w_i <= ||x - s_l||^2 - w_l
for w_i = ||s_i||^2 - 2 gamma_i; weights are stored shifted so that w_1 = 0.

MARGIN LP:
For every ordered pair p = (i, l) with C_i nonempty let d_p = s_l - s_i and
m_p = max_{x in C_i} d_p^T x. The margin LP

    max eps   s.t.  m_p + ||d_p|| eps <= gamma_l - gamma_i,  eps >= 0

is solved through its dual, a circulation over the pairs:

    max sum_p m_p mu_p
    s.t. inflow(r) - outflow(r) = 0           for clusters r = 2..k
         sum_p ||d_p|| mu_p - sigma = 1
         mu, sigma >= 0

eps = -(dual optimum) and gamma_r is the dual price of row r. With fixed
sites only the objective m changes between consecutive clusterings, so the
previous optimal basis stays primal feasible and is reused as a warm start.

The shared system uses unit weights and m_p = max over both clusterings.
====================================================
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from Transit.Config import TransitConfig, get_default_config
from Transit.Core import (
    Clustering,
    DataSet,
    InputValidationError,
    InternalInvariantError,
    PreconditionError,
    SiteVector,
)
from Transit.Transport_LP import InfeasibleLPError, UnboundedLPError, solve_standard_lp


logger = logging.getLogger(__name__)

ColumnKey = Union[Tuple[int, int], str]
SIGMA = "sigma"


class DiagramInfeasibleError(PreconditionError):
    """No power diagram with the given sites induces the clustering(s)."""
    pass


# ====================================================
# DATA STRUCTURES
# ====================================================

@dataclass(frozen=True)
class MarginLPSolution:
    """Optimal basis of one margin / shared LP, keyed by column meaning."""

    column_keys: Tuple[ColumnKey, ...]
    basis_keys: Optional[Tuple[ColumnKey, ...]]
    objective: float
    pivots: int
    warm_started: bool


@dataclass(frozen=True)
class DualStart:
    """Starting basis for the next LP of the same family."""

    basis_keys: Tuple[ColumnKey, ...]


@dataclass(frozen=True, eq=False)
class PowerDiagram:
    """Sites, offsets gamma (gamma_1 = 0), weights (w_1 = 0) and margin."""

    sites: SiteVector
    gammas: np.ndarray
    weights: np.ndarray
    margin: float = float("inf")
    lp: Optional[MarginLPSolution] = field(default=None, repr=False)

    @classmethod
    def from_gammas(
        cls,
        sites: SiteVector,
        gammas: np.ndarray,
        margin: float = float("inf"),
        lp: Optional[MarginLPSolution] = None,
    ) -> "PowerDiagram":
        gammas = np.array(gammas, dtype=np.float64)
        if gammas.shape != (sites.k,):
            raise InputValidationError(f"expected {sites.k} offsets, got shape {gammas.shape}")
        gammas = gammas - gammas[0]
        return cls(sites=sites, gammas=gammas, weights=weights_from_gammas(sites, gammas), margin=margin, lp=lp)

    @property
    def k(self) -> int:
        return self.sites.k

    def slacks(self, points: np.ndarray, cells: np.ndarray) -> np.ndarray:
        """
        slack[j, l] = (gamma_l - gamma_i) - (s_l - s_i)^T x_j for i = cells[j];
        the own-cell column is +inf.
        """
        S = self.sites.sites
        diff = S[None, :, :] - S[cells][:, None, :]
        slack = (self.gammas[None, :] - self.gammas[cells][:, None]) - np.einsum("jld,jd->jl", diff, points)
        slack[np.arange(len(cells)), cells] = np.inf
        return slack

    def scaled_tolerance(self, cells: np.ndarray, tol: float) -> np.ndarray:
        S = self.sites.sites
        return tol * (1.0 + np.linalg.norm(S[None, :, :] - S[cells][:, None, :], axis=2))

    def power_distances(self, points: np.ndarray) -> np.ndarray:
        """||x_j - s_i||^2 - w_i as an n x k matrix."""
        diff = points[:, None, :] - self.sites.sites[None, :, :]
        return np.einsum("jid,jid->ji", diff, diff) - self.weights[None, :]

    def classify(self, points: np.ndarray) -> np.ndarray:
        """Cell of every point by smallest power distance (lowest index on ties)."""
        return np.argmin(self.power_distances(np.asarray(points, dtype=np.float64)), axis=1)

    def hyperplane(self, i: int, l: int) -> Tuple[np.ndarray, float]:
        """(normal, offset) of the bisector {x : (s_l - s_i)^T x = gamma_l - gamma_i}."""
        S = self.sites.sites
        return S[l] - S[i], float(self.gammas[l] - self.gammas[i])


def weights_from_gammas(sites: SiteVector, gammas: np.ndarray) -> np.ndarray:
    sq = np.einsum("id,id->i", sites.sites, sites.sites)
    w = sq - 2.0 * np.asarray(gammas, dtype=np.float64)
    return w - w[0]


def gammas_from_weights(sites: SiteVector, weights: np.ndarray) -> np.ndarray:
    sq = np.einsum("id,id->i", sites.sites, sites.sites)
    g = 0.5 * (sq - np.asarray(weights, dtype=np.float64))
    return g - g[0]


# ====================================================
# PAIR LP
# ====================================================

def _pair_maxima(
    points: np.ndarray, sites: SiteVector, clusterings: List[Clustering]
) -> Dict[Tuple[int, int], float]:
    """m_(i,l) = max over items of C_i (in any of the clusterings) of (s_l - s_i)^T x."""
    c = sites.sites @ points.T  # c[i][j] = s_i^T x_j
    k = sites.k
    maxima: Dict[Tuple[int, int], float] = {}
    for C in clusterings:
        labels = C.as_array()
        for i in range(k):
            members = np.flatnonzero(labels == i)
            if members.size == 0:
                continue
            for l in range(k):
                if l == i:
                    continue
                value = float(np.max(c[l, members] - c[i, members]))
                maxima[(i, l)] = max(value, maxima.get((i, l), -np.inf))
    return maxima


def _unbounded_gammas(
    points: np.ndarray, sites: SiteVector, maxima: Dict[Tuple[int, int], float], scales: Dict[Tuple[int, int], float]
) -> np.ndarray:
    """Offsets for the case where at most one cluster has items: push every other cell away."""
    k = sites.k
    sources = sorted({i for i, _ in maxima})
    gammas = np.zeros(k, dtype=np.float64)
    if not sources:
        return gammas
    anchor = sources[0]
    spread = float(np.linalg.norm(np.ptp(points, axis=0))) + 1.0
    for l in range(k):
        if l != anchor:
            gammas[l] = maxima[(anchor, l)] + scales[(anchor, l)] * spread
    return gammas - gammas[0]


def _solve_pair_lp(
    points: np.ndarray,
    sites: SiteVector,
    maxima: Dict[Tuple[int, int], float],
    scales: Dict[Tuple[int, int], float],
    config: TransitConfig,
    start: Optional[DualStart],
) -> Tuple[np.ndarray, float, Optional[MarginLPSolution]]:
    """Returns (gammas with gamma_1 = 0, lp margin or +inf, LP record)."""
    k = sites.k
    sources = {i for i, _ in maxima}
    if k == 1 or len(sources) <= 1:
        return _unbounded_gammas(points, sites, maxima, scales), float("inf"), None

    pairs = sorted(maxima)
    keys: Tuple[ColumnKey, ...] = tuple(pairs) + (SIGMA,)
    A = np.zeros((k, len(keys)), dtype=np.float64)
    for col, (i, l) in enumerate(pairs):
        if l >= 1:
            A[l - 1, col] += 1.0
        if i >= 1:
            A[i - 1, col] -= 1.0
        A[k - 1, col] = scales[(i, l)]
    A[k - 1, -1] = -1.0
    b = np.zeros(k, dtype=np.float64)
    b[-1] = 1.0
    cost = np.array([maxima[p] for p in pairs] + [0.0], dtype=np.float64)

    start_basis = None
    if start is not None:
        index = {key: col for col, key in enumerate(keys)}
        if all(key in index for key in start.basis_keys):
            start_basis = [index[key] for key in start.basis_keys]
        else:
            logger.debug("warm start references columns that no longer exist; cold start")

    try:
        solution = solve_standard_lp(A, b, cost, config, start_basis)
    except UnboundedLPError as e:
        raise DiagramInfeasibleError(f"no power diagram with these sites induces the clustering ({e})") from e
    except InfeasibleLPError as e:
        raise InternalInvariantError(f"circulation LP infeasible with {len(sources)} nonempty clusters") from e

    gammas = np.zeros(k, dtype=np.float64)
    gammas[1:] = solution.duals[:k - 1]
    record = MarginLPSolution(
        column_keys=keys,
        basis_keys=None if solution.basis is None else tuple(keys[j] for j in solution.basis),
        objective=solution.objective,
        pivots=solution.pivots,
        warm_started=solution.warm_started,
    )
    return gammas, -solution.objective, record


def _achieved_margin(
    points: np.ndarray, sites: SiteVector, gammas: np.ndarray, clusterings: List[Clustering]
) -> float:
    """min over items and foreign cells of slack / ||s_l - s_i||."""
    pd = PowerDiagram.from_gammas(sites, gammas)
    margin = float("inf")
    for C in clusterings:
        cells = C.as_array()
        S = sites.sites
        norms = np.linalg.norm(S[None, :, :] - S[cells][:, None, :], axis=2)
        norms[np.arange(len(cells)), cells] = 1.0
        slack = pd.slacks(points, cells) / norms
        if slack.size:
            margin = min(margin, float(np.min(slack)))
    return margin


# ====================================================
# OPERATIONS
# ====================================================

def warm_start_duals(prev_lp_solution: Optional[MarginLPSolution]) -> Optional[DualStart]:
    """Starting basis for the next LP of the same family (None means cold start)."""
    if prev_lp_solution is None or prev_lp_solution.basis_keys is None:
        return None
    return DualStart(basis_keys=prev_lp_solution.basis_keys)


def coincident_site_tol(ds: DataSet, s: SiteVector, config: TransitConfig) -> float:
    """
    Distance below which two sites are treated as one: a site moved by this
    much shifts no slack of the data set by more than half the boundary tolerance.
    """
    radius = float(np.max(np.linalg.norm(ds.points, axis=1)))
    return 0.5 * config.boundary_tol / (s.k * (1.0 + radius))


def merged_site_diagram(
    ds: DataSet,
    C: Clustering,
    s: SiteVector,
    config: Optional[TransitConfig] = None,
) -> PowerDiagram:
    """
    Diagram inducing C when some sites of s coincide.

    Clusters sharing a site share one offset, so their items lie on the
    common (degenerate) boundary and the margin is 0. The offsets of the
    merged clusters come from the max-margin diagram of the clustering
    with those clusters joined, one site per group.
    """
    config = config or get_default_config()
    C.check_compatible(ds)
    s.check_compatible(ds)
    if C.k != s.k:
        raise InputValidationError(f"clustering has {C.k} clusters but {s.k} sites were given")

    groups = s.site_groups(coincident_site_tol(ds, s, config))
    group_of = np.empty(s.k, dtype=np.int64)
    for g, members in enumerate(groups):
        group_of[list(members)] = g
    merged_sites = SiteVector(np.array([s.sites[list(members)].mean(axis=0) for members in groups]))
    merged = Clustering(tuple(int(g) for g in group_of[C.as_array()]), len(groups))

    if merged.k == 1:
        gammas = np.zeros(s.k, dtype=np.float64)
    else:
        reduced, _ = max_margin_diagram(ds, merged, merged_sites, config)
        gammas = reduced.gammas[group_of]
    logger.debug("merged-site diagram: %d site group(s) for %d clusters", len(groups), s.k)
    return PowerDiagram.from_gammas(s, gammas, 0.0)


def max_margin_diagram(
    ds: DataSet,
    C: Clustering,
    s: SiteVector,
    config: Optional[TransitConfig] = None,
    warm_start: Optional[DualStart] = None,
) -> Tuple[PowerDiagram, float]:
    """
    Power diagram with sites s that induces C with the largest Euclidean margin.

    Returns:
        (diagram, eps) with eps = +inf when at most one cluster has items

    Raises:
        InputValidationError: coincident sites or size mismatch
        DiagramInfeasibleError: no diagram with sites s induces C
    """
    config = config or get_default_config()
    C.check_compatible(ds)
    s.check_compatible(ds)
    if C.k != s.k:
        raise InputValidationError(f"clustering has {C.k} clusters but {s.k} sites were given")
    if not s.has_distinct_sites(coincident_site_tol(ds, s, config)):
        raise InputValidationError("max-margin diagram needs pairwise distinct sites")

    points = ds.points
    maxima = _pair_maxima(points, s, [C])
    S = s.sites
    scales = {p: float(np.linalg.norm(S[p[1]] - S[p[0]])) for p in maxima}
    gammas, lp_margin, record = _solve_pair_lp(points, s, maxima, scales, config, warm_start)

    if np.isinf(lp_margin):
        pd = PowerDiagram.from_gammas(s, gammas, float("inf"), record)
        return pd, float("inf")

    achieved = _achieved_margin(points, s, gammas, [C])
    if achieved < -config.boundary_tol:
        raise InternalInvariantError(f"recovered offsets violate the clustering (margin {achieved:.3e})")
    margin = max(achieved, 0.0)
    logger.debug("max-margin diagram: eps=%.6g lp=%.6g pivots=%s", margin, lp_margin, record.pivots if record else 0)
    return PowerDiagram.from_gammas(s, gammas, margin, record), margin


def shared_diagram(
    ds: DataSet,
    C_prev: Clustering,
    C_next: Clustering,
    s: SiteVector,
    config: Optional[TransitConfig] = None,
    warm_start: Optional[DualStart] = None,
) -> PowerDiagram:
    """
    One diagram with sites s inducing both C_prev and C_next.

    Items that move between the two clusterings end up on cell boundaries.
    Used for consecutive LSAs of neighboring shapes (fixed sites) and for
    consecutive clusterings that tie for c(s) at a breakpoint.

    Raises:
        DiagramInfeasibleError: no common diagram exists
    """
    config = config or get_default_config()
    for C in (C_prev, C_next):
        C.check_compatible(ds)
        if C.k != s.k:
            raise InputValidationError(f"clustering has {C.k} clusters but {s.k} sites were given")
    s.check_compatible(ds)

    points = ds.points
    maxima = _pair_maxima(points, s, [C_prev, C_next])
    scales = {p: 1.0 for p in maxima}
    gammas, _, record = _solve_pair_lp(points, s, maxima, scales, config, warm_start)

    margin = _achieved_margin(points, s, gammas, [C_prev, C_next]) if s.has_distinct_sites(coincident_site_tol(ds, s, config)) else 0.0
    pd = PowerDiagram.from_gammas(s, gammas, max(margin, 0.0), record)

    if not (induces(ds, pd, C_prev, config=config) and induces(ds, pd, C_next, config=config)):
        raise DiagramInfeasibleError("shared diagram does not induce both clusterings")
    moved = [j for j, (a, b) in enumerate(zip(C_prev.assignment, C_next.assignment)) if a != b]
    for j in moved:
        i, l = C_prev.assignment[j], C_next.assignment[j]
        normal, offset = pd.hyperplane(i, l)
        gap = abs(offset - float(normal @ points[j]))
        if gap > config.boundary_tol * (1.0 + float(np.linalg.norm(normal))):
            raise DiagramInfeasibleError(f"moved item {j} is {gap:.3e} away from the boundary of cells {i}/{l}")
    return pd


def induces(
    ds: DataSet,
    pd: PowerDiagram,
    C: Clustering,
    strict: bool = False,
    config: Optional[TransitConfig] = None,
    tol: Optional[float] = None,
) -> bool:
    """
    True iff every item of C_i lies in cell P_i within tolerance.

    strict=True requires every slack to exceed the tolerance (interior membership).
    """
    config = config or get_default_config()
    tol = config.boundary_tol if tol is None else tol
    C.check_compatible(ds)
    if C.k != pd.k:
        raise InputValidationError(f"clustering has {C.k} clusters but the diagram has {pd.k}")
    if pd.k == 1:
        return True
    cells = C.as_array()
    slack = pd.slacks(ds.points, cells)
    threshold = pd.scaled_tolerance(cells, tol)
    if strict:
        return bool(np.all(slack > threshold))
    return bool(np.all(slack >= -threshold))
