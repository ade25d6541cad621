"""
====================================================
DENSE REVISED SIMPLEX ENGINE
====================================================

RESPONSIBILITY:
Primal revised simplex over a standard-form LP

    max  cost^T x   s.t.  A x = b,  x >= 0

with an explicit basis inverse kept current by eta (rank-one) updates and
refactorized every `refactor_period` pivots.

Used by:
- Transport_LP (bounded-shape transportation polytope, always started
  from a known vertex basis, so no phase 1)
- Power_Diagram (small margin LPs, two-phase via solve_standard_lp)

PIVOT RULES:
- dantzig: most negative reduced cost; switches to Bland automatically
  after 2 * rows consecutive degenerate pivots
- bland: lowest eligible index
The ratio test always breaks ties by the lowest basic variable index.

SIGN CONVENTION:
z = (B^-1 A)^T c_B - c, so a basis is optimal (for max) iff z_N >= -tol_opt.
====================================================
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from Transit.Config import TransitConfig, get_default_config
from Transit.Core import InternalInvariantError, TransitError


logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9


class UnboundedLPError(InternalInvariantError):
    """Ratio test found no leaving variable."""
    pass


class InfeasibleLPError(TransitError):
    """Phase 1 ended with positive artificial mass."""
    pass


class SingularBasisError(TransitError):
    """Requested basis columns are linearly dependent."""
    pass


class RevisedSimplex:
    """Mutable basis of a standard-form LP (single owner)."""

    def __init__(
        self,
        A: np.ndarray,
        b: np.ndarray,
        basis: Sequence[int],
        config: Optional[TransitConfig] = None,
        allowed: Optional[np.ndarray] = None,
    ):
        self.A = np.asarray(A, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.m, self.num_vars = self.A.shape
        self.basis = [int(j) for j in basis]
        if len(self.basis) != self.m or len(set(self.basis)) != self.m:
            raise SingularBasisError(f"basis needs {self.m} distinct columns, got {len(self.basis)}")
        self.config = config or get_default_config()
        self.allowed = np.ones(self.num_vars, dtype=bool) if allowed is None else np.array(allowed, dtype=bool)
        self.pivots = 0
        self.degenerate_run = 0
        self._since_refactor = 0
        self.refactor()

    def refactor(self) -> None:
        B = self.A[:, self.basis]
        try:
            self.B_inv = np.linalg.inv(B)
        except np.linalg.LinAlgError as e:
            raise SingularBasisError(f"basis matrix is singular: {e}") from e
        self.x_B = self.B_inv @ self.b
        self._since_refactor = 0

    def copy(self) -> "RevisedSimplex":
        clone = object.__new__(RevisedSimplex)
        clone.A = self.A
        clone.b = self.b
        clone.m, clone.num_vars = self.m, self.num_vars
        clone.basis = list(self.basis)
        clone.config = self.config
        clone.allowed = self.allowed.copy()
        clone.pivots = self.pivots
        clone.degenerate_run = self.degenerate_run
        clone._since_refactor = self._since_refactor
        clone.B_inv = self.B_inv.copy()
        clone.x_B = self.x_B.copy()
        return clone

    # ------------------------------------------------
    # Dictionary quantities
    # ------------------------------------------------

    @property
    def nonbasic(self) -> np.ndarray:
        mask = np.ones(self.num_vars, dtype=bool)
        mask[self.basis] = False
        return np.flatnonzero(mask)

    def primal(self) -> np.ndarray:
        x = np.zeros(self.num_vars, dtype=np.float64)
        x[self.basis] = self.x_B
        return x

    def duals(self, cost: np.ndarray) -> np.ndarray:
        return cost[self.basis] @ self.B_inv

    def reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        """z_j = pi^T a_j - c_j for every column (0 on basic columns)."""
        z = self.duals(cost) @ self.A - cost
        z[self.basis] = 0.0
        return z

    def objective(self, cost: np.ndarray) -> float:
        return float(cost[self.basis] @ self.x_B)

    def column(self, j: int) -> np.ndarray:
        return self.B_inv @ self.A[:, j]

    def is_primal_feasible(self) -> bool:
        return bool(np.all(self.x_B >= -self.config.tol_feas))

    # ------------------------------------------------
    # Pivoting
    # ------------------------------------------------

    def use_bland(self) -> bool:
        return self.config.pivot_rule == "bland" or self.degenerate_run >= self.config.degenerate_limit(self.m)

    def choose_entering(self, z: np.ndarray) -> Optional[int]:
        eligible = np.flatnonzero((z < -self.config.tol_opt) & self.allowed)
        if eligible.size == 0:
            return None
        if self.use_bland():
            return int(eligible[0])
        return int(eligible[np.argmin(z[eligible])])

    def ratio_test(self, alpha: np.ndarray) -> Optional[int]:
        rows = np.flatnonzero(alpha > PIVOT_TOL)
        if rows.size == 0:
            return None
        ratios = np.maximum(self.x_B[rows], 0.0) / alpha[rows]
        best = ratios.min()
        tied = rows[ratios <= best + self.config.tol_feas]
        return int(min(tied, key=lambda r: self.basis[r]))

    def pivot(self, entering: int, row: int, alpha: Optional[np.ndarray] = None) -> float:
        """Exchange basis[row] for `entering`; returns the primal step length."""
        if alpha is None:
            alpha = self.column(entering)
        pivot_value = alpha[row]
        if abs(pivot_value) <= PIVOT_TOL:
            raise InternalInvariantError(f"pivot element {pivot_value:.3e} too small")

        theta = max(float(self.x_B[row]), 0.0) / pivot_value
        self.x_B = self.x_B - theta * alpha
        self.x_B[row] = theta

        pivot_row = self.B_inv[row] / pivot_value
        self.B_inv = self.B_inv - np.outer(alpha, pivot_row)
        self.B_inv[row] = pivot_row
        self.basis[row] = int(entering)

        self.pivots += 1
        self._since_refactor += 1
        self.degenerate_run = self.degenerate_run + 1 if abs(theta) <= self.config.tol_feas else 0
        if self._since_refactor >= self.config.refactor_period:
            self.refactor()
        return theta

    def enter(self, j: int) -> float:
        """Bring column j into the basis with a ratio test; returns the step length."""
        alpha = self.column(j)
        row = self.ratio_test(alpha)
        if row is None:
            raise UnboundedLPError(f"column {j} has no blocking row")
        return self.pivot(j, row, alpha)

    def iterate(self, cost: np.ndarray, max_pivots: Optional[int] = None) -> int:
        """Pivot until the basis is optimal for `cost`; returns the number of pivots."""
        limit = max_pivots if max_pivots is not None else 50 * (self.m + self.num_vars)
        done = 0
        while True:
            z = self.reduced_costs(cost)
            entering = self.choose_entering(z)
            if entering is None:
                return done
            if done >= limit:
                raise InternalInvariantError(f"simplex did not terminate within {limit} pivots")
            self.enter(entering)
            done += 1


# ====================================================
# TWO-PHASE DRIVER
# ====================================================

@dataclass(frozen=True, eq=False)
class LPSolution:
    """Optimal solution of a standard-form LP."""

    x: np.ndarray
    objective: float
    duals: np.ndarray
    basis: Optional[Tuple[int, ...]]
    pivots: int
    warm_started: bool


def _try_warm_basis(
    A: np.ndarray, b: np.ndarray, basis: Sequence[int], config: TransitConfig
) -> Optional[RevisedSimplex]:
    try:
        engine = RevisedSimplex(A, b, basis, config)
    except SingularBasisError:
        return None
    return engine if engine.is_primal_feasible() else None


def solve_standard_lp(
    A: np.ndarray,
    b: np.ndarray,
    cost: np.ndarray,
    config: Optional[TransitConfig] = None,
    start_basis: Optional[Sequence[int]] = None,
) -> LPSolution:
    """
    Solve max cost^T x, A x = b, x >= 0.

    A feasible `start_basis` skips phase 1; an unusable one falls back to a
    cold start.

    Raises:
        InfeasibleLPError: no feasible x
        UnboundedLPError: objective unbounded
    """
    config = config or get_default_config()
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    cost = np.asarray(cost, dtype=np.float64)
    m, num_vars = A.shape

    if start_basis is not None:
        engine = _try_warm_basis(A, b, start_basis, config)
        if engine is not None:
            pivots = engine.iterate(cost)
            return LPSolution(
                x=engine.primal(),
                objective=engine.objective(cost),
                duals=engine.duals(cost),
                basis=tuple(engine.basis),
                pivots=pivots,
                warm_started=True,
            )
        logger.warning("warm-start basis is singular or infeasible; falling back to a cold start")

    # Phase 1: artificial identity on rows made nonnegative
    signs = np.where(b < 0, -1.0, 1.0)
    A1 = np.hstack([A * signs[:, None], np.eye(m)])
    b1 = b * signs
    phase1_cost = np.concatenate([np.zeros(num_vars), -np.ones(m)])
    engine = RevisedSimplex(A1, b1, range(num_vars, num_vars + m), config)
    pivots = engine.iterate(phase1_cost)

    if engine.objective(phase1_cost) < -config.tol_feas * (1.0 + float(np.abs(b1).sum())):
        raise InfeasibleLPError(f"phase 1 ended with artificial mass {-engine.objective(phase1_cost):.3e}")

    # Drive basic artificials (at zero) out where an original column can replace them
    for row, var in enumerate(list(engine.basis)):
        if var < num_vars:
            continue
        tableau_row = engine.B_inv[row] @ A1[:, :num_vars]
        tableau_row[[j for j in engine.basis if j < num_vars]] = 0.0
        candidates = np.flatnonzero(np.abs(tableau_row) > PIVOT_TOL)
        if candidates.size:
            j = int(candidates[0])
            engine.pivot(j, row, engine.column(j))
            pivots += 1

    engine.allowed = np.concatenate([np.ones(num_vars, dtype=bool), np.zeros(m, dtype=bool)])
    phase2_cost = np.concatenate([cost, np.zeros(m)])
    pivots += engine.iterate(phase2_cost)

    clean_basis = tuple(engine.basis) if all(j < num_vars for j in engine.basis) else None
    return LPSolution(
        x=engine.primal()[:num_vars],
        objective=engine.objective(phase2_cost),
        duals=engine.duals(phase2_cost) * signs,
        basis=clean_basis,
        pivots=pivots,
        warm_started=False,
    )
