"""
====================================================
BRUTE-FORCE ORACLE
====================================================

RESPONSIBILITY:
Independent ground truth for small instances by exhausting every
assignment of n items to k clusters.

NO simplex.
NO power diagrams.

ENUMERATION:
Mixed-radix order (item 0 is the most significant digit), pruned as soon
as a cluster exceeds its upper bound or the remaining items can no longer
reach the lower bounds. Ties keep the first (lexicographically smallest)
assignment.

BUDGET:
k**n must not exceed EnumerationBudget.max_assignments; checked before
anything is enumerated.
====================================================
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from Transit.Config import TransitConfig, get_default_config
from Transit.Core import (
    Clustering,
    DataSet,
    InputValidationError,
    SiteVector,
    SizeBounds,
    TransitError,
    check_instance,
    objective_from_sites,
)


logger = logging.getLogger(__name__)


class BudgetExceededError(TransitError):
    """Instance too large for exhaustive enumeration."""
    pass


@dataclass(frozen=True)
class EnumerationBudget:
    max_assignments: int = 10**7

    @classmethod
    def from_config(cls, config: Optional[TransitConfig] = None) -> "EnumerationBudget":
        return cls((config or get_default_config()).enumeration_budget)

    def check(self, n: int, k: int) -> None:
        # integer power; no float overflow for large n
        if k ** n > self.max_assignments:
            raise BudgetExceededError(f"{k}^{n} assignments exceed the enumeration budget of {self.max_assignments}")


def iter_feasible_assignments(n: int, bounds: SizeBounds) -> Iterator[Tuple[int, ...]]:
    """All assignments whose shape respects `bounds`, in mixed-radix order."""
    k = bounds.k
    lower, upper = bounds.lower, bounds.upper
    sizes = [0] * k
    assignment = [0] * n

    def missing() -> int:
        return sum(max(lo - size, 0) for lo, size in zip(lower, sizes))

    def descend(j: int) -> Iterator[Tuple[int, ...]]:
        if j == n:
            if missing() == 0:
                yield tuple(assignment)
            return
        for i in range(k):
            if sizes[i] >= upper[i]:
                continue
            sizes[i] += 1
            if missing() <= n - j - 1:
                assignment[j] = i
                yield from descend(j + 1)
            sizes[i] -= 1

    yield from descend(0)


def feasible_assignments(n: int, bounds: SizeBounds, budget: EnumerationBudget) -> np.ndarray:
    """F x n label matrix of every feasible assignment."""
    budget.check(n, bounds.k)
    rows = list(iter_feasible_assignments(n, bounds))
    if not rows:
        raise InputValidationError(f"no clustering of {n} items satisfies bounds {bounds.lower}..{bounds.upper}")
    return np.array(rows, dtype=np.int64)


def _objectives(ds: DataSet, s: SiteVector, labels: np.ndarray) -> np.ndarray:
    c = objective_from_sites(ds, s).c
    return c[labels, np.arange(ds.n)[None, :]].sum(axis=1)


def brute_force_best(
    ds: DataSet,
    s: SiteVector,
    bounds: SizeBounds,
    budget: Optional[EnumerationBudget] = None,
) -> Tuple[Clustering, float]:
    """
    Best clustering within `bounds` for c(s), by exhaustion.

    Raises:
        BudgetExceededError: k**n over budget
    """
    budget = budget or EnumerationBudget.from_config()
    if s.k != bounds.k:
        raise InputValidationError(f"{s.k} sites but bounds for {bounds.k} clusters")
    labels = feasible_assignments(ds.n, bounds, budget)
    values = _objectives(ds, s, labels)
    best = int(np.argmax(values))
    return Clustering(tuple(labels[best]), bounds.k), float(values[best])


def brute_force_breakpoints(
    ds: DataSet,
    s: SiteVector,
    t: SiteVector,
    bounds: SizeBounds,
    grid: int,
    budget: Optional[EnumerationBudget] = None,
) -> List[Tuple[float, Clustering]]:
    """
    Best clustering for c(s^lam) at `grid` evenly spaced lam in [0, 1].

    Objectives are linear in lam, so they are evaluated once at s and t.
    """
    if grid < 2:
        raise InputValidationError(f"grid needs at least two points, got {grid}")
    budget = budget or EnumerationBudget.from_config()
    check_instance(ds, [], [s, t])
    labels = feasible_assignments(ds.n, bounds, budget)
    at_s = _objectives(ds, s, labels)
    at_t = _objectives(ds, t, labels)

    scan: List[Tuple[float, Clustering]] = []
    for lam in np.linspace(0.0, 1.0, grid):
        best = int(np.argmax((1.0 - lam) * at_s + lam * at_t))
        scan.append((float(lam), Clustering(tuple(labels[best]), bounds.k)))
    return scan


def change_points(scan: List[Tuple[float, Clustering]]) -> List[Tuple[float, float]]:
    """Brackets (lam_before, lam_after) where the scanned optimum changes."""
    return [
        (scan[i - 1][0], scan[i][0])
        for i in range(1, len(scan))
        if scan[i][1] != scan[i - 1][1]
    ]


def exhaustive_separability_check(
    ds: DataSet,
    C: Clustering,
    s: SiteVector,
    budget: Optional[EnumerationBudget] = None,
    config: Optional[TransitConfig] = None,
) -> bool:
    """True iff no clustering of the same shape beats C for c(s)."""
    config = config or get_default_config()
    budget = budget or EnumerationBudget.from_config(config)
    check_instance(ds, [C], [s])
    c = objective_from_sites(ds, s)
    labels = feasible_assignments(ds.n, SizeBounds.single_shape(C.shape), budget)
    values = _objectives(ds, s, labels)
    return bool(c.value(C) >= float(values.max()) - 1e-9 * c.scale())
