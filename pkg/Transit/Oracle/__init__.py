"""
Oracle Layer

Exhaustive enumeration for desk-sized instances (k**n within budget).

Usage:
    from Transit.Oracle import brute_force_best, brute_force_breakpoints

    C_best, value = brute_force_best(ds, s, bounds)
    scan = brute_force_breakpoints(ds, s, t, bounds, grid=10_000)
    brackets = change_points(scan)
"""

from .oracle import (
    BudgetExceededError,
    EnumerationBudget,
    iter_feasible_assignments,
    feasible_assignments,
    brute_force_best,
    brute_force_breakpoints,
    change_points,
    exhaustive_separability_check,
)

__all__ = [
    "BudgetExceededError",
    "EnumerationBudget",
    "iter_feasible_assignments",
    "feasible_assignments",
    "brute_force_best",
    "brute_force_breakpoints",
    "change_points",
    "exhaustive_separability_check",
]
