"""
Power Diagram Layer

Margin-maximizing and shared power diagrams for fixed sites.

Usage:
    from Transit.Power_Diagram import max_margin_diagram, shared_diagram, induces

    pd, eps = max_margin_diagram(ds, C, s)
    assert induces(ds, pd, C)

    # consecutive fixed-site LPs reuse the previous basis
    pd_next, _ = max_margin_diagram(ds, C_next, s, warm_start=warm_start_duals(pd.lp))
"""

from .power_diagram import (
    PowerDiagram,
    MarginLPSolution,
    DualStart,
    DiagramInfeasibleError,
    weights_from_gammas,
    gammas_from_weights,
    max_margin_diagram,
    merged_site_diagram,
    coincident_site_tol,
    shared_diagram,
    induces,
    warm_start_duals,
)

__all__ = [
    "PowerDiagram",
    "MarginLPSolution",
    "DualStart",
    "DiagramInfeasibleError",
    "weights_from_gammas",
    "gammas_from_weights",
    "max_margin_diagram",
    "merged_site_diagram",
    "coincident_site_tol",
    "shared_diagram",
    "induces",
    "warm_start_duals",
]
