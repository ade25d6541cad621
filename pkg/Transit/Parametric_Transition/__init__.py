"""
Parametric Transition Layer

Breakpoint walk between two radial clusterings while the sites move
linearly from s to t.

Usage:
    from Transit.Parametric_Transition import rad_to_rad

    steps = rad_to_rad(ds, C_s_rad, C_t_rad, s, t, bounds)
    for step in steps[1:]:
        print(step.lam, step.exchange.kind, step.clustering.shape.sizes)
"""

from .parametric_transition import (
    TransitionStep,
    advance_to_breakpoint,
    fold_zero_vector_moves,
    rad_to_rad,
)

__all__ = [
    "TransitionStep",
    "advance_to_breakpoint",
    "fold_zero_vector_moves",
    "rad_to_rad",
]
