"""
Fixed-Site Transition Layer

From a constrained least-squares assignment to a radial clustering for
the same sites, one sequential exchange per step.

Usage:
    from Transit.Fixed_Site_Transition import init_to_rad

    result = init_to_rad(ds, C, s, bounds)
    result.clusterings   # C^0 = C, ..., C^r radial
    result.diagrams()    # P^0, Pbar^1, P^1, ..., Pbar^r, P^r
"""

from .fixed_site_transition import (
    FixedSiteResult,
    init_to_rad,
    step_to_next_shape,
    lsa_gap,
)

__all__ = [
    "FixedSiteResult",
    "init_to_rad",
    "step_to_next_shape",
    "lsa_gap",
]
