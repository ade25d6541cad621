"""
CDG Layer

Clustering difference graphs and item exchanges.

- build_cdg: labeled arcs for every item assigned differently
- decompose: one path (if shapes differ) plus arc-disjoint cycles
- apply_exchange: move the items of a path or cycle forward
- is_single_exchange: do two clusterings differ by exactly one walk?

Usage:
    from Transit.CDG import build_cdg, decompose, apply_exchange

    path, cycles = decompose(build_cdg(C_prev, C_opt))
    C_next = apply_exchange(C_prev, path)
"""

from .cdg import (
    Arc,
    CDG,
    Exchange,
    DecompositionError,
    build_cdg,
    decompose,
    apply_exchange,
    is_single_exchange,
    single_exchange,
)

__all__ = [
    "Arc",
    "CDG",
    "Exchange",
    "DecompositionError",
    "build_cdg",
    "decompose",
    "apply_exchange",
    "is_single_exchange",
    "single_exchange",
]
