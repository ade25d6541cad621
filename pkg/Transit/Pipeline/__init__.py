"""
Pipeline Layer

Overall transition between two constrained least-squares assignments and
its from-scratch verification.

Architecture:
- full_transition: bounds -> two fixed-site legs (concurrent) -> parametric leg
- assemble_sequence: concatenation and diagram layout
- verify_sequence: every guaranteed property as a report entry

Usage:
    from Transit.Pipeline import full_transition, verify_sequence

    seq = full_transition(ds, C_s, C_t, s, t)
    report = verify_sequence(ds, seq)
    print(report.summary())
    # -> check / entries / failed, one row per property
"""

from .pipeline import (
    DiagramRecord,
    ExchangeRecord,
    TransitionSequence,
    full_transition,
    assemble_sequence,
)
from .verification import (
    CHECKS,
    CheckResult,
    Report,
    verify_sequence,
)

__all__ = [
    "DiagramRecord",
    "ExchangeRecord",
    "TransitionSequence",
    "full_transition",
    "assemble_sequence",
    "CHECKS",
    "CheckResult",
    "Report",
    "verify_sequence",
]
