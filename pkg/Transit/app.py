"""
====================================================
TRANSIT APPLICATION - LIBRARY ENTRY POINT
====================================================

RESPONSIBILITY:
Connect the layers into the operations the command line exposes.

GLUE CODE ONLY.
NO numerics of its own.

PIPELINE:
Instance -> Fixed-site legs -> Parametric leg -> Sequence -> Verification

Every operation reads its tolerances from the one TransitConfig held by
the application, so a run and its re-verification agree on degeneracy.
====================================================
"""

import logging
from dataclasses import dataclass
from typing import Any, List, Mapping, Optional, Tuple

import pandas as pd

from Transit.Config import TransitConfig, load_config
from Transit.Core import (
    Clustering,
    Shape,
    SizeBounds,
    objective_from_sites,
)
from Transit.IO_Layer import Instance, generate_instance
from Transit.Oracle import EnumerationBudget, brute_force_best, exhaustive_separability_check
from Transit.Pipeline import Report, TransitionSequence, full_transition, verify_sequence
from Transit.Transport_LP import InfeasibleBoundsError, optimize


logger = logging.getLogger(__name__)

ORACLE_REL_TOL = 1e-6


@dataclass(frozen=True)
class AssignmentResult:
    """A clustering computed for one set of sites, with the bounds it was optimized over."""

    clustering: Clustering
    objective: float
    bounds: SizeBounds


def instance_bounds(instance: Instance) -> SizeBounds:
    """Bounds from the file, else from the endpoint clusterings, else every shape."""
    if instance.bounds is not None:
        return instance.bounds
    if instance.initial is not None and instance.target is not None:
        return SizeBounds.from_endpoints(instance.initial, instance.target)
    return SizeBounds.all_shapes(instance.dataset.n, instance.k)


class TransitApplication:
    """Single entry point for external consumers (CLI, batch runner, acceptance harness)."""

    def __init__(self, config: TransitConfig):
        self.config = config

    def transit(self, instance: Instance) -> Tuple[TransitionSequence, Report]:
        """Full transition between the instance endpoints, plus its verification report."""
        C_s, C_t, s, t = instance.require_transition()
        seq = full_transition(instance.dataset, C_s, C_t, s, t, self.config)
        report = verify_sequence(instance.dataset, seq, self.config)
        logger.info("transit: %d clusterings, verification %s", len(seq), "passed" if report.passed else "FAILED")
        return seq, report

    def verify(self, seq: TransitionSequence, config: Optional[TransitConfig] = None) -> Report:
        return verify_sequence(seq.dataset, seq, config or self.config)

    def lsa(self, instance: Instance, shape: Shape, which: str = "initial") -> AssignmentResult:
        """Constrained LSA for the chosen sites over the single-shape polytope."""
        s = instance.sites(which)
        if shape.k != s.k or shape.n != instance.dataset.n:
            raise InfeasibleBoundsError(
                f"shape {shape.sizes} does not split {instance.dataset.n} items into {s.k} clusters"
            )
        return self._optimize(instance, which, SizeBounds.single_shape(shape))

    def radial(self, instance: Instance, which: str = "initial") -> AssignmentResult:
        """Best clustering for the chosen sites over every shape within the instance bounds."""
        return self._optimize(instance, which, instance_bounds(instance))

    def _optimize(self, instance: Instance, which: str, bounds: SizeBounds) -> AssignmentResult:
        c = objective_from_sites(instance.dataset, instance.sites(which))
        vertex, _ = optimize(c, bounds, config=self.config)
        C = vertex.clustering()
        return AssignmentResult(clustering=C, objective=c.value(C), bounds=bounds)

    def oracle(self, instance: Instance) -> pd.DataFrame:
        """
        Cross-check the LP solver against enumeration for every site vector in
        the instance, and the endpoint clusterings against exhaustive LSA search.

        Returns one row per check with columns check, sites, solver, enumeration, agree.
        """
        bounds = instance_bounds(instance)
        budget = EnumerationBudget.from_config(self.config)
        rows: List[Mapping[str, Any]] = []
        for which, C in (("initial", instance.initial), ("target", instance.target)):
            sites = instance.s if which == "initial" else instance.t
            if sites is None:
                continue
            c = objective_from_sites(instance.dataset, sites)
            vertex, _ = optimize(c, bounds, config=self.config)
            solver = c.value(vertex.clustering())
            _, enumerated = brute_force_best(instance.dataset, sites, bounds, budget)
            rows.append({
                "check": "radial_objective",
                "sites": which,
                "solver": solver,
                "enumeration": enumerated,
                "agree": abs(solver - enumerated) <= ORACLE_REL_TOL * (1.0 + abs(enumerated)),
            })
            if C is not None:
                rows.append({
                    "check": "endpoint_is_lsa",
                    "sites": which,
                    "solver": c.value(C),
                    "enumeration": float("nan"),
                    "agree": exhaustive_separability_check(instance.dataset, C, sites, budget, self.config),
                })
        return pd.DataFrame(rows, columns=["check", "sites", "solver", "enumeration", "agree"])

    def generate(self, n: int, k: int, d: int, site_shift: float = 0.5) -> Instance:
        return generate_instance(n, k, d, seed=self.config.seed, site_shift=site_shift, config=self.config)


# ====================================================
# FACTORY FUNCTION
# ====================================================

def create_transit_application(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> TransitApplication:
    """
    Build the application from a config file plus explicit overrides.

    Args:
        config_path: Optional JSON config file
        overrides: Field values that win over the file and the environment

    Returns:
        Configured TransitApplication

    Raises:
        ConfigError: invalid file or override
    """
    return TransitApplication(load_config(config_path, overrides=overrides))
