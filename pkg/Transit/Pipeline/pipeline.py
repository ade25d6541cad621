"""
====================================================
PIPELINE - OVERALL TRANSITION
====================================================

RESPONSIBILITY:
Run the complete transition between two constrained least-squares
assignments C_s (sites s) and C_t (sites t):

1. bounds kappa-_i = min(|C_s_i|, |C_t_i|), kappa+_i = max(...)
2. fixed-site leg for (C_s, s) and for (C_t, t), concurrently
3. parametric leg between the two radial clusterings
4. concatenate, with the target leg in reverse order

It does NOT pivot.
It does NOT solve diagram LPs itself.
It ONLY sequences the legs and assembles the result.

CLUSTERING ORDER:
    C^{s,0}..C^{s,p}, C^{lam_1}..C^{lam_m}, C^{t,q-1}..C^{t,0}
(C^{s,p} = C^{lam_0} and C^{lam_m} = C^{t,q} appear once.)

DIAGRAM ORDER:
    P^{s,0}, Pbar^{s,1}, P^{s,1}, ..., Pbar^{s,p}, P^{s,p},
    Pbar^{lam_1}, P^{lam_1}, ..., P^{lam_(m-1)}, Pbar^{lam_m},
    P^{t,q}, Pbar^{t,q}, P^{t,q-1}, ..., Pbar^{t,1}, P^{t,0}
P^{t,q} is left out when m = 0 and s = t (it would repeat P^{s,p}).
====================================================
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np

from Transit.CDG import Exchange, single_exchange
from Transit.Config import TransitConfig, get_default_config
from Transit.Core import (
    Clustering,
    DataSet,
    InternalInvariantError,
    PreconditionError,
    SiteVector,
    SizeBounds,
    check_instance,
)
from Transit.Fixed_Site_Transition import FixedSiteResult, init_to_rad
from Transit.Parametric_Transition import TransitionStep, rad_to_rad
from Transit.Power_Diagram import DiagramInfeasibleError, PowerDiagram


logger = logging.getLogger(__name__)

DiagramKind = Literal["inducing", "shared"]
Leg = Literal["s", "lambda", "t"]


@dataclass(frozen=True, eq=False)
class DiagramRecord:
    """One diagram of the sequence and the clusterings (global indices) it induces."""

    kind: DiagramKind
    label: str
    induces: Tuple[int, ...]
    diagram: PowerDiagram

    @property
    def sites(self) -> SiteVector:
        return self.diagram.sites

    @property
    def margin(self) -> float:
        return self.diagram.margin


@dataclass(frozen=True)
class ExchangeRecord:
    """Exchange turning clusterings[index - 1] into clusterings[index]."""

    index: int
    leg: Leg
    exchange: Exchange
    lam: Optional[float] = None


@dataclass(frozen=True, eq=False)
class TransitionSequence:
    """Assembled transition; immutable once built."""

    dataset: DataSet
    s: SiteVector
    t: SiteVector
    initial: Clustering
    target: Clustering
    bounds: SizeBounds
    clusterings: Tuple[Clustering, ...]
    diagrams: Tuple[DiagramRecord, ...]
    exchanges: Tuple[ExchangeRecord, ...]
    p: int
    m: int
    q: int
    lambdas: Tuple[float, ...]
    config: TransitConfig

    def __len__(self) -> int:
        return len(self.clusterings)

    def leg_of(self, index: int) -> Tuple[Leg, int]:
        """('s', i) for C^{s,i}, ('lambda', r) for C^{lam_r}, ('t', j) for C^{t,j}."""
        if index <= self.p:
            return "s", index
        if index <= self.p + self.m:
            return "lambda", index - self.p
        return "t", self.p + self.m + self.q - index

    def lambda_of(self, r: int) -> float:
        return 0.0 if r == 0 else self.lambdas[r - 1]

    def sites_for(self, index: int) -> SiteVector:
        """Sites for which clusterings[index] is a constrained LSA."""
        leg, position = self.leg_of(index)
        if leg == "s":
            return self.s
        if leg == "t":
            return self.t
        return self.s.interpolate(self.t, self.lambda_of(position))


def _run_fixed_site_legs(
    ds: DataSet,
    C_s: Clustering,
    C_t: Clustering,
    s: SiteVector,
    t: SiteVector,
    bounds: SizeBounds,
    config: TransitConfig,
) -> Tuple[FixedSiteResult, FixedSiteResult]:
    with ThreadPoolExecutor(max_workers=2) as pool:
        futures = {
            "initial": pool.submit(init_to_rad, ds, C_s, s, bounds, config),
            "target": pool.submit(init_to_rad, ds, C_t, t, bounds, config),
        }
        results = {}
        for label, future in futures.items():
            try:
                results[label] = future.result()
            except DiagramInfeasibleError as e:
                raise InternalInvariantError(f"{label} leg: {e}") from e
            except PreconditionError as e:
                raise PreconditionError(f"{label} clustering: {e}") from e
    return results["initial"], results["target"]


def full_transition(
    ds: DataSet,
    C_s: Clustering,
    C_t: Clustering,
    s: SiteVector,
    t: SiteVector,
    config: Optional[TransitConfig] = None,
) -> TransitionSequence:
    """
    Transition from C_s (LSA for s) to C_t (LSA for t).

    Raises:
        PreconditionError: an endpoint is not a constrained LSA for its sites
        InternalInvariantError: a guaranteed property failed during the walk
    """
    config = config or get_default_config()
    check_instance(ds, [C_s, C_t], [s, t])
    bounds = SizeBounds.from_endpoints(C_s, C_t)
    logger.info("bounds: lower=%s upper=%s", bounds.lower, bounds.upper)

    leg_s, leg_t = _run_fixed_site_legs(ds, C_s, C_t, s, t, bounds, config)
    try:
        steps = rad_to_rad(ds, leg_s.radial, leg_t.radial, s, t, bounds, config)
    except (DiagramInfeasibleError, PreconditionError) as e:
        raise InternalInvariantError(f"parametric leg: {e}") from e

    sequence = assemble_sequence(ds, C_s, C_t, s, t, bounds, leg_s, steps, leg_t, config)
    logger.info(
        "transition assembled: p=%d m=%d q=%d, %d clusterings, %d diagrams",
        sequence.p, sequence.m, sequence.q, len(sequence.clusterings), len(sequence.diagrams),
    )
    return sequence


def assemble_sequence(
    ds: DataSet,
    C_s: Clustering,
    C_t: Clustering,
    s: SiteVector,
    t: SiteVector,
    bounds: SizeBounds,
    leg_s: FixedSiteResult,
    steps: List[TransitionStep],
    leg_t: FixedSiteResult,
    config: TransitConfig,
) -> TransitionSequence:
    """Concatenate the three legs and lay out diagrams in transition order."""
    p, m, q = leg_s.r, len(steps) - 1, leg_t.r
    if steps[0].clustering != leg_s.radial or steps[-1].clustering != leg_t.radial:
        raise InternalInvariantError("parametric leg does not connect the two radial clusterings")

    clusterings: List[Clustering] = list(leg_s.clusterings)
    clusterings += [step.clustering for step in steps[1:]]
    clusterings += list(reversed(leg_t.clusterings[:-1]))

    exchanges: List[ExchangeRecord] = [
        ExchangeRecord(index=i + 1, leg="s", exchange=e) for i, e in enumerate(leg_s.exchanges)
    ]
    for r, step in enumerate(steps[1:], start=1):
        assert step.exchange is not None
        exchanges.append(ExchangeRecord(index=p + r, leg="lambda", exchange=step.exchange, lam=step.lam))
    for index in range(p + m + 1, p + m + q + 1):
        exchanges.append(
            ExchangeRecord(index=index, leg="t", exchange=single_exchange(clusterings[index - 1], clusterings[index]))
        )

    diagrams: List[DiagramRecord] = [DiagramRecord("inducing", "P^{s,0}", (0,), leg_s.inducing[0])]
    for i in range(1, p + 1):
        diagrams.append(DiagramRecord("shared", f"Pbar^{{s,{i}}}", (i - 1, i), leg_s.shared[i - 1]))
        diagrams.append(DiagramRecord("inducing", f"P^{{s,{i}}}", (i,), leg_s.inducing[i]))
    for r in range(1, m + 1):
        step = steps[r]
        assert step.shared is not None
        diagrams.append(DiagramRecord("shared", f"Pbar^{{lam,{r}}}", (p + r - 1, p + r), step.shared))
        if r < m:
            assert step.inducing is not None
            diagrams.append(DiagramRecord("inducing", f"P^{{lam,{r}}}", (p + r,), step.inducing))

    same_sites = bool(np.array_equal(s.sites, t.sites))
    if not (m == 0 and same_sites):
        diagrams.append(DiagramRecord("inducing", f"P^{{t,{q}}}", (p + m,), leg_t.inducing[q]))
    for j in range(q, 0, -1):
        at_j = p + m + q - j
        diagrams.append(DiagramRecord("shared", f"Pbar^{{t,{j}}}", (at_j, at_j + 1), leg_t.shared[j - 1]))
        diagrams.append(DiagramRecord("inducing", f"P^{{t,{j - 1}}}", (at_j + 1,), leg_t.inducing[j - 1]))

    return TransitionSequence(
        dataset=ds,
        s=s,
        t=t,
        initial=C_s,
        target=C_t,
        bounds=bounds,
        clusterings=tuple(clusterings),
        diagrams=tuple(diagrams),
        exchanges=tuple(exchanges),
        p=p,
        m=m,
        q=q,
        lambdas=tuple(step.lam for step in steps[1:]),
        config=config,
    )

