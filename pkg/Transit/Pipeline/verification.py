"""
====================================================
SEQUENCE VERIFICATION
====================================================

RESPONSIBILITY:
Re-check every guaranteed property of a TransitionSequence from scratch
(re-optimizing, re-testing diagrams) and collect one entry per check and
clustering index. Failures are report entries, never exceptions.

CHECKS:
- structure: non-empty, leg sizes and indices consistent
- endpoints: first = initial clustering, last = target clustering
- constrained_lsa: every clustering optimal for its shape at its sites
- size_bounds: bounds derived from the endpoints and respected throughout
- single_exchange: consecutive clusterings one path / cycle apart, and
  the recorded exchange reproduces the next clustering (paths on the
  fixed-site legs)
- inducing_diagrams / shared_diagrams: every diagram induces what it claims
  at the sites it should use; moved items sit on boundaries
- radial_middle: parametric-leg clusterings optimal over all feasible
  shapes at s^lam_r and at s^lam_(r+1)
- s_leg_lsa / t_leg_lsa: fixed-site legs are LSAs for s and t
- distinct_shapes / shape_count: shapes within a fixed-site leg are
  pairwise distinct and no more than the number of feasible shapes
- lambda_monotone / distinct_vectors: breakpoint events strictly ordered in
  (0, 1] (several vertex changes per event allowed, each a parametric gain) and
  consecutive parametric clusterings have different clustering vectors

OUTPUT:
- Report (pandas DataFrame via to_frame(), dict via to_dict())
====================================================
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from Transit.CDG import apply_exchange, is_single_exchange
from Transit.Config import TransitConfig
from Transit.Core import (
    Clustering,
    DataSet,
    ObjectiveMatrix,
    SiteVector,
    SizeBounds,
    TransitError,
    clustering_vector,
    count_shapes,
    objective_from_sites,
)
from Transit.Fixed_Site_Transition import lsa_gap
from Transit.Pipeline.pipeline import DiagramRecord, TransitionSequence
from Transit.Power_Diagram import induces
from Transit.Transport_LP import clustering_objective_gap


logger = logging.getLogger(__name__)

CHECKS = (
    "structure",
    "endpoints",
    "constrained_lsa",
    "size_bounds",
    "single_exchange",
    "inducing_diagrams",
    "shared_diagrams",
    "radial_middle",
    "s_leg_lsa",
    "t_leg_lsa",
    "distinct_shapes",
    "shape_count",
    "lambda_monotone",
    "distinct_vectors",
)

_LABEL = re.compile(r"^(P|Pbar)\^\{(s|t|lam),(\d+)\}$")


@dataclass(frozen=True)
class CheckResult:
    check: str
    index: Optional[int]
    passed: bool
    detail: str = ""


@dataclass
class Report:
    """Pass/fail entries per check and clustering index."""

    results: List[CheckResult] = field(default_factory=list)

    def add(self, check: str, index: Optional[int], passed: bool, detail: str = "") -> None:
        self.results.append(CheckResult(check, index, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(result.passed for result in self.results)

    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def by_check(self) -> Dict[str, bool]:
        status: Dict[str, bool] = {}
        for result in self.results:
            status[result.check] = status.get(result.check, True) and result.passed
        return status

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(r.check, r.index, r.passed, r.detail) for r in self.results],
            columns=["check", "index", "passed", "detail"],
        )

    def summary(self) -> pd.DataFrame:
        """One row per check: number of entries and failures."""
        frame = self.to_frame()
        if frame.empty:
            return pd.DataFrame(columns=["check", "entries", "failed"])
        grouped = frame.groupby("check", sort=False)["passed"]
        return pd.DataFrame({
            "entries": grouped.size(),
            "failed": grouped.apply(lambda col: int((~col).sum())),
        }).reset_index()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": self.by_check(),
            "failures": [
                {"check": r.check, "index": r.index, "detail": r.detail} for r in self.failures()
            ],
        }


class _Verifier:
    """Holds the sequence, config and an objective cache while checks run."""

    def __init__(self, ds: DataSet, seq: TransitionSequence, config: TransitConfig):
        self.ds = ds
        self.seq = seq
        self.config = config
        self.report = Report()
        self._objectives: Dict[bytes, ObjectiveMatrix] = {}

    def objective(self, sites: SiteVector) -> ObjectiveMatrix:
        key = sites.sites.tobytes()
        if key not in self._objectives:
            self._objectives[key] = objective_from_sites(self.ds, sites)
        return self._objectives[key]

    def tol(self, c: ObjectiveMatrix) -> float:
        return self.config.tol_opt * c.scale()

    def guarded(self, check: str, index: Optional[int], fn: Callable[[], Tuple[bool, str]]) -> bool:
        try:
            passed, detail = fn()
        except TransitError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        self.report.add(check, index, passed, detail)
        return passed

    def lam_sites(self, r: int) -> SiteVector:
        return self.seq.s.interpolate(self.seq.t, self.seq.lambda_of(r))

    def expected_sites(self, record: DiagramRecord) -> Optional[SiteVector]:
        match = _LABEL.match(record.label)
        if match is None:
            return None
        kind, leg, number = match.group(1), match.group(2), int(match.group(3))
        if leg == "s":
            return self.seq.s
        if leg == "t":
            return self.seq.t
        if kind == "Pbar":
            return self.lam_sites(number)
        lam = 0.5 * (self.seq.lambda_of(number) + self.seq.lambda_of(number + 1))
        return self.seq.s.interpolate(self.seq.t, lam)

    # ------------------------------------------------
    # Checks
    # ------------------------------------------------

    def structure(self) -> bool:
        seq = self.seq
        L = len(seq.clusterings)
        if L == 0:
            self.report.add("structure", None, False, "empty sequence")
            return False
        problems = []
        if L != seq.p + seq.m + seq.q + 1:
            problems.append(f"{L} clusterings but p+m+q+1 = {seq.p + seq.m + seq.q + 1}")
        if len(seq.lambdas) != seq.m:
            problems.append(f"{len(seq.lambdas)} breakpoints for m = {seq.m}")
        if sorted(e.index for e in seq.exchanges) != list(range(1, L)):
            problems.append("exchange records do not cover indices 1..L-1")
        if any(i < 0 or i >= L for record in seq.diagrams for i in record.induces):
            problems.append("diagram refers to a clustering index out of range")
        if any(C.n != self.ds.n or C.k != seq.bounds.k for C in seq.clusterings):
            problems.append("clusterings disagree with the data set or the bounds")
        self.report.add("structure", None, not problems, "; ".join(problems))
        return not problems

    def endpoints(self) -> None:
        seq = self.seq
        self.report.add("endpoints", 0, seq.clusterings[0] == seq.initial, "first clustering vs initial")
        self.report.add("endpoints", len(seq.clusterings) - 1, seq.clusterings[-1] == seq.target,
                        "last clustering vs target")

    def lsa_checks(self) -> None:
        seq = self.seq
        for i, C in enumerate(seq.clusterings):
            c = self.objective(seq.sites_for(i))

            def own_shape(C=C, c=c):
                gap = lsa_gap(c, C, self.config)
                return gap <= self.tol(c), f"gap={gap:.3e}"

            self.guarded("constrained_lsa", i, own_shape)

            if i <= seq.p:
                c_s = self.objective(seq.s)
                self.guarded("s_leg_lsa", i, lambda C=C, c=c_s: self._gap_ok(c, C))
            if i >= seq.p + seq.m:
                c_t = self.objective(seq.t)
                self.guarded("t_leg_lsa", i, lambda C=C, c=c_t: self._gap_ok(c, C))

    def _gap_ok(self, c: ObjectiveMatrix, C: Clustering) -> Tuple[bool, str]:
        gap = lsa_gap(c, C, self.config)
        return gap <= self.tol(c), f"gap={gap:.3e}"

    def size_bounds(self) -> None:
        seq = self.seq
        expected = SizeBounds.from_endpoints(seq.initial, seq.target)
        self.report.add("size_bounds", None, expected == seq.bounds, f"bounds {seq.bounds.lower}..{seq.bounds.upper}")
        for i, C in enumerate(seq.clusterings):
            self.report.add("size_bounds", i, seq.bounds.contains(C.shape), f"shape {C.shape.sizes}")

    def exchanges(self) -> None:
        seq = self.seq
        records = {e.index: e for e in seq.exchanges}
        for i in range(1, len(seq.clusterings)):
            prev, cur = seq.clusterings[i - 1], seq.clusterings[i]

            def check(i=i, prev=prev, cur=cur):
                if not is_single_exchange(prev, cur):
                    return False, "clusterings differ by more (or less) than one exchange"
                record = records.get(i)
                if record is None or apply_exchange(prev, record.exchange) != cur:
                    return False, "recorded exchange does not reproduce the next clustering"
                if record.leg in ("s", "t") and record.exchange.kind != "path":
                    return False, "fixed-site leg exchange is not sequential"
                return True, f"{record.exchange.kind} of {len(record.exchange)}"

            self.guarded("single_exchange", i, check)

    def diagrams(self) -> None:
        seq = self.seq
        for record in seq.diagrams:
            check = "inducing_diagrams" if record.kind == "inducing" else "shared_diagrams"
            self.guarded(check, record.induces[-1], lambda record=record: self._diagram_ok(record))

    def _diagram_ok(self, record: DiagramRecord) -> Tuple[bool, str]:
        expected = self.expected_sites(record)
        if expected is None:
            return False, f"unknown diagram label {record.label!r}"
        if not np.allclose(record.sites.sites, expected.sites, rtol=0.0, atol=1e-9):
            return False, f"{record.label} uses the wrong sites"
        pd_ = record.diagram
        for i in record.induces:
            if not induces(self.ds, pd_, self.seq.clusterings[i], config=self.config):
                return False, f"{record.label} does not induce clustering {i}"
        if record.kind == "inducing" and self.config.boundary_tol < record.margin < np.inf:
            if not induces(self.ds, pd_, self.seq.clusterings[record.induces[0]], strict=True, tol=0.0):
                return False, f"{record.label} has margin {record.margin:.3e} but an item on a boundary"
        if record.kind == "shared":
            a, b = (self.seq.clusterings[i] for i in record.induces)
            points = self.ds.points
            for j, (i_prev, i_next) in enumerate(zip(a.assignment, b.assignment)):
                if i_prev == i_next:
                    continue
                normal, offset = pd_.hyperplane(i_prev, i_next)
                if abs(offset - float(normal @ points[j])) > self.config.boundary_tol * (1.0 + float(np.linalg.norm(normal))):
                    return False, f"moved item {j} is off the boundary in {record.label}"
            if record.label.startswith("Pbar^{lam"):
                c = self.objective(record.sites)
                va, vb = c.value(a), c.value(b)
                if abs(va - vb) > 1e-6 * (1.0 + abs(va)):
                    return False, f"{record.label}: clusterings not tied at the breakpoint ({va:.9g} vs {vb:.9g})"
        return True, record.label

    def radial_middle(self) -> None:
        seq = self.seq
        for r in range(seq.m + 1):
            index = seq.p + r
            C = seq.clusterings[index]

            def check(r=r, C=C):
                c = self.objective(self.lam_sites(r))
                gap = clustering_objective_gap(c, C, seq.bounds, self.config)
                if gap > self.tol(c):
                    return False, f"not radial at lam_{r} (gap {gap:.3e})"
                if r < seq.m:
                    c_next = self.objective(self.lam_sites(r + 1))
                    gap_next = clustering_objective_gap(c_next, C, seq.bounds, self.config)
                    if gap_next > self.tol(c_next):
                        return False, f"not radial at lam_{r + 1} (gap {gap_next:.3e})"
                return True, f"lam={seq.lambda_of(r):.12g}"

            self.guarded("radial_middle", index, check)

    def shapes(self) -> None:
        seq = self.seq
        n = self.ds.n
        limit = count_shapes(seq.bounds, n)
        legs = {
            "s": list(range(0, seq.p + 1)),
            "t": list(range(seq.p + seq.m, len(seq.clusterings))),
        }
        for leg, indices in legs.items():
            shapes = [seq.clusterings[i].shape for i in indices]
            distinct = len(set(shapes)) == len(shapes)
            self.report.add("distinct_shapes", indices[-1] if indices else None, distinct, f"{leg} leg")
            steps = len(indices) - 1
            self.report.add("shape_count", None, steps <= limit, f"{leg} leg: {steps} step(s), {limit} shape(s)")

    def parametric(self) -> None:
        seq = self.seq
        coalesce = self.config.breakpoint_coalesce
        dc = self.objective(seq.t) - self.objective(seq.s)
        for r in range(1, seq.m + 1):
            index = seq.p + r
            lam, previous = seq.lambda_of(r), seq.lambda_of(r - 1)
            before_C, after_C = seq.clusterings[index - 1], seq.clusterings[index]
            gain = dc.value(after_C) - dc.value(before_C)

            # 0 < lam_1 < lam_2 < ... <= 1 over breakpoint events; one event
            # carries several vertex changes at one exact lam, each with a
            # positive c(t) - c(s) gain unless it lies on the lam = 1 tie face
            if not 0.0 <= lam <= 1.0:
                ok, detail = False, "outside [0, 1]"
            elif lam > previous + coalesce:
                ok, detail = True, "new breakpoint"
            elif lam == previous and (lam == 1.0 or gain > 0.5 * self.config.tol_opt):
                ok, detail = True, f"same breakpoint, gain {gain:.3e}"
            elif lam == previous:
                ok, detail = False, f"repeated lam without parametric gain ({gain:.3e})"
            else:
                ok, detail = False, f"not after lam_{r - 1}={previous:.12g}"
            self.report.add("lambda_monotone", index, ok, f"lam_{r}={lam:.12g}: {detail}")

            before = clustering_vector(self.ds, before_C).w
            after = clustering_vector(self.ds, after_C).w
            scale = 1e-12 * (1.0 + float(np.abs(before).sum()))
            same = not np.any(np.abs(after - before) > scale)
            if same and lam == 1.0:
                # relabeling items at the origin on the lam = 1 tie face keeps w;
                # the distinct-vector property covers parametric changes only
                self.report.add("distinct_vectors", index, True, "tie-face move, w unchanged")
            else:
                self.report.add("distinct_vectors", index, not same)

    def run(self) -> Report:
        if not self.structure():
            return self.report
        self.endpoints()
        self.size_bounds()
        self.lsa_checks()
        self.exchanges()
        self.diagrams()
        self.radial_middle()
        self.shapes()
        self.parametric()
        return self.report


def verify_sequence(
    ds: DataSet, seq: TransitionSequence, config: Optional[TransitConfig] = None
) -> Report:
    """Re-check every property of `seq`; failures are entries of the returned report."""
    report = _Verifier(ds, seq, config or seq.config).run()
    failures = report.failures()
    if failures:
        logger.warning("verification: %d failed check(s), first: %s at %s", len(failures),
                       failures[0].check, failures[0].index)
    else:
        logger.info("verification: all %d check(s) passed", len(report.results))
    return report
