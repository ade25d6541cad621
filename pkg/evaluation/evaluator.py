"""
====================================================
EVALUATOR - Acceptance Criteria
====================================================

Property-based acceptance runs at desk scale: every criterion draws a
family of seeded random instances, runs the library on them and checks
the outcome against brute-force enumeration or the guaranteed properties.

EVALUATION FLOW:
1. Load acceptance cases (criterion + parameters)
2. Generate the instance family for each case from its seed
3. Run the library (read-only use of the Transit package)
4. Compare with the oracle / verification report
5. Aggregate and save results

Criteria:
    oracle_lsa          optimize over one shape == enumeration
    oracle_radial       optimize over bounded shapes == enumeration
    breakpoints         breakpoints and grid-scan change points match both ways, count = m
    transition_suite    full_transition passes verify_sequence (induction,
                        boundaries and distinct clustering vectors included)
    fixed_site_suite    fixed-site legs: properties + strict increase + shape count
    single_shape        equal endpoint shapes -> no fixed-site steps, only cycles
    determinism         same seed and config -> byte-identical transition files
====================================================
"""

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from Transit.CDG import is_single_exchange
from Transit.Config import TransitConfig
from Transit.Core import (
    DataSet,
    Shape,
    SiteVector,
    SizeBounds,
    TransitError,
    center_dataset,
    count_shapes,
    objective_from_sites,
)
from Transit.Fixed_Site_Transition import init_to_rad, lsa_gap
from Transit.IO_Layer import Instance, generate_instance, transition_to_text
from Transit.Oracle import brute_force_best, brute_force_breakpoints, change_points
from Transit.Parametric_Transition import rad_to_rad
from Transit.Pipeline import full_transition, verify_sequence
from Transit.Power_Diagram import induces
from Transit.Transport_LP import optimize


logger = logging.getLogger(__name__)

REL_TOL = 1e-6


# ====================================================
# DATA STRUCTURES
# ====================================================

@dataclass
class AcceptanceCase:
    """One criterion with the parameters of its instance family."""
    id: str
    criterion: str
    instances: int
    seed: int
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class CriterionResult:
    """Outcome of one acceptance case."""
    id: str
    criterion: str
    passed: bool
    instances: int
    failures: List[str]
    seconds: float
    stats: Dict[str, Any] = field(default_factory=dict)


# ====================================================
# INSTANCE FAMILIES
# ====================================================

def _random_sizes(rng: np.random.Generator, n: int, k: int, minimum: int = 0) -> Tuple[int, ...]:
    extra = rng.multinomial(n - minimum * k, np.full(k, 1.0 / k))
    return tuple(int(v) + minimum for v in extra)


def _random_points(rng: np.random.Generator, n: int, d: int) -> DataSet:
    return center_dataset(DataSet(rng.normal(size=(n, d))))


def _random_bounds(rng: np.random.Generator, n: int, k: int) -> SizeBounds:
    """kappa- < kappa+ with a feasible shape between them."""
    a, b = _random_sizes(rng, n, k), _random_sizes(rng, n, k)
    lower = tuple(min(x, y) for x, y in zip(a, b))
    upper = tuple(max(x, y) for x, y in zip(a, b))
    if lower == upper:
        upper = tuple(min(n, u + 1) for u in upper)
    return SizeBounds(lower, upper)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= REL_TOL * (1.0 + abs(b))


# ====================================================
# EVALUATOR
# ====================================================

class AcceptanceEvaluator:
    """
    Runs acceptance cases against the library.

    Does NOT modify anything it evaluates; every instance is rebuilt from
    the case seed.
    """

    def __init__(self, config: Optional[TransitConfig] = None):
        self.config = config or TransitConfig()
        self._runners: Dict[str, Callable[[AcceptanceCase], Tuple[List[str], Dict[str, Any]]]] = {
            "oracle_lsa": self._oracle_lsa,
            "oracle_radial": self._oracle_radial,
            "breakpoints": self._breakpoints,
            "transition_suite": self._transition_suite,
            "fixed_site_suite": self._fixed_site_suite,
            "single_shape": self._single_shape,
            "determinism": self._determinism,
        }

    @property
    def criteria(self) -> List[str]:
        return list(self._runners)

    def evaluate_single(self, case: AcceptanceCase) -> CriterionResult:
        if case.criterion not in self._runners:
            raise ValueError(f"unknown criterion: {case.criterion}")
        started = time.perf_counter()
        failures, stats = self._runners[case.criterion](case)
        seconds = time.perf_counter() - started
        logger.info("%s: %d instance(s), %d failure(s), %.2fs", case.id, case.instances, len(failures), seconds)
        return CriterionResult(
            id=case.id,
            criterion=case.criterion,
            passed=not failures,
            instances=case.instances,
            failures=failures,
            seconds=round(seconds, 3),
            stats=stats,
        )

    def evaluate_all(self, cases: List[AcceptanceCase]) -> List[CriterionResult]:
        return [self.evaluate_single(case) for case in cases]

    def save_results(self, results: List[CriterionResult], output_path: str) -> None:
        payload = {
            "config": self.config.model_dump(),
            "passed": all(r.passed for r in results),
            "results": [asdict(r) for r in results],
        }
        Path(output_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    # ------------------------------------------------
    # Oracle equivalence
    # ------------------------------------------------

    def _oracle_family(self, case: AcceptanceCase, radial: bool) -> Tuple[List[str], Dict[str, Any]]:
        rng = np.random.default_rng(case.seed)
        max_n, max_k, max_d = case.params.get("max_n", 8), case.params.get("max_k", 3), case.params.get("max_d", 3)
        rules = case.params.get("pivot_rules", ["dantzig", "bland"])
        failures: List[str] = []
        for index in range(case.instances):
            k = int(rng.integers(1, max_k + 1))
            n = int(rng.integers(k, max_n + 1))
            d = int(rng.integers(1, max_d + 1))
            ds = _random_points(rng, n, d)
            s = SiteVector(rng.normal(size=(k, d)))
            bounds = _random_bounds(rng, n, k) if radial else SizeBounds.single_shape(Shape(_random_sizes(rng, n, k)))
            c = objective_from_sites(ds, s)
            _, expected = brute_force_best(ds, s, bounds)
            for rule in rules:
                vertex, _ = optimize(c, bounds, config=self.config.model_copy(update={"pivot_rule": rule}))
                got = c.value(vertex.clustering())
                if not _close(got, expected) or not bounds.contains(vertex.clustering().shape):
                    failures.append(f"#{index} n={n} k={k} d={d} {rule}: solver {got:.12g} vs enumeration {expected:.12g}")
        return failures, {}

    def _oracle_lsa(self, case: AcceptanceCase) -> Tuple[List[str], Dict[str, Any]]:
        return self._oracle_family(case, radial=False)

    def _oracle_radial(self, case: AcceptanceCase) -> Tuple[List[str], Dict[str, Any]]:
        return self._oracle_family(case, radial=True)

    # ------------------------------------------------
    # Breakpoints
    # ------------------------------------------------

    def _breakpoints(self, case: AcceptanceCase) -> Tuple[List[str], Dict[str, Any]]:
        rng = np.random.default_rng(case.seed)
        grid = int(case.params.get("grid", 10_000))
        max_n = case.params.get("max_n", 6)
        step = 1.0 / (grid - 1)
        failures: List[str] = []
        total = 0
        unresolved = 0
        for index in range(case.instances):
            n = int(rng.integers(2, max_n + 1))
            ds = _random_points(rng, n, 2)
            s, t = SiteVector(rng.normal(size=(2, 2))), SiteVector(rng.normal(size=(2, 2)))
            bounds = _random_bounds(rng, n, 2)
            c_s, c_t = objective_from_sites(ds, s), objective_from_sites(ds, t)
            C_s = optimize(c_s, bounds, config=self.config)[0].clustering()
            C_t = optimize(c_t, bounds, config=self.config)[0].clustering()
            try:
                steps = rad_to_rad(ds, C_s, C_t, s, t, bounds, self.config)
            except TransitError as e:
                failures.append(f"#{index}: {type(e).__name__}: {e}")
                continue
            scan = brute_force_breakpoints(ds, s, t, bounds, grid)
            brackets = change_points(scan)
            total += len(steps) - 1

            lams = [st.lam for st in steps[1:]]
            for lam in lams:
                if lam >= 1.0 - step:
                    continue
                if not any(lo - step <= lam <= hi + step for lo, hi in brackets):
                    failures.append(f"#{index}: breakpoint {lam:.9g} is not within one grid step of a change point")
            for lo, hi in brackets:
                if not any(lo - step <= lam <= hi + step for lam in lams):
                    failures.append(f"#{index}: change point in [{lo:.9g}, {hi:.9g}] has no breakpoint")

            # the scan resolves breakpoint events more than two grid steps apart
            # and away from the ends of [0, 1]
            events = sorted(set(lams))
            separated = all(b - a > 2 * step for a, b in zip(events, events[1:]))
            interior = all(2 * step < lam < 1.0 - 2 * step for lam in events)
            if separated and interior and len(events) == len(lams):
                if len(brackets) != len(lams):
                    failures.append(f"#{index}: {len(brackets)} change point(s) but m={len(lams)}")
            else:
                unresolved += 1

            # between breakpoints the walk and the scan agree on the objective
            for lam, C_scan in scan[:: max(1, grid // 200)]:
                current = [st for st in steps if st.lam <= lam + 1e-12][-1]
                c = c_s.scaled(1.0 - lam) + c_t.scaled(lam)
                if c.value(current.clustering) < c.value(C_scan) - 1e-7 * c.scale():
                    failures.append(f"#{index}: walk clustering not optimal at lam={lam:.6g}")
                    break
        return failures, {"vertex_changes": total, "unresolved_instances": unresolved}

    # ------------------------------------------------
    # Transition suites
    # ------------------------------------------------

    def _instance(self, rng: np.random.Generator, case: AcceptanceCase, equal_shapes: bool = False) -> Instance:
        max_n, max_k = case.params.get("max_n", 40), case.params.get("max_k", 5)
        k = int(rng.integers(2, max_k + 1))
        n = int(rng.integers(2 * k, max_n + 1))
        instance = generate_instance(n, k, 2, seed=int(rng.integers(0, 2**31)), config=self.config)
        if not equal_shapes:
            return instance
        C_t = optimize(
            objective_from_sites(instance.dataset, instance.t),
            SizeBounds.single_shape(instance.initial.shape),
            config=self.config,
        )[0].clustering()
        return Instance(dataset=instance.dataset, initial=instance.initial, target=C_t, s=instance.s, t=instance.t)

    def _transition_suite(self, case: AcceptanceCase) -> Tuple[List[str], Dict[str, Any]]:
        rng = np.random.default_rng(case.seed)
        failures: List[str] = []
        lengths: List[int] = []
        for index in range(case.instances):
            instance = self._instance(rng, case)
            C_s, C_t, s, t = instance.require_transition()
            try:
                seq = full_transition(instance.dataset, C_s, C_t, s, t, self.config)
            except TransitError as e:
                failures.append(f"#{index}: {type(e).__name__}: {e}")
                continue
            report = verify_sequence(instance.dataset, seq, self.config)
            lengths.append(len(seq))
            for failure in report.failures()[:3]:
                failures.append(f"#{index}: {failure.check} at {failure.index}: {failure.detail}")
        return failures, {"mean_length": float(np.mean(lengths)) if lengths else 0.0}

    def _fixed_site_suite(self, case: AcceptanceCase) -> Tuple[List[str], Dict[str, Any]]:
        rng = np.random.default_rng(case.seed)
        max_n = case.params.get("max_n", 30)
        failures: List[str] = []
        for index in range(case.instances):
            k = 2 if index % 2 == 0 else 3
            n = int(rng.integers(2 * k, max_n + 1))
            ds = _random_points(rng, n, 2)
            s = SiteVector(rng.normal(size=(k, 2)))
            bounds = _random_bounds(rng, n, k)
            c = objective_from_sites(ds, s)
            start_shape = Shape(tuple(bounds.lower[:-1]) + (n - sum(bounds.lower[:-1]),))
            if not bounds.contains(start_shape):
                start_shape = optimize(c, bounds, config=self.config)[0].clustering().shape
            C = optimize(c, SizeBounds.single_shape(start_shape), config=self.config)[0].clustering()
            try:
                result = init_to_rad(ds, C, s, bounds, self.config)
            except TransitError as e:
                failures.append(f"#{index}: {type(e).__name__}: {e}")
                continue

            tol = self.config.tol_opt * c.scale()
            problems = []
            if any(lsa_gap(c, X, self.config) > tol for X in result.clusterings):
                problems.append("intermediate clustering is not an LSA")
            if any(b <= a for a, b in zip(result.objectives, result.objectives[1:])):
                problems.append("objective not strictly increasing")
            if any(not is_single_exchange(a, b) for a, b in zip(result.clusterings, result.clusterings[1:])):
                problems.append("consecutive clusterings are not one exchange apart")
            if any(e.kind != "path" for e in result.exchanges):
                problems.append("fixed-site exchange is not sequential")
            if result.r > count_shapes(bounds, n):
                problems.append(f"{result.r} steps exceed {count_shapes(bounds, n)} shapes")
            if k == 2 and result.r > bounds.upper[0] - bounds.lower[0] + 1:
                problems.append("k = 2 step count above the shape count")
            if not all(induces(ds, pd, X, config=self.config) for X, pd in zip(result.clusterings, result.inducing)):
                problems.append("inducing diagram does not induce its clustering")
            for a, b, pd in zip(result.clusterings, result.clusterings[1:], result.shared):
                if not (induces(ds, pd, a, config=self.config) and induces(ds, pd, b, config=self.config)):
                    problems.append("shared diagram does not induce both clusterings")
            failures.extend(f"#{index}: {p}" for p in problems)
        return failures, {}

    def _single_shape(self, case: AcceptanceCase) -> Tuple[List[str], Dict[str, Any]]:
        rng = np.random.default_rng(case.seed)
        failures: List[str] = []
        for index in range(case.instances):
            instance = self._instance(rng, case, equal_shapes=True)
            C_s, C_t, s, t = instance.require_transition()
            try:
                seq = full_transition(instance.dataset, C_s, C_t, s, t, self.config)
            except TransitError as e:
                failures.append(f"#{index}: {type(e).__name__}: {e}")
                continue
            if seq.p or seq.q:
                failures.append(f"#{index}: fixed-site legs not empty (p={seq.p}, q={seq.q})")
            if any(record.exchange.kind != "cycle" for record in seq.exchanges):
                failures.append(f"#{index}: shape-changing exchange between equal-shape endpoints")
            if not verify_sequence(instance.dataset, seq, self.config).passed:
                failures.append(f"#{index}: verification failed")
        return failures, {}

    def _determinism(self, case: AcceptanceCase) -> Tuple[List[str], Dict[str, Any]]:
        rng = np.random.default_rng(case.seed)
        failures: List[str] = []
        for index in range(case.instances):
            seed = int(rng.integers(0, 2**31))
            texts = []
            for _ in range(2):
                instance = generate_instance(12, 3, 2, seed=seed, config=self.config)
                C_s, C_t, s, t = instance.require_transition()
                texts.append(transition_to_text(full_transition(instance.dataset, C_s, C_t, s, t, self.config)))
            if texts[0] != texts[1]:
                failures.append(f"#{index}: transition files differ for seed {seed}")
        return failures, {}


def load_cases(path: str) -> List[AcceptanceCase]:
    data = json.loads(Path(path).read_text())
    return [AcceptanceCase(**case) for case in data["cases"]]
