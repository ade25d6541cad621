"""Acceptance evaluator on cut-down instance families."""

import json
from pathlib import Path

import pytest

from evaluation.evaluator import AcceptanceCase, AcceptanceEvaluator, load_cases


def test_cases_file_covers_every_criterion():
    cases = load_cases(str(Path(__file__).parent / "acceptance_cases.json"))
    assert {case.criterion for case in cases} == set(AcceptanceEvaluator().criteria)
    assert len({case.id for case in cases}) == len(cases)


@pytest.mark.slow
@pytest.mark.parametrize("criterion, params", [
    ("oracle_lsa", {"max_n": 6}),
    ("oracle_radial", {"max_n": 6}),
    ("breakpoints", {"max_n": 5, "grid": 1000}),
    ("transition_suite", {"max_n": 14, "max_k": 3}),
    ("fixed_site_suite", {"max_n": 12}),
    ("single_shape", {"max_n": 12, "max_k": 3}),
    ("determinism", {}),
])
def test_criterion_passes(criterion, params, config):
    case = AcceptanceCase(id=f"mini_{criterion}", criterion=criterion, instances=3, seed=17, params=params)
    result = AcceptanceEvaluator(config).evaluate_single(case)
    assert result.passed, result.failures


def test_unknown_criterion(config):
    with pytest.raises(ValueError, match="unknown criterion"):
        AcceptanceEvaluator(config).evaluate_single(AcceptanceCase("x", "nonsense", 1, 0))


def test_save_results(tmp_path, config):
    evaluator = AcceptanceEvaluator(config)
    result = evaluator.evaluate_single(AcceptanceCase("det", "determinism", 1, 3))
    out = tmp_path / "results.json"
    evaluator.save_results([result], str(out))
    data = json.loads(out.read_text())
    assert data["passed"] is True
    assert data["results"][0]["id"] == "det"
    assert data["config"]["pivot_rule"] == config.pivot_rule
