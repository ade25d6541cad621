"""Exhaustive enumeration used as the reference for the solver."""

import numpy as np
import pytest

from Transit.Core import (
    Clustering,
    DataSet,
    InputValidationError,
    SiteVector,
    SizeBounds,
    objective_from_sites,
)
from Transit.Oracle import (
    BudgetExceededError,
    EnumerationBudget,
    brute_force_best,
    brute_force_breakpoints,
    change_points,
    exhaustive_separability_check,
    iter_feasible_assignments,
)


@pytest.fixture
def four_on_a_line() -> DataSet:
    return DataSet(np.array([[-2.0, 0.0], [-1.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))


def test_two_point_best(two_points, two_sites):
    C, value = brute_force_best(two_points, two_sites, SizeBounds.all_shapes(2, 2))
    assert C == Clustering((0, 1), 2)
    assert value == pytest.approx(2.0)


def test_k1_has_one_clustering(rng):
    ds = DataSet(rng.normal(size=(5, 2)))
    s = SiteVector(np.array([[0.3, -0.2]]))
    C, value = brute_force_best(ds, s, SizeBounds.all_shapes(5, 1))
    assert C == Clustering((0,) * 5, 1)
    assert value == pytest.approx(objective_from_sites(ds, s).value(C))


def test_feasible_assignments_respect_bounds():
    rows = list(iter_feasible_assignments(3, SizeBounds((1, 1), (2, 2))))
    assert len(rows) == 6
    assert all(0 < sum(row) < 3 for row in rows)
    assert len(set(rows)) == len(rows)


def test_budget_exceeded(rng):
    ds = DataSet(rng.normal(size=(5, 2)))
    s = SiteVector(rng.normal(size=(2, 2)))
    with pytest.raises(BudgetExceededError):
        brute_force_best(ds, s, SizeBounds.all_shapes(5, 2), EnumerationBudget(max_assignments=10))


def test_site_count_mismatch(two_points, two_sites):
    with pytest.raises(InputValidationError):
        brute_force_best(two_points, two_sites, SizeBounds.all_shapes(2, 3))


def test_change_points():
    a, b = Clustering((0, 1), 2), Clustering((1, 0), 2)
    scan = [(0.0, a), (0.25, a), (0.5, b), (0.75, b), (1.0, a)]
    assert change_points(scan) == [(0.25, 0.5), (0.75, 1.0)]
    assert change_points(scan[:2]) == []


def test_equal_sites_never_change(four_on_a_line):
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    scan = brute_force_breakpoints(four_on_a_line, s, s, SizeBounds.all_shapes(4, 2), grid=11)
    assert len(scan) == 11
    assert scan[0][0] == 0.0 and scan[-1][0] == 1.0
    assert change_points(scan) == []


def test_swapped_sites_change_once(four_on_a_line):
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    t = SiteVector(np.array([[1.0, 0.0], [-1.0, 0.0]]))
    bounds = SizeBounds((2, 2), (2, 2))
    scan = brute_force_breakpoints(four_on_a_line, s, t, bounds, grid=100)
    assert scan[0][1] == Clustering((0, 0, 1, 1), 2)
    assert scan[-1][1] == Clustering((1, 1, 0, 0), 2)
    (lo, hi), = change_points(scan)
    assert lo <= 0.5 <= hi


def test_grid_too_small(four_on_a_line):
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(InputValidationError):
        brute_force_breakpoints(four_on_a_line, s, s, SizeBounds.all_shapes(4, 2), grid=1)


def test_separability(four_on_a_line, config):
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    assert exhaustive_separability_check(four_on_a_line, Clustering((0, 0, 1, 1), 2), s, config=config)
    assert not exhaustive_separability_check(four_on_a_line, Clustering((1, 1, 0, 0), 2), s, config=config)
    # unbalanced shape: the best (3, 1) split keeps the far right point alone
    assert exhaustive_separability_check(four_on_a_line, Clustering((0, 0, 0, 1), 2), s, config=config)
    assert not exhaustive_separability_check(four_on_a_line, Clustering((1, 0, 0, 0), 2), s, config=config)
