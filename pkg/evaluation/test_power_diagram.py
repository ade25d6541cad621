"""Margin-maximizing and shared power diagrams."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from Transit.Core import (
    Clustering,
    DataSet,
    InputValidationError,
    Shape,
    SiteVector,
    SizeBounds,
    objective_from_sites,
)
from Transit.Power_Diagram import (
    DiagramInfeasibleError,
    PowerDiagram,
    coincident_site_tol,
    gammas_from_weights,
    induces,
    max_margin_diagram,
    merged_site_diagram,
    shared_diagram,
    warm_start_duals,
    weights_from_gammas,
)
from Transit.Transport_LP import optimize

from evaluation.strategies import COORDINATES, data_sets, shapes, site_vectors


def lsa(ds, s, sizes, config):
    vertex, _ = optimize(objective_from_sites(ds, s), SizeBounds.single_shape(Shape(sizes)), config=config)
    return vertex.clustering()


def test_two_point_margin(two_points, two_sites, config):
    # bisector x = 0, both points at distance 1
    C = Clustering((0, 1), 2)
    pd, eps = max_margin_diagram(two_points, C, two_sites, config)
    assert eps == pytest.approx(1.0)
    assert pd.gammas[0] == 0.0
    assert pd.weights[0] == 0.0
    normal, offset = pd.hyperplane(0, 1)
    np.testing.assert_allclose(normal, [2.0, 0.0])
    assert offset == pytest.approx(0.0, abs=1e-12)
    assert induces(two_points, pd, C, strict=True, config=config)


def test_wrong_side_is_infeasible(two_points, two_sites, config):
    with pytest.raises(DiagramInfeasibleError):
        max_margin_diagram(two_points, Clustering((1, 0), 2), two_sites, config)


def test_single_nonempty_cluster_has_infinite_margin(two_points, two_sites, config):
    pd, eps = max_margin_diagram(two_points, Clustering((1, 1), 2), two_sites, config)
    assert eps == float("inf")
    assert induces(two_points, pd, Clustering((1, 1), 2), config=config)


def test_k1(config):
    ds = DataSet(np.array([[0.0, 0.0], [1.0, 2.0]]))
    pd, eps = max_margin_diagram(ds, Clustering((0, 0), 1), SiteVector(np.array([[0.5, 0.5]])), config)
    assert eps == float("inf")
    assert pd.k == 1


def test_coincident_sites_rejected(two_points, config):
    s = SiteVector(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(InputValidationError):
        max_margin_diagram(two_points, Clustering((0, 1), 2), s, config)


def test_weights_gammas_inverse(rng):
    s = SiteVector(rng.normal(size=(4, 3)))
    gammas = np.concatenate([[0.0], rng.normal(size=3)])
    np.testing.assert_allclose(gammas_from_weights(s, weights_from_gammas(s, gammas)), gammas, atol=1e-12)


@given(ds=data_sets(min_n=6, max_n=12), data=st.data())
def test_lsa_is_induced_with_positive_margin(ds, data, config):
    s = data.draw(site_vectors(3))
    C = lsa(ds, s, data.draw(shapes(ds.n, 3, min_size=1)).sizes, config)
    pd, eps = max_margin_diagram(ds, C, s, config)
    assert eps >= 0.0
    assert induces(ds, pd, C, config=config)
    # power-distance classification agrees wherever the margin is strictly positive
    if eps > 1e-6:
        np.testing.assert_array_equal(pd.classify(ds.points), C.as_array())


@given(data=st.data())
def test_gamma_and_weight_forms_classify_alike(data):
    s = data.draw(site_vectors(4))
    gammas = np.array(data.draw(st.lists(COORDINATES, min_size=4, max_size=4)))
    pd = PowerDiagram.from_gammas(s, gammas)
    points = data.draw(data_sets(min_n=1, max_n=20)).points
    cells = pd.classify(points)
    np.testing.assert_array_equal(cells, np.argmax(points @ s.sites.T - pd.gammas[None, :], axis=1))
    assert np.all(pd.slacks(points, cells) >= -1e-9)
    np.testing.assert_allclose(weights_from_gammas(s, gammas_from_weights(s, pd.weights)), pd.weights, atol=1e-12)


def test_margin_is_distance_to_nearest_boundary(rng, config):
    ds = DataSet(rng.normal(size=(10, 2)))
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.5], [0.0, -1.5]]))
    C = lsa(ds, s, (4, 3, 3), config)
    pd, eps = max_margin_diagram(ds, C, s, config)
    cells = C.as_array()
    slack = pd.slacks(ds.points, cells)
    norms = np.linalg.norm(s.sites[None, :, :] - s.sites[cells][:, None, :], axis=2)
    norms[np.arange(ds.n), cells] = 1.0
    assert np.min(slack / norms) == pytest.approx(eps, abs=1e-7)


def test_warm_start_reuses_basis(rng, config):
    ds = DataSet(rng.normal(size=(9, 2)))
    s = SiteVector(rng.normal(size=(3, 2)))
    C1 = lsa(ds, s, (3, 3, 3), config)
    C2 = lsa(ds, s, (4, 3, 2), config)
    first, _ = max_margin_diagram(ds, C1, s, config)
    cold, eps_cold = max_margin_diagram(ds, C2, s, config)
    warm, eps_warm = max_margin_diagram(ds, C2, s, config, warm_start_duals(first.lp))
    assert eps_warm == pytest.approx(eps_cold, abs=1e-9)
    assert warm.lp is not None and warm.lp.warm_started
    assert warm_start_duals(None) is None


def test_shared_diagram_puts_moved_item_on_boundary(config):
    # three points on a line; the middle point moves from cluster 0 to cluster 1
    ds = DataSet(np.array([[-2.0, 0.0], [0.0, 0.0], [2.0, 0.0]]))
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    before, after = Clustering((0, 0, 1), 2), Clustering((0, 1, 1), 2)
    pd = shared_diagram(ds, before, after, s, config)
    assert induces(ds, pd, before, config=config)
    assert induces(ds, pd, after, config=config)
    normal, offset = pd.hyperplane(0, 1)
    assert float(normal @ ds.points[1]) == pytest.approx(offset, abs=1e-9)


def test_shared_diagram_impossible(config):
    ds = DataSet(np.array([[-2.0, 0.0], [0.0, 0.0], [2.0, 0.0]]))
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(DiagramInfeasibleError):
        shared_diagram(ds, Clustering((0, 0, 1), 2), Clustering((1, 0, 0), 2), s, config)


def test_from_gammas_normalizes(two_sites):
    pd = PowerDiagram.from_gammas(two_sites, np.array([3.0, 5.0]))
    np.testing.assert_allclose(pd.gammas, [0.0, 2.0])
    assert pd.weights[0] == 0.0
    with pytest.raises(InputValidationError):
        PowerDiagram.from_gammas(two_sites, np.array([1.0, 2.0, 3.0]))


def test_merged_site_diagram_for_coincident_sites(config):
    ds = DataSet(np.array([[-2.0, 0.0], [-1.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]))
    C = Clustering((0, 0, 1, 2), 3)
    assert not s.has_distinct_sites(coincident_site_tol(ds, s, config))
    pd = merged_site_diagram(ds, C, s, config)
    assert pd.margin == 0.0
    assert pd.gammas[1] == pytest.approx(pd.gammas[2])
    assert induces(ds, pd, C, config=config)


def test_merged_site_diagram_single_group(config):
    ds = DataSet(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    s = SiteVector(np.array([[0.5, 0.5], [0.5, 0.5]]))
    pd = merged_site_diagram(ds, Clustering((1, 0), 2), s, config)
    np.testing.assert_allclose(pd.gammas, [0.0, 0.0])
    assert induces(ds, pd, Clustering((1, 0), 2), config=config)
