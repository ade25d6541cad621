"""Core types: validation, shapes, bounds and objectives."""

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
    center_dataset,
    check_instance,
    clustering_vector,
    count_shapes,
    lsa_cost,
    objective_from_sites,
)

from evaluation.strategies import COORDINATES, clusterings, data_sets, site_vectors


class TestDataSet:
    def test_rejects_duplicate_points(self):
        with pytest.raises(InputValidationError, match="duplicate"):
            DataSet(np.array([[0.0, 1.0], [2.0, 3.0], [0.0, 1.0]]))

    def test_rejects_non_finite(self):
        with pytest.raises(InputValidationError):
            DataSet(np.array([[0.0, np.nan], [1.0, 1.0]]))

    def test_rejects_wrong_rank(self):
        with pytest.raises(InputValidationError):
            DataSet(np.array([1.0, 2.0, 3.0]))

    def test_points_are_read_only(self):
        ds = DataSet(np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            ds.points[0, 0] = 5.0

    def test_center_dataset_sums_to_zero(self, rng):
        ds = center_dataset(DataSet(rng.normal(size=(7, 3)) + 4.0))
        np.testing.assert_allclose(ds.points.sum(axis=0), np.zeros(3), atol=1e-12)


class TestClustering:
    def test_shape_members_indicator(self):
        C = Clustering((0, 2, 2, 1, 0), 3)
        assert C.shape == Shape((2, 1, 2))
        assert C.members(2) == [1, 2]
        y = C.indicator()
        assert y.shape == (3, 5)
        np.testing.assert_array_equal(y.sum(axis=0), np.ones(5))
        np.testing.assert_array_equal(y.sum(axis=1), [2, 1, 2])

    def test_empty_cluster_allowed(self):
        assert Clustering((0, 0), 3).shape.sizes == (2, 0, 0)

    def test_label_out_of_range(self):
        with pytest.raises(InputValidationError):
            Clustering((0, 3), 3)

    def test_equality_is_by_assignment(self):
        assert Clustering((0, 1), 2) == Clustering.from_labels(np.array([0, 1]), 2)
        assert Clustering((0, 1), 2) != Clustering((1, 0), 2)


class TestSizeBounds:
    def test_from_endpoints(self):
        bounds = SizeBounds.from_endpoints(Clustering((0, 0, 1), 2), Clustering((0, 1, 1), 2))
        assert bounds.lower == (1, 1)
        assert bounds.upper == (2, 2)
        assert bounds.contains(Shape((2, 1)))
        assert not bounds.contains(Shape((3, 0)))

    def test_lower_above_upper(self):
        with pytest.raises(InputValidationError):
            SizeBounds((2, 0), (1, 3))

    def test_infeasible_for_n(self):
        bounds = SizeBounds((3, 3), (3, 3))
        assert not bounds.is_feasible_for(5)
        with pytest.raises(InputValidationError):
            bounds.check_feasible(5)

    @pytest.mark.parametrize(
        "lower, upper, n, expected",
        [
            ((1, 1), (2, 2), 3, 2),
            ((0, 0), (5, 5), 5, 6),
            ((2, 2), (2, 2), 4, 1),
            ((0, 0, 0), (4, 4, 4), 4, 15),
            ((3, 3), (3, 3), 5, 0),
        ],
    )
    def test_count_shapes(self, lower, upper, n, expected):
        assert count_shapes(SizeBounds(lower, upper), n) == expected

    @pytest.mark.parametrize("upper", [(5, 5), (9, 9), (5, 100)])
    def test_upper_above_n_counts_like_clamped(self, upper):
        bounds = SizeBounds((0, 0), upper)
        assert bounds.clamped(5) == SizeBounds((0, 0), (5, 5))
        assert count_shapes(bounds, 5) == count_shapes(bounds.clamped(5), 5) == 6

    def test_clamped_rejects_lower_above_n(self):
        with pytest.raises(InputValidationError, match="lower bound"):
            SizeBounds((4, 0), (6, 6)).clamped(3)


class TestObjective:
    def test_objective_entries(self):
        ds = DataSet(np.array([[1.0, 2.0], [3.0, -1.0]]))
        s = SiteVector(np.array([[1.0, 0.0], [0.0, 1.0]]))
        c = objective_from_sites(ds, s)
        np.testing.assert_allclose(c.c, [[1.0, 3.0], [2.0, -1.0]])
        assert c.value(Clustering((0, 1), 2)) == pytest.approx(0.0)
        assert c.value(Clustering((1, 0), 2)) == pytest.approx(5.0)

    def test_same_shape_cost_difference_is_objective_difference(self, rng):
        # within one shape, sum of squared distances = const - 2 * c(s)^T y
        ds = DataSet(rng.normal(size=(6, 2)))
        s = SiteVector(rng.normal(size=(3, 2)))
        c = objective_from_sites(ds, s)
        A = Clustering((0, 0, 1, 1, 2, 2), 3)
        B = Clustering((2, 1, 0, 1, 0, 2), 3)
        assert A.shape == B.shape
        assert lsa_cost(ds, A, s) - lsa_cost(ds, B, s) == pytest.approx(-2.0 * (c.value(A) - c.value(B)))

    def test_dimension_mismatch(self):
        ds = DataSet(np.array([[0.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(InputValidationError):
            objective_from_sites(ds, SiteVector(np.zeros((2, 3))))

    def test_clustering_vector(self):
        ds = DataSet(np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]]))
        w = clustering_vector(ds, Clustering((1, 1, 0), 3)).w
        np.testing.assert_allclose(w, [[2.0, 2.0], [1.0, 1.0], [0.0, 0.0]])

    def test_interpolate(self):
        s = SiteVector(np.array([[0.0, 0.0], [2.0, 2.0]]))
        t = SiteVector(np.array([[4.0, 0.0], [2.0, -2.0]]))
        np.testing.assert_allclose(s.interpolate(t, 0.25).sites, [[1.0, 0.0], [2.0, 1.0]])

    @given(ds=data_sets(min_n=2, max_n=8), data=st.data())
    def test_objective_is_linear_in_sites(self, ds, data):
        s, t = data.draw(site_vectors(3)), data.draw(site_vectors(3))
        alpha, beta = data.draw(COORDINATES), data.draw(COORDINATES)
        combined = SiteVector(alpha * s.sites + beta * t.sites)
        expected = objective_from_sites(ds, s).scaled(alpha) + objective_from_sites(ds, t).scaled(beta)
        np.testing.assert_allclose(objective_from_sites(ds, combined).c, expected.c, atol=1e-9)

    @given(ds=data_sets(min_n=2, max_n=8), data=st.data())
    def test_lsa_cost_expands_into_objective(self, ds, data):
        s = data.draw(site_vectors(3))
        C = data.draw(clusterings(ds.n, 3))
        sizes = C.shape.as_array()
        expected = (
            float((ds.points ** 2).sum())
            + float((sizes * (s.sites ** 2).sum(axis=1)).sum())
            - 2.0 * objective_from_sites(ds, s).value(C)
        )
        assert lsa_cost(ds, C, s) == pytest.approx(expected, abs=1e-9)

    @given(ds=data_sets(min_n=2, max_n=8), data=st.data())
    def test_relabeling_permutes_clustering_vector(self, ds, data):
        s = data.draw(site_vectors(3))
        C = data.draw(clusterings(ds.n, 3))
        perm = np.array(data.draw(st.permutations(range(3))))
        relabeled = Clustering(tuple(int(perm[label]) for label in C.assignment), 3)
        w, w_relabeled = clustering_vector(ds, C).w, clustering_vector(ds, relabeled).w
        np.testing.assert_allclose(w_relabeled[perm], w, atol=1e-12)
        moved_sites = np.empty_like(s.sites)
        moved_sites[perm] = s.sites
        c, c_relabeled = objective_from_sites(ds, s), objective_from_sites(ds, SiteVector(moved_sites))
        assert c_relabeled.value(relabeled) == pytest.approx(c.value(C), abs=1e-9)

    def test_objective_depends_on_clustering_vector_only(self):
        ds = DataSet(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0], [0.0, -2.0]]))
        s = SiteVector(np.array([[1.0, 1.0], [-2.0, 0.5]]))
        A, B = Clustering((0, 0, 1, 1), 2), Clustering((1, 1, 0, 0), 2)
        np.testing.assert_allclose(clustering_vector(ds, A).w, clustering_vector(ds, B).w)
        assert objective_from_sites(ds, s).value(A) == pytest.approx(objective_from_sites(ds, s).value(B))

    def test_site_groups_within_tolerance(self):
        s = SiteVector(np.array([[0.0, 0.0], [1.0, 0.0], [1e-9, 0.0], [1.0, 1e-9]]))
        assert s.site_groups(1e-6) == [(0, 2), (1, 3)]
        assert not s.has_distinct_sites(1e-6)
        assert s.has_distinct_sites()


def test_check_instance_inconsistent_k():
    ds = DataSet(np.array([[0.0], [1.0]]))
    with pytest.raises(InputValidationError, match="inconsistent"):
        check_instance(ds, [Clustering((0, 1), 2)], [SiteVector(np.zeros((3, 1)))])
