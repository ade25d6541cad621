"""Full transition and its verification report."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings

from Transit.Core import (
    Clustering,
    DataSet,
    PreconditionError,
    Shape,
    SiteVector,
    SizeBounds,
    objective_from_sites,
)
from Transit.Pipeline import CHECKS, full_transition, verify_sequence
from Transit.Transport_LP import optimize

from evaluation.conftest import make_instance
from evaluation.strategies import transition_instances


def run(instance, config):
    C_s, C_t, s, t = instance.require_transition()
    seq = full_transition(instance.dataset, C_s, C_t, s, t, config)
    return seq, verify_sequence(instance.dataset, seq, config)


def test_identical_endpoints(line_instance, config):
    inst = line_instance
    seq = full_transition(inst.dataset, inst.initial, inst.initial, inst.s, inst.s, config)
    assert len(seq) == 1
    assert (seq.p, seq.m, seq.q) == (0, 0, 0)
    # one inducing diagram; the duplicate for the target leg is omitted
    assert [record.label for record in seq.diagrams] == ["P^{s,0}"]
    assert verify_sequence(inst.dataset, seq, config).passed


def test_same_shape_endpoints_use_only_cycles(line_instance, config):
    seq, report = run(line_instance, config)
    assert report.passed, report.to_frame()[~report.to_frame()["passed"]]
    assert seq.p == 0 and seq.q == 0
    assert seq.m == len(seq) - 1 >= 1
    assert all(record.exchange.kind == "cycle" for record in seq.exchanges)
    assert list(seq.lambdas) == sorted(seq.lambdas)


@pytest.mark.slow
@settings(max_examples=15)
@given(instance=transition_instances(max_n=10, max_k=3))
def test_random_instances_pass_every_check(instance, config):
    seq, report = run(instance, config)
    assert report.passed, report.failures()[:3]
    assert seq.clusterings[0] == instance.initial
    assert seq.clusterings[-1] == instance.target
    assert set(report.by_check()) <= set(CHECKS)

    # diagram layout: starts at P^{s,0}, ends at P^{t,0}
    assert seq.diagrams[0].label == "P^{s,0}"
    assert seq.diagrams[-1].label == "P^{t,0}"
    assert all(0 <= i < len(seq) for record in seq.diagrams for i in record.induces)


@pytest.mark.parametrize("seed", range(3))
def test_generated_instances_pass_every_check(seed, config):
    instance = make_instance(14, 3, 2, seed=seed, config=config)
    seq, report = run(instance, config)
    assert report.passed, report.failures()[:3]
    assert seq.clusterings[-1] == instance.target


def test_fixed_site_legs_are_sequential(config):
    instance = make_instance(12, 2, 2, seed=3, config=config)
    seq, report = run(instance, config)
    assert report.passed
    for record in seq.exchanges:
        if record.leg in ("s", "t"):
            assert record.exchange.kind == "path"
    sizes = [C.shape.sizes[0] for C in seq.clusterings[: seq.p + 1]]
    assert len(set(sizes)) == len(sizes)


def test_deterministic(config):
    instance = make_instance(10, 3, 2, seed=21, config=config)
    first, _ = run(instance, config)
    second, _ = run(instance, config)
    assert first.clusterings == second.clusterings
    assert first.lambdas == second.lambdas
    for a, b in zip(first.diagrams, second.diagrams):
        assert a.label == b.label
        np.testing.assert_array_equal(a.diagram.gammas, b.diagram.gammas)


def test_rejects_non_lsa_endpoint(line_instance, config):
    inst = line_instance
    not_lsa = Clustering((1, 0, 0, 1, 1, 0), 2)
    with pytest.raises(PreconditionError):
        full_transition(inst.dataset, not_lsa, inst.target, inst.s, inst.t, config)


def test_corrupted_sequence_is_reported(config):
    instance = make_instance(10, 2, 2, seed=5, config=config)
    seq, report = run(instance, config)
    assert report.passed
    if len(seq) < 3:
        pytest.skip("sequence too short to corrupt the middle")

    middle = len(seq) // 2
    swapped = list(seq.clusterings[middle].assignment)
    j = next(j for j in range(len(swapped)) if swapped[j] != swapped[0])
    swapped[0], swapped[j] = swapped[j], swapped[0]
    broken = dataclasses.replace(
        seq,
        clusterings=seq.clusterings[:middle] + (Clustering(tuple(swapped), seq.bounds.k),) + seq.clusterings[middle + 1:],
    )
    bad = verify_sequence(instance.dataset, broken, config)
    assert not bad.passed
    assert any(failure.index in (middle, middle + 1) for failure in bad.failures())

    frame = bad.to_frame()
    assert list(frame.columns) == ["check", "index", "passed", "detail"]
    assert not bad.to_dict()["passed"]


def tie_face_instance():
    # s = t and the endpoints differ only in the item at the origin
    ds = DataSet(np.array([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]))
    s = SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0]]))
    return ds, Clustering((0, 0, 1), 2), Clustering((0, 1, 1), 2), s


def test_tie_face_move_keeps_vector_at_one(config):
    ds, C_s, C_t, s = tie_face_instance()
    seq = full_transition(ds, C_s, C_t, s, s, config)
    assert (seq.p, seq.m, seq.q) == (0, 1, 0)
    assert seq.lambdas == (1.0,)
    report = verify_sequence(ds, seq, config)
    assert report.passed, report.failures()
    frame = report.to_frame()
    assert "tie-face move, w unchanged" in set(frame[frame["check"] == "distinct_vectors"]["detail"])


def test_zero_gain_move_at_lam_zero_is_reported(config):
    ds, C_s, C_t, s = tie_face_instance()
    seq = full_transition(ds, C_s, C_t, s, s, config)
    moved = dataclasses.replace(seq, lambdas=(0.0,))
    report = verify_sequence(ds, moved, config)
    assert not report.by_check()["lambda_monotone"]
    assert not report.by_check()["distinct_vectors"]


def test_sites_meeting_mid_walk_on_integer_grid(config):
    # interpolated sites coincide at lam = 1/3, where every clustering of the
    # centered grid ties
    ds = DataSet(np.array([[x, y] for x in range(-2, 3) for y in range(-1, 2)], dtype=np.float64))
    s = SiteVector(np.array([[-2.0, 0.0], [-1.0, 0.0]]))
    t = SiteVector(np.array([[2.0, 2.0], [0.0, 2.0]]))
    C_s, _ = optimize(objective_from_sites(ds, s), SizeBounds.single_shape(Shape((7, 8))), config=config)
    C_t, _ = optimize(objective_from_sites(ds, t), SizeBounds.single_shape(Shape((9, 6))), config=config)

    seq = full_transition(ds, C_s.clustering(), C_t.clustering(), s, t, config)
    report = verify_sequence(ds, seq, config)
    assert report.passed, report.failures()[:3]
    assert seq.clusterings[-1] == C_t.clustering()
