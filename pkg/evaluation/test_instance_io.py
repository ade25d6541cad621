"""Instance and transition files: canonical JSON, 1-based labels, error positions."""

import json

import numpy as np
import pytest

from Transit.Core import Clustering, DataSet, SizeBounds
from Transit.IO_Layer import (
    Instance,
    InstanceFormatError,
    canonical_json,
    instance_from_text,
    instance_to_text,
    parse_instance,
    parse_transition,
    transition_to_text,
    write_instance,
    write_transition,
)
from Transit.Pipeline import full_transition, verify_sequence

from evaluation.conftest import make_instance


def test_canonical_json_keeps_flat_arrays_inline():
    text = canonical_json({"a": [1, 2], "b": [[1.5, 2.0], [3.0, 4.0]], "c": {}})
    assert text.splitlines() == [
        "{",
        '  "a": [1, 2],',
        '  "b": [',
        "    [1.5, 2.0],",
        "    [3.0, 4.0]",
        "  ],",
        '  "c": {}',
        "}",
    ]


def test_canonical_json_rejects_nan():
    with pytest.raises(ValueError):
        canonical_json([float("nan")])


def test_labels_are_one_based():
    text = json.dumps({"points": [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], "clusterings": {"initial": [1, 2, 2]}})
    instance = instance_from_text(text)
    assert instance.initial == Clustering((0, 1, 1), 2)
    assert instance.target is None and instance.s is None
    assert '"initial": [1, 2, 2]' in instance_to_text(instance)


def test_zero_label_rejected():
    text = json.dumps({"points": [[0.0], [1.0]], "clusterings": {"initial": [0, 1]}})
    with pytest.raises(InstanceFormatError, match="1-based"):
        instance_from_text(text)


def test_bounds_and_sites_fix_k():
    text = json.dumps({
        "points": [[0.0, 0.0], [1.0, 0.0]],
        "clusterings": {"initial": [1, 1]},
        "sites": {"initial": [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]},
        "bounds": {"lower": [0, 0, 0], "upper": [2, 2, 2]},
    })
    instance = instance_from_text(text)
    assert instance.initial.k == 3
    assert instance.bounds == SizeBounds((0, 0, 0), (2, 2, 2))


def test_malformed_json_reports_line():
    text = '{\n  "points": [[0.0, 1.0],\n    [2.0, 3.0]\n'
    with pytest.raises(InstanceFormatError, match=r"line \d+"):
        instance_from_text(text, source="bad.json")


def test_schema_error_reports_field_line():
    text = '{\n  "points": [[0.0], [1.0]],\n  "colour": 3\n}\n'
    with pytest.raises(InstanceFormatError, match=r"bad\.json, line 3"):
        instance_from_text(text, source="bad.json")


def test_duplicate_points_rejected():
    with pytest.raises(InstanceFormatError, match="duplicate"):
        instance_from_text(json.dumps({"points": [[1.0, 1.0], [1.0, 1.0]]}))


def test_empty_and_missing_files(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("  \n")
    with pytest.raises(InstanceFormatError, match="empty"):
        parse_instance(empty)
    with pytest.raises(InstanceFormatError, match="does not exist"):
        parse_instance(tmp_path / "missing.json")


def test_require_transition_names_missing_parts():
    instance = Instance(dataset=DataSet(np.array([[0.0], [1.0]])), initial=Clustering((0, 1), 2))
    with pytest.raises(InstanceFormatError, match="clusterings.target"):
        instance.require_transition()


def test_instance_file_round_trip(tmp_path, small_instance):
    path = tmp_path / "instance.json"
    write_instance(small_instance, path)
    back = parse_instance(path)
    np.testing.assert_array_equal(back.dataset.points, small_instance.dataset.points)
    assert back.initial == small_instance.initial
    assert back.target == small_instance.target
    np.testing.assert_array_equal(back.t.sites, small_instance.t.sites)
    assert path.read_text() == instance_to_text(back)


def test_transition_file_reverifies(tmp_path, config):
    instance = make_instance(9, 2, 2, seed=7, config=config)
    C_s, C_t, s, t = instance.require_transition()
    seq = full_transition(instance.dataset, C_s, C_t, s, t, config)
    path = tmp_path / "transition.json"
    write_transition(seq, path)

    back = parse_transition(path)
    assert back.clusterings == seq.clusterings
    assert (back.p, back.m, back.q) == (seq.p, seq.m, seq.q)
    assert [r.label for r in back.diagrams] == [r.label for r in seq.diagrams]
    assert verify_sequence(back.dataset, back, back.config).passed
    assert transition_to_text(back) == path.read_text()


def test_transition_file_without_sites(tmp_path):
    path = tmp_path / "transition.json"
    path.write_text(json.dumps({
        "format": "transit-transition", "version": 1, "config": {}, "points": [[0.0]],
        "sites": {}, "clusterings": {}, "bounds": {"lower": [1], "upper": [1]},
        "legs": {"p": 0, "m": 0, "q": 0}, "lambdas": [], "sequence": [[1]],
        "exchanges": [], "diagrams": [],
    }))
    with pytest.raises(InstanceFormatError, match="site vectors"):
        parse_transition(path)
