"""Clustering difference graphs, decomposition and exchanges."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from Transit.CDG import (
    Arc,
    DecompositionError,
    Exchange,
    apply_exchange,
    build_cdg,
    decompose,
    is_single_exchange,
    single_exchange,
)
from Transit.Core import Clustering, InputValidationError

from evaluation.strategies import clusterings


def test_build_cdg_arcs_ordered_by_item():
    g = build_cdg(Clustering((0, 1, 2, 0), 3), Clustering((1, 1, 0, 2), 3))
    assert g.arcs == (Arc(0, 1, 0), Arc(2, 0, 2), Arc(0, 2, 3))
    assert g.nodes == (0, 1, 2)


def test_identical_clusterings_give_empty_graph():
    C = Clustering((0, 1, 1), 2)
    assert build_cdg(C, C).is_empty()
    assert not is_single_exchange(C, C)


def test_three_cycle():
    C, C2 = Clustering((0, 1, 2), 3), Clustering((1, 2, 0), 3)
    e = single_exchange(C, C2)
    assert e.kind == "cycle"
    assert len(e) == 3
    assert apply_exchange(C, e) == C2


def test_sequential_path():
    C, C2 = Clustering((0, 0, 1), 3), Clustering((0, 1, 2), 3)
    e = single_exchange(C, C2)
    assert e.kind == "path"
    assert e.arcs == (Arc(0, 1, 1), Arc(1, 2, 2))
    assert apply_exchange(C, e).shape.sizes == (1, 1, 1)


def test_two_disjoint_cycles_are_not_one_exchange():
    C, C2 = Clustering((0, 1, 2, 3), 4), Clustering((1, 0, 3, 2), 4)
    assert not is_single_exchange(C, C2)
    with pytest.raises(InputValidationError):
        single_exchange(C, C2)
    path, cycles = decompose(build_cdg(C, C2))
    assert path is None
    assert [len(cycle) for cycle in cycles] == [2, 2]


def test_decompose_path_plus_cycle():
    C, C2 = Clustering((0, 1, 0), 3), Clustering((2, 0, 1), 3)
    path, cycles = decompose(build_cdg(C, C2))
    assert path is not None and path.arcs == (Arc(0, 2, 0),)
    assert len(cycles) == 1 and cycles[0].kind == "cycle"
    assert sorted(cycles[0].items) == [1, 2]

    # applying every piece reproduces the second clustering
    result = apply_exchange(C, path)
    for cycle in cycles:
        result = apply_exchange(result, cycle)
    assert result == C2


def test_decompose_rejects_double_imbalance():
    with pytest.raises(DecompositionError):
        decompose(build_cdg(Clustering((0, 0), 2), Clustering((1, 1), 2)))


def test_apply_exchange_wrong_source():
    e = Exchange("path", (Arc(1, 0, 0),))
    with pytest.raises(InputValidationError):
        apply_exchange(Clustering((0, 1), 2), e)


@pytest.mark.parametrize(
    "kind, arcs",
    [
        ("path", (Arc(0, 1, 0), Arc(2, 0, 1))),   # does not chain
        ("cycle", (Arc(0, 1, 0), Arc(1, 2, 1))),  # does not close
        ("path", (Arc(0, 1, 0), Arc(1, 0, 1))),   # closes
        ("cycle", (Arc(0, 1, 0), Arc(1, 0, 0))),  # repeats an item
    ],
)
def test_exchange_validation(kind, arcs):
    with pytest.raises(InputValidationError):
        Exchange(kind, arcs)


@st.composite
def clustering_pairs(draw, shift_one: bool):
    """Pairs with equal shapes, or shapes one unit apart when `shift_one`."""
    k = draw(st.integers(2, 4))
    n = draw(st.integers(2, 12))
    C = draw(clusterings(n, k))
    C2 = list(draw(st.permutations(C.assignment)))
    if shift_one:
        j = draw(st.integers(0, n - 1))
        C2[j] = draw(st.integers(0, k - 1).filter(lambda label: label != C2[j]))
    return C, Clustering(tuple(C2), k)


@pytest.mark.parametrize("shift_one", [False, True])
@given(data=st.data())
def test_decompose_covers_every_arc_and_round_trips(shift_one, data):
    C, C2 = data.draw(clustering_pairs(shift_one))
    g = build_cdg(C, C2)
    imbalance = g.imbalance()
    for node, value in imbalance.items():
        assert value == C.shape.sizes[node] - C2.shape.sizes[node]
    assert sorted(imbalance.values()).count(0) >= len(g.nodes) - 2

    path, cycles = decompose(g)
    assert (path is not None) == (not g.is_empty() and any(imbalance.values()))
    walks = ([path] if path else []) + cycles
    assert sorted(arc for walk in walks for arc in walk.arcs) == sorted(g.arcs)
    for cycle in cycles:
        assert len({arc.source for arc in cycle.arcs}) == len(cycle)

    current = C
    for walk in walks:
        current = apply_exchange(current, walk)
    assert current == C2
