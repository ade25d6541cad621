"""
Hypothesis strategies for Transit inputs.

Coordinates come from a coarse grid (multiples of 1/4), so ties,
collinear items, coincident interpolated sites and points at the origin
all show up and shrink to small cases.
"""

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from Transit.Core import (
    Clustering,
    DataSet,
    Shape,
    SiteVector,
    SizeBounds,
    center_dataset,
    objective_from_sites,
)
from Transit.IO_Layer import Instance
from Transit.Transport_LP import optimize

GRID = 8
COORDINATES = st.integers(-GRID, GRID).map(lambda v: v / 4.0)
SITE_COORDINATES = st.integers(-3, 3).map(float)


@st.composite
def data_sets(draw, min_n: int = 2, max_n: int = 8, d: int = 2, centered: bool = False) -> DataSet:
    n = draw(st.integers(min_n, max_n))
    rows = draw(st.lists(
        arrays(np.float64, (d,), elements=COORDINATES),
        min_size=n,
        max_size=n,
        unique_by=lambda row: tuple(row),
    ))
    ds = DataSet(np.array(rows))
    return center_dataset(ds) if centered else ds


@st.composite
def site_vectors(draw, k: int, d: int = 2) -> SiteVector:
    rows = draw(st.lists(
        arrays(np.float64, (d,), elements=SITE_COORDINATES),
        min_size=k,
        max_size=k,
        unique_by=lambda row: tuple(row),
    ))
    return SiteVector(np.array(rows))


@st.composite
def shapes(draw, n: int, k: int, min_size: int = 0) -> Shape:
    """Cluster sizes >= min_size summing to n (requires n >= k * min_size)."""
    cuts = sorted(draw(st.lists(st.integers(0, n - k * min_size), min_size=k - 1, max_size=k - 1)))
    free = [b - a for a, b in zip([0] + cuts, cuts + [n - k * min_size])]
    return Shape(tuple(size + min_size for size in free))


@st.composite
def clusterings(draw, n: int, k: int) -> Clustering:
    return Clustering(tuple(draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))), k)


@st.composite
def bounds_around(draw, shape: Shape) -> SizeBounds:
    """Random size bounds that contain `shape`."""
    lower = tuple(draw(st.integers(0, size)) for size in shape.sizes)
    upper = tuple(size + draw(st.integers(0, shape.n - size)) for size in shape.sizes)
    return SizeBounds(lower, upper)


@st.composite
def bounded_shapes(draw, n: int, k: int) -> SizeBounds:
    """Random size bounds that admit at least one clustering of n items."""
    return draw(bounds_around(draw(shapes(n, k))))


@st.composite
def transition_instances(draw, max_n: int = 10, max_k: int = 3, config=None) -> Instance:
    """Centered grid points, integer sites, endpoints that are LSAs for random shapes."""
    k = draw(st.integers(2, max_k))
    ds = draw(data_sets(min_n=2 * k, max_n=max_n, centered=True))
    s = draw(site_vectors(k))
    t = draw(site_vectors(k))
    endpoints = []
    for sites in (s, t):
        shape = draw(shapes(ds.n, k, min_size=1))
        vertex, _ = optimize(objective_from_sites(ds, sites), SizeBounds.single_shape(shape), config=config)
        endpoints.append(vertex.clustering())
    return Instance(dataset=ds, initial=endpoints[0], target=endpoints[1], s=s, t=t)
