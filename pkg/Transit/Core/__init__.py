"""
Core Layer

Immutable domain types and the elementary operations on them.

Types:
- DataSet - n distinct points in R^d
- Clustering / Shape - total assignment and its cluster sizes
- SizeBounds - kappa- / kappa+ per cluster
- SiteVector - k sites in R^d
- ObjectiveMatrix - c(s)[i][j] = x_j^T s_i
- ClusteringVector - w(C), per-cluster point sums

Usage:
    from Transit.Core import DataSet, Clustering, SiteVector, objective_from_sites

    ds = center_dataset(DataSet(points))
    c = objective_from_sites(ds, SiteVector(sites))
    value = c.value(Clustering.from_labels(labels, k=3))
"""

from .core import (
    TransitError,
    InputValidationError,
    PreconditionError,
    InternalInvariantError,
    DataSet,
    Shape,
    Clustering,
    SizeBounds,
    SiteVector,
    ObjectiveMatrix,
    ClusteringVector,
    center_dataset,
    objective_from_sites,
    clustering_vector,
    lsa_cost,
    count_shapes,
    check_instance,
)

__all__ = [
    "TransitError",
    "InputValidationError",
    "PreconditionError",
    "InternalInvariantError",
    "DataSet",
    "Shape",
    "Clustering",
    "SizeBounds",
    "SiteVector",
    "ObjectiveMatrix",
    "ClusteringVector",
    "center_dataset",
    "objective_from_sites",
    "clustering_vector",
    "lsa_cost",
    "count_shapes",
    "check_instance",
]
