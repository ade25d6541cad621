"""
====================================================
CORE LAYER
====================================================

RESPONSIBILITY:
Domain data model shared by every other layer: the point set, clusterings
and their shapes, cluster size bounds, site vectors, the linear objective
c(s) and clustering vectors.

NO optimization.
NO file formats.

INPUT:
- Raw coordinates, assignments and sites (0-based cluster indices)

OUTPUT:
- Immutable value objects backed by read-only numpy arrays

CONVENTIONS:
- Cluster indices are 0-based here; files use 1-based indices and convert
  at the I/O boundary.
- ObjectiveMatrix entries are c[i][j] = x_j^T s_i, so minimizing the
  least-squares cost over a fixed shape is maximizing sum c[i][j] y[i][j].
====================================================
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np


logger = logging.getLogger(__name__)


# ====================================================
# ERRORS
# ====================================================

class TransitError(Exception):
    """Base exception for the transition library."""
    pass


class InputValidationError(TransitError):
    """Malformed input: dimension mismatch, duplicate points, invalid assignment."""
    pass


class PreconditionError(TransitError):
    """Input violates an algorithmic precondition (e.g. clustering is not an LSA)."""
    pass


class InternalInvariantError(TransitError):
    """A guaranteed property failed at runtime."""
    pass


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


# ====================================================
# DATA STRUCTURES
# ====================================================

@dataclass(frozen=True, eq=False)
class DataSet:
    """n distinct points in R^d."""

    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        if points.ndim != 2:
            raise InputValidationError(f"points must be an (n, d) array, got shape {points.shape}")
        n, d = points.shape
        if n == 0 or d == 0:
            raise InputValidationError("data set must contain at least one point of dimension >= 1")
        if not np.all(np.isfinite(points)):
            raise InputValidationError("points contain NaN or infinite coordinates")

        # Exact comparison; duplicates are rejected, never perturbed
        unique_rows = np.unique(points, axis=0)
        if unique_rows.shape[0] != n:
            raise InputValidationError(f"data set contains {n - unique_rows.shape[0]} duplicate point(s)")

        if n > 1 and np.linalg.matrix_rank(points - points.mean(axis=0)) < d:
            logger.warning("data matrix is rank deficient (affine rank < %d); continuing without projection", d)

        object.__setattr__(self, "points", _frozen(points))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class Shape:
    """Vector of cluster sizes."""

    sizes: Tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def as_array(self) -> np.ndarray:
        return np.array(self.sizes, dtype=np.int64)

    def differing_clusters(self, other: "Shape") -> List[int]:
        return [i for i, (a, b) in enumerate(zip(self.sizes, other.sizes)) if a != b]


@dataclass(frozen=True)
class Clustering:
    """Total assignment of n items to k clusters (0-based cluster labels)."""

    assignment: Tuple[int, ...]
    k: int

    def __post_init__(self):
        assignment = tuple(int(a) for a in self.assignment)
        if self.k < 1:
            raise InputValidationError(f"cluster count must be >= 1, got {self.k}")
        if len(assignment) == 0:
            raise InputValidationError("clustering must assign at least one item")
        bad = [j for j, a in enumerate(assignment) if not 0 <= a < self.k]
        if bad:
            raise InputValidationError(f"items {bad[:5]} assigned outside clusters 0..{self.k - 1}")
        object.__setattr__(self, "assignment", assignment)

    @classmethod
    def from_labels(cls, labels: Iterable[int], k: int) -> "Clustering":
        return cls(tuple(int(a) for a in labels), k)

    @property
    def n(self) -> int:
        return len(self.assignment)

    @cached_property
    def shape(self) -> Shape:
        sizes = [0] * self.k
        for a in self.assignment:
            sizes[a] += 1
        return Shape(tuple(sizes))

    def members(self, i: int) -> List[int]:
        return [j for j, a in enumerate(self.assignment) if a == i]

    def as_array(self) -> np.ndarray:
        return np.array(self.assignment, dtype=np.int64)

    def indicator(self) -> np.ndarray:
        """The 0/1 k x n matrix y with y[i][j] = 1 iff item j is in cluster i."""
        y = np.zeros((self.k, self.n), dtype=np.int64)
        y[self.as_array(), np.arange(self.n)] = 1
        return y

    def check_compatible(self, ds: DataSet) -> None:
        if self.n != ds.n:
            raise InputValidationError(f"clustering has {self.n} items but the data set has {ds.n}")


@dataclass(frozen=True)
class SizeBounds:
    """Lower and upper bounds on every cluster size."""

    lower: Tuple[int, ...]
    upper: Tuple[int, ...]

    def __post_init__(self):
        lower = tuple(int(v) for v in self.lower)
        upper = tuple(int(v) for v in self.upper)
        if len(lower) != len(upper) or len(lower) == 0:
            raise InputValidationError("lower and upper bounds need the same positive length")
        for i, (lo, up) in enumerate(zip(lower, upper)):
            if lo < 0 or lo > up:
                raise InputValidationError(f"cluster {i}: bounds must satisfy 0 <= lower <= upper, got [{lo}, {up}]")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def k(self) -> int:
        return len(self.lower)

    @classmethod
    def single_shape(cls, shape: Shape) -> "SizeBounds":
        return cls(shape.sizes, shape.sizes)

    @classmethod
    def all_shapes(cls, n: int, k: int) -> "SizeBounds":
        return cls((0,) * k, (n,) * k)

    @classmethod
    def from_endpoints(cls, first: Clustering, second: Clustering) -> "SizeBounds":
        """kappa-_i = min(|C_i|, |C'_i|), kappa+_i = max(|C_i|, |C'_i|)."""
        if first.k != second.k or first.n != second.n:
            raise InputValidationError("endpoint clusterings must share n and k")
        a, b = first.shape.sizes, second.shape.sizes
        return cls(tuple(min(x, y) for x, y in zip(a, b)), tuple(max(x, y) for x, y in zip(a, b)))

    def clamped(self, n: int) -> "SizeBounds":
        """Same feasible shapes for n items, with every upper bound at most n."""
        if any(lo > n for lo in self.lower):
            raise InputValidationError(f"a lower bound exceeds the number of items ({n}): {self.lower}")
        return SizeBounds(self.lower, tuple(min(up, n) for up in self.upper))

    def is_feasible_for(self, n: int) -> bool:
        return sum(self.lower) <= n <= sum(min(up, n) for up in self.upper)

    def check_feasible(self, n: int) -> None:
        if not self.is_feasible_for(n):
            raise InputValidationError(
                f"size bounds admit no clustering of {n} items: "
                f"sum(lower)={sum(self.lower)}, sum(upper)={sum(self.upper)}"
            )

    def contains(self, shape: Shape) -> bool:
        return shape.k == self.k and all(
            lo <= size <= up for lo, size, up in zip(self.lower, shape.sizes, self.upper)
        )


def count_shapes(bounds: SizeBounds, n: int) -> int:
    """Number of integer shapes within bounds that sum to n."""
    ways = [1] + [0] * n
    for lo, up in zip(bounds.lower, bounds.upper):
        nxt = [0] * (n + 1)
        for total, count in enumerate(ways):
            if count:
                for size in range(lo, min(up, n - total) + 1):
                    nxt[total + size] += count
        ways = nxt
    return ways[n]


@dataclass(frozen=True, eq=False)
class SiteVector:
    """k sites in R^d (the vector s in R^{d*k}, stored as a k x d array)."""

    sites: np.ndarray

    def __post_init__(self):
        sites = np.array(self.sites, dtype=np.float64)
        if sites.ndim != 2 or sites.shape[0] == 0:
            raise InputValidationError(f"sites must be a (k, d) array, got shape {sites.shape}")
        if not np.all(np.isfinite(sites)):
            raise InputValidationError("sites contain NaN or infinite coordinates")
        object.__setattr__(self, "sites", _frozen(sites))

    @property
    def k(self) -> int:
        return int(self.sites.shape[0])

    @property
    def d(self) -> int:
        return int(self.sites.shape[1])

    def interpolate(self, other: "SiteVector", lam: float) -> "SiteVector":
        """s^lam = (1 - lam) s + lam t."""
        return SiteVector((1.0 - lam) * self.sites + lam * other.sites)

    def has_distinct_sites(self, tol: float = 0.0) -> bool:
        if tol <= 0.0:
            return np.unique(self.sites, axis=0).shape[0] == self.k
        return len(self.site_groups(tol)) == self.k

    def site_groups(self, tol: float) -> List[Tuple[int, ...]]:
        """
        Site indices joined by chains of pairwise distance <= tol, each
        group sorted and the groups ordered by their first index.
        """
        dist = np.linalg.norm(self.sites[:, None, :] - self.sites[None, :, :], axis=2)
        root = list(range(self.k))

        def find(i: int) -> int:
            while root[i] != i:
                root[i] = root[root[i]]
                i = root[i]
            return i

        for i, l in zip(*np.nonzero(np.triu(dist <= tol, 1))):
            a, b = find(int(i)), find(int(l))
            if a != b:
                root[max(a, b)] = min(a, b)

        groups: Dict[int, List[int]] = {}
        for i in range(self.k):
            groups.setdefault(find(i), []).append(i)
        return [tuple(members) for _, members in sorted(groups.items())]

    def check_compatible(self, ds: DataSet) -> None:
        if self.d != ds.d:
            raise InputValidationError(f"sites have dimension {self.d} but points have dimension {ds.d}")


@dataclass(frozen=True, eq=False)
class ObjectiveMatrix:
    """c[i][j] = x_j^T s_i, a k x n matrix."""

    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", _frozen(np.array(self.c, dtype=np.float64)))

    @property
    def k(self) -> int:
        return int(self.c.shape[0])

    @property
    def n(self) -> int:
        return int(self.c.shape[1])

    def __add__(self, other: "ObjectiveMatrix") -> "ObjectiveMatrix":
        return ObjectiveMatrix(self.c + other.c)

    def __sub__(self, other: "ObjectiveMatrix") -> "ObjectiveMatrix":
        return ObjectiveMatrix(self.c - other.c)

    def scaled(self, factor: float) -> "ObjectiveMatrix":
        return ObjectiveMatrix(factor * self.c)

    def value(self, clustering: Clustering) -> float:
        """c^T y(C)."""
        return float(self.c[clustering.as_array(), np.arange(self.n)].sum())

    def scale(self) -> float:
        """Magnitude used for relative tolerances."""
        return float(np.abs(self.c).sum()) + 1.0


@dataclass(frozen=True, eq=False)
class ClusteringVector:
    """w(C): w_i is the sum of the points in cluster i (k x d)."""

    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(np.array(self.w, dtype=np.float64)))


# ====================================================
# OPERATIONS
# ====================================================

def center_dataset(ds: DataSet) -> DataSet:
    """Shift the points so that they sum to zero; ordering is preserved."""
    return DataSet(ds.points - ds.points.mean(axis=0))


def objective_from_sites(ds: DataSet, s: SiteVector) -> ObjectiveMatrix:
    """c(s) with c[i][j] = x_j^T s_i."""
    s.check_compatible(ds)
    return ObjectiveMatrix(s.sites @ ds.points.T)


def clustering_vector(ds: DataSet, C: Clustering) -> ClusteringVector:
    """w_i = sum of the points assigned to cluster i; empty clusters give 0."""
    C.check_compatible(ds)
    w = np.zeros((C.k, ds.d), dtype=np.float64)
    np.add.at(w, C.as_array(), ds.points)
    return ClusteringVector(w)


def lsa_cost(ds: DataSet, C: Clustering, s: SiteVector) -> float:
    """Sum over clusters of squared distances to the cluster's site."""
    C.check_compatible(ds)
    s.check_compatible(ds)
    if s.k != C.k:
        raise InputValidationError(f"clustering has {C.k} clusters but {s.k} sites were given")
    diff = ds.points - s.sites[C.as_array()]
    return float(np.einsum("ij,ij->", diff, diff))


def check_instance(ds: DataSet, clusterings: Sequence[Clustering], sites: Sequence[SiteVector]) -> int:
    """Validate that clusterings and sites agree with the data set; returns k."""
    ks = {C.k for C in clusterings} | {s.k for s in sites}
    if len(ks) > 1:
        raise InputValidationError(f"inconsistent cluster counts: {sorted(ks)}")
    for C in clusterings:
        C.check_compatible(ds)
    for s in sites:
        s.check_compatible(ds)
    return ks.pop() if ks else 1
