"""
====================================================
SVG RENDERING (d = 2)
====================================================

RESPONSIBILITY:
Draw one clustering of a transition with a power diagram: points colored
by cluster, sites as crosses, cell boundaries as clipped polygons.

Cells are unbounded, so each cell {x : (s_l - s_i)^T x <= gamma_l - gamma_i}
is obtained by clipping a padded bounding box of the data against the
cell's half-planes (Sutherland-Hodgman).

DETERMINISM:
Agg backend, fixed svg.hashsalt, no date metadata: identical input gives
byte-identical SVG.
====================================================
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from Transit.Core import Clustering, DataSet, InputValidationError  # noqa: E402
from Transit.Power_Diagram import PowerDiagram  # noqa: E402


logger = logging.getLogger(__name__)

BBox = Tuple[float, float, float, float]

CLUSTER_COLORS = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


class UnsupportedDimensionError(InputValidationError):
    """Rendering is only defined for points in the plane."""
    pass


def padded_bbox(points: np.ndarray, sites: Optional[np.ndarray] = None, pad: float = 0.15) -> BBox:
    """(xmin, ymin, xmax, ymax) around points (and sites), padded by a fraction of the extent."""
    cloud = points if sites is None else np.vstack([points, sites])
    lo, hi = cloud.min(axis=0), cloud.max(axis=0)
    margin = pad * float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9)) + 1e-6
    return float(lo[0] - margin), float(lo[1] - margin), float(hi[0] + margin), float(hi[1] + margin)


def clip_halfplane(polygon: List[np.ndarray], normal: np.ndarray, offset: float) -> List[np.ndarray]:
    """Keep the part of a convex polygon with normal^T x <= offset."""
    if not polygon:
        return []
    kept: List[np.ndarray] = []
    start = polygon[-1]
    start_in = float(normal @ start) <= offset
    for end in polygon:
        end_in = float(normal @ end) <= offset
        if end_in != start_in:
            denom = float(normal @ (end - start))
            # denom != 0 because the endpoints lie on different sides
            ratio = (offset - float(normal @ start)) / denom
            kept.append(start + ratio * (end - start))
        if end_in:
            kept.append(end)
        start, start_in = end, end_in
    return kept


def cell_polygons(pd: PowerDiagram, bbox: BBox) -> List[np.ndarray]:
    """Vertices (m x 2, counter-clockwise) of every cell within bbox; empty arrays for empty cells."""
    if pd.sites.d != 2:
        raise UnsupportedDimensionError(f"cells can only be drawn in 2-D, sites have dimension {pd.sites.d}")
    xmin, ymin, xmax, ymax = bbox
    box = [np.array(v, dtype=np.float64) for v in ((xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax))]
    polygons = []
    for i in range(pd.k):
        polygon = list(box)
        for l in range(pd.k):
            if l == i:
                continue
            normal, offset = pd.hyperplane(i, l)
            if not np.any(normal):
                continue
            polygon = clip_halfplane(polygon, normal, offset)
        polygons.append(np.array(polygon, dtype=np.float64).reshape(-1, 2))
    return polygons


def point_in_polygon(point: np.ndarray, polygon: np.ndarray, tol: float = 1e-9) -> bool:
    """Convex polygon membership (boundary counts as inside)."""
    if len(polygon) < 3:
        return False
    edges = np.roll(polygon, -1, axis=0) - polygon
    rel = point[None, :] - polygon
    cross = edges[:, 0] * rel[:, 1] - edges[:, 1] * rel[:, 0]
    scale = tol * (1.0 + float(np.abs(polygon).max()))
    return bool(np.all(cross >= -scale) or np.all(cross <= scale))


def render_svg(
    ds: DataSet,
    C: Clustering,
    pd: PowerDiagram,
    out: Union[str, Path],
    title: Optional[str] = None,
    highlight: Sequence[int] = (),
) -> Path:
    """
    Write an SVG of clustering C with diagram pd.

    Raises:
        UnsupportedDimensionError: d != 2
    """
    if ds.d != 2:
        raise UnsupportedDimensionError(f"render supports d = 2 only, data set has d = {ds.d}")
    C.check_compatible(ds)

    matplotlib.rcParams["svg.hashsalt"] = "transit"
    bbox = padded_bbox(ds.points, pd.sites.sites)
    polygons = cell_polygons(pd, bbox)

    fig, ax = plt.subplots(figsize=(6, 6))
    try:
        for i, polygon in enumerate(polygons):
            if len(polygon) >= 3:
                color = CLUSTER_COLORS[i % len(CLUSTER_COLORS)]
                ax.fill(polygon[:, 0], polygon[:, 1], color=color, alpha=0.08, linewidth=0)
                closed = np.vstack([polygon, polygon[:1]])
                ax.plot(closed[:, 0], closed[:, 1], color="black", linewidth=0.8)

        labels = C.as_array()
        colors = [CLUSTER_COLORS[a % len(CLUSTER_COLORS)] for a in labels]
        ax.scatter(ds.points[:, 0], ds.points[:, 1], c=colors, s=18, edgecolors="black", linewidths=0.3, zorder=3)
        if highlight:
            marked = ds.points[list(highlight)]
            ax.scatter(marked[:, 0], marked[:, 1], s=70, facecolors="none", edgecolors="black", linewidths=1.0, zorder=4)
        ax.scatter(pd.sites.sites[:, 0], pd.sites.sites[:, 1], marker="x", c="black", s=60, zorder=5)

        ax.set_xlim(bbox[0], bbox[2])
        ax.set_ylim(bbox[1], bbox[3])
        ax.set_aspect("equal")
        ax.set_xticks([])
        ax.set_yticks([])
        if title:
            ax.set_title(title, fontsize=11)

        out_path = Path(out)
        fig.savefig(out_path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    finally:
        plt.close(fig)

    logger.debug("rendered %s", out_path)
    return out_path
