"""
====================================================
INSTANCE & TRANSITION FILES
====================================================

RESPONSIBILITY:
Read and write the two canonical JSON formats, and generate random
instances.

InstanceFile ("transit-instance", version 1):
    points        list of n coordinate lists
    clusterings   {"initial": [...], "target": [...]}   1-based cluster labels
    sites         {"initial": [[...]], "target": [[...]]}
    bounds        {"lower": [...], "upper": [...]}       optional

TransitionFile ("transit-transition", version 1):
    config header, points, endpoint sites / clusterings, bounds, leg sizes,
    breakpoints, the clustering sequence, exchange records (1-based clusters,
    0-based items) and diagram records (sites, gamma, w, margin; null margin
    means +inf).

CANONICAL FORM:
- fixed key order, two-space indentation, numeric arrays on one line
- floats in shortest round-trip decimal form (Python repr)
- no timestamps, so identical runs give byte-identical files
====================================================
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from Transit.CDG import Arc, Exchange
from Transit.Config import TransitConfig, get_default_config
from Transit.Core import (
    Clustering,
    DataSet,
    InputValidationError,
    Shape,
    SiteVector,
    SizeBounds,
    TransitError,
    center_dataset,
    check_instance,
    objective_from_sites,
)
from Transit.Pipeline import DiagramRecord, ExchangeRecord, TransitionSequence
from Transit.Power_Diagram import PowerDiagram
from Transit.Transport_LP import optimize


logger = logging.getLogger(__name__)

INSTANCE_FORMAT = "transit-instance"
TRANSITION_FORMAT = "transit-transition"

PathLike = Union[str, Path]


class InstanceFormatError(InputValidationError):
    """File is not valid JSON or does not match its schema."""
    pass


# ====================================================
# SCHEMAS
# ====================================================

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EndpointClusterings(_Strict):
    initial: Optional[List[int]] = None
    target: Optional[List[int]] = None


class EndpointSites(_Strict):
    initial: Optional[List[List[float]]] = None
    target: Optional[List[List[float]]] = None


class BoundsModel(_Strict):
    lower: List[int]
    upper: List[int]


class InstanceModel(_Strict):
    format: Literal["transit-instance"] = INSTANCE_FORMAT
    version: Literal[1] = 1
    points: List[List[float]] = Field(min_length=1)
    clusterings: EndpointClusterings = Field(default_factory=EndpointClusterings)
    sites: EndpointSites = Field(default_factory=EndpointSites)
    bounds: Optional[BoundsModel] = None


class LegsModel(_Strict):
    p: int = Field(ge=0)
    m: int = Field(ge=0)
    q: int = Field(ge=0)


class ExchangeModel(_Strict):
    index: int = Field(ge=1)
    leg: Literal["s", "lambda", "t"]
    kind: Literal["path", "cycle"]
    arcs: List[Tuple[int, int, int]]
    lam: Optional[float] = None


class DiagramModel(_Strict):
    kind: Literal["inducing", "shared"]
    label: str
    induces: List[int]
    sites: List[List[float]]
    gammas: List[float]
    weights: List[float]
    margin: Optional[float] = None


class TransitionModel(_Strict):
    format: Literal["transit-transition"] = TRANSITION_FORMAT
    version: Literal[1] = 1
    config: Dict[str, Any]
    points: List[List[float]]
    sites: EndpointSites
    clusterings: EndpointClusterings
    bounds: BoundsModel
    legs: LegsModel
    lambdas: List[float]
    sequence: List[List[int]]
    exchanges: List[ExchangeModel]
    diagrams: List[DiagramModel]


# ====================================================
# DOMAIN VIEW
# ====================================================

@dataclass(frozen=True, eq=False)
class Instance:
    """Parsed instance; endpoint clusterings and sites are optional."""

    dataset: DataSet
    initial: Optional[Clustering] = None
    target: Optional[Clustering] = None
    s: Optional[SiteVector] = None
    t: Optional[SiteVector] = None
    bounds: Optional[SizeBounds] = None

    @property
    def k(self) -> int:
        for item in (self.s, self.t, self.initial, self.target, self.bounds):
            if item is not None:
                return item.k
        raise InstanceFormatError("instance has no sites, clusterings or bounds; k is unknown")

    def require_transition(self) -> Tuple[Clustering, Clustering, SiteVector, SiteVector]:
        missing = [name for name, value in (
            ("clusterings.initial", self.initial), ("clusterings.target", self.target),
            ("sites.initial", self.s), ("sites.target", self.t),
        ) if value is None]
        if missing:
            raise InstanceFormatError(f"instance lacks {', '.join(missing)}")
        assert self.initial and self.target and self.s and self.t
        return self.initial, self.target, self.s, self.t

    def sites(self, which: str) -> SiteVector:
        sites = self.s if which == "initial" else self.t
        if sites is None:
            raise InstanceFormatError(f"instance lacks sites.{which}")
        return sites


# ====================================================
# CANONICAL JSON
# ====================================================

def _number(value: float) -> Optional[float]:
    value = float(value)
    return value if math.isfinite(value) else None


def _is_flat(value: Any) -> bool:
    return isinstance(value, list) and all(not isinstance(v, (list, dict)) for v in value)


def canonical_json(value: Any, indent: int = 0) -> str:
    """Indented JSON with flat arrays kept on one line."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(key)}: {canonical_json(item, indent + 1)}" for key, item in value.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(value, list):
        if _is_flat(value):
            return json.dumps(value, allow_nan=False)
        body = ",\n".join(f"{inner}{canonical_json(item, indent + 1)}" for item in value)
        return "[\n" + body + "\n" + pad + "]"
    return json.dumps(value, allow_nan=False)


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"{source}, line {e.lineno}, column {e.colno}: {e.msg}") from e


def _line_of(text: str, key: Any) -> Optional[int]:
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def _schema_error(e: ValidationError, text: str, source: str) -> InstanceFormatError:
    first = e.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    line = _line_of(text, first["loc"][0]) if first["loc"] else None
    where = f"{source}, line {line}" if line else source
    return InstanceFormatError(f"{where}: {location}: {first['msg']}")


def _read(path: PathLike) -> Tuple[str, str]:
    file_path = Path(path)
    if not file_path.is_file():
        raise InstanceFormatError(f"File does not exist: {path}")
    text = file_path.read_text()
    if not text.strip():
        raise InstanceFormatError(f"{path}, line 1: file is empty")
    return text, str(path)


def _labels_to_clustering(labels: Optional[List[int]], k: Optional[int]) -> Optional[Clustering]:
    if labels is None:
        return None
    k = k if k is not None else max(labels)
    if any(label < 1 for label in labels):
        raise InstanceFormatError("cluster labels in files are 1-based")
    return Clustering(tuple(label - 1 for label in labels), k)


def _clustering_to_labels(C: Clustering) -> List[int]:
    return [a + 1 for a in C.assignment]


def _sites_list(s: SiteVector) -> List[List[float]]:
    return [[float(v) for v in row] for row in s.sites]


# ====================================================
# INSTANCE FILES
# ====================================================

def instance_from_text(text: str, source: str = "<instance>") -> Instance:
    raw = _load_json(text, source)
    try:
        model = InstanceModel.model_validate(raw)
    except ValidationError as e:
        raise _schema_error(e, text, source) from e

    try:
        ds = DataSet(np.array(model.points, dtype=np.float64))
        s = SiteVector(np.array(model.sites.initial)) if model.sites.initial is not None else None
        t = SiteVector(np.array(model.sites.target)) if model.sites.target is not None else None
        bounds = SizeBounds(tuple(model.bounds.lower), tuple(model.bounds.upper)).clamped(ds.n) if model.bounds else None

        k: Optional[int] = None
        for item in (s, t, bounds):
            if item is not None:
                k = item.k
                break
        if k is None:
            labels = (model.clusterings.initial or []) + (model.clusterings.target or [])
            k = max(labels) if labels else None
        initial = _labels_to_clustering(model.clusterings.initial, k)
        target = _labels_to_clustering(model.clusterings.target, k)
        check_instance(ds, [C for C in (initial, target) if C], [v for v in (s, t) if v])
    except InstanceFormatError:
        raise
    except TransitError as e:
        raise InstanceFormatError(f"{source}: {e}") from e

    return Instance(dataset=ds, initial=initial, target=target, s=s, t=t, bounds=bounds)


def parse_instance(path: PathLike) -> Instance:
    """
    Read an instance file.

    Raises:
        InstanceFormatError: unreadable, malformed JSON (with line number) or schema violation
    """
    text, source = _read(path)
    return instance_from_text(text, source)


def instance_to_text(instance: Instance) -> str:
    doc: Dict[str, Any] = {
        "format": INSTANCE_FORMAT,
        "version": 1,
        "points": [[float(v) for v in row] for row in instance.dataset.points],
    }
    clusterings = {
        key: _clustering_to_labels(C)
        for key, C in (("initial", instance.initial), ("target", instance.target)) if C is not None
    }
    if clusterings:
        doc["clusterings"] = clusterings
    sites = {key: _sites_list(v) for key, v in (("initial", instance.s), ("target", instance.t)) if v is not None}
    if sites:
        doc["sites"] = sites
    if instance.bounds is not None:
        doc["bounds"] = {"lower": list(instance.bounds.lower), "upper": list(instance.bounds.upper)}
    return canonical_json(doc) + "\n"


def write_instance(instance: Instance, path: PathLike) -> None:
    Path(path).write_text(instance_to_text(instance))


# ====================================================
# TRANSITION FILES
# ====================================================

def transition_to_text(seq: TransitionSequence) -> str:
    doc: Dict[str, Any] = {
        "format": TRANSITION_FORMAT,
        "version": 1,
        "config": seq.config.model_dump(),
        "points": [[float(v) for v in row] for row in seq.dataset.points],
        "sites": {"initial": _sites_list(seq.s), "target": _sites_list(seq.t)},
        "clusterings": {"initial": _clustering_to_labels(seq.initial), "target": _clustering_to_labels(seq.target)},
        "bounds": {"lower": list(seq.bounds.lower), "upper": list(seq.bounds.upper)},
        "legs": {"p": seq.p, "m": seq.m, "q": seq.q},
        "lambdas": [float(lam) for lam in seq.lambdas],
        "sequence": [_clustering_to_labels(C) for C in seq.clusterings],
        "exchanges": [
            {
                "index": record.index,
                "leg": record.leg,
                "kind": record.exchange.kind,
                "arcs": [[arc.source + 1, arc.target + 1, arc.item] for arc in record.exchange.arcs],
                "lam": None if record.lam is None else float(record.lam),
            }
            for record in seq.exchanges
        ],
        "diagrams": [
            {
                "kind": record.kind,
                "label": record.label,
                "induces": list(record.induces),
                "sites": _sites_list(record.sites),
                "gammas": [float(g) for g in record.diagram.gammas],
                "weights": [float(w) for w in record.diagram.weights],
                "margin": _number(record.margin),
            }
            for record in seq.diagrams
        ],
    }
    return canonical_json(doc) + "\n"


def write_transition(seq: TransitionSequence, path: PathLike) -> None:
    Path(path).write_text(transition_to_text(seq))


def transition_from_text(text: str, source: str = "<transition>") -> TransitionSequence:
    raw = _load_json(text, source)
    try:
        model = TransitionModel.model_validate(raw)
        config = TransitConfig(**model.config)
    except ValidationError as e:
        raise _schema_error(e, text, source) from e

    try:
        ds = DataSet(np.array(model.points, dtype=np.float64))
        if model.sites.initial is None or model.sites.target is None:
            raise InstanceFormatError(f"{source}: transition file needs both endpoint site vectors")
        s = SiteVector(np.array(model.sites.initial))
        t = SiteVector(np.array(model.sites.target))
        k = s.k
        initial = _labels_to_clustering(model.clusterings.initial, k)
        target = _labels_to_clustering(model.clusterings.target, k)
        if initial is None or target is None:
            raise InstanceFormatError(f"{source}: transition file needs both endpoint clusterings")
        bounds = SizeBounds(tuple(model.bounds.lower), tuple(model.bounds.upper)).clamped(ds.n)
        clusterings = tuple(_labels_to_clustering(labels, k) for labels in model.sequence)
        exchanges = tuple(
            ExchangeRecord(
                index=e.index,
                leg=e.leg,
                exchange=Exchange(e.kind, tuple(Arc(a - 1, b - 1, item) for a, b, item in e.arcs)),
                lam=e.lam,
            )
            for e in model.exchanges
        )
        diagrams = tuple(
            DiagramRecord(
                kind=d.kind,
                label=d.label,
                induces=tuple(d.induces),
                diagram=PowerDiagram(
                    sites=SiteVector(np.array(d.sites)),
                    gammas=np.array(d.gammas, dtype=np.float64),
                    weights=np.array(d.weights, dtype=np.float64),
                    margin=float("inf") if d.margin is None else d.margin,
                ),
            )
            for d in model.diagrams
        )
    except InstanceFormatError:
        raise
    except TransitError as e:
        raise InstanceFormatError(f"{source}: {e}") from e

    return TransitionSequence(
        dataset=ds,
        s=s,
        t=t,
        initial=initial,
        target=target,
        bounds=bounds,
        clusterings=tuple(C for C in clusterings if C is not None),
        diagrams=diagrams,
        exchanges=exchanges,
        p=model.legs.p,
        m=model.legs.m,
        q=model.legs.q,
        lambdas=tuple(model.lambdas),
        config=config,
    )


def parse_transition(path: PathLike) -> TransitionSequence:
    """
    Read a transition file written by write_transition.

    Raises:
        InstanceFormatError: unreadable, malformed JSON or schema violation
    """
    text, source = _read(path)
    return transition_from_text(text, source)


# ====================================================
# GENERATION
# ====================================================

def _random_shape(rng: np.random.Generator, n: int, k: int) -> Shape:
    extra = rng.multinomial(n - k, np.full(k, 1.0 / k))
    return Shape(tuple(int(v) + 1 for v in extra))


def generate_instance(
    n: int,
    k: int,
    d: int,
    seed: Optional[int] = None,
    site_shift: float = 0.5,
    config: Optional[TransitConfig] = None,
) -> Instance:
    """
    Random centered points, random sites s, perturbed sites t, and endpoint
    clusterings that are constrained LSAs for random shapes.
    """
    config = config or get_default_config()
    if n < k or k < 1 or d < 1:
        raise InputValidationError(f"need n >= k >= 1 and d >= 1, got n={n}, k={k}, d={d}")
    rng = np.random.default_rng(config.seed if seed is None else seed)

    ds = center_dataset(DataSet(rng.normal(size=(n, d))))
    s = SiteVector(rng.normal(size=(k, d)))
    t = SiteVector(s.sites + site_shift * rng.normal(size=(k, d)))

    endpoints = []
    for sites in (s, t):
        shape = _random_shape(rng, n, k)
        vertex, _ = optimize(objective_from_sites(ds, sites), SizeBounds.single_shape(shape), config=config)
        endpoints.append(vertex.clustering())

    logger.debug("generated instance n=%d k=%d d=%d seed=%s", n, k, d, seed)
    return Instance(dataset=ds, initial=endpoints[0], target=endpoints[1], s=s, t=t)
