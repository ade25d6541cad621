"""
====================================================
CLUSTERING DIFFERENCE GRAPH LAYER
====================================================

RESPONSIBILITY:
Compare two clusterings of the same items as a directed multigraph on the
clusters, split that graph into one path plus arc-disjoint cycles, and
apply such exchanges to clusterings.

NO optimization.
NO geometry.

INPUT:
- Two Clusterings with equal n and k

OUTPUT:
- CDG (labeled arcs (from-cluster, to-cluster, item))
- Exchange objects (a single path or a single cycle)

DETERMINISM:
- Arcs are ordered by item index.
- The path walk starts at the node with surplus out-degree; every walk
  follows the lowest-indexed unused out-arc; repeated nodes are cut out
  of the walk as cycles, so every emitted exchange is a simple path or a
  simple cycle.
====================================================
"""

from dataclasses import dataclass
from typing import Dict, List, Literal, NamedTuple, Optional, Tuple

from Transit.Core import Clustering, InputValidationError, InternalInvariantError


class DecompositionError(InternalInvariantError):
    """CDG degree pattern does not allow a path-plus-cycles decomposition."""
    pass


class Arc(NamedTuple):
    """Item `item` is in cluster `source` of the first clustering and `target` of the second."""
    source: int
    target: int
    item: int


ExchangeKind = Literal["path", "cycle"]


@dataclass(frozen=True)
class Exchange:
    """One walk in a CDG: a sequential (path) or cyclical (cycle) exchange."""

    kind: ExchangeKind
    arcs: Tuple[Arc, ...]

    def __post_init__(self):
        arcs = tuple(Arc(*arc) for arc in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if self.kind not in ("path", "cycle"):
            raise InputValidationError(f"unknown exchange kind: {self.kind}")
        if len({arc.item for arc in arcs}) != len(arcs):
            raise InputValidationError("exchange repeats an item")
        for prev, nxt in zip(arcs, arcs[1:]):
            if prev.target != nxt.source:
                raise InputValidationError(f"arcs {prev} and {nxt} do not chain head-to-tail")
        if arcs:
            closes = arcs[-1].target == arcs[0].source
            if self.kind == "cycle" and not closes:
                raise InputValidationError("cycle exchange does not close")
            if self.kind == "path" and closes:
                raise InputValidationError("path exchange closes on itself")

    @property
    def items(self) -> List[int]:
        return [arc.item for arc in self.arcs]

    def __len__(self) -> int:
        return len(self.arcs)


@dataclass(frozen=True)
class CDG:
    """Clustering difference graph; isolated clusters are not nodes."""

    nodes: Tuple[int, ...]
    arcs: Tuple[Arc, ...]

    def is_empty(self) -> bool:
        return not self.arcs

    def out_arcs(self) -> Dict[int, List[Arc]]:
        adjacency: Dict[int, List[Arc]] = {node: [] for node in self.nodes}
        for arc in self.arcs:
            adjacency[arc.source].append(arc)
        return adjacency

    def imbalance(self) -> Dict[int, int]:
        """out-degree minus in-degree per node."""
        balance = {node: 0 for node in self.nodes}
        for arc in self.arcs:
            balance[arc.source] += 1
            balance[arc.target] -= 1
        return balance


def build_cdg(C: Clustering, C2: Clustering) -> CDG:
    """Arcs (i, l, x) for every item x with x in C_i and x in C2_l, i != l."""
    if C.n != C2.n or C.k != C2.k:
        raise InputValidationError(f"clusterings disagree on size: n={C.n}/{C2.n}, k={C.k}/{C2.k}")
    arcs = tuple(
        Arc(a, b, j) for j, (a, b) in enumerate(zip(C.assignment, C2.assignment)) if a != b
    )
    nodes = tuple(sorted({arc.source for arc in arcs} | {arc.target for arc in arcs}))
    return CDG(nodes=nodes, arcs=arcs)


class _Walker:
    """Consumes arcs of a CDG, lowest item first, cutting repeated nodes into cycles."""

    def __init__(self, g: CDG):
        self.unused = {node: list(arcs) for node, arcs in g.out_arcs().items()}
        self.cycles: List[Exchange] = []

    def has_out(self, node: int) -> bool:
        return bool(self.unused.get(node))

    def walk(self, start: int) -> Tuple[List[Arc], int]:
        trail: List[Arc] = []
        position = {start: 0}
        node = start
        while self.has_out(node):
            arc = self.unused[node].pop(0)
            trail.append(arc)
            node = arc.target
            if node in position:
                cut = position[node]
                self.cycles.append(Exchange("cycle", tuple(trail[cut:])))
                trail = trail[:cut]
                position = {n: p for n, p in position.items() if p <= cut}
            else:
                position[node] = len(trail)
        return trail, node


def decompose(g: CDG) -> Tuple[Optional[Exchange], List[Exchange]]:
    """
    Split a CDG into at most one path and arc-disjoint cycles.

    Supported degree patterns: all nodes balanced (cycles only), or exactly
    one node with out-in = +1 and one with out-in = -1 (one path between them).

    Returns:
        (path or None, cycles)

    Raises:
        DecompositionError: any other degree pattern
    """
    imbalance = g.imbalance()
    unbalanced = {node: value for node, value in imbalance.items() if value != 0}
    sources = [node for node, value in unbalanced.items() if value == 1]
    sinks = [node for node, value in unbalanced.items() if value == -1]

    if unbalanced and not (len(unbalanced) == 2 and len(sources) == 1 and len(sinks) == 1):
        raise DecompositionError(f"CDG has {len(unbalanced)} unbalanced nodes: {unbalanced}")

    walker = _Walker(g)
    path: Optional[Exchange] = None

    if sources:
        trail, end = walker.walk(sources[0])
        if end != sinks[0] or not trail:
            raise DecompositionError(f"path walk from {sources[0]} ended at {end}, expected {sinks[0]}")
        path = Exchange("path", tuple(trail))

    for arc in g.arcs:
        if arc in walker.unused.get(arc.source, []):
            trail, end = walker.walk(arc.source)
            if trail:
                raise DecompositionError(f"cycle walk from {arc.source} got stuck at {end}")

    return path, walker.cycles


def apply_exchange(C: Clustering, e: Exchange) -> Clustering:
    """Move every labeled item of the exchange to its arc's head cluster."""
    assignment = list(C.assignment)
    for arc in e.arcs:
        if not 0 <= arc.item < C.n or assignment[arc.item] != arc.source:
            raise InputValidationError(f"item {arc.item} is not in cluster {arc.source}")
        if not 0 <= arc.target < C.k:
            raise InputValidationError(f"arc target {arc.target} is not a cluster")
        assignment[arc.item] = arc.target
    return Clustering(tuple(assignment), C.k)


def is_single_exchange(C: Clustering, C2: Clustering) -> bool:
    """True iff the CDG of the pair is exactly one simple path or one simple cycle."""
    return _single_walk(build_cdg(C, C2)) is not None


def single_exchange(C: Clustering, C2: Clustering) -> Exchange:
    """The exchange turning C into C2; raises if the pair differs by more than one walk."""
    exchange = _single_walk(build_cdg(C, C2))
    if exchange is None:
        raise InputValidationError("clusterings do not differ by a single cyclical or sequential exchange")
    return exchange


def _single_walk(g: CDG) -> Optional[Exchange]:
    if g.is_empty():
        return None
    out_degree = {node: 0 for node in g.nodes}
    in_degree = {node: 0 for node in g.nodes}
    for arc in g.arcs:
        out_degree[arc.source] += 1
        in_degree[arc.target] += 1
    if any(out_degree[v] > 1 or in_degree[v] > 1 for v in g.nodes):
        return None

    starts = [v for v in g.nodes if in_degree[v] == 0]
    if len(starts) > 1:
        return None
    start = starts[0] if starts else g.arcs[0].source
    successor = {arc.source: arc for arc in g.arcs}

    walk: List[Arc] = []
    node = start
    while node in successor and len(walk) < len(g.arcs):
        arc = successor[node]
        walk.append(arc)
        node = arc.target
        if node == start:
            break

    # Connectivity: the walk must cover every arc
    if len(walk) != len(g.arcs):
        return None
    return Exchange("cycle" if node == start else "path", tuple(walk))
