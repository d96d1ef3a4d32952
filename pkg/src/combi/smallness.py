"""
Turnover circuits, truncation collapse and the smallness test.

A Coxeter polyhedron is small exactly when it is a generalized tetrahedron,
i.e. when contracting its truncation triangles leaves the tetrahedral graph.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..geometry.tetgen import TetSpec, marked_graph
from .marked_graph import (
    Dart,
    NotValidatedError,
    MarkedEdge,
    MarkedGraph,
    oriented_faces,
    require_valid,
    reverse_darts,
    validate,
)

logger = logging.getLogger(__name__)


class CircuitKind(Enum):
    HYPERBOLIC = "hyperbolic"
    EUCLIDEAN = "euclidean"
    SPHERICAL = "spherical"


class Smallness(Enum):
    SMALL = "small"
    NOT_SMALL = "not_small"
    INVALID = "invalid"


@dataclass(frozen=True)
class Circuit:
    faces: Tuple[int, int, int]
    edges: Tuple[int, int, int]
    labels: Tuple[int, int, int]
    kind: CircuitKind
    vertex_parallel: bool

    @property
    def reciprocal_sum(self) -> Fraction:
        return sum((Fraction(1, k) for k in self.labels), Fraction(0))


@dataclass
class CircuitReport:
    circuits: List[Circuit] = field(default_factory=list)

    @property
    def embedded_turnovers(self) -> List[Circuit]:
        """Hyperbolic circuits that are not vertex links"""
        return [c for c in self.circuits if c.kind is CircuitKind.HYPERBOLIC and not c.vertex_parallel]

    def __len__(self) -> int:
        return len(self.circuits)


def _circuit_kind(labels: Sequence[int]) -> CircuitKind:
    total = sum(Fraction(1, k) for k in labels)
    if total < 1:
        return CircuitKind.HYPERBOLIC
    if total == 1:
        return CircuitKind.EUCLIDEAN
    return CircuitKind.SPHERICAL


def turnover_circuits(g: MarkedGraph) -> CircuitReport:
    """
    Every unordered triple of pairwise adjacent faces crossed through three
    distinct edges, one shared edge per pair. Triples whose three edges meet
    at one vertex are vertex links and flagged as vertex parallel.

    Raises:
        NotValidatedError: the graph does not validate
    """
    require_valid(g)
    shared: Dict[Tuple[int, int], List[int]] = {}
    for e, faces in g.edge_faces().items():
        f1, f2 = sorted(faces)
        shared.setdefault((f1, f2), []).append(e)

    report = CircuitReport()
    for f1, f2, f3 in itertools.combinations(range(len(g.faces)), 3):
        pairs = [shared.get((f1, f2)), shared.get((f1, f3)), shared.get((f2, f3))]
        if not all(pairs):
            continue
        for edges in itertools.product(*pairs):
            if len(set(edges)) != 3:
                continue
            ends = [set(g.edges[e].ends) for e in edges]
            labels = tuple(g.edges[e].label for e in edges)
            report.circuits.append(Circuit(
                faces=(f1, f2, f3),
                edges=tuple(edges),
                labels=labels,
                kind=_circuit_kind(labels),
                vertex_parallel=bool(ends[0] & ends[1] & ends[2]),
            ))
    logger.debug(
        f"Found {len(report)} 3-circuits, {len(report.embedded_turnovers)} embedded hyperbolic"
    )
    return report


def _collapsible(g: MarkedGraph, f: int, edge_faces: Dict[int, List[int]]) -> bool:
    face = g.faces[f]
    if len(face) != 3 or any(g.edges[e].label != 2 for e in face):
        return False
    corners = {v for e in face for v in g.edges[e].ends}
    if len(corners) != 3 or any(g.valence(v) != 3 for v in corners):
        return False
    neighbours = {other for e in face for other in edge_faces[e] if other != f}
    return all(len(g.faces[other]) >= 4 for other in neighbours)


def _contract(g: MarkedGraph, f: int) -> MarkedGraph:
    face = set(g.faces[f])
    corners = {v for e in face for v in g.edges[e].ends}
    merged = min(corners)

    kept_edges = [i for i in range(len(g.edges)) if i not in face]
    edge_map = {old: new for new, old in enumerate(kept_edges)}
    survivors = sorted({merged} | (set(range(g.vertex_count)) - corners))
    vertex_map = {old: new for new, old in enumerate(survivors)}
    for v in corners:
        vertex_map[v] = vertex_map[merged]

    edges = tuple(
        MarkedEdge(tuple(vertex_map[v] for v in g.edges[i].ends), g.edges[i].label)
        for i in kept_edges
    )
    faces = tuple(
        tuple(edge_map[e] for e in cycle if e not in face)
        for index, cycle in enumerate(g.faces) if index != f
    )
    return MarkedGraph(len(survivors), edges, faces)


def collapse_truncations(g: MarkedGraph) -> MarkedGraph:
    """
    Contract all-2 triangular faces to single trivalent vertices until none
    is left. A triangle is only contracted when its corners are trivalent
    and every adjacent face keeps at least three edges.

    Raises:
        NotValidatedError: the graph does not validate
    """
    require_valid(g)
    current = g
    steps = 0
    while True:
        edge_faces = current.edge_faces()
        target = next((f for f in range(len(current.faces)) if _collapsible(current, f, edge_faces)), None)
        if target is None:
            break
        current = _contract(current, target)
        steps += 1
    if steps:
        logger.debug(f"Collapsed {steps} truncation triangles: {len(g.faces)} -> {len(current.faces)} faces")
    return current


def _phi(faces: List[List[Dart]]) -> Dict[Dart, Dart]:
    nxt: Dict[Dart, Dart] = {}
    for face in faces:
        for pos, dart in enumerate(face):
            nxt[dart] = face[(pos + 1) % len(face)]
    return nxt


def _code_from(start: Dart, phi: Dict[Dart, Dart], labels: Optional[List[int]]) -> Tuple:
    number = {start: 0}
    order = [start]
    queue = deque([start])
    while queue:
        dart = queue.popleft()
        for neighbour in (phi[dart], (dart[0], 1 - dart[1])):
            if neighbour not in number:
                number[neighbour] = len(order)
                order.append(neighbour)
                queue.append(neighbour)
    return tuple(
        (number[phi[d]], number[(d[0], 1 - d[1])], labels[d[0]] if labels else 0)
        for d in order
    )


def canonical_form(g: MarkedGraph, labeled: bool = True) -> Tuple:
    """
    Canonical code of the embedded graph, invariant under renumbering of
    vertices, edges and faces and under reflection. Equal codes mean
    isomorphic (marked, if labeled) polyhedral maps.

    Raises:
        NotValidatedError: the faces admit no consistent orientation
    """
    faces = oriented_faces(g)
    if faces is None:
        raise NotValidatedError("canonical form needs an orientable face structure")
    labels = [e.label for e in g.edges] if labeled else None
    best = None
    for variant in (faces, [reverse_darts(face) for face in faces]):
        phi = _phi(variant)
        for start in phi:
            code = _code_from(start, phi, labels)
            if best is None or code < best:
                best = code
    return (g.vertex_count, len(g.edges), len(g.faces), best)


def tetrahedral_graph() -> MarkedGraph:
    return marked_graph(TetSpec(2, 2, 2, 2, 2, 2))


def is_small(g: MarkedGraph) -> Smallness:
    violations = validate(g)
    if violations:
        logger.info(f"Polyhedron is invalid: {violations[0]}")
        return Smallness.INVALID
    collapsed = collapse_truncations(g)
    if canonical_form(collapsed, labeled=False) == canonical_form(tetrahedral_graph(), labeled=False):
        return Smallness.SMALL
    return Smallness.NOT_SMALL
