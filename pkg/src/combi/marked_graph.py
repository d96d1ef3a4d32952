"""
Marked planar graphs describing Coxeter polyhedra.

A polyhedron is given by its 1-skeleton, every edge marked with the order k
of its dihedral angle pi/k, together with a planar embedding: each face is a
cyclic sequence of edge indices. Polyhedra are stored with every super-ideal
vertex already truncated, so trivalent vertices are finite or ideal and a
quadrivalent vertex is always ideal.
"""
import json
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import yaml

from ..geometry.tetgen import VertexClass

logger = logging.getLogger(__name__)

# a dart is an edge traversed in one direction: 0 from ends[0] to ends[1], 1 backwards
Dart = Tuple[int, int]


class PolyhedronParseError(ValueError):
    """Raised when a polyhedron file cannot be read into a marked graph"""
    pass


class NotValidatedError(ValueError):
    """Raised when an operation needs a graph that passes validation"""
    pass


class VertexViolationError(ValueError):
    """Raised for a trivalent vertex whose reciprocal label sum is below 1"""
    pass


class ViolationRule(Enum):
    LABEL = "label"
    ENDPOINTS = "endpoints"
    LOOP = "loop"
    FACE_LENGTH = "face_length"
    FACE_CYCLE = "face_cycle"
    EDGE_FACES = "edge_faces"
    EULER = "euler"
    VALENCE = "valence"
    QUADRIVALENT_SUM = "quadrivalent_sum"
    ORIENTATION = "orientation"
    CONNECTED = "connected"
    PLANARITY = "planarity"


@dataclass(frozen=True)
class Violation:
    rule: ViolationRule
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule.value}] {self.subject}: {self.message}"


@dataclass(frozen=True)
class MarkedEdge:
    ends: Tuple[int, int]
    label: int


@dataclass(frozen=True)
class MarkedGraph:
    vertex_count: int
    edges: Tuple[MarkedEdge, ...]
    faces: Tuple[Tuple[int, ...], ...]

    @classmethod
    def build(cls, edges: Sequence[Tuple[Tuple[int, int], int]], faces: Sequence[Sequence[int]]) -> 'MarkedGraph':
        """Build from ((u, v), label) pairs, inferring the vertex count"""
        marked = tuple(MarkedEdge((int(u), int(v)), int(label)) for (u, v), label in edges)
        count = 1 + max((max(e.ends) for e in marked), default=-1)
        return cls(count, marked, tuple(tuple(int(i) for i in face) for face in faces))

    def incident(self, v: int) -> List[int]:
        return [i for i, e in enumerate(self.edges) if v in e.ends]

    def valence(self, v: int) -> int:
        return sum((e.ends[0] == v) + (e.ends[1] == v) for e in self.edges)

    def reciprocal_sum(self, v: int) -> Fraction:
        return sum((Fraction(1, self.edges[i].label) for i in self.incident(v)), Fraction(0))

    def edge_faces(self) -> Dict[int, List[int]]:
        found: Dict[int, List[int]] = {i: [] for i in range(len(self.edges))}
        for f, face in enumerate(self.faces):
            for i in face:
                if i in found:
                    found[i].append(f)
        return found

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        for i, e in enumerate(self.edges):
            graph.add_edge(*e.ends, key=i, label=e.label)
        return graph


def face_darts(g: MarkedGraph, face: Sequence[int]) -> Optional[List[Dart]]:
    """
    Darts traversing a face boundary in the listed order, or None when
    consecutive edges do not meet in exactly one vertex.
    """
    k = len(face)
    shared: List[int] = []
    for pos in range(k):
        a = set(g.edges[face[pos]].ends)
        b = set(g.edges[face[(pos + 1) % k]].ends)
        common = a & b
        if len(common) != 1:
            return None
        shared.append(common.pop())
    darts = []
    for pos in range(k):
        start, end = shared[pos - 1], shared[pos]
        u, v = g.edges[face[pos]].ends
        if (start, end) == (u, v):
            darts.append((face[pos], 0))
        elif (start, end) == (v, u):
            darts.append((face[pos], 1))
        else:
            return None
    return darts


def reverse_darts(darts: Sequence[Dart]) -> List[Dart]:
    return [(e, 1 - d) for e, d in reversed(darts)]


def oriented_faces(g: MarkedGraph) -> Optional[List[List[Dart]]]:
    """
    Re-orient faces so every edge is traversed once in each direction;
    None when the embedding is not orientable or a face is not a cycle.
    """
    darts = [face_darts(g, face) for face in g.faces]
    if not darts or any(d is None for d in darts):
        return None
    occurrences: Dict[int, List[Tuple[int, int]]] = {}
    for f, face in enumerate(darts):
        for e, d in face:
            occurrences.setdefault(e, []).append((f, d))

    flipped: Dict[int, int] = {}
    for root in range(len(darts)):
        if root in flipped:
            continue
        flipped[root] = 0
        queue = deque([root])
        while queue:
            f = queue.popleft()
            for e, d in darts[f]:
                for other, d2 in occurrences[e]:
                    if other == f or other in flipped:
                        continue
                    # the neighbour must traverse e against f's effective direction
                    flipped[other] = d ^ flipped[f] ^ d2 ^ 1
                    queue.append(other)

    for e, uses in occurrences.items():
        if len(uses) != 2:
            return None
        (f1, d1), (f2, d2) = uses
        if (d1 ^ flipped[f1]) == (d2 ^ flipped[f2]):
            return None
    return [reverse_darts(face) if flipped[f] else list(face) for f, face in enumerate(darts)]


def validate(g: MarkedGraph) -> List[Violation]:
    """
    Check the marked-graph conditions for a Coxeter polyhedron with its
    super-ideal vertices truncated. Violations are returned, not raised.
    """
    violations: List[Violation] = []

    for i, e in enumerate(g.edges):
        if e.label < 2:
            violations.append(Violation(ViolationRule.LABEL, f"edge {i}", f"label must be >= 2, got {e.label}"))
        if any(v < 0 or v >= g.vertex_count for v in e.ends):
            violations.append(Violation(ViolationRule.ENDPOINTS, f"edge {i}", f"ends {e.ends} outside 0..{g.vertex_count - 1}"))
        elif e.ends[0] == e.ends[1]:
            violations.append(Violation(ViolationRule.LOOP, f"edge {i}", f"loop at vertex {e.ends[0]}"))
    if violations:
        return violations

    for f, face in enumerate(g.faces):
        if len(face) < 3:
            violations.append(Violation(ViolationRule.FACE_LENGTH, f"face {f}", f"has {len(face)} edges, need >= 3"))
        elif any(i < 0 or i >= len(g.edges) for i in face):
            violations.append(Violation(ViolationRule.FACE_CYCLE, f"face {f}", "refers to an unknown edge"))
        elif face_darts(g, face) is None:
            violations.append(Violation(ViolationRule.FACE_CYCLE, f"face {f}", "consecutive edges do not form a cycle"))

    for i, faces in g.edge_faces().items():
        if len(faces) != 2:
            violations.append(Violation(ViolationRule.EDGE_FACES, f"edge {i}", f"lies in {len(faces)} faces, need 2"))

    euler = g.vertex_count - len(g.edges) + len(g.faces)
    if euler != 2:
        violations.append(Violation(ViolationRule.EULER, "graph", f"V - E + F = {euler}, need 2"))

    for v in range(g.vertex_count):
        valence = g.valence(v)
        if valence not in (3, 4):
            violations.append(Violation(ViolationRule.VALENCE, f"vertex {v}", f"valence {valence}, need 3 or 4"))
        elif valence == 4 and g.reciprocal_sum(v) != 2:
            violations.append(Violation(
                ViolationRule.QUADRIVALENT_SUM, f"vertex {v}",
                f"quadrivalent reciprocal sum {g.reciprocal_sum(v)} != 2",
            ))

    graph = nx.Graph(g.to_networkx())
    if g.vertex_count and not nx.is_connected(graph):
        violations.append(Violation(ViolationRule.CONNECTED, "graph", "1-skeleton is not connected"))
    planar, _ = nx.check_planarity(graph)
    if not planar:
        violations.append(Violation(ViolationRule.PLANARITY, "graph", "1-skeleton is not planar"))

    if not any(v.rule in (ViolationRule.FACE_LENGTH, ViolationRule.FACE_CYCLE, ViolationRule.EDGE_FACES) for v in violations):
        if oriented_faces(g) is None:
            violations.append(Violation(ViolationRule.ORIENTATION, "graph", "faces admit no consistent orientation"))

    if violations:
        logger.debug(f"Marked graph has {len(violations)} violations: {[str(v) for v in violations]}")
    return violations


def require_valid(g: MarkedGraph) -> None:
    violations = validate(g)
    if violations:
        raise NotValidatedError(
            "marked graph failed validation:\n" + "\n".join(f"  - {v}" for v in violations)
        )


def vertex_class_combinatorial(g: MarkedGraph, v: int) -> VertexClass:
    """
    Finite or ideal, from the incident labels.

    Raises:
        NotValidatedError: the graph does not validate
        VertexViolationError: trivalent vertex with reciprocal sum below 1
    """
    require_valid(g)
    if g.valence(v) == 4:
        return VertexClass.IDEAL
    total = g.reciprocal_sum(v)
    if total > 1:
        return VertexClass.FINITE
    if total == 1:
        return VertexClass.IDEAL
    labels = sorted(g.edges[i].label for i in g.incident(v))
    raise VertexViolationError(
        f"vertex {v} with labels {labels} has reciprocal sum {total} < 1; "
        "super-ideal vertices must be given truncated"
    )


def to_document(g: MarkedGraph) -> Dict[str, Any]:
    return {
        "edges": [{"ends": list(e.ends), "label": e.label} for e in g.edges],
        "faces": [list(face) for face in g.faces],
    }


def from_document(data: Any) -> MarkedGraph:
    if not isinstance(data, dict) or "edges" not in data or "faces" not in data:
        raise PolyhedronParseError("polyhedron document needs 'edges' and 'faces'")
    try:
        edges = [((e["ends"][0], e["ends"][1]), e["label"]) for e in data["edges"]]
        return MarkedGraph.build(edges, data["faces"])
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise PolyhedronParseError(f"malformed polyhedron document: {e}") from e


def dumps_polyhedron(g: MarkedGraph) -> str:
    return json.dumps(to_document(g), indent=2) + "\n"


def load_polyhedron(path: str) -> MarkedGraph:
    """Read a polyhedron from JSON, or YAML when the suffix is .yaml/.yml"""
    source = Path(path)
    try:
        with open(source, 'r') as f:
            if source.suffix in ['.yaml', '.yml']:
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except (OSError, json.JSONDecodeError, yaml.YAMLError) as e:
        raise PolyhedronParseError(f"cannot read polyhedron file {path}: {e}") from e
    return from_document(data)


def save_polyhedron(g: MarkedGraph, path: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, 'w') as f:
        if target.suffix in ['.yaml', '.yml']:
            yaml.dump(to_document(g), f, default_flow_style=None, sort_keys=False)
        else:
            f.write(dumps_polyhedron(g))
    logger.info(f"Polyhedron saved to {path}")
