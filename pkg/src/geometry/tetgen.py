"""
Generalized hyperbolic Coxeter tetrahedra T[l,m,q;n,p,r].

Edge labels: AB=l, BC=m, AC=q, CD=n, AD=p, BD=r. Faces are indexed by the
opposite vertex (F_A = BCD, F_B = ACD, F_C = ABD, F_D = ABC), so the edge XY
lies in the two faces opposite the remaining vertices.
"""
import itertools
import logging
import math
import re
from dataclasses import dataclass, fields
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

import numpy as np

from .mink import (
    DEFAULT_EPS,
    Plane,
    PointClass,
    euclidean_normalize,
    gram_of,
    inner,
    point_class,
)

logger = logging.getLogger(__name__)

RESIDUAL_LIMIT = 1e-7
INTERIOR_WEIGHTS = (1.0, 2.0, 4.0, 8.0)


class SpecParseError(ValueError):
    """Raised when a spec string or tuple is not a valid T[l,m,q;n,p,r]"""
    pass


class DegenerateGramError(ValueError):
    """Raised when a Gram matrix has a zero eigenvalue (Euclidean collapse)"""
    pass


class NotRealizableError(ValueError):
    """Raised when a Gram matrix does not have Lorentzian signature"""
    pass


class IllConditionedError(ArithmeticError):
    """Raised when a realization fails its residual or class consistency checks"""
    pass


class Vertex(Enum):
    A = 0
    B = 1
    C = 2
    D = 3

    @property
    def face(self) -> int:
        """Index of the face opposite this vertex"""
        return self.value


class VertexClass(Enum):
    FINITE = "finite"
    IDEAL = "ideal"
    TRUNCATED = "truncated"


class Edge(Enum):
    AB = ("l", Vertex.A, Vertex.B)
    BC = ("m", Vertex.B, Vertex.C)
    AC = ("q", Vertex.A, Vertex.C)
    CD = ("n", Vertex.C, Vertex.D)
    AD = ("p", Vertex.A, Vertex.D)
    BD = ("r", Vertex.B, Vertex.D)

    @property
    def label_name(self) -> str:
        return self.value[0]

    @property
    def ends(self) -> Tuple[Vertex, Vertex]:
        return self.value[1], self.value[2]

    @property
    def faces(self) -> Tuple[int, int]:
        """The two faces containing the edge, in increasing order"""
        others = [v.face for v in Vertex if v not in self.ends]
        return others[0], others[1]

    @classmethod
    def between(cls, x: Vertex, y: Vertex) -> 'Edge':
        for edge in cls:
            if set(edge.ends) == {x, y}:
                return edge
        raise ValueError(f"no edge between {x.name} and {y.name}")


EDGES: Tuple[Edge, ...] = tuple(Edge)


@dataclass(frozen=True, order=True)
class TetSpec:
    l: int
    m: int
    q: int
    n: int
    p: int
    r: int

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 2:
                raise SpecParseError(f"label {f.name} must be an integer >= 2, got {value!r}")

    @classmethod
    def parse(cls, text: str) -> 'TetSpec':
        """Parse "l,m,q;n,p,r" (whitespace-insensitive, optional T[...] wrapper)"""
        cleaned = re.sub(r"\s+", "", text or "")
        match = re.fullmatch(r"(?:T\[)?(\d+),(\d+),(\d+);(\d+),(\d+),(\d+)\]?", cleaned)
        if not match or (cleaned.startswith("T[") != cleaned.endswith("]")):
            raise SpecParseError(f"cannot parse tetrahedron spec {text!r}, expected 'l,m,q;n,p,r'")
        return cls(*(int(g) for g in match.groups()))

    @classmethod
    def from_labels(cls, labels: Dict[Edge, int]) -> 'TetSpec':
        return cls(**{edge.label_name: int(labels[edge]) for edge in EDGES})

    def label(self, edge: Edge) -> int:
        return getattr(self, edge.label_name)

    def labels(self) -> Tuple[int, int, int, int, int, int]:
        return (self.l, self.m, self.q, self.n, self.p, self.r)

    def vertex_labels(self, v: Vertex) -> Tuple[int, int, int]:
        return tuple(self.label(edge) for edge in EDGES if v in edge.ends)

    def as_text(self) -> str:
        return f"{self.l},{self.m},{self.q};{self.n},{self.p},{self.r}"

    def __str__(self) -> str:
        return f"T[{self.as_text()}]"


@dataclass(frozen=True, eq=False)
class GeneralizedVertex:
    name: Vertex
    dual: np.ndarray
    vertex_class: VertexClass
    truncation: Optional[Plane] = None


@dataclass(frozen=True, eq=False)
class GeneralizedTetrahedron:
    spec: TetSpec
    gram: np.ndarray
    faces: Tuple[Plane, Plane, Plane, Plane]
    vertices: Tuple[GeneralizedVertex, ...]
    interior_point: np.ndarray
    residual: float

    @property
    def normals(self) -> np.ndarray:
        return np.stack([f.normal for f in self.faces])

    @property
    def duals(self) -> np.ndarray:
        return np.stack([v.dual for v in self.vertices])

    @property
    def truncation_planes(self) -> Dict[Vertex, Plane]:
        return {v.name: v.truncation for v in self.vertices if v.truncation is not None}

    def vertex(self, name: Vertex) -> GeneralizedVertex:
        return self.vertices[name.value]

    def is_all_non_finite(self) -> bool:
        return all(v.vertex_class is not VertexClass.FINITE for v in self.vertices)


def gram_from_spec(spec: TetSpec) -> np.ndarray:
    g = np.eye(4)
    for edge in EDGES:
        i, j = edge.faces
        value = -math.cos(math.pi / spec.label(edge))
        if spec.label(edge) == 2:
            value = 0.0
        g[i, j] = g[j, i] = value
    return g


def spec_from_gram(g: np.ndarray) -> TetSpec:
    """Recover the integer labels from a Gram matrix of a Coxeter tetrahedron"""
    labels = {}
    for edge in EDGES:
        i, j = edge.faces
        c = float(np.clip(-g[i, j], -1.0, 1.0))
        angle = math.acos(c)
        if angle <= 0.0:
            raise SpecParseError(f"Gram entry ({i},{j}) = {g[i, j]} is not a Coxeter angle")
        labels[edge] = int(round(math.pi / angle))
    return TetSpec.from_labels(labels)


def exists_hyperbolic(g: np.ndarray, eps: float = DEFAULT_EPS) -> bool:
    eigenvalues = np.linalg.eigvalsh(np.asarray(g, dtype=float))
    if np.any(np.abs(eigenvalues) <= eps):
        raise DegenerateGramError(f"Gram matrix is degenerate, eigenvalues {eigenvalues.tolist()}")
    return int(np.sum(eigenvalues < 0)) == 1


def classify_vertex(spec: TetSpec, v: Vertex) -> VertexClass:
    total = sum(Fraction(1, k) for k in spec.vertex_labels(v))
    if total > 1:
        return VertexClass.FINITE
    if total == 1:
        return VertexClass.IDEAL
    return VertexClass.TRUNCATED


_GEOMETRIC_CLASS = {
    PointClass.TIME_LIKE: VertexClass.FINITE,
    PointClass.LIGHT_LIKE: VertexClass.IDEAL,
    PointClass.SPACE_LIKE: VertexClass.TRUNCATED,
}


def _interior_point(duals: np.ndarray, eps: float) -> Optional[np.ndarray]:
    centroid = duals.sum(axis=0)
    if inner(centroid, centroid) < -eps:
        return centroid
    for weights in itertools.product(INTERIOR_WEIGHTS, repeat=4):
        candidate = np.asarray(weights) @ duals
        if inner(candidate, candidate) < -eps:
            return candidate
    return None


def realize(g: np.ndarray, spec: Optional[TetSpec] = None, eps: float = DEFAULT_EPS) -> GeneralizedTetrahedron:
    """
    Realize face normals, vertex duals and truncation planes from a Gram matrix.

    The Gram matrix is factored as N J N^T through its eigen-decomposition,
    with the negative eigen-direction sent to x4. Vertex duals are the rows of
    -g^{-1} N, so <v_j, n_i> = -delta_ij.

    Raises:
        NotRealizableError: signature is not (3,1)
        IllConditionedError: reconstruction residual too large or vertex classes disagree
    """
    g = np.asarray(g, dtype=float)
    if spec is None:
        spec = spec_from_gram(g)

    eigenvalues, eigenvectors = np.linalg.eigh(g)
    negative = [i for i, lam in enumerate(eigenvalues) if lam < 0]
    if len(negative) != 1 or np.any(np.abs(eigenvalues) <= eps):
        raise NotRealizableError(
            f"{spec} has no hyperbolic realization (eigenvalues {np.round(eigenvalues, 9).tolist()})"
        )

    order = [i for i in range(4) if i != negative[0]] + negative
    normals = eigenvectors[:, order] * np.sqrt(np.abs(eigenvalues[order]))
    duals = -np.linalg.inv(g) @ normals

    interior = _interior_point(duals, eps)
    if interior is None:
        raise NotRealizableError(f"{spec}: no time-like point inside the face half-spaces")
    if interior[3] < 0:
        flip = np.array([1.0, 1.0, 1.0, -1.0])
        normals = normals * flip
        duals = duals * flip
        interior = interior * flip

    residual = float(np.max(np.abs(gram_of(normals) - g)))
    if residual > RESIDUAL_LIMIT:
        raise IllConditionedError(f"{spec}: Gram reconstruction residual {residual:.3e}")

    vertices = []
    for name in Vertex:
        dual = duals[name.value]
        geometric = _GEOMETRIC_CLASS[point_class(euclidean_normalize(dual), eps)]
        combinatorial = classify_vertex(spec, name)
        if geometric is not combinatorial:
            raise IllConditionedError(
                f"{spec}: vertex {name.name} is {geometric.value} geometrically "
                f"but {combinatorial.value} by its angle sum"
            )
        truncation = None
        if combinatorial is VertexClass.TRUNCATED:
            # outward normal, pointing toward the cut-off vertex
            truncation = Plane.from_vector(dual, eps)
        vertices.append(GeneralizedVertex(name, dual, combinatorial, truncation))

    logger.debug(f"Realized {spec}: residual={residual:.2e}, classes={[v.vertex_class.value for v in vertices]}")
    return GeneralizedTetrahedron(
        spec=spec,
        gram=g,
        faces=tuple(Plane(n) for n in normals),
        vertices=tuple(vertices),
        interior_point=interior,
        residual=residual,
    )


def realize_spec(spec: TetSpec, eps: float = DEFAULT_EPS) -> GeneralizedTetrahedron:
    g = gram_from_spec(spec)
    try:
        if not exists_hyperbolic(g, eps):
            raise NotRealizableError(f"{spec} is not hyperbolic (Gram signature is not (3,1))")
    except DegenerateGramError as e:
        raise NotRealizableError(f"{spec} is Euclidean: {e}") from e
    return realize(g, spec, eps)


def permuted(spec: TetSpec, sigma: Tuple[int, ...]) -> TetSpec:
    """Push labels through a vertex permutation: T'(XY) = T(sigma X, sigma Y)"""
    vertices = list(Vertex)
    labels = {}
    for edge in EDGES:
        x, y = edge.ends
        labels[edge] = spec.label(Edge.between(vertices[sigma[x.value]], vertices[sigma[y.value]]))
    return TetSpec.from_labels(labels)


def symmetry_orbit(spec: TetSpec) -> FrozenSet[TetSpec]:
    return frozenset(permuted(spec, sigma) for sigma in itertools.permutations(range(4)))


def orbit_representative(spec: TetSpec) -> TetSpec:
    return min(symmetry_orbit(spec))


def enumerate_specs(max_entry: int, min_entry: int = 2) -> Iterator[TetSpec]:
    """Orbit representatives of all specs with entries in [min_entry, max_entry]"""
    for labels in itertools.product(range(min_entry, max_entry + 1), repeat=6):
        spec = TetSpec(*labels)
        if spec == orbit_representative(spec):
            yield spec


def vertex_classes(spec: TetSpec) -> Dict[Vertex, VertexClass]:
    return {v: classify_vertex(spec, v) for v in Vertex}


def is_all_non_finite(spec: TetSpec) -> bool:
    return all(c is not VertexClass.FINITE for c in vertex_classes(spec).values())


def is_realizable(spec: TetSpec, eps: float = DEFAULT_EPS) -> bool:
    try:
        return exists_hyperbolic(gram_from_spec(spec), eps)
    except DegenerateGramError:
        return False


def compact_tetrahedra(max_entry: int = 6, eps: float = DEFAULT_EPS) -> List[TetSpec]:
    """Hyperbolic tetrahedra with all four vertices finite, one per isometry class"""
    found = [
        spec for spec in enumerate_specs(max_entry)
        if all(c is VertexClass.FINITE for c in vertex_classes(spec).values())
        and is_realizable(spec, eps)
    ]
    logger.info(f"Compact census up to {max_entry}: {len(found)} tetrahedra")
    return found


def marked_graph(spec: TetSpec):
    """
    Marked 1-skeleton of the generalized tetrahedron: the tetrahedral graph
    with every truncated vertex replaced by a triangle of order-2 edges.
    """
    from ..combi.marked_graph import MarkedEdge, MarkedGraph

    classes = vertex_classes(spec)
    node: Dict[Tuple[Vertex, Vertex], int] = {}
    count = 0
    for v in Vertex:
        neighbours = [w for w in Vertex if w is not v]
        if classes[v] is VertexClass.TRUNCATED:
            for w in neighbours:
                node[(v, w)] = count
                count += 1
        else:
            for w in neighbours:
                node[(v, w)] = count
            count += 1

    edges: List[MarkedEdge] = []
    edge_index: Dict[object, int] = {}
    for edge in EDGES:
        x, y = edge.ends
        edge_index[edge] = len(edges)
        edges.append(MarkedEdge((node[(x, y)], node[(y, x)]), spec.label(edge)))
    for v in Vertex:
        if classes[v] is not VertexClass.TRUNCATED:
            continue
        for y, z in itertools.combinations([w for w in Vertex if w is not v], 2):
            edge_index[(v, frozenset((y, z)))] = len(edges)
            edges.append(MarkedEdge((node[(v, y)], node[(v, z)]), 2))

    faces: List[Tuple[int, ...]] = []
    for w in Vertex:
        x, y, z = [v for v in Vertex if v is not w]
        cycle: List[int] = []
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            cycle.append(edge_index[Edge.between(a, b)])
            if classes[b] is VertexClass.TRUNCATED:
                cycle.append(edge_index[(b, frozenset((a, c)))])
        faces.append(tuple(cycle))
    for v in Vertex:
        if classes[v] is VertexClass.TRUNCATED:
            y, z, w = [u for u in Vertex if u is not v]
            faces.append((
                edge_index[(v, frozenset((y, z)))],
                edge_index[(v, frozenset((z, w)))],
                edge_index[(v, frozenset((w, y)))],
            ))
    return MarkedGraph(vertex_count=count, edges=tuple(edges), faces=tuple(faces))
