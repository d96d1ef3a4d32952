"""
Breadth-first development of the reflection tiling by copies of a realized
tetrahedron, with the developed planes and edges the turnover search needs.

A tile is g*T for g = R_{w1} ... R_{wk}; its neighbour across face i is
g R_i T, so children are obtained by right multiplication. Tiles are
deduplicated by their quantized motion matrix and the first (shortlex)
word reaching a tile is kept.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..utils import metrics
from ..utils.metrics import MetricNames
from .mink import (
    DEFAULT_EPS,
    Motion,
    Plane,
    canonical_keys,
    euclidean_normalize,
    gram_of,
    inner,
    quantize,
    reflection,
)
from .tetgen import EDGES, Edge, GeneralizedTetrahedron, VertexClass

logger = logging.getLogger(__name__)

MAX_DEPTH = 12
DEFAULT_TILE_CAP = 10**6
INCIDENCE_EPS = 1e-8


class DepthExceededError(ValueError):
    """Raised when a development deeper than the supported guard is requested"""
    pass


class BlowUpError(RuntimeError):
    """Raised when a development exceeds the configured tile cap"""
    pass


class PlaneNotInStateError(KeyError):
    """Raised when a plane is not one of the developed face planes"""
    pass


class EdgeNotCoplanarError(ValueError):
    """Raised when an edge does not lie in the given plane"""
    pass


class PlaneKind(Enum):
    FACE = "face"
    TRUNCATION = "truncation"


@dataclass(frozen=True, eq=False)
class Tile:
    motion: Motion
    word: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class DevelopedPlane:
    plane: Plane
    kind: PlaneKind
    tile: int
    index: int
    word: Tuple[int, ...]

    @property
    def key(self) -> bytes:
        return self.plane.key()


@dataclass(frozen=True, eq=False)
class EdgeEnd:
    dual: np.ndarray
    unit: np.ndarray
    vertex_class: VertexClass
    key: bytes


@dataclass(frozen=True, eq=False)
class EdgeRef:
    index: int
    tile: int
    word: Tuple[int, ...]
    edge: Edge
    label: int
    planes: Tuple[Plane, Plane]
    geodesic_key: Tuple[bytes, bytes]
    endpoints: Tuple[EdgeEnd, EdgeEnd]

    @property
    def endpoint_keys(self) -> Tuple[bytes, bytes]:
        return self.endpoints[0].key, self.endpoints[1].key

    def shares_vertex_with(self, other: 'EdgeRef') -> bool:
        return bool(set(self.endpoint_keys) & set(other.endpoint_keys))

    def sort_key(self) -> Tuple:
        return (len(self.word), self.word, EDGES.index(self.edge))


@dataclass(frozen=True)
class SidePlane:
    plane: Plane
    angle: float
    word: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class DevelopmentState:
    tet: GeneralizedTetrahedron
    depth: int
    tiles: Tuple[Tile, ...]
    planes: Tuple[DevelopedPlane, ...]
    edges: Tuple[EdgeRef, ...]
    plane_index: Dict[bytes, int] = field(repr=False)

    @property
    def face_planes(self) -> List[DevelopedPlane]:
        return [p for p in self.planes if p.kind is PlaneKind.FACE]

    @property
    def truncation_planes(self) -> List[DevelopedPlane]:
        return [p for p in self.planes if p.kind is PlaneKind.TRUNCATION]

    def face_normals(self) -> np.ndarray:
        faces = self.face_planes
        return np.stack([p.plane.normal for p in faces]) if faces else np.zeros((0, 4))

    def truncation_normals(self) -> np.ndarray:
        truncations = self.truncation_planes
        return np.stack([p.plane.normal for p in truncations]) if truncations else np.zeros((0, 4))

    def lookup(self, plane: Plane) -> Optional[DevelopedPlane]:
        idx = self.plane_index.get(plane.key())
        return None if idx is None else self.planes[idx]

    def endpoint_units(self) -> np.ndarray:
        """(E, 2, 4) array of Euclidean-normalized endpoint duals"""
        if not self.edges:
            return np.zeros((0, 2, 4))
        return np.stack([[e.endpoints[0].unit, e.endpoints[1].unit] for e in self.edges])


def _grow(tet: GeneralizedTetrahedron, depth: int, tile_cap: int) -> List[Tile]:
    reflections = np.stack([reflection(face).m for face in tet.faces])
    tiles = [Tile(Motion.identity(), ())]
    seen = {tiles[0].motion.key()}
    frontier = [0]

    for layer in range(1, depth + 1):
        parents = [tiles[i] for i in frontier]
        if not parents:
            break
        stacked = np.stack([t.motion.m for t in parents])
        # children[t, i] = parent_t @ R_i
        children = np.einsum('tij,fjk->tfik', stacked, reflections)
        keys = quantize(children).reshape(len(parents), 4, 16)

        next_frontier = []
        for t, parent in enumerate(parents):
            for i in range(4):
                if parent.word and parent.word[-1] == i:
                    continue
                key = keys[t, i].tobytes()
                if key in seen:
                    continue
                seen.add(key)
                tiles.append(Tile(Motion(children[t, i]), parent.word + (i,)))
                next_frontier.append(len(tiles) - 1)
                if len(tiles) > tile_cap:
                    raise BlowUpError(
                        f"development of {tet.spec} exceeded {tile_cap} tiles at depth {layer}"
                    )
        frontier = next_frontier
        logger.debug(f"{tet.spec}: layer {layer} added {len(next_frontier)} tiles")
    return tiles


def develop(
    tet: GeneralizedTetrahedron,
    depth: int,
    tile_cap: int = DEFAULT_TILE_CAP,
) -> DevelopmentState:
    """
    Develop copies of the tetrahedron out to reflection-word length `depth`.

    Raises:
        DepthExceededError: depth outside [0, 12]
        BlowUpError: more than `tile_cap` tiles
    """
    if depth < 0 or depth > MAX_DEPTH:
        raise DepthExceededError(f"development depth must be in [0, {MAX_DEPTH}], got {depth}")

    started = time.time()
    tiles = _grow(tet, depth, tile_cap)
    motions = np.stack([t.motion.m for t in tiles])

    planes: List[DevelopedPlane] = []
    plane_index: Dict[bytes, int] = {}

    def collect(normals: np.ndarray, kind: PlaneKind, indices: Sequence[int]) -> None:
        # normals has shape (tiles, len(indices), 4)
        flat = normals.reshape(-1, 4)
        for pos, key in enumerate(canonical_keys(flat)):
            if key in plane_index:
                continue
            t, k = divmod(pos, len(indices))
            plane_index[key] = len(planes)
            planes.append(DevelopedPlane(Plane(flat[pos]), kind, t, indices[k], tiles[t].word))

    collect(np.einsum('tij,fj->tfi', motions, tet.normals), PlaneKind.FACE, range(4))
    truncated = [v for v in tet.vertices if v.truncation is not None]
    if truncated:
        base = np.stack([v.truncation.normal for v in truncated])
        collect(np.einsum('tij,fj->tfi', motions, base), PlaneKind.TRUNCATION, [v.name.value for v in truncated])

    edges = _collect_edges(tet, tiles, motions)

    duration_ms = (time.time() - started) * 1000
    metrics.increment(MetricNames.TILES_DEVELOPED, len(tiles))
    metrics.increment(MetricNames.PLANES_COLLECTED, len(planes))
    metrics.increment(MetricNames.EDGES_COLLECTED, len(edges))
    metrics.timing(MetricNames.DEVELOP_DURATION, duration_ms)
    logger.info(
        f"Developed {tet.spec} to depth {depth}: {len(tiles)} tiles, "
        f"{len(planes)} planes, {len(edges)} edges",
        extra={'spec': tet.spec.as_text(), 'depth': depth, 'duration_ms': round(duration_ms, 3)},
    )
    return DevelopmentState(
        tet=tet,
        depth=depth,
        tiles=tuple(tiles),
        planes=tuple(planes),
        edges=tuple(edges),
        plane_index=plane_index,
    )


def _collect_edges(tet: GeneralizedTetrahedron, tiles: List[Tile], motions: np.ndarray) -> List[EdgeRef]:
    duals = np.einsum('tij,vj->tvi', motions, tet.duals)
    normals = np.einsum('tij,fj->tfi', motions, tet.normals)
    dual_keys = canonical_keys(duals.reshape(-1, 4))
    units = euclidean_normalize(duals)

    edges: List[EdgeRef] = []
    seen = set()
    for t, tile in enumerate(tiles):
        for edge in EDGES:
            x, y = edge.ends
            kx, ky = dual_keys[4 * t + x.value], dual_keys[4 * t + y.value]
            key = (kx, ky) if kx <= ky else (ky, kx)
            if key in seen:
                continue
            seen.add(key)
            fa, fb = edge.faces
            pa, pb = Plane(normals[t, fa]), Plane(normals[t, fb])
            ka, kb = pa.key(), pb.key()
            ends = tuple(
                EdgeEnd(duals[t, v.value].copy(), units[t, v.value].copy(),
                        tet.vertices[v.value].vertex_class, k)
                for v, k in ((x, kx), (y, ky))
            )
            edges.append(EdgeRef(
                index=len(edges),
                tile=t,
                word=tile.word,
                edge=edge,
                label=tet.spec.label(edge),
                planes=(pa, pb),
                geodesic_key=(ka, kb) if ka <= kb else (kb, ka),
                endpoints=ends,
            ))
    return edges


def _tolerance(normal: np.ndarray, eps: float) -> float:
    return eps * max(1.0, float(np.linalg.norm(normal)))


def _endpoint_products(state: DevelopmentState, normal: np.ndarray) -> np.ndarray:
    units = state.endpoint_units()
    if len(units) == 0:
        return np.zeros((0, 2))
    return gram_of(units.reshape(-1, 4), normal[None, :]).reshape(-1, 2)


def coplanar_edges(state: DevelopmentState, pi_f: Plane, eps: float = INCIDENCE_EPS) -> List[EdgeRef]:
    """Developed edges lying in the developed face plane pi_f, in shortlex order"""
    developed = state.lookup(pi_f)
    if developed is None or developed.kind is not PlaneKind.FACE:
        raise PlaneNotInStateError(f"{pi_f!r} is not a developed face plane at depth {state.depth}")

    key = developed.key
    products = _endpoint_products(state, pi_f.normal)
    tol = _tolerance(pi_f.normal, eps)
    in_plane = np.all(np.abs(products) <= tol, axis=1)
    selected = [
        e for e in state.edges
        if key in e.geodesic_key or in_plane[e.index]
    ]
    return sorted(selected, key=EdgeRef.sort_key)


def _edge_in_plane(edge: EdgeRef, normal: np.ndarray, eps: float) -> bool:
    tol = _tolerance(normal, eps)
    return all(abs(inner(end.unit, normal)) <= tol for end in edge.endpoints)


def side_planes(
    state: DevelopmentState,
    edge: EdgeRef,
    pi_f: Plane,
    eps: float = INCIDENCE_EPS,
) -> List[SidePlane]:
    """
    Developed face planes through the edge's geodesic other than pi_f, each
    with its rotation angle from pi_f in (0, pi). Around an edge of order k
    the development contributes k - 1 of them.
    """
    f_key = pi_f.key()
    if f_key not in edge.geodesic_key and not _edge_in_plane(edge, pi_f.normal, eps):
        raise EdgeNotCoplanarError(f"edge {edge.edge.name} of tile {edge.word} does not lie in {pi_f!r}")

    candidates = [p for p in state.face_planes if p.key != f_key]
    if not candidates:
        return []
    normals = np.stack([p.plane.normal for p in candidates])
    units = np.stack([edge.endpoints[0].unit, edge.endpoints[1].unit])
    products = gram_of(normals, units)
    tol = eps * np.maximum(1.0, np.linalg.norm(normals, axis=1))
    through = np.all(np.abs(products) <= tol[:, None], axis=1)

    f = pi_f.normal
    f2 = None
    found: List[SidePlane] = []
    for idx in np.flatnonzero(through):
        developed = candidates[idx]
        n = developed.plane.normal
        if f2 is None:
            # the normals of planes through a geodesic span a space-like 2-plane
            residual = n - inner(n, f) * f
            f2 = residual / math.sqrt(max(inner(residual, residual), 1e-300))
        phi = math.atan2(inner(n, f2), inner(n, f))
        plane = developed.plane
        if phi <= 0.0:
            phi += math.pi
            plane = plane.flipped()
        found.append(SidePlane(plane, phi, developed.word))
    return sorted(found, key=lambda s: s.angle)


def develop_around_edge(tet: GeneralizedTetrahedron, edge: Edge) -> List[Tile]:
    """The 2k tiles of the dihedral cycle around a base edge of order k"""
    k = tet.spec.label(edge)
    a, b = edge.faces
    generators = (reflection(tet.faces[a]).m, reflection(tet.faces[b]).m)
    tiles = [Tile(Motion.identity(), ())]
    m = np.eye(4)
    word: Tuple[int, ...] = ()
    for step in range(2 * k - 1):
        m = m @ generators[step % 2]
        word = word + ((a, b)[step % 2],)
        tiles.append(Tile(Motion(m.copy()), word))
    return tiles


@dataclass
class ObservationReport:
    """Violation counts of the disjointness observations over a development"""
    spec: str
    depth: int
    truncation_pairs: int = 0
    truncation_violations: int = 0
    edge_pairs: int = 0
    edge_violations: int = 0
    face_truncation_pairs: int = 0
    face_truncation_violations: int = 0

    @property
    def passed(self) -> bool:
        return (self.truncation_violations + self.edge_violations + self.face_truncation_violations) == 0


def observation_report(state: DevelopmentState, eps: float = DEFAULT_EPS) -> ObservationReport:
    """
    Check the disjointness observations for a development of an
    all-non-finite tetrahedron:

    1. distinct truncation planes are ultraparallel;
    2. distinct developed edge geodesics share no point of H^3;
    3. each face plane is ultraparallel to the truncation plane of the
       opposite vertex.
    """
    report = ObservationReport(spec=state.tet.spec.as_text(), depth=state.depth)

    truncations = state.truncation_normals()
    if len(truncations) > 1:
        products = np.abs(gram_of(truncations))
        upper = np.triu_indices(len(truncations), k=1)
        report.truncation_pairs = len(upper[0])
        report.truncation_violations = int(np.sum(products[upper] <= 1.0 + eps))

    report.edge_pairs, report.edge_violations = _edge_crossings(state, eps)

    tet = state.tet
    motions = np.stack([t.motion.m for t in state.tiles])
    for v in tet.vertices:
        if v.truncation is None:
            continue
        faces = motions @ tet.faces[v.name.face].normal
        cuts = motions @ v.truncation.normal
        products = np.abs(np.einsum('ti,ti->t', faces * np.array([1.0, 1.0, 1.0, -1.0]), cuts))
        report.face_truncation_pairs += len(products)
        report.face_truncation_violations += int(np.sum(products <= 1.0 + eps))

    if not report.passed:
        logger.warning(f"Observation violations for {report.spec} at depth {report.depth}: {report}")
    return report


def _edge_crossings(state: DevelopmentState, eps: float) -> Tuple[int, int]:
    """Count pairs of developed edge geodesics that meet inside H^3"""
    units = state.endpoint_units()
    count = len(units)
    pairs = 0
    violations = 0
    for i in range(count - 1):
        others = units[i + 1:]
        block = np.concatenate([
            np.broadcast_to(units[i], (len(others), 2, 4)),
            others,
        ], axis=1)
        dets = np.abs(np.linalg.det(block))
        pairs += len(others)
        for j in np.flatnonzero(dets <= 1e-9):
            if _spans_meet_in_h3(units[i], others[j], eps):
                violations += 1
    return pairs, violations


def _spans_meet_in_h3(first: np.ndarray, second: np.ndarray, eps: float) -> bool:
    matrix = np.concatenate([first, -second]).T
    _, singular, vt = np.linalg.svd(matrix)
    rank = int(np.sum(singular > 1e-9 * singular[0]))
    if rank == 4:
        return False
    points = vt[rank:, :2] @ first
    points = points[np.linalg.norm(points, axis=1) > eps]
    if len(points) == 0:
        return False
    points = euclidean_normalize(points)
    # the common subspace holds a time-like vector iff its Gram matrix is not positive semi-definite
    return bool(np.min(np.linalg.eigvalsh(gram_of(points))) < -eps)
