"""
Search for immersed turnovers through triples of developed face planes.

For a developed face plane Pi_F, two developed edges e1, e2 lying in Pi_F
and sharing no generalized vertex, and planes Pi_1 through e1 and Pi_2
through e2: if the three planes bound a hyperbolic triangle with angles
pi/a, pi/b, pi/c, the reflections in them generate an (a,b,c) triangle
reflection group stabilizing their common perpendicular plane. Hits that
merely re-detect a truncation turnover, or whose plane no developed edge
crosses obliquely, are discarded.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..geometry.develop import (
    DEFAULT_TILE_CAP,
    DevelopmentState,
    EdgeRef,
    coplanar_edges,
    develop,
    side_planes,
)
from ..geometry.mink import (
    DEFAULT_EPS,
    J,
    Plane,
    gram_of,
    inner,
)
from ..geometry.tetgen import GeneralizedTetrahedron
from ..utils import metrics
from ..utils.metrics import MetricNames
from ..utils.parallel import map_ordered
from .lattice import DEFAULT_CMAX, TriangleType, direct_inclusions

logger = logging.getLogger(__name__)

DEFAULT_ANGLE_EPS = 1e-7
PERPENDICULAR_EPS = 1e-8


class InvalidSearchConfigError(ValueError):
    """Raised when search parameters are out of range"""
    pass


class RankDeficientError(ValueError):
    """Raised when three plane normals do not span a 3-space"""
    pass


class NonSpacelikeError(ValueError):
    """Raised when the planes have no hyperbolic common perpendicular plane"""
    pass


@dataclass(frozen=True)
class SearchConfig:
    depth: int = 8
    eps: float = DEFAULT_EPS
    cmax: int = DEFAULT_CMAX
    tile_cap: int = DEFAULT_TILE_CAP
    angle_eps: float = DEFAULT_ANGLE_EPS
    threads: int = 1

    def __post_init__(self):
        errors = []
        if self.depth < 2:
            errors.append(f"depth must be >= 2, got {self.depth}")
        if self.cmax < 2:
            errors.append(f"cmax must be >= 2, got {self.cmax}")
        if self.eps <= 0 or self.angle_eps <= 0:
            errors.append(f"tolerances must be positive, got eps={self.eps}, angle_eps={self.angle_eps}")
        if self.tile_cap < 1:
            errors.append(f"tile_cap must be positive, got {self.tile_cap}")
        if errors:
            raise InvalidSearchConfigError(
                "Search configuration invalid:\n" + "\n".join(f"  - {e}" for e in errors)
            )


# turnover types are hyperbolic triangle types; they compare equal to lattice entries
TurnoverType = TriangleType


def turnover_type(*orders: int) -> TurnoverType:
    t = TriangleType.of(*orders)
    if not t.is_hyperbolic():
        raise ValueError(f"turnover type {t} is not hyperbolic")
    return t


@dataclass(frozen=True, eq=False)
class TurnoverWitness:
    type: TurnoverType
    pi_f: Plane
    pi_1: Plane
    pi_2: Plane
    e1: Optional[EdgeRef]
    e2: Optional[EdgeRef]
    invariant_plane: Plane
    words: Dict[str, Tuple[int, ...]] = field(default_factory=dict)
    supergroups: Tuple[TriangleType, ...] = ()

    def sort_key(self) -> Tuple:
        return (self.type, self.invariant_plane.key(), tuple(sorted(self.words.items())))


def angle_as_submultiple(theta: float, cmax: int = DEFAULT_CMAX, eps: float = DEFAULT_EPS) -> Optional[int]:
    """Smallest c in [2, cmax] with |theta - pi/c| < eps * max(1, pi/theta)"""
    if not 0.0 < theta < math.pi:
        return None
    tol = eps * max(1.0, math.pi / theta)
    guess = int(round(math.pi / theta))
    for c in range(max(2, guess - 1), min(cmax, guess + 1) + 1):
        if abs(theta - math.pi / c) < tol:
            return c
    return None


def common_perpendicular(p1: Plane, p2: Plane, p3: Plane, eps: float = DEFAULT_EPS) -> Plane:
    """
    The plane orthogonal to all three planes: the space-like solution w of
    <w, n_i> = 0.

    Raises:
        RankDeficientError: the normals do not span a 3-space
        NonSpacelikeError: the solution is not space-like (spherical or Euclidean triple)
    """
    system = np.stack([p1.normal, p2.normal, p3.normal]) @ J
    scaled = system / np.linalg.norm(system, axis=1, keepdims=True)
    _, singular, vt = np.linalg.svd(scaled)
    if singular[2] <= 1e-9 * singular[0]:
        raise RankDeficientError(f"plane normals span only rank {int(np.sum(singular > 1e-9 * singular[0]))}")
    w = vt[3]
    norm = inner(w, w)
    if norm <= eps:
        raise NonSpacelikeError(f"common perpendicular is not space-like (<w,w> = {norm:.3e})")
    return Plane(w / math.sqrt(norm))


def triangle_angles(c_f1: float, c_f2: float, c_12: float) -> Optional[Tuple[int, int, Tuple[float, float, float]]]:
    """
    Orient Pi_1 and Pi_2 (signs e1, e2) so that the three half-spaces cut
    out the triangle: the unique sign pattern whose interior angles sum to
    less than pi. Returns (e1, e2, angles) with angles at (F,1), (F,2), (1,2).
    """
    best = None
    for e1 in (1, -1):
        for e2 in (1, -1):
            angles = (
                math.acos(max(-1.0, min(1.0, -e1 * c_f1))),
                math.acos(max(-1.0, min(1.0, -e2 * c_f2))),
                math.acos(max(-1.0, min(1.0, -e1 * e2 * c_12))),
            )
            if sum(angles) < math.pi - 1e-12:
                if best is not None:
                    return None
                best = (e1, e2, angles)
    return best


@dataclass
class _Candidate:
    edge: EdgeRef
    plane: Plane
    word: Tuple[int, ...]


def _seed_candidates(state: DevelopmentState, pi_f: Plane) -> List[_Candidate]:
    candidates = []
    for edge in coplanar_edges(state, pi_f):
        for side in side_planes(state, edge, pi_f):
            candidates.append(_Candidate(edge, side.plane, side.word))
    return candidates


def _triangle_pairs(
    pi_f: Plane,
    candidates: List[_Candidate],
    cfg: SearchConfig,
) -> Tuple[List[Tuple[int, int]], int, int]:
    """Candidate index pairs that pass the vectorized pre-filters"""
    count = len(candidates)
    if count < 2:
        return [], 0, 0

    normals = np.stack([c.plane.normal for c in candidates])
    endpoint_ids: Dict[bytes, int] = {}
    ends = np.array([
        [endpoint_ids.setdefault(k, len(endpoint_ids)) for k in c.edge.endpoint_keys]
        for c in candidates
    ])
    edge_ids = np.array([c.edge.index for c in candidates])
    plane_ids: Dict[bytes, int] = {}
    planes = np.array([plane_ids.setdefault(c.plane.key(), len(plane_ids)) for c in candidates])

    c_f = gram_of(normals, pi_f.normal[None, :])[:, 0]
    c_pair = gram_of(normals)

    i_idx, j_idx = np.triu_indices(count, k=1)
    disjoint = (
        (edge_ids[i_idx] != edge_ids[j_idx])
        & (ends[i_idx, 0] != ends[j_idx, 0]) & (ends[i_idx, 0] != ends[j_idx, 1])
        & (ends[i_idx, 1] != ends[j_idx, 0]) & (ends[i_idx, 1] != ends[j_idx, 1])
        & (planes[i_idx] != planes[j_idx])
    )
    c12 = c_pair[i_idx, j_idx]
    meeting = disjoint & (np.abs(c12) < 1.0 - cfg.eps)
    pairs_examined = int(np.sum(disjoint))

    i_idx, j_idx, c12 = i_idx[meeting], j_idx[meeting], c12[meeting]
    a_cos, b_cos = c_f[i_idx], c_f[j_idx]

    # angle sums per sign pattern; the triangle is the unique pattern below pi
    angle_f1 = {s: np.arccos(np.clip(-s * a_cos, -1.0, 1.0)) for s in (1, -1)}
    angle_f2 = {s: np.arccos(np.clip(-s * b_cos, -1.0, 1.0)) for s in (1, -1)}
    angle_12 = {s: np.arccos(np.clip(-s * c12, -1.0, 1.0)) for s in (1, -1)}
    keep = np.zeros(len(i_idx), dtype=bool)
    rejected = 0
    for s1 in (1, -1):
        for s2 in (1, -1):
            thetas = np.stack([angle_f1[s1], angle_f2[s2], angle_12[s1 * s2]])
            triangle = thetas.sum(axis=0) < math.pi - 1e-12
            ratios = np.pi / np.maximum(thetas, 1e-300)
            nearest = np.rint(ratios)
            tol = cfg.angle_eps * np.maximum(1.0, ratios)
            submultiple = (
                (nearest >= 2) & (nearest <= cfg.cmax)
                & (np.abs(thetas - np.pi / np.maximum(nearest, 1.0)) < tol)
            ).all(axis=0)
            keep |= triangle & submultiple
            rejected += int(np.sum(triangle & ~submultiple))

    pairs = [(int(i), int(j)) for i, j in zip(i_idx[keep], j_idx[keep])]
    return pairs, pairs_examined, rejected


def _search_seed(state: DevelopmentState, pi_f: Plane, cfg: SearchConfig) -> List[TurnoverWitness]:
    candidates = _seed_candidates(state, pi_f)
    pairs, examined, rejected = _triangle_pairs(pi_f, candidates, cfg)
    metrics.increment(MetricNames.SEEDS_SEARCHED)
    metrics.increment(MetricNames.CANDIDATE_PAIRS, examined)
    if rejected:
        metrics.increment(MetricNames.NON_SUBMULTIPLE_ANGLE, rejected)

    witnesses: Dict[Tuple, TurnoverWitness] = {}
    triples_seen = set()
    for i, j in pairs:
        first, second = candidates[i], candidates[j]
        triple_key = (first.plane.key(), second.plane.key())
        if triple_key in triples_seen:
            continue
        triples_seen.add(triple_key)

        oriented = triangle_angles(
            inner(pi_f.normal, first.plane.normal),
            inner(pi_f.normal, second.plane.normal),
            inner(first.plane.normal, second.plane.normal),
        )
        if oriented is None:
            continue
        s1, s2, angles = oriented
        orders = [angle_as_submultiple(theta, cfg.cmax, cfg.angle_eps) for theta in angles]
        if any(order is None for order in orders):
            continue
        try:
            found_type = turnover_type(*orders)
        except ValueError:
            continue
        try:
            w = common_perpendicular(pi_f, first.plane, second.plane, cfg.eps)
        except (RankDeficientError, NonSpacelikeError) as e:
            metrics.increment(MetricNames.NO_INVARIANT_PLANE)
            logger.debug(f"Skipping triple without invariant plane: {e}")
            continue

        key = (found_type, w.key())
        if key in witnesses:
            continue
        witnesses[key] = TurnoverWitness(
            type=found_type,
            pi_f=pi_f,
            pi_1=first.plane if s1 > 0 else first.plane.flipped(),
            pi_2=second.plane if s2 > 0 else second.plane.flipped(),
            e1=first.edge,
            e2=second.edge,
            invariant_plane=w,
            words={
                'e1': first.edge.word,
                'e2': second.edge.word,
                'pi_1': first.word,
                'pi_2': second.word,
            },
        )
    logger.debug(f"Seed produced {len(witnesses)} raw witnesses from {len(pairs)} pairs")
    return list(witnesses.values())


def filter_vertex_parallel(
    w: TurnoverWitness,
    state: DevelopmentState,
    eps: float = PERPENDICULAR_EPS,
) -> bool:
    """
    Keep a witness iff its invariant plane is not a developed truncation
    plane and at least one developed edge geodesic crosses it obliquely.
    """
    normal = w.invariant_plane.normal
    scale = max(1.0, float(np.linalg.norm(normal)))

    truncations = state.truncation_normals()
    if len(truncations):
        tol = eps * np.maximum(scale, np.linalg.norm(truncations, axis=1))
        same = np.max(np.abs(truncations - normal), axis=1) <= tol
        opposite = np.max(np.abs(truncations + normal), axis=1) <= tol
        keys = {p.key for p in state.truncation_planes}
        if np.any(same | opposite) or w.invariant_plane.key() in keys:
            return False

    if not state.edges:
        return False
    units = state.endpoint_units()
    a = gram_of(units[:, 0, :], normal[None, :])[:, 0]
    b = gram_of(units[:, 1, :], normal[None, :])[:, 0]
    incident = np.stack([[e.planes[0].normal, e.planes[1].normal] for e in state.edges])
    pa = gram_of(incident[:, 0, :], normal[None, :])[:, 0]
    pb = gram_of(incident[:, 1, :], normal[None, :])[:, 0]
    incident_scale = np.maximum(
        scale, np.maximum(np.linalg.norm(incident[:, 0, :], axis=1), np.linalg.norm(incident[:, 1, :], axis=1))
    )

    contained = (np.abs(a) <= eps * scale) & (np.abs(b) <= eps * scale)
    perpendicular = (np.abs(pa) <= eps * incident_scale) & (np.abs(pb) <= eps * incident_scale)
    crossing_points = b[:, None] * units[:, 0, :] - a[:, None] * units[:, 1, :]
    norms = np.linalg.norm(crossing_points, axis=1)
    lorentz = np.einsum('ei,ei->e', crossing_points * np.array([1.0, 1.0, 1.0, -1.0]), crossing_points)
    # endpoints on opposite sides of w put the crossing point on the segment
    crossing = (a * b < 0) & (norms > 0) & (lorentz < -eps * np.maximum(norms, 1e-300) ** 2)

    oblique = crossing & ~contained & ~perpendicular
    return bool(np.any(oblique))


def annotate_supergroups(witness: TurnoverWitness, cmax: int) -> TurnoverWitness:
    sups = tuple(inc.super for inc in direct_inclusions(witness.type, cmax))
    return TurnoverWitness(
        type=witness.type,
        pi_f=witness.pi_f,
        pi_1=witness.pi_1,
        pi_2=witness.pi_2,
        e1=witness.e1,
        e2=witness.e2,
        invariant_plane=witness.invariant_plane,
        words=witness.words,
        supergroups=sups,
    )


def search(
    tet: GeneralizedTetrahedron,
    cfg: SearchConfig,
    state: Optional[DevelopmentState] = None,
) -> List[TurnoverWitness]:
    """
    Develop to cfg.depth and collect immersed-turnover witnesses.

    Seeds are the four base face planes: every developed face plane is a
    group translate of one of them. Seeds run in parallel; the merged
    result is deduplicated by (type, invariant plane) and sorted.
    """
    started = time.time()
    if state is None or state.depth < cfg.depth:
        state = develop(tet, cfg.depth, cfg.tile_cap)

    seeds = list(tet.faces)
    per_seed = map_ordered(lambda pi_f: _search_seed(state, pi_f, cfg), seeds, cfg.threads)

    merged: Dict[Tuple, TurnoverWitness] = {}
    for witnesses in per_seed:
        for witness in sorted(witnesses, key=TurnoverWitness.sort_key):
            merged.setdefault((witness.type, witness.invariant_plane.key()), witness)

    kept = []
    for key in sorted(merged):
        witness = merged[key]
        if filter_vertex_parallel(witness, state):
            kept.append(annotate_supergroups(witness, cfg.cmax))
        else:
            metrics.increment(MetricNames.VERTEX_PARALLEL_FILTERED)

    duration_ms = (time.time() - started) * 1000
    metrics.increment(MetricNames.WITNESSES_EMITTED, len(kept))
    metrics.timing(MetricNames.SEARCH_DURATION, duration_ms)
    logger.info(
        f"Search of {tet.spec} at depth {cfg.depth}: {len(kept)} witnesses "
        f"({len(merged) - len(kept)} filtered), types {sorted({str(w.type) for w in kept})}",
        extra={'spec': tet.spec.as_text(), 'depth': cfg.depth, 'duration_ms': round(duration_ms, 3)},
    )
    return kept


def found_types(witnesses: List[TurnoverWitness]) -> List[TurnoverType]:
    return sorted({w.type for w in witnesses})
