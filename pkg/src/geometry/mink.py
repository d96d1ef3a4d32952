"""
Lorentzian linear algebra in R^{3,1} for the hyperboloid model of H^3.

Conventions used by every geometry module:

- the form is <u, v> = u1*v1 + u2*v2 + u3*v3 - u4*v4, i.e. J = diag(1, 1, 1, -1);
- a geodesic plane is stored through a space-like unit normal n, and the
  half-space it bounds on the polyhedron side is {x : <x, n> <= 0};
- the dihedral angle between two such half-spaces is arccos(-<n_i, n_j>).

Planes keep their orientation. The canonical sign (first non-zero quantized
coordinate positive) is only applied when building deduplication keys.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

J = np.diag([1.0, 1.0, 1.0, -1.0])

DEFAULT_EPS = 1e-9
INVOLUTION_EPS = 1e-12
QUANT_DIGITS = 6

ArrayLike = Union[np.ndarray, Sequence[float]]


class ZeroVectorError(ValueError):
    """Raised when a vector is zero within tolerance"""
    pass


class NonUnitNormalError(ValueError):
    """Raised when a plane normal is not a space-like unit vector"""
    pass


class PointClass(Enum):
    TIME_LIKE = "time_like"
    LIGHT_LIKE = "light_like"
    SPACE_LIKE = "space_like"


class RelationKind(Enum):
    EQUAL = "equal"
    INTERSECTING = "intersecting"
    PARALLEL = "parallel"
    ULTRAPARALLEL = "ultraparallel"


def vec4(*coords: float) -> np.ndarray:
    if len(coords) == 1:
        coords = tuple(coords[0])
    v = np.asarray(coords, dtype=float)
    if v.shape != (4,):
        raise ValueError(f"expected 4 coordinates, got shape {v.shape}")
    return v


def inner(u: ArrayLike, v: ArrayLike) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[0] * v[0] + u[1] * v[1] + u[2] * v[2] - u[3] * v[3])


def inner_rows(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Row-wise Lorentzian products of two (k, 4) arrays (broadcasting)"""
    return np.einsum('...i,...i->...', u * np.array([1.0, 1.0, 1.0, -1.0]), v)


def gram_of(rows: np.ndarray, others: Optional[np.ndarray] = None) -> np.ndarray:
    """Matrix of Lorentzian products between the rows of two arrays"""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    others = rows if others is None else np.atleast_2d(np.asarray(others, dtype=float))
    return rows @ J @ others.T


def euclidean_normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise ZeroVectorError("cannot normalize a zero vector")
    return v / norms


def point_class(v: ArrayLike, eps: float = DEFAULT_EPS) -> PointClass:
    v = np.asarray(v, dtype=float)
    if np.all(np.abs(v) < eps):
        raise ZeroVectorError(f"vector {v.tolist()} is zero within {eps}")
    norm = inner(v, v)
    if norm < -eps:
        return PointClass.TIME_LIKE
    if norm > eps:
        return PointClass.SPACE_LIKE
    return PointClass.LIGHT_LIKE


def quantize(v: np.ndarray, digits: int = QUANT_DIGITS) -> np.ndarray:
    # adding 0.0 turns -0.0 into 0.0 so equal keys have equal bytes
    return np.round(np.asarray(v, dtype=float), digits) + 0.0


def canonical_sign(v: np.ndarray, digits: int = QUANT_DIGITS) -> np.ndarray:
    """Return v or -v so that the first non-zero quantized coordinate is positive"""
    v = np.asarray(v, dtype=float)
    for coord in quantize(v, digits):
        if coord > 0:
            return v.copy()
        if coord < 0:
            return -v
    return v.copy()


def canonical_keys(rows: np.ndarray, digits: int = QUANT_DIGITS) -> list:
    """Deduplication keys for a stack of vectors, up to sign"""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    q = quantize(rows, digits)
    nonzero = q != 0.0
    first = np.argmax(nonzero, axis=1)
    lead = q[np.arange(len(q)), first]
    signs = np.where(lead < 0, -1.0, 1.0)
    canon = quantize(rows * signs[:, None], digits)
    return [row.tobytes() for row in canon]


def projective(v: ArrayLike) -> np.ndarray:
    """Projective-ball coordinates (display only)"""
    v = np.asarray(v, dtype=float)
    if abs(v[3]) < DEFAULT_EPS:
        raise ZeroVectorError("point at projective infinity has no ball coordinates")
    return v[:3] / v[3]


@dataclass(frozen=True, eq=False)
class Plane:
    """Geodesic plane given by an oriented space-like unit normal"""
    normal: np.ndarray

    def __post_init__(self):
        normal = np.array(self.normal, dtype=float)
        if normal.shape != (4,) or not np.all(np.isfinite(normal)):
            raise ValueError(f"plane normal must be 4 finite coordinates, got {normal!r}")
        normal.setflags(write=False)
        object.__setattr__(self, 'normal', normal)

    @classmethod
    def from_vector(cls, v: ArrayLike, eps: float = DEFAULT_EPS) -> 'Plane':
        """Normalize a space-like vector into a unit normal"""
        v = np.asarray(v, dtype=float)
        norm = inner(v, v)
        if norm <= eps:
            raise NonUnitNormalError(f"vector {v.tolist()} is not space-like (<v,v> = {norm})")
        return cls(v / math.sqrt(norm))

    def is_unit(self, eps: float = DEFAULT_EPS) -> bool:
        return abs(inner(self.normal, self.normal) - 1.0) <= eps * max(1.0, float(np.dot(self.normal, self.normal)))

    def canonical(self) -> 'Plane':
        return Plane(canonical_sign(self.normal))

    def flipped(self) -> 'Plane':
        return Plane(-self.normal)

    def key(self) -> bytes:
        return canonical_keys(self.normal)[0]

    def __repr__(self) -> str:
        coords = ", ".join(f"{c:.6g}" for c in self.normal)
        return f"Plane({coords})"


@dataclass(frozen=True, eq=False)
class Motion:
    """Isometry of H^3 as a 4x4 matrix preserving J and the upper sheet"""
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"motion must be a 4x4 matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, 'm', m)

    @classmethod
    def identity(cls) -> 'Motion':
        return cls(np.eye(4))

    def is_lorentzian(self, eps: float = 1e-8) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.m))) ** 2)
        preserves_form = np.allclose(self.m.T @ J @ self.m, J, atol=eps * scale, rtol=0.0)
        return bool(preserves_form and self.m[3, 3] > 0)

    def key(self) -> bytes:
        return quantize(self.m).tobytes()

    def inverse(self) -> 'Motion':
        # J m^T J is the inverse of any Lorentz matrix
        return Motion(J @ self.m.T @ J)


def reflection(p: Plane, eps: float = DEFAULT_EPS) -> Motion:
    """Lorentzian reflection x -> x - 2<x,n>n in the plane p"""
    n = p.normal
    norm = inner(n, n)
    if abs(norm - 1.0) > eps:
        raise NonUnitNormalError(f"reflection needs a unit normal, <n,n> = {norm}")
    return Motion(np.eye(4) - 2.0 * np.outer(n, J @ n))


def compose(a: Motion, b: Motion) -> Motion:
    return Motion(a.m @ b.m)


def apply(a: Motion, v: ArrayLike) -> np.ndarray:
    return a.m @ np.asarray(v, dtype=float)


def apply_plane(a: Motion, p: Plane) -> Plane:
    # orientation is carried along; only keys are sign-canonical
    return Plane(a.m @ p.normal)


@dataclass(frozen=True)
class PlaneRelation:
    kind: RelationKind
    value: Optional[float] = None

    @property
    def angle(self) -> Optional[float]:
        return self.value if self.kind is RelationKind.INTERSECTING else None

    @property
    def distance(self) -> Optional[float]:
        return self.value if self.kind is RelationKind.ULTRAPARALLEL else None

    def __str__(self) -> str:
        if self.value is None:
            return self.kind.value
        return f"{self.kind.value}({self.value:.9g})"


def planes_equal(p: Plane, q: Plane, eps: float = DEFAULT_EPS) -> bool:
    tol = eps * max(1.0, float(np.linalg.norm(p.normal)), float(np.linalg.norm(q.normal)))
    return bool(
        np.max(np.abs(p.normal - q.normal)) <= tol
        or np.max(np.abs(p.normal + q.normal)) <= tol
    )


def plane_relation(p: Plane, q: Plane, eps: float = DEFAULT_EPS) -> PlaneRelation:
    if planes_equal(p, q, eps):
        return PlaneRelation(RelationKind.EQUAL)
    c = inner(p.normal, q.normal)
    if abs(c) < 1.0 - eps:
        return PlaneRelation(RelationKind.INTERSECTING, math.acos(-c))
    if abs(c) <= 1.0 + eps:
        return PlaneRelation(RelationKind.PARALLEL)
    return PlaneRelation(RelationKind.ULTRAPARALLEL, math.acosh(abs(c)))


def random_motion(planes: Sequence[Plane], length: int, rng: np.random.Generator) -> Tuple[Motion, Tuple[int, ...]]:
    """Compose `length` random reflections chosen from `planes`"""
    word = tuple(int(i) for i in rng.integers(0, len(planes), size=length))
    m = np.eye(4)
    for i in word:
        m = m @ reflection(planes[i]).m
    return Motion(m), word
