from .mink import (
    Motion,
    Plane,
    PlaneRelation,
    PointClass,
    RelationKind,
    apply,
    apply_plane,
    compose,
    inner,
    plane_relation,
    point_class,
    reflection,
)
from .tetgen import (
    Edge,
    GeneralizedTetrahedron,
    TetSpec,
    Vertex,
    VertexClass,
    classify_vertex,
    exists_hyperbolic,
    gram_from_spec,
    realize,
    realize_spec,
    symmetry_orbit,
)
from .develop import (
    DevelopmentState,
    EdgeRef,
    Tile,
    coplanar_edges,
    develop,
    develop_around_edge,
    side_planes,
)

__all__ = [
    'Motion',
    'Plane',
    'PlaneRelation',
    'PointClass',
    'RelationKind',
    'apply',
    'apply_plane',
    'compose',
    'inner',
    'plane_relation',
    'point_class',
    'reflection',
    'Edge',
    'GeneralizedTetrahedron',
    'TetSpec',
    'Vertex',
    'VertexClass',
    'classify_vertex',
    'exists_hyperbolic',
    'gram_from_spec',
    'realize',
    'realize_spec',
    'symmetry_orbit',
    'DevelopmentState',
    'EdgeRef',
    'Tile',
    'coplanar_edges',
    'develop',
    'develop_around_edge',
    'side_planes',
]
