from .marked_graph import (
    MarkedEdge,
    MarkedGraph,
    NotValidatedError,
    PolyhedronParseError,
    Violation,
    ViolationRule,
    VertexViolationError,
    dumps_polyhedron,
    load_polyhedron,
    save_polyhedron,
    validate,
    vertex_class_combinatorial,
)
from .smallness import (
    Circuit,
    CircuitKind,
    CircuitReport,
    Smallness,
    canonical_form,
    collapse_truncations,
    is_small,
    turnover_circuits,
)

__all__ = [
    'MarkedEdge',
    'MarkedGraph',
    'NotValidatedError',
    'PolyhedronParseError',
    'Violation',
    'ViolationRule',
    'VertexViolationError',
    'dumps_polyhedron',
    'load_polyhedron',
    'save_polyhedron',
    'validate',
    'vertex_class_combinatorial',
    'Circuit',
    'CircuitKind',
    'CircuitReport',
    'Smallness',
    'canonical_form',
    'collapse_truncations',
    'is_small',
    'turnover_circuits',
]
