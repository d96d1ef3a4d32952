from .lattice import (
    TABLE,
    Chain,
    Inclusion,
    TriangleType,
    check_euler_indices,
    direct_inclusions,
    format_table,
    is_maximal,
    is_subgroup,
    supergroups,
)
from .search import (
    SearchConfig,
    TurnoverType,
    TurnoverWitness,
    angle_as_submultiple,
    common_perpendicular,
    filter_vertex_parallel,
)
from .search import search as search_turnovers
from .classification import (
    CONJECTURE_DATA,
    ClassificationReport,
    CreditedType,
    Expectation,
    ExpectationKind,
    Judgement,
    Verdict,
    classify_spec,
    credit_subgroups,
    expectation_for,
)

__all__ = [
    'TABLE',
    'Chain',
    'Inclusion',
    'TriangleType',
    'check_euler_indices',
    'direct_inclusions',
    'format_table',
    'is_maximal',
    'is_subgroup',
    'supergroups',
    'SearchConfig',
    'TurnoverType',
    'TurnoverWitness',
    'angle_as_submultiple',
    'common_perpendicular',
    'filter_vertex_parallel',
    'search_turnovers',
    'CONJECTURE_DATA',
    'ClassificationReport',
    'CreditedType',
    'Expectation',
    'ExpectationKind',
    'Judgement',
    'Verdict',
    'classify_spec',
    'credit_subgroups',
    'expectation_for',
]
