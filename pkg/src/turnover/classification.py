"""
Expected turnover types for a tetrahedron and the verdict of a search
against them.

Proven items (1)-(3) need all four vertices non-finite and predict a single
maximal turnover type. The conjectural items (4)-(14) list turnovers that
should be present. An expected type counts as present when it was found or
when the inclusion table places it below a found type, the chain being kept
as its provenance. Whatever is still absent is recorded as conjecture data
(inconclusive), since a search only certifies absence up to its depth.
Extra finds are never a mismatch. Every pattern is matched against the
whole 24-element isometry orbit.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

from ..geometry.tetgen import TetSpec, is_all_non_finite, realize_spec, symmetry_orbit
from .lattice import Chain, TriangleType, is_subgroup
from .search import SearchConfig, TurnoverWitness, found_types, search

logger = logging.getLogger(__name__)

DEPTH_LIMITED = "depth-limited"
CONJECTURE_DATA = "conjecture-data"


class ExpectationKind(Enum):
    ITEM = "item"
    CONJECTURAL = "conjectural"
    NONE_EXPECTED = "none_expected"
    OUT_OF_SCOPE = "out_of_scope"


class Verdict(Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Expectation:
    kind: ExpectationKind
    types: FrozenSet[TriangleType] = frozenset()
    items: Tuple[int, ...] = ()
    matched: Optional[TetSpec] = None

    def describe(self) -> str:
        types = ", ".join(str(t) for t in sorted(self.types))
        if self.kind is ExpectationKind.ITEM:
            return f"item ({self.items[0]}) via {self.matched}: {types}"
        if self.kind is ExpectationKind.CONJECTURAL:
            items = ", ".join(f"({i})" for i in self.items)
            return f"conjectural items {items}: {types}"
        if self.kind is ExpectationKind.NONE_EXPECTED:
            return "no turnover expected"
        return "outside the proven classification"


@dataclass(frozen=True)
class CreditedType:
    """An expected type present as a finite-index subgroup of a found type"""
    type: TriangleType
    via: TriangleType
    chain: Chain

    def describe(self) -> str:
        return f"{self.type} < {self.via} (index {self.chain.index})"


class Judgement(NamedTuple):
    verdict: Verdict
    reason: Optional[str] = None
    missing: Tuple[TriangleType, ...] = ()
    credited: Tuple[CreditedType, ...] = ()


@dataclass
class ClassificationReport:
    spec: TetSpec
    depth: int
    expected: Expectation
    found: List[TurnoverWitness] = field(default_factory=list)
    verdict: Verdict = Verdict.INCONCLUSIVE
    reason: Optional[str] = None
    missing: Tuple[TriangleType, ...] = ()
    credited: Tuple[CreditedType, ...] = ()

    @property
    def types(self) -> List[TriangleType]:
        return found_types(self.found)

    def provenance(self, credit: CreditedType) -> Optional[TurnoverWitness]:
        """First witness of the found type a credited subgroup comes from"""
        return next((w for w in self.found if w.type == credit.via), None)


def _types(*entries: Tuple[int, int, int]) -> FrozenSet[TriangleType]:
    candidates = (TriangleType.of(*e) for e in entries)
    return frozenset(t for t in candidates if t.is_hyperbolic())


# -- proven items -----------------------------------------------------------

def item_1(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.n, t.r) == (2, 2, 3) and t.q >= 3 and t.m >= 6 and t.p >= 6:
        return _types((t.q, t.m, t.p))
    return None


def item_2(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.n, t.p) == (2, 2, 3) and t.q >= 6 and t.m >= 3 and t.r >= 6:
        return _types((t.q, t.m, t.r))
    return None


def item_3(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.q, t.r) == (3, 2, 2) and t.m >= 6 and t.n >= 3 and t.p >= 6:
        return _types((t.m, t.n, t.p))
    return None


# -- conjectural items ------------------------------------------------------

def _extras_m4(p: int) -> List[Tuple[int, int, int]]:
    """Turnovers accompanying (2,4,p): (2,p,p), (4,4,5) when p=5, (p/2,p,p) when p is even"""
    extras = [(2, 4, p), (2, p, p)]
    if p == 5:
        extras.append((4, 4, 5))
    if p % 2 == 0:
        extras.append((p // 2, p, p))
    return extras


def item_4(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.n, t.r) != (2, 2, 3):
        return None
    q, m, p = t.q, t.m, t.p
    if q == 2 and m == 4 and p >= 5:
        return _types(*_extras_m4(p))
    if q == 2 and p == 4 and m >= 5:
        return _types(*_extras_m4(m))
    if q == 2 and m >= 5 and p >= 5:
        found = [(2, m, p)]
        if p % 2 == 0:
            found.append((m, m, p // 2))
        if m % 2 == 0:
            found.append((m // 2, p, p))
        return _types(*found)
    if min(q, m, p) > 2 and max(q, m, p) > 3:
        found = [(q, m, p)]
        values = sorted((q, m, p))
        if values[0] == values[1] == 3:
            found.append((values[2],) * 3)
        return _types(*found)
    return None


def item_5(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.m, t.q, t.n, t.r) == (3, 2, 2, 2, 3) and t.p >= 5:
        return _types((2, t.p, t.p))
    return None


def item_6(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.q, t.n, t.r) == (3, 2, 2, 3) and t.m >= 3 and t.p >= 4:
        return _types((t.m, t.p, t.p))
    return None


def item_7(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.q, t.n, t.p, t.r) == (3, 3, 2, 3, 2) and t.m >= 4:
        return _types((3, t.m, t.m))
    return None


def item_8(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.m, t.n, t.p, t.r) == (4, 3, 2, 2, 2) and t.q >= 4:
        return _types((t.q, t.q, 3))
    return None


def item_9(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.m, t.q, t.p) != (2, 2, 4, 3):
        return None
    n, r = t.n, t.r
    if n == 2 and r >= 5:
        found = _extras_m4(r)
        if r == 5:
            found += [(3, 3, 5), (3, 5, 5), (5, 5, 5)]
        return _types(*found)
    if n == 3 and r >= 3:
        return _types((4, 4, r))
    return None


def item_10(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.m, t.n, t.p) == (2, 3, 2, 3) and t.q >= 3 and t.r in (4, 5):
        return _types((t.q, t.r, t.r))
    return None


def item_11(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.m, t.n, t.p, t.r) == (2, 2, 3, 5, 2) and t.q >= 3:
        return _types((t.q, t.q, 5))
    return None


def item_12(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if t.labels() == (2, 2, 5, 2, 3, 5):
        return _types((3, 5, 5))
    return None


def item_13(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.m, t.q, t.n, t.r) == (2, 2, 3, 3, 2) and t.p in (5, 6):
        p = t.p
        found = [(3, p, p), (p, p, p), (2, p, p)]
        if p == 5:
            found.append((3, 3, 5))
        return _types(*found)
    return None


def item_14(t: TetSpec) -> Optional[FrozenSet[TriangleType]]:
    if (t.l, t.m, t.q, t.n, t.r) != (2, 2, 3, 2, 3):
        return None
    if t.p == 5:
        return _types((2, 5, 5), (3, 3, 5), (5, 5, 5))
    if t.p == 6:
        return _types((3, 6, 6))
    return None


Pattern = Callable[[TetSpec], Optional[FrozenSet[TriangleType]]]

ITEM_PATTERNS: Dict[int, Pattern] = {1: item_1, 2: item_2, 3: item_3}

CONJECTURAL_PATTERNS: Dict[int, Pattern] = {
    4: item_4,
    5: item_5,
    6: item_6,
    7: item_7,
    8: item_8,
    9: item_9,
    10: item_10,
    11: item_11,
    12: item_12,
    13: item_13,
    14: item_14,
}


def matching_items(spec: TetSpec, patterns: Dict[int, Pattern]) -> List[Tuple[int, TetSpec, FrozenSet[TriangleType]]]:
    """(item, orbit member, types) for every pattern hit over the orbit, in canonical order"""
    hits = []
    for member in sorted(symmetry_orbit(spec)):
        for number, pattern in patterns.items():
            types = pattern(member)
            if types:
                hits.append((number, member, types))
    return sorted(hits, key=lambda hit: (hit[0], hit[1]))


def expectation_for(spec: TetSpec) -> Expectation:
    non_finite = is_all_non_finite(spec)
    if non_finite:
        proven = matching_items(spec, ITEM_PATTERNS)
        if proven:
            number, member, types = proven[0]
            return Expectation(ExpectationKind.ITEM, types, (number,), member)

    conjectural = matching_items(spec, CONJECTURAL_PATTERNS)
    if conjectural:
        types = frozenset().union(*(hit[2] for hit in conjectural))
        items = tuple(sorted({hit[0] for hit in conjectural}))
        return Expectation(ExpectationKind.CONJECTURAL, types, items, conjectural[0][1])

    if non_finite:
        return Expectation(ExpectationKind.NONE_EXPECTED)
    return Expectation(ExpectationKind.OUT_OF_SCOPE)


def maximal_types(types: Iterable[TriangleType], cmax: int) -> FrozenSet[TriangleType]:
    """Found types that are not a proper subgroup of another found type"""
    types = set(types)
    return frozenset(
        t for t in types
        if not any(other != t and is_subgroup(t, other, cmax) is not None for other in types)
    )


def credit_subgroups(
    wanted: Iterable[TriangleType], found: Iterable[TriangleType], cmax: int
) -> Tuple[CreditedType, ...]:
    """
    Wanted types that were not found themselves but sit below a found type
    in the inclusion table. A finite-index subgroup of a turnover group is
    again an immersed turnover, covering the found one.
    """
    found = sorted(set(found))
    credited = []
    for t in sorted(set(wanted) - set(found)):
        for via in found:
            chain = is_subgroup(t, via, cmax)
            if chain is not None:
                credited.append(CreditedType(t, via, chain))
                break
    return tuple(credited)


def judge(expected: Expectation, types: List[TriangleType], cmax: int) -> Judgement:
    found = set(types)
    if expected.kind is ExpectationKind.ITEM:
        if not found:
            return Judgement(Verdict.MISMATCH, "no turnover found", tuple(sorted(expected.types)))
        maximal = maximal_types(found, cmax)
        if maximal == expected.types:
            return Judgement(Verdict.MATCH)
        return Judgement(
            Verdict.MISMATCH,
            f"maximal types {sorted(str(t) for t in maximal)} differ from prediction",
            tuple(sorted(expected.types - maximal)),
        )
    if expected.kind is ExpectationKind.CONJECTURAL:
        credited = credit_subgroups(expected.types, found, cmax)
        present = found | {c.type for c in credited}
        missing = tuple(sorted(expected.types - present))
        if missing:
            # a conjectured turnover absent at this depth is recorded, not refuted
            return Judgement(Verdict.INCONCLUSIVE, CONJECTURE_DATA, missing, credited)
        return Judgement(Verdict.MATCH, None, (), credited)
    if expected.kind is ExpectationKind.NONE_EXPECTED:
        if found:
            return Judgement(Verdict.MISMATCH, f"unexpected {', '.join(str(t) for t in sorted(found))}")
        return Judgement(Verdict.INCONCLUSIVE, DEPTH_LIMITED)
    return Judgement(Verdict.INCONCLUSIVE, "outside the proven classification")


def classify_spec(spec: TetSpec, cfg: SearchConfig) -> ClassificationReport:
    """
    Realize, search to cfg.depth and compare against the expectation.

    An empty result never certifies absence beyond the searched depth, so
    negative expectations are at best inconclusive.

    Raises:
        NotRealizableError: the spec has no hyperbolic realization
        BlowUpError: the development exceeded cfg.tile_cap
    """
    expected = expectation_for(spec)
    tet = realize_spec(spec, cfg.eps)
    witnesses = search(tet, cfg)
    judgement = judge(expected, found_types(witnesses), cfg.cmax)
    report = ClassificationReport(
        spec=spec,
        depth=cfg.depth,
        expected=expected,
        found=witnesses,
        verdict=judgement.verdict,
        reason=judgement.reason,
        missing=judgement.missing,
        credited=judgement.credited,
    )
    for credit in report.credited:
        logger.debug(f"{spec}: {credit.describe()} via rows {[step.row for step in credit.chain.steps]}")
    if report.reason == CONJECTURE_DATA:
        logger.warning(
            f"{spec}: conjectured {', '.join(str(t) for t in report.missing)} not found at depth {cfg.depth}",
            extra={'spec': spec.as_text(), 'verdict': report.verdict.value, 'depth': cfg.depth},
        )
    log = logger.warning if report.verdict is Verdict.MISMATCH else logger.info
    log(
        f"{spec}: {report.verdict.value} ({expected.describe()})" + (f", {report.reason}" if report.reason else ""),
        extra={'spec': spec.as_text(), 'verdict': report.verdict.value, 'depth': cfg.depth},
    )
    return report
