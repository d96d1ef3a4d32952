"""
Triangle-group inclusions: the finite list of (supergroup, subgroup) pairs.

Rows are stored with parametric entries; a query instantiates the
"Subgroup" pattern against a concrete triangle type and reads off the
supergroup, the index and normality.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

DEFAULT_CMAX = 100


@dataclass(frozen=True, order=True)
class TriangleType:
    a: int
    b: int
    c: int

    def __post_init__(self):
        entries = (self.a, self.b, self.c)
        if any(not isinstance(x, int) or x < 2 for x in entries):
            raise ValueError(f"triangle entries must be integers >= 2, got {entries}")
        if not (self.a <= self.b <= self.c):
            raise ValueError(f"triangle entries must be sorted, got {entries}; use TriangleType.of")

    @classmethod
    def of(cls, *entries: int) -> 'TriangleType':
        if len(entries) == 1:
            entries = tuple(entries[0])
        a, b, c = sorted(int(x) for x in entries)
        return cls(a, b, c)

    @classmethod
    def parse(cls, text: str) -> 'TriangleType':
        parts = text.strip().strip("()").split(",")
        if len(parts) != 3:
            raise ValueError(f"cannot parse triangle type {text!r}, expected 'a,b,c'")
        return cls.of(*(int(p) for p in parts))

    def entries(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def reciprocal_sum(self) -> Fraction:
        return Fraction(1, self.a) + Fraction(1, self.b) + Fraction(1, self.c)

    def euler_characteristic(self) -> Fraction:
        return self.reciprocal_sum() - 1

    def is_hyperbolic(self) -> bool:
        return self.reciprocal_sum() < 1

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


# an entry is (coefficient, variable); variable None means a constant
Entry = Tuple[int, Optional[str]]


def _render_entry(entry: Entry) -> str:
    coef, var = entry
    if var is None:
        return str(coef)
    return var if coef == 1 else f"{coef}{var}"


def _parse_entry(text: str) -> Entry:
    text = text.strip()
    if text.isdigit():
        return int(text), None
    coef, var = text[:-1], text[-1]
    return (int(coef) if coef else 1), var


@dataclass(frozen=True)
class InclusionRow:
    number: int
    super_pattern: Tuple[Entry, Entry, Entry]
    sub_pattern: Tuple[Entry, Entry, Entry]
    index: int
    normal: bool

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(sorted({v for _, v in self.sub_pattern if v is not None}))

    def render(self) -> str:
        sup = ",".join(_render_entry(e) for e in self.super_pattern)
        sub = ",".join(_render_entry(e) for e in self.sub_pattern)
        return f"({sup}) | ({sub}) | {self.index} | {'Yes' if self.normal else 'No'}"

    @classmethod
    def parse(cls, number: int, line: str) -> 'InclusionRow':
        sup, sub, index, normal = (part.strip() for part in line.split("|"))
        return cls(
            number=number,
            super_pattern=tuple(_parse_entry(e) for e in sup.strip("()").split(",")),
            sub_pattern=tuple(_parse_entry(e) for e in sub.strip("()").split(",")),
            index=int(index),
            normal=normal == "Yes",
        )

    def instantiate(self, params: Dict[str, int]) -> Tuple[TriangleType, TriangleType]:
        def value(entry: Entry) -> int:
            coef, var = entry
            return coef if var is None else coef * params[var]
        return (
            TriangleType.of(*(value(e) for e in self.super_pattern)),
            TriangleType.of(*(value(e) for e in self.sub_pattern)),
        )

    def match_sub(self, t: TriangleType) -> List[Dict[str, int]]:
        """All parameter assignments (each >= 2) making the Subgroup column equal t"""
        solutions = []
        for values in set(itertools.permutations(t.entries())):
            params: Dict[str, int] = {}
            ok = True
            for (coef, var), value in zip(self.sub_pattern, values):
                if var is None:
                    ok = coef == value
                elif value % coef != 0 or value // coef < 2:
                    ok = False
                else:
                    solved = value // coef
                    ok = params.setdefault(var, solved) == solved
                if not ok:
                    break
            if ok and params not in solutions:
                solutions.append(params)
        return solutions


TABLE_TEXT = """\
(3,3,t) | (t,t,t) | 3 | Yes
(2,3,2t) | (t,t,t) | 6 | Yes
(2,s,2t) | (s,s,t) | 2 | Yes
(2,3,7) | (7,7,7) | 24 | No
(2,3,7) | (2,7,7) | 9 | No
(2,3,7) | (3,3,7) | 8 | No
(2,3,8) | (4,8,8) | 12 | No
(2,3,8) | (3,8,8) | 10 | No
(2,3,9) | (9,9,9) | 12 | No
(2,4,5) | (4,4,5) | 6 | No
(2,3,4t) | (t,4t,4t) | 6 | No
(2,4,2t) | (t,2t,2t) | 4 | No
(2,3,3t) | (3,t,3t) | 4 | No
(2,3,2t) | (2,t,2t) | 3 | No
"""


def parse_table(text: str) -> Tuple[InclusionRow, ...]:
    lines = [line for line in text.splitlines() if line.strip()]
    return tuple(InclusionRow.parse(number, line) for number, line in enumerate(lines, start=1))


def format_table(rows: Tuple[InclusionRow, ...]) -> str:
    return "".join(row.render() + "\n" for row in rows)


TABLE: Tuple[InclusionRow, ...] = parse_table(TABLE_TEXT)


@dataclass(frozen=True)
class Inclusion:
    """A direct inclusion sub < super coming from one instantiated row"""
    sub: TriangleType
    super: TriangleType
    index: int
    normal: bool
    row: int
    params: Tuple[Tuple[str, int], ...]


@dataclass(frozen=True)
class Chain:
    steps: Tuple[Inclusion, ...]
    index: int
    normal: Optional[bool]

    def __len__(self) -> int:
        return len(self.steps)


def direct_inclusions(t: TriangleType, cmax: int = DEFAULT_CMAX) -> List[Inclusion]:
    found: Dict[Tuple[TriangleType, int], Inclusion] = {}
    for row in TABLE:
        for params in row.match_sub(t):
            if any(value > cmax for value in params.values()):
                continue
            sup, sub = row.instantiate(params)
            if sub != t:
                continue
            key = (sup, row.number)
            if key not in found:
                found[key] = Inclusion(t, sup, row.index, row.normal, row.number, tuple(sorted(params.items())))
    return sorted(found.values(), key=lambda inc: (inc.index, inc.super, inc.row))


def is_subgroup(sub: TriangleType, sup: TriangleType, cmax: int = DEFAULT_CMAX) -> Optional[Chain]:
    """
    Shortest chain of direct inclusions from `sub` up to `sup`.

    The total index is the product of the row indices. Normality is only
    known for chains of length <= 1 and is None otherwise.
    """
    if sub == sup:
        return Chain((), 1, True)

    parents: Dict[TriangleType, Optional[Inclusion]] = {sub: None}
    queue = deque([sub])
    while queue:
        current = queue.popleft()
        for inclusion in direct_inclusions(current, cmax):
            if inclusion.super in parents:
                continue
            parents[inclusion.super] = inclusion
            if inclusion.super == sup:
                steps = []
                node = sup
                while parents[node] is not None:
                    steps.append(parents[node])
                    node = parents[node].sub
                steps.reverse()
                index = 1
                for step in steps:
                    index *= step.index
                normal = steps[0].normal if len(steps) == 1 else None
                return Chain(tuple(steps), index, normal)
            queue.append(inclusion.super)
    return None


def is_maximal(t: TriangleType, cmax: int = DEFAULT_CMAX) -> bool:
    return not direct_inclusions(t, cmax)


def supergroups(t: TriangleType, cmax: int = DEFAULT_CMAX) -> List[TriangleType]:
    """Every triangle type reachable upward from t, nearest first"""
    seen = {t}
    order = []
    queue = deque([t])
    while queue:
        current = queue.popleft()
        for inclusion in direct_inclusions(current, cmax):
            if inclusion.super not in seen:
                seen.add(inclusion.super)
                order.append(inclusion.super)
                queue.append(inclusion.super)
    return order


def check_euler_indices(cmax: int = DEFAULT_CMAX) -> List[str]:
    """
    Verify index = chi(sub) / chi(super) for every row instantiation with
    parameters up to cmax (Euclidean instantiations, chi = 0, are skipped).
    Returns the failures as messages.
    """
    failures = []
    for row in TABLE:
        variables = row.variables
        for values in itertools.product(range(2, cmax + 1), repeat=len(variables)):
            sup, sub = row.instantiate(dict(zip(variables, values)))
            chi_sup, chi_sub = sup.euler_characteristic(), sub.euler_characteristic()
            if chi_sup == 0 or chi_sub == 0:
                continue
            if chi_sub / chi_sup != row.index:
                failures.append(
                    f"row {row.number} at {dict(zip(variables, values))}: "
                    f"chi{sub}/chi{sup} = {chi_sub / chi_sup}, table index {row.index}"
                )
    if failures:
        logger.warning(f"Euler characteristic check found {len(failures)} inconsistent instantiations")
    return failures
