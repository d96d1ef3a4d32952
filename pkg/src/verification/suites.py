"""
Acceptance suites run by `verify`.

items        proven items (1)-(3) on sample specs, plus isometry-orbit invariance
conjectural  presence of the conjectured turnovers on instantiated specs
negative     all-non-finite specs outside every pattern find nothing
invariants   kernel identities, realization scan, disjointness observations,
             inclusion-table fidelity and the compact census
"""
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from ..config.settings import Settings
from ..geometry.develop import BlowUpError, develop, observation_report
from ..geometry.mink import (
    Plane,
    apply_plane,
    inner,
    plane_relation,
    random_motion,
    reflection,
)
from ..geometry.tetgen import (
    IllConditionedError,
    NotRealizableError,
    TetSpec,
    compact_tetrahedra,
    enumerate_specs,
    is_all_non_finite,
    is_realizable,
    realize_spec,
    symmetry_orbit,
)
from ..turnover.classification import (
    ExpectationKind,
    Verdict,
    classify_spec,
    expectation_for,
)
from ..turnover.lattice import (
    TABLE,
    TABLE_TEXT,
    TriangleType,
    check_euler_indices,
    format_table,
    is_maximal,
    is_subgroup,
)
from ..turnover.search import found_types, search
from ..utils import metrics
from ..utils.metrics import MetricNames
from ..utils.structured_logging import ContextLogger

logger = ContextLogger(__name__)

SUITES = ("items", "conjectural", "negative", "invariants")

ITEM_SAMPLES = ("2,6,3;2,6,3", "2,7,3;2,8,3", "2,6,4;2,6,3", "2,3,6;2,3,6", "3,6,2;3,6,2")

CONJECTURAL_SAMPLES = (
    "4,3,4;2,2,2",
    "3,3,2;2,4,3",
    "2,2,5;2,3,5",
    "3,4,3;2,3,2",
    "2,2,3;3,5,2",
    "2,3,3;2,3,4",
)

NEGATIVE_SAMPLES = ("2,4,4;2,4,4", "4,4,4;4,4,4", "3,3,3;3,3,3", "3,3,3;4,4,4", "2,5,5;2,5,5", "3,4,4;3,4,4")

COMPACT_CENSUS_SIZE = 9
KERNEL_CASES = 10_000
KERNEL_TOLERANCE = 1e-8
REALIZATION_TOLERANCE = 1e-9


@dataclass
class CaseResult:
    name: str
    passed: bool
    verdict: str
    detail: str = ""
    expected: List[str] = field(default_factory=list)
    found: List[str] = field(default_factory=list)
    duration_ms: float = 0.0


@dataclass
class SuiteResult:
    suite: str
    depth: Optional[int]
    cases: List[CaseResult] = field(default_factory=list)

    @property
    def failures(self) -> List[CaseResult]:
        return [case for case in self.cases if not case.passed]

    @property
    def passed(self) -> bool:
        return not self.failures


def _timed(name: str, check: Callable[[], CaseResult]) -> CaseResult:
    with metrics.timer_context(MetricNames.SUITE_CASE) as timer:
        try:
            case = check()
        except BlowUpError as e:
            case = CaseResult(name, False, "blow_up", str(e))
        except (NotRealizableError, IllConditionedError) as e:
            case = CaseResult(name, False, "error", str(e))
    case.duration_ms = round(timer.duration_ms, 3)
    metrics.increment(MetricNames.SUITE_CASES)
    if not case.passed:
        metrics.increment(MetricNames.SUITE_FAILURES)
        logger.warning(f"Case {name} failed: {case.verdict} {case.detail}", case=name)
    return case


def _classification_case(spec: TetSpec, settings: Settings, depth: int) -> CaseResult:
    report = classify_spec(spec, settings.search_config(depth))
    detail = report.expected.describe()
    if report.credited:
        detail += "; credited " + ", ".join(c.describe() for c in report.credited)
    if report.missing:
        detail += "; missing " + ", ".join(str(t) for t in report.missing)
    return CaseResult(
        name=str(spec),
        passed=report.verdict is not Verdict.MISMATCH,
        verdict=report.verdict.value if report.reason is None else f"{report.verdict.value}({report.reason})",
        detail=detail,
        expected=[str(t) for t in sorted(report.expected.types)],
        found=[str(t) for t in report.types],
    )


def _orbit_case(spec: TetSpec, settings: Settings, depth: int) -> CaseResult:
    cfg = settings.search_config(depth)
    results: Dict[TetSpec, List[TriangleType]] = {}
    for member in sorted(symmetry_orbit(spec)):
        results[member] = found_types(search(realize_spec(member, cfg.eps), cfg))
    reference = results[spec]
    differing = [str(m) for m, types in results.items() if types != reference]
    return CaseResult(
        name=f"orbit {spec}",
        passed=not differing,
        verdict="invariant" if not differing else "variant",
        detail=f"{len(results)} orbit members" + (f", differing: {', '.join(differing)}" if differing else ""),
        found=[str(t) for t in reference],
    )


def run_items(settings: Settings, exhaustive: bool = False) -> SuiteResult:
    depth = settings.verify_depth
    result = SuiteResult("items", depth)
    specs = [TetSpec.parse(text) for text in ITEM_SAMPLES]
    for spec in specs:
        result.cases.append(_timed(str(spec), lambda: _classification_case(spec, settings, depth)))
    for spec in (specs if exhaustive else specs[:1]):
        result.cases.append(_timed(f"orbit {spec}", lambda: _orbit_case(spec, settings, depth)))
    return result


def run_conjectural(settings: Settings, exhaustive: bool = False) -> SuiteResult:
    depth = settings.conjecture_depth
    result = SuiteResult("conjectural", depth)
    for text in CONJECTURAL_SAMPLES:
        spec = TetSpec.parse(text)
        result.cases.append(_timed(str(spec), lambda: _classification_case(spec, settings, depth)))
    if exhaustive:
        for text in CONJECTURAL_SAMPLES:
            spec = TetSpec.parse(text)
            result.cases.append(_timed(f"orbit {spec}", lambda: _orbit_case(spec, settings, depth)))
    return result


def negative_specs(max_entry: int = 6) -> List[TetSpec]:
    """Realizable all-non-finite orbit representatives matching no item or conjecture"""
    return [
        spec for spec in enumerate_specs(max_entry)
        if is_all_non_finite(spec)
        and is_realizable(spec)
        and expectation_for(spec).kind is ExpectationKind.NONE_EXPECTED
    ]


def run_negative(settings: Settings, exhaustive: bool = False) -> SuiteResult:
    depth = settings.verify_depth
    result = SuiteResult("negative", depth)
    if exhaustive:
        specs = negative_specs()
    else:
        specs = [
            spec for spec in (TetSpec.parse(text) for text in NEGATIVE_SAMPLES)
            if is_realizable(spec) and expectation_for(spec).kind is ExpectationKind.NONE_EXPECTED
        ]
    logger.info(f"Negative suite: {len(specs)} specs at depth {depth}")
    for spec in specs:
        result.cases.append(_timed(str(spec), lambda: _classification_case(spec, settings, depth)))
    return result


def _kernel_case(settings: Settings, cases: int = KERNEL_CASES, seed: int = 7) -> CaseResult:
    rng = np.random.default_rng(seed)
    generators = list(realize_spec(TetSpec(4, 4, 4, 4, 4, 4)).faces)
    worst = 0.0
    failures = 0
    for _ in range(cases):
        p = Plane.from_vector(_random_space_like(rng))
        q = Plane.from_vector(_random_space_like(rng))
        r = reflection(p)
        involution = float(np.max(np.abs(r.m @ r.m - np.eye(4))))
        motion, _ = random_motion(generators, int(rng.integers(1, 6)), rng)
        scale = max(1.0, float(np.max(np.abs(motion.m)))) ** 2
        form = float(np.max(np.abs(motion.m.T @ np.diag([1.0, 1.0, 1.0, -1.0]) @ motion.m - np.diag([1.0, 1.0, 1.0, -1.0])))) / scale
        before = plane_relation(p, q)
        after = plane_relation(apply_plane(motion, p), apply_plane(motion, q), settings.eps * scale)
        worst = max(worst, involution, form)
        if involution > KERNEL_TOLERANCE or form > KERNEL_TOLERANCE or before.kind is not after.kind:
            failures += 1
    return CaseResult(
        name="kernel identities",
        passed=failures == 0,
        verdict="pass" if failures == 0 else "fail",
        detail=f"{cases} random cases, {failures} failures, worst residual {worst:.2e}",
    )


def _random_space_like(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.normal(size=4)
        if inner(v, v) > 0.1:
            return v


def _realization_case(settings: Settings) -> CaseResult:
    checked = 0
    failures: List[str] = []
    for spec in enumerate_specs(settings.realization_max_entry):
        if not is_realizable(spec, settings.eps):
            continue
        checked += 1
        try:
            tet = realize_spec(spec, settings.eps)
        except (NotRealizableError, IllConditionedError) as e:
            failures.append(f"{spec}: {e}")
            continue
        if tet.residual >= REALIZATION_TOLERANCE:
            failures.append(f"{spec}: residual {tet.residual:.2e}")
        for v in tet.vertices:
            if v.truncation is None:
                continue
            for face, plane in enumerate(tet.faces):
                if face != v.name.face and abs(inner(v.truncation.normal, plane.normal)) > REALIZATION_TOLERANCE * 10:
                    failures.append(f"{spec}: truncation of {v.name.name} not orthogonal to face {face}")
    return CaseResult(
        name=f"realization scan <= {settings.realization_max_entry}",
        passed=not failures,
        verdict="pass" if not failures else "fail",
        detail=f"{checked} realizable specs" + (f"; first failures: {failures[:3]}" if failures else ""),
    )


def _observation_case(spec: TetSpec, settings: Settings) -> CaseResult:
    state = develop(realize_spec(spec, settings.eps), settings.invariants_depth, settings.tile_cap)
    report = observation_report(state, settings.eps)
    return CaseResult(
        name=f"observations {spec}",
        passed=report.passed,
        verdict="pass" if report.passed else "fail",
        detail=(
            f"truncations {report.truncation_violations}/{report.truncation_pairs}, "
            f"edges {report.edge_violations}/{report.edge_pairs}, "
            f"face-truncation {report.face_truncation_violations}/{report.face_truncation_pairs}"
        ),
    )


def _table_case(settings: Settings) -> CaseResult:
    problems = []
    if format_table(TABLE) != TABLE_TEXT:
        problems.append("table does not round-trip")
    euler = check_euler_indices(settings.cmax)
    if euler:
        problems.append(f"{len(euler)} Euler index failures, first: {euler[0]}")
    chain = is_subgroup(TriangleType(7, 7, 7), TriangleType(2, 3, 7), settings.cmax)
    if chain is None or chain.index != 24 or chain.normal is not False:
        problems.append(f"(7,7,7) < (2,3,7) gave {chain}")
    if not is_maximal(TriangleType(2, 3, 7), settings.cmax):
        problems.append("(2,3,7) is not reported maximal")
    return CaseResult(
        name="inclusion table",
        passed=not problems,
        verdict="pass" if not problems else "fail",
        detail="; ".join(problems) or f"{len(TABLE)} rows, Euler indices exact up to {settings.cmax}",
    )


def _census_case(settings: Settings) -> CaseResult:
    found = compact_tetrahedra(6, settings.eps)
    return CaseResult(
        name="compact census",
        passed=len(found) == COMPACT_CENSUS_SIZE,
        verdict="pass" if len(found) == COMPACT_CENSUS_SIZE else "fail",
        detail=f"{len(found)} compact tetrahedra, expected {COMPACT_CENSUS_SIZE}",
        found=[str(spec) for spec in found],
    )


def run_invariants(settings: Settings, exhaustive: bool = False) -> SuiteResult:
    result = SuiteResult("invariants", settings.invariants_depth)
    result.cases.append(_timed("kernel identities", lambda: _kernel_case(settings)))
    result.cases.append(_timed("realization scan", lambda: _realization_case(settings)))
    if exhaustive:
        specs = [s for s in enumerate_specs(6) if is_all_non_finite(s) and is_realizable(s, settings.eps)]
    else:
        specs = [TetSpec.parse(text) for text in ITEM_SAMPLES + NEGATIVE_SAMPLES]
        specs = [s for s in specs if is_all_non_finite(s) and is_realizable(s, settings.eps)]
    for spec in specs:
        result.cases.append(_timed(f"observations {spec}", lambda: _observation_case(spec, settings)))
    result.cases.append(_timed("inclusion table", lambda: _table_case(settings)))
    result.cases.append(_timed("compact census", lambda: _census_case(settings)))
    return result


RUNNERS: Dict[str, Callable[[Settings, bool], SuiteResult]] = {
    "items": run_items,
    "conjectural": run_conjectural,
    "negative": run_negative,
    "invariants": run_invariants,
}


def run_suite(name: str, settings: Settings, exhaustive: bool = False) -> SuiteResult:
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}, expected one of {SUITES}")
    suite_logger = logger.bind(suite=name)
    started = time.time()
    result = RUNNERS[name](settings, exhaustive)
    duration_ms = (time.time() - started) * 1000
    suite_logger.info(
        f"Suite {name}: {len(result.cases)} cases, {len(result.failures)} failures "
        f"in {duration_ms / 1000:.1f}s",
        duration_ms=round(duration_ms, 3),
    )
    return result
