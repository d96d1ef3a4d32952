"""
Command-line front end.

    turnover realize 2,6,3;2,6,3
    turnover search 4,3,4;2,2,2 --depth 8
    turnover verify --suite items
    turnover poly tests/data/prism.json small
    turnover lattice sub 7,7,7 super 2,3,7
    turnover census

Exit codes: 0 success (including depth-limited inconclusive results),
1 unexpected error, 2 bad input, 3 spec not realizable, 4 mismatch or
failed check, 5 development blow-up.
"""
import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from ..combi.marked_graph import (
    NotValidatedError,
    PolyhedronParseError,
    load_polyhedron,
    validate,
)
from ..combi.smallness import Smallness, is_small, turnover_circuits
from ..config.settings import ConfigValidationError, Settings, load_config
from ..geometry.develop import BlowUpError, DepthExceededError
from ..geometry.tetgen import (
    NotRealizableError,
    SpecParseError,
    TetSpec,
    compact_tetrahedra,
    gram_from_spec,
    realize_spec,
)
from ..turnover.classification import CONJECTURE_DATA, Verdict, classify_spec
from ..turnover.lattice import (
    TABLE,
    TriangleType,
    direct_inclusions,
    is_maximal,
    is_subgroup,
    supergroups,
)
from ..turnover.search import InvalidSearchConfigError
from ..utils import metrics
from ..utils.structured_logging import clear_run_id, set_run_id, setup_logging
from ..verification.suites import SUITES, run_suite
from .display import ReportDisplay
from .reports import (
    CaseRecord,
    ChainRecord,
    CircuitRecord,
    ClassificationRecord,
    RecordStream,
    RunManifest,
    ValueRecord,
    ViolationRecord,
    WitnessRecord,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_BAD_INPUT = 2
EXIT_NOT_REALIZABLE = 3
EXIT_MISMATCH = 4
EXIT_BLOW_UP = 5


@dataclass
class CommandContext:
    settings: Settings
    display: ReportDisplay
    stream: RecordStream
    records: bool

    def text(self) -> bool:
        return not self.records


def _common_flags() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="configuration file (YAML or JSON)")
    common.add_argument("--log-level", default=argparse.SUPPRESS, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--format", default=argparse.SUPPRESS, choices=["text", "records"])
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads, 0 = all cores")
    common.add_argument("--depth", type=int, default=argparse.SUPPRESS, help="development depth")
    common.add_argument("--eps", type=float, default=argparse.SUPPRESS, help="geometric tolerance")
    common.add_argument("--cmax", type=int, default=argparse.SUPPRESS, help="largest angle denominator")
    common.add_argument("--metrics", action="store_true", default=argparse.SUPPRESS, help="print collected metrics")
    common.add_argument("--save", action="store_true", default=argparse.SUPPRESS, help="write the record stream to the output directory")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="turnover",
        description="Generalized hyperbolic Coxeter tetrahedra and their immersed turnovers.",
        parents=[common],
    )
    commands = parser.add_subparsers(dest="command", required=True)

    realize = commands.add_parser("realize", parents=[common], help="realize a tetrahedron from its labels")
    realize.add_argument("spec", help='labels "l,m,q;n,p,r"')

    search = commands.add_parser("search", parents=[common], help="search a tetrahedron for immersed turnovers")
    search.add_argument("spec", help='labels "l,m,q;n,p,r"')

    verify = commands.add_parser("verify", parents=[common], help="run an acceptance suite")
    verify.add_argument("--suite", required=True, choices=SUITES)
    verify.add_argument("--exhaustive", action="store_true", help="run the full rather than the sampled suite")

    poly = commands.add_parser("poly", parents=[common], help="check a marked polyhedron file")
    poly.add_argument("path")
    poly.add_argument("action", choices=["validate", "circuits", "small"])

    lattice = commands.add_parser("lattice", parents=[common], help="query triangle-group inclusions")
    lattice.add_argument(
        "query", nargs="+",
        help='"sub A super B", "maximal A", "inclusions A", "supergroups A" or "table"',
    )

    census = commands.add_parser("census", parents=[common], help="list the compact tetrahedra")
    census.add_argument("--max-entry", type=int, default=6)
    return parser


def _settings_for(args: argparse.Namespace) -> Settings:
    settings = load_config(getattr(args, "config", None))
    overrides = {}
    if hasattr(args, "log_level"):
        overrides["log_level"] = args.log_level
    if hasattr(args, "threads"):
        overrides["threads"] = args.threads
    if hasattr(args, "eps"):
        overrides["eps"] = args.eps
    if hasattr(args, "cmax"):
        overrides["cmax"] = args.cmax
    if hasattr(args, "depth"):
        overrides["search_depth"] = args.depth
        overrides["verify_depth"] = args.depth
        overrides["conjecture_depth"] = args.depth
    if not overrides:
        return settings
    return Settings.from_dict({**settings.to_dict(), **overrides})


def cmd_realize(args: argparse.Namespace, ctx: CommandContext) -> int:
    spec = TetSpec.parse(args.spec)
    gram = gram_from_spec(spec)
    ctx.stream.add(ValueRecord(name="gram", value=np.round(gram, 9).tolist()))
    try:
        tet = realize_spec(spec, ctx.settings.eps)
    except NotRealizableError as e:
        ctx.stream.add(ValueRecord(name="exists", value=False))
        if ctx.text():
            ctx.display.print_header(f"Realize {spec}")
            _print_matrix(ctx, "Gram matrix", gram)
            ctx.display.message(f"not realizable: {e}", "error")
        return EXIT_NOT_REALIZABLE

    classes = {v.name.name: v.vertex_class.value for v in tet.vertices}
    truncations = {v.name.name: v.truncation.normal.tolist() for v in tet.vertices if v.truncation is not None}
    ctx.stream.add(ValueRecord(name="exists", value=True))
    ctx.stream.add(ValueRecord(name="vertex_classes", value=classes))
    ctx.stream.add(ValueRecord(name="face_normals", value=np.round(tet.normals, 9).tolist()))
    ctx.stream.add(ValueRecord(name="truncation_planes", value={k: np.round(v, 9).tolist() for k, v in truncations.items()}))
    ctx.stream.add(ValueRecord(name="residual", value=tet.residual))

    if ctx.text():
        ctx.display.print_header(f"Realize {spec}")
        _print_matrix(ctx, "Gram matrix", gram)
        ctx.display.print_section("Existence")
        ctx.display.key_values([("verdict", ctx.display.verdict("exists")), ("residual", f"{tet.residual:.2e}")])
        ctx.display.print_section("Vertices")
        ctx.display.key_values([(name, value) for name, value in classes.items()])
        _print_matrix(ctx, "Face normals (F_A..F_D)", tet.normals)
        ctx.display.print_section("Truncation planes")
        ctx.display.lines([f"{name}: {_vector(np.asarray(n))}" for name, n in truncations.items()])
    return EXIT_OK


def cmd_search(args: argparse.Namespace, ctx: CommandContext) -> int:
    spec = TetSpec.parse(args.spec)
    report = classify_spec(spec, ctx.settings.search_config())

    for witness in report.found:
        ctx.stream.add(WitnessRecord.from_witness(spec.as_text(), witness))
    ctx.stream.add(ClassificationRecord(
        spec=spec.as_text(),
        depth=report.depth,
        expectation=report.expected.kind.value,
        items=list(report.expected.items),
        expected=[list(t.entries()) for t in sorted(report.expected.types)],
        found=[list(t.entries()) for t in report.types],
        verdict=report.verdict.value,
        reason=report.reason,
        missing=[list(t.entries()) for t in report.missing],
        credited=[ChainRecord.from_chain(c.type, c.via, c.chain) for c in report.credited],
    ))

    if ctx.text():
        ctx.display.print_header(f"Turnover search {spec} (depth {report.depth})")
        ctx.display.print_section("Witnesses")
        if report.found:
            ctx.display.table(
                ["type", "edges", "invariant plane", "supergroups"],
                [
                    (str(w.type),
                     " ".join(e.edge.name + str(list(e.word)) for e in (w.e1, w.e2) if e is not None),
                     _vector(w.invariant_plane.canonical().normal),
                     ", ".join(str(t) for t in w.supergroups) or "maximal")
                    for w in report.found
                ],
            )
        else:
            ctx.display.lines([], empty="no turnover found")
        ctx.display.print_section("Classification")
        verdict = report.verdict.value + (f"({report.reason})" if report.reason else "")
        ctx.display.key_values([
            ("expected", report.expected.describe()),
            ("found", ", ".join(str(t) for t in report.types) or "-"),
            ("credited", "; ".join(c.describe() for c in report.credited) or "-"),
            ("missing", ", ".join(str(t) for t in report.missing) or "-"),
            ("verdict", ctx.display.verdict(verdict)),
        ])

    if report.verdict is Verdict.MISMATCH:
        return EXIT_MISMATCH
    if report.reason == CONJECTURE_DATA:
        logger.warning(f"{spec}: conjectured turnovers not found to depth {report.depth}, recorded as conjecture data")
    elif report.verdict is Verdict.INCONCLUSIVE:
        logger.warning(f"{spec}: result is {report.reason}; absence is only certified to depth {report.depth}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, ctx: CommandContext) -> int:
    result = run_suite(args.suite, ctx.settings, args.exhaustive)
    for case in result.cases:
        ctx.stream.add(CaseRecord(
            suite=result.suite,
            name=case.name,
            passed=case.passed,
            verdict=case.verdict,
            detail=case.detail,
            expected=case.expected,
            found=case.found,
        ))
    if ctx.text():
        title = f"Suite {result.suite}" + (f" (depth {result.depth})" if result.depth else "")
        ctx.display.print_header(title)
        ctx.display.table(
            ["case", "verdict", "found", "detail", "ms"],
            [
                (case.name, ctx.display.verdict(case.verdict), ", ".join(case.found) or "-",
                 case.detail, f"{case.duration_ms:.0f}")
                for case in result.cases
            ],
        )
        ctx.display.summary(
            f"Suite {result.suite}",
            len(result.cases) - len(result.failures),
            len(result.failures),
            note="empty results are certified only up to the searched depth",
        )
    if any(case.verdict == "blow_up" for case in result.failures):
        return EXIT_BLOW_UP
    return EXIT_OK if result.passed else EXIT_MISMATCH


def cmd_poly(args: argparse.Namespace, ctx: CommandContext) -> int:
    graph = load_polyhedron(args.path)
    if ctx.text():
        ctx.display.print_header(f"Polyhedron {args.path}: {args.action}")
        ctx.display.key_values([
            ("vertices", graph.vertex_count),
            ("edges", len(graph.edges)),
            ("faces", len(graph.faces)),
        ])

    if args.action == "validate":
        violations = validate(graph)
        for v in violations:
            ctx.stream.add(ViolationRecord.from_violation(v))
        if ctx.text():
            ctx.display.print_section("Violations")
            ctx.display.lines([str(v) for v in violations], empty="none: necessary vertex and face conditions hold")
        return EXIT_OK if not violations else EXIT_MISMATCH

    if args.action == "circuits":
        report = turnover_circuits(graph)
        for circuit in report.circuits:
            ctx.stream.add(CircuitRecord.from_circuit(circuit))
        if ctx.text():
            ctx.display.print_section("3-circuits")
            ctx.display.table(
                ["faces", "edges", "labels", "kind", "vertex parallel"],
                [(c.faces, c.edges, c.labels, c.kind.value, "yes" if c.vertex_parallel else "no") for c in report.circuits],
            )
            ctx.display.key_values([("embedded hyperbolic", len(report.embedded_turnovers))])
        return EXIT_OK

    smallness = is_small(graph)
    ctx.stream.add(ValueRecord(name="smallness", value=smallness.value))
    if ctx.text():
        ctx.display.key_values([("verdict", ctx.display.verdict(smallness.value))])
    return EXIT_MISMATCH if smallness is Smallness.INVALID else EXIT_OK


def _chain_text(chain) -> str:
    steps = " < ".join([str(chain.steps[0].sub)] + [str(step.super) for step in chain.steps]) if chain.steps else "equal"
    normal = {True: "normal", False: "non-normal", None: "normality unknown"}[chain.normal]
    return f"index {chain.index}, {normal}: {steps}"


def cmd_lattice(args: argparse.Namespace, ctx: CommandContext) -> int:
    tokens = [t for token in args.query for t in token.split()]
    cmax = ctx.settings.cmax
    if tokens == ["table"]:
        for row in TABLE:
            ctx.stream.add(ValueRecord(name=f"row {row.number}", value=row.render()))
        if ctx.text():
            ctx.display.print_header("Triangle group inclusions")
            ctx.display.table(
                ["#", "supergroup", "subgroup", "index", "normal"],
                [(row.number, *row.render().split(" | ")) for row in TABLE],
            )
        return EXIT_OK

    if len(tokens) == 4 and tokens[0] == "sub" and tokens[2] == "super":
        sub, sup = TriangleType.parse(tokens[1]), TriangleType.parse(tokens[3])
        chain = is_subgroup(sub, sup, cmax)
        ctx.stream.add(ChainRecord.from_chain(sub, sup, chain))
        if ctx.text():
            ctx.display.print_header(f"{sub} < {sup}?")
            ctx.display.key_values([("result", _chain_text(chain) if chain else "not a subgroup via the table")])
        return EXIT_OK

    if len(tokens) == 2 and tokens[0] in ("maximal", "inclusions", "supergroups"):
        t = TriangleType.parse(tokens[1])
        if tokens[0] == "maximal":
            value = is_maximal(t, cmax)
            ctx.stream.add(ValueRecord(name=f"maximal {t}", value=value))
            if ctx.text():
                ctx.display.key_values([(f"{t} maximal", "yes" if value else "no")])
        elif tokens[0] == "inclusions":
            found = direct_inclusions(t, cmax)
            for inc in found:
                ctx.stream.add(ChainRecord(
                    sub=list(inc.sub.entries()), super=list(inc.super.entries()),
                    index=inc.index, normal=inc.normal, rows=[inc.row],
                ))
            if ctx.text():
                ctx.display.print_header(f"Direct supergroups of {t}")
                ctx.display.table(
                    ["supergroup", "index", "normal", "row"],
                    [(inc.super, inc.index, "Yes" if inc.normal else "No", inc.row) for inc in found],
                )
        else:
            found = supergroups(t, cmax)
            ctx.stream.add(ValueRecord(name=f"supergroups {t}", value=[list(s.entries()) for s in found]))
            if ctx.text():
                ctx.display.print_header(f"All supergroups of {t}")
                ctx.display.lines([str(s) for s in found])
        return EXIT_OK

    raise ValueError(f"cannot parse lattice query {' '.join(tokens)!r}")


def cmd_census(args: argparse.Namespace, ctx: CommandContext) -> int:
    found = compact_tetrahedra(args.max_entry, ctx.settings.eps)
    for spec in found:
        ctx.stream.add(ValueRecord(name="compact", value=spec.as_text()))
    if ctx.text():
        ctx.display.print_header(f"Compact tetrahedra with labels <= {args.max_entry}")
        ctx.display.lines([str(spec) for spec in found])
        ctx.display.key_values([("count", len(found))])
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, CommandContext], int]] = {
    "realize": cmd_realize,
    "search": cmd_search,
    "verify": cmd_verify,
    "poly": cmd_poly,
    "lattice": cmd_lattice,
    "census": cmd_census,
}


def _vector(v) -> str:
    return "(" + ", ".join(f"{x:.6f}" for x in v) + ")"


def _print_matrix(ctx: CommandContext, title: str, m: np.ndarray) -> None:
    ctx.display.print_section(title)
    for row in np.asarray(m):
        print("  " + "  ".join(f"{x: .6f}" for x in row))


def _print_metrics(display: ReportDisplay) -> None:
    stats = metrics.get_metrics()
    display.print_section("Metrics")
    display.key_values(sorted(stats['counters'].items()))
    for name, summary in sorted(stats['histograms'].items()):
        display.key_values([(f"{name} (ms)", f"n={summary['count']} avg={summary['avg']:.1f} max={summary['max']:.1f}")])


def save_records(lines: List[str], directory: str, filename: str) -> Path:
    path = Path(directory) / filename
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = _settings_for(args)
    except (ConfigValidationError, ValueError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT

    setup_logging(
        level=settings.log_level,
        log_file=settings.log_file if settings.enable_structured_logging else None,
        json_format=False,
        colored_console=True,
    )
    run_id = set_run_id()
    show_metrics = getattr(args, "metrics", False)
    metrics.set_enabled(settings.enable_metrics or show_metrics)
    metrics.reset_metrics()

    records = getattr(args, "format", "text") == "records"
    inputs = {k: v for k, v in vars(args).items() if k not in ("command", "config", "format", "metrics", "save")}
    stream = RecordStream(RunManifest(command=args.command, inputs=inputs, config=settings.to_dict(), run_id=run_id))
    ctx = CommandContext(settings, ReportDisplay(color=sys.stdout.isatty()), stream, records)

    try:
        code = COMMANDS[args.command](args, ctx)
    except (SpecParseError, PolyhedronParseError, NotValidatedError, DepthExceededError, InvalidSearchConfigError) as e:
        logger.error(f"Invalid input: {e}")
        stream.add(ValueRecord(name="error", value=str(e)))
        code = EXIT_BAD_INPUT
    except NotRealizableError as e:
        logger.error(f"Not realizable: {e}")
        stream.add(ValueRecord(name="error", value=str(e)))
        code = EXIT_NOT_REALIZABLE
    except BlowUpError as e:
        logger.error(f"Development blew up: {e}")
        stream.add(ValueRecord(name="error", value=str(e)))
        code = EXIT_BLOW_UP
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        stream.add(ValueRecord(name="error", value=str(e)))
        code = EXIT_BAD_INPUT
    except Exception as e:
        logger.error(f"Unexpected error running {args.command}: {e}", exc_info=True)
        clear_run_id()
        return EXIT_UNEXPECTED

    collected = metrics.get_metrics() if (settings.enable_metrics or show_metrics) else None
    lines = stream.finish(collected)
    if records:
        for line in lines:
            print(line)
    elif show_metrics:
        _print_metrics(ctx.display)
    if getattr(args, "save", False):
        saved = save_records(lines, settings.output_directory, f"{args.command}_{run_id}.jsonl")
        logger.info(f"Results saved to: {saved}")
    logger.debug(f"{args.command} finished with exit code {code}")
    clear_run_id()
    return code
