"""
Tests for the command-line front end: argument parsing, exit codes and the
record stream.
"""
import json
import logging
import shutil
import tempfile
from pathlib import Path

import pytest
import yaml

from src.cli import RecordStream, ReportDisplay, RunManifest, build_parser, run
from src.cli.commands import (
    EXIT_BAD_INPUT,
    EXIT_MISMATCH,
    EXIT_NOT_REALIZABLE,
    EXIT_OK,
    save_records,
)
from src.cli.reports import ChainRecord, ClassificationRecord, ValueRecord, WitnessRecord, _rounded
from src.geometry.tetgen import TetSpec, realize_spec
from src.turnover.lattice import TriangleType, is_subgroup
from src.turnover.search import SearchConfig, search

DATA = Path(__file__).parent / "data"


@pytest.fixture
def temp_workspace():
    """Create a temporary workspace for testing"""
    temp_dir = tempfile.mkdtemp()
    yield Path(temp_dir)
    shutil.rmtree(temp_dir)


@pytest.fixture
def cli(temp_workspace, monkeypatch):
    """Run the CLI against a throwaway configuration"""
    for variable in ("TURNOVER_THREADS", "TURNOVER_DEPTH", "TURNOVER_LOG_LEVEL"):
        monkeypatch.delenv(variable, raising=False)
    config = temp_workspace / "config.yaml"
    config.write_text(yaml.dump({
        "log_level": "WARNING",
        "log_file": None,
        "output_directory": str(temp_workspace / "output"),
        "threads": 1,
    }))
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level

    def invoke(*argv):
        return run(["--config", str(config), *argv])

    invoke.workspace = temp_workspace
    yield invoke
    root.handlers[:] = handlers
    root.setLevel(level)


def records(text):
    return [json.loads(line) for line in text.strip().splitlines()]


class TestParser:
    """Test argument parsing"""

    def test_flags_before_and_after_command(self):
        parser = build_parser()
        before = parser.parse_args(["--depth", "5", "search", "2,6,3;2,6,3"])
        after = parser.parse_args(["search", "2,6,3;2,6,3", "--depth", "5"])
        assert before.depth == after.depth == 5
        assert before.spec == after.spec

    def test_unset_flags_are_absent(self):
        args = build_parser().parse_args(["realize", "2,6,3;2,6,3"])
        assert not hasattr(args, "depth")
        assert not hasattr(args, "format")

    def test_unknown_suite(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["verify", "--suite", "everything"])

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestRealize:
    """Test the realize command"""

    def test_text_report(self, cli, capsys):
        assert cli("realize", "2,6,3;2,6,3") == EXIT_OK
        out = capsys.readouterr().out
        assert "Gram matrix" in out
        assert "exists" in out

    def test_records(self, cli, capsys):
        assert cli("--format", "records", "realize", "4,4,4;4,4,4") == EXIT_OK
        lines = records(capsys.readouterr().out)
        assert lines[0]["record"] == "manifest"
        assert lines[0]["command"] == "realize"
        assert lines[0]["inputs"]["spec"] == "4,4,4;4,4,4"
        values = {line["name"]: line["value"] for line in lines[1:]}
        assert values["exists"] is True
        assert set(values["vertex_classes"].values()) == {"truncated"}
        assert len(values["face_normals"]) == 4

    def test_not_realizable(self, cli, capsys):
        assert cli("--format", "records", "realize", "2,2,2;2,2,2") == EXIT_NOT_REALIZABLE
        values = {line.get("name"): line.get("value") for line in records(capsys.readouterr().out)}
        assert values["exists"] is False

    @pytest.mark.parametrize("text", ["2,6,3", "a,b,c;d,e,f", "1,2,2;2,2,2"])
    def test_bad_spec(self, cli, text):
        assert cli("realize", text) == EXIT_BAD_INPUT


class TestSearchCommand:
    """Test the search command"""

    def test_classification_record(self, cli, capsys):
        code = cli("--format", "records", "search", "4,4,4;4,4,4", "--depth", "3")
        lines = records(capsys.readouterr().out)
        (classification,) = [line for line in lines if line["record"] == "classification"]
        assert classification["expectation"] == "none_expected"
        assert classification["depth"] == 3
        assert classification["verdict"] == "inconclusive"
        assert classification["reason"] == "depth-limited"
        assert classification["missing"] == [] and classification["credited"] == []
        assert code == EXIT_OK

    def test_not_realizable(self, cli):
        assert cli("search", "2,2,2;2,2,2") == EXIT_NOT_REALIZABLE

    def test_depth_out_of_range(self, cli):
        assert cli("search", "2,6,3;2,6,3", "--depth", "99") == EXIT_BAD_INPUT


class TestPolyCommand:
    """Test the marked polyhedron commands"""

    def test_small(self, cli, capsys):
        assert cli("--format", "records", "poly", str(DATA / "cube.json"), "small") == EXIT_OK
        (value,) = [line for line in records(capsys.readouterr().out) if line["record"] == "value"]
        assert value["value"] == "not_small"

    def test_circuits(self, cli, capsys):
        assert cli("--format", "records", "poly", str(DATA / "prism.yaml"), "circuits") == EXIT_OK
        circuits = [line for line in records(capsys.readouterr().out) if line["record"] == "circuit"]
        assert len(circuits) == 7
        assert sum(not c["vertex_parallel"] for c in circuits) == 1

    def test_validate_reports_violations(self, cli, capsys):
        assert cli("--format", "records", "poly", str(DATA / "broken.json"), "validate") == EXIT_MISMATCH
        assert any(line["record"] == "violation" for line in records(capsys.readouterr().out))

    def test_validate_clean(self, cli, capsys):
        assert cli("poly", str(DATA / "tetrahedron.json"), "validate") == EXIT_OK
        assert "none" in capsys.readouterr().out

    def test_circuits_need_a_valid_graph(self, cli):
        assert cli("poly", str(DATA / "broken.json"), "circuits") == EXIT_BAD_INPUT

    def test_missing_file(self, cli):
        assert cli("poly", str(DATA / "nowhere.json"), "small") == EXIT_BAD_INPUT


class TestLatticeCommand:
    """Test triangle-group queries"""

    def test_subgroup_chain(self, cli, capsys):
        assert cli("--format", "records", "lattice", "sub", "7,7,7", "super", "2,3,7") == EXIT_OK
        (chain,) = [line for line in records(capsys.readouterr().out) if line["record"] == "chain"]
        assert (chain["index"], chain["normal"]) == (24, False)

    def test_query_as_one_argument(self, cli, capsys):
        assert cli("lattice", "sub 5,5,5 super 3,3,5") == EXIT_OK
        assert "index 3, normal" in capsys.readouterr().out

    def test_not_a_subgroup(self, cli, capsys):
        assert cli("lattice", "sub", "2,3,7", "super", "7,7,7") == EXIT_OK
        assert "not a subgroup" in capsys.readouterr().out

    def test_maximal(self, cli, capsys):
        assert cli("--format", "records", "lattice", "maximal", "2,3,7") == EXIT_OK
        values = [line for line in records(capsys.readouterr().out) if line["record"] == "value"]
        assert values[0]["value"] is True

    def test_table(self, cli, capsys):
        assert cli("--format", "records", "lattice", "table") == EXIT_OK
        assert len(records(capsys.readouterr().out)) == 15

    @pytest.mark.parametrize("query", [["frobnicate"], ["maximal", "2,3"], ["sub", "7,7,7"]])
    def test_bad_query(self, cli, query):
        assert cli("lattice", *query) == EXIT_BAD_INPUT


class TestRunOptions:
    """Test metrics, saving and configuration errors"""

    def test_metrics_section(self, cli, capsys):
        assert cli("realize", "4,4,4;4,4,4", "--metrics") == EXIT_OK
        assert "Metrics" in capsys.readouterr().out

    def test_metrics_in_manifest(self, cli, capsys):
        assert cli("--format", "records", "--metrics", "search", "4,4,4;4,4,4", "--depth", "2") in (EXIT_OK, EXIT_MISMATCH)
        manifest = records(capsys.readouterr().out)[0]
        assert "search.seeds" in manifest["metrics"]["counters"]

    def test_save(self, cli):
        assert cli("lattice", "maximal", "2,3,7", "--save") == EXIT_OK
        (saved,) = (cli.workspace / "output").glob("lattice_*.jsonl")
        lines = records(saved.read_text())
        assert lines[0]["record"] == "manifest"
        assert lines[0]["run_id"] in saved.name

    def test_invalid_override(self, cli):
        assert cli("realize", "2,6,3;2,6,3", "--cmax", "1") == EXIT_BAD_INPUT

    @pytest.mark.slow
    def test_census(self, cli, capsys):
        assert cli("--format", "records", "census") == EXIT_OK
        compact = [line for line in records(capsys.readouterr().out) if line.get("name") == "compact"]
        assert len(compact) == 9


class TestRecords:
    """Test the record stream and text display helpers"""

    def test_manifest_first(self):
        stream = RecordStream(RunManifest(command="lattice", run_id="r"))
        stream.add(ValueRecord(name="x", value=1))
        lines = [json.loads(line) for line in stream.finish({"counters": {}})]
        assert [line["record"] for line in lines] == ["manifest", "value"]
        assert lines[0]["metrics"] == {"counters": {}}
        assert all(line["schema_version"] == "1" for line in lines)

    def test_witness_record(self):
        tet = realize_spec(TetSpec.parse("4,4,4;4,4,4"))
        witnesses = search(tet, SearchConfig(depth=3))
        for w in witnesses:
            line = json.loads(WitnessRecord.from_witness("4,4,4;4,4,4", w).line())
            assert line["type"] == list(w.type.entries())
            assert len(line["invariant_plane"]) == 4

    def test_rounding_keeps_nine_significant_digits(self):
        assert _rounded([123456.789012345, -0.000123456789012]) == [123456.789, -0.000123456789]
        assert _rounded([1e12 + 0.123456]) == [1e12]
        assert _rounded([-0.0]) == [0.0]

    def test_classification_record_carries_credited_chains(self):
        sub, sup = TriangleType(5, 5, 5), TriangleType(3, 3, 5)
        record = ClassificationRecord(
            spec="2,2,3;3,5,2",
            depth=10,
            expectation="conjectural",
            items=[1],
            expected=[[5, 5, 5]],
            found=[[3, 3, 5]],
            verdict="match",
            credited=[ChainRecord.from_chain(sub, sup, is_subgroup(sub, sup))],
        )
        line = json.loads(record.line())
        (credited,) = line["credited"]
        assert credited["sub"] == [5, 5, 5] and credited["super"] == [3, 3, 5]
        assert credited["index"] == 3
        assert line["missing"] == []

    def test_save_records(self, temp_workspace):
        path = save_records(["{}", "{}"], str(temp_workspace / "nested"), "out.jsonl")
        assert path.read_text() == "{}\n{}\n"

    def test_display_without_color(self, capsys):
        display = ReportDisplay(color=False)
        display.table(["a", "bb"], [(1, 2), (333, 4)])
        display.key_values([("verdict", display.verdict("match"))])
        out = capsys.readouterr().out
        assert "\033[" not in out
        assert "333" in out and "match" in out
