"""
Tests for expected turnover types and search verdicts.
"""
import pytest

from src.geometry.tetgen import TetSpec, symmetry_orbit
from src.turnover.classification import (
    CONJECTURAL_PATTERNS,
    CONJECTURE_DATA,
    DEPTH_LIMITED,
    ITEM_PATTERNS,
    Expectation,
    ExpectationKind,
    Verdict,
    classify_spec,
    credit_subgroups,
    expectation_for,
    item_1,
    item_2,
    item_3,
    item_4,
    item_8,
    item_12,
    judge,
    matching_items,
    maximal_types,
)
from src.turnover.lattice import TriangleType
from src.turnover.search import SearchConfig


def t(text):
    return TriangleType.parse(text)


def spec(text):
    return TetSpec.parse(text)


class TestItemPatterns:
    """Test the label patterns of the proven and conjectural items"""

    def test_item_1(self):
        assert item_1(spec("2,6,3;2,6,3")) == frozenset({t("3,6,6")})
        assert item_1(spec("2,7,3;2,8,3")) == frozenset({t("3,7,8")})
        assert item_1(spec("2,5,3;2,6,3")) is None

    def test_item_2(self):
        assert item_2(spec("2,3,6;2,3,6")) == frozenset({t("3,6,6")})

    def test_item_3(self):
        assert item_3(spec("3,6,2;3,6,2")) == frozenset({t("3,6,6")})

    def test_item_4_two_entry(self):
        # q = 2, m = 4, p = 6: (2,4,6), (2,6,6) and (3,6,6)
        types = item_4(spec("2,4,2;2,6,3"))
        assert types == frozenset({t("2,4,6"), t("2,6,6"), t("3,6,6")})

    def test_item_4_regular(self):
        types = item_4(spec("2,3,3;2,5,3"))
        assert types == frozenset({t("3,3,5"), t("5,5,5")})

    def test_item_8(self):
        assert item_8(spec("4,3,4;2,2,2")) == frozenset({t("3,4,4")})

    def test_item_12_exact(self):
        assert item_12(spec("2,2,5;2,3,5")) == frozenset({t("3,5,5")})
        assert item_12(spec("2,2,5;2,3,6")) is None

    def test_pattern_tables(self):
        assert sorted(ITEM_PATTERNS) == [1, 2, 3]
        assert sorted(CONJECTURAL_PATTERNS) == list(range(4, 15))


class TestExpectation:
    """Test expectations derived over the isometry orbit"""

    @pytest.mark.parametrize("text", ["2,6,3;2,6,3", "2,7,3;2,8,3", "2,6,4;2,6,3", "2,3,6;2,3,6", "3,6,2;3,6,2"])
    def test_items(self, text):
        expected = expectation_for(spec(text))
        assert expected.kind is ExpectationKind.ITEM
        assert len(expected.types) == 1
        assert expected.items[0] in (1, 2, 3)
        assert expected.matched in symmetry_orbit(spec(text))

    def test_orbit_invariance(self):
        base = expectation_for(spec("2,7,3;2,8,3"))
        for member in symmetry_orbit(spec("2,7,3;2,8,3")):
            assert expectation_for(member).types == base.types

    def test_conjectural(self):
        expected = expectation_for(spec("4,3,4;2,2,2"))
        assert expected.kind is ExpectationKind.CONJECTURAL
        assert 8 in expected.items
        assert t("3,4,4") in expected.types

    @pytest.mark.parametrize("text", ["2,4,4;2,4,4", "4,4,4;4,4,4"])
    def test_none_expected(self, text):
        assert expectation_for(spec(text)).kind is ExpectationKind.NONE_EXPECTED

    def test_matching_items_sorted(self):
        hits = matching_items(spec("2,6,3;2,6,3"), ITEM_PATTERNS)
        assert hits
        assert hits == sorted(hits, key=lambda hit: (hit[0], hit[1]))

    def test_describe(self):
        assert "item (1)" in expectation_for(spec("2,6,3;2,6,3")).describe()
        assert Expectation(ExpectationKind.NONE_EXPECTED).describe() == "no turnover expected"


class TestJudge:
    """Test verdicts for each expectation kind"""

    def test_maximal_types(self):
        assert maximal_types([t("7,7,7"), t("2,3,7"), t("3,3,7")], 100) == frozenset({t("2,3,7")})

    def test_item_match_ignores_subgroups(self):
        expected = Expectation(ExpectationKind.ITEM, frozenset({t("2,3,7")}), (1,))
        judgement = judge(expected, [t("2,3,7"), t("7,7,7")], 100)
        assert judgement.verdict is Verdict.MATCH
        assert judgement.reason is None and judgement.missing == ()

    def test_item_extra_maximal_is_mismatch(self):
        expected = Expectation(ExpectationKind.ITEM, frozenset({t("3,6,6")}), (1,))
        assert judge(expected, [t("3,6,6"), t("6,6,6")], 100).verdict is Verdict.MISMATCH

    def test_item_nothing_found(self):
        expected = Expectation(ExpectationKind.ITEM, frozenset({t("3,6,6")}), (1,))
        judgement = judge(expected, [], 100)
        assert judgement.verdict is Verdict.MISMATCH
        assert judgement.reason == "no turnover found"
        assert judgement.missing == (t("3,6,6"),)

    def test_conjectural_allows_extras(self):
        expected = Expectation(ExpectationKind.CONJECTURAL, frozenset({t("3,4,4")}), (8,))
        judgement = judge(expected, [t("3,4,4"), t("2,3,8")], 100)
        assert judgement.verdict is Verdict.MATCH
        assert judgement.credited == ()

    def test_conjectural_credits_subgroup_of_found_type(self):
        expected = Expectation(ExpectationKind.CONJECTURAL, frozenset({t("5,5,5"), t("3,3,5")}), (1,))
        judgement = judge(expected, [t("2,5,5"), t("3,3,5"), t("3,5,5")], 100)
        assert judgement.verdict is Verdict.MATCH
        assert judgement.missing == ()
        [credit] = judgement.credited
        assert credit.type == t("5,5,5")
        assert credit.via == t("3,3,5")
        assert credit.chain.index == 3
        assert credit.chain.normal is True

    def test_conjectural_gap_is_conjecture_data(self):
        expected = Expectation(ExpectationKind.CONJECTURAL, frozenset({t("3,4,4"), t("2,3,8")}), (8,))
        judgement = judge(expected, [t("2,3,8")], 100)
        assert judgement.verdict is Verdict.INCONCLUSIVE
        assert judgement.reason == CONJECTURE_DATA
        assert judgement.missing == (t("3,4,4"),)

    def test_conjectural_gap_keeps_credited_types(self):
        expected = Expectation(
            ExpectationKind.CONJECTURAL, frozenset({t("3,3,4"), t("4,4,4"), t("3,4,4")}), (1, 13),
        )
        judgement = judge(expected, [t("3,3,4")], 100)
        assert judgement.verdict is Verdict.INCONCLUSIVE
        assert judgement.reason == CONJECTURE_DATA
        assert judgement.missing == (t("3,4,4"),)
        assert [c.type for c in judgement.credited] == [t("4,4,4")]

    def test_none_expected_empty_is_depth_limited(self):
        judgement = judge(Expectation(ExpectationKind.NONE_EXPECTED), [], 100)
        assert judgement.verdict is Verdict.INCONCLUSIVE
        assert judgement.reason == DEPTH_LIMITED

    def test_none_expected_found(self):
        assert judge(Expectation(ExpectationKind.NONE_EXPECTED), [t("4,4,4")], 100).verdict is Verdict.MISMATCH

    def test_out_of_scope(self):
        assert judge(Expectation(ExpectationKind.OUT_OF_SCOPE), [t("2,3,7")], 100).verdict is Verdict.INCONCLUSIVE


class TestCreditSubgroups:
    """Test crediting expected types through the inclusion table"""

    def test_found_types_are_not_credited(self):
        assert credit_subgroups([t("3,3,5")], [t("3,3,5")], 100) == ()

    def test_index_three_normal_subgroup(self):
        [credit] = credit_subgroups([t("4,4,4")], [t("3,3,4")], 100)
        assert credit.via == t("3,3,4")
        assert credit.chain.index == 3
        assert "index 3" in credit.describe()

    def test_non_subgroup_is_not_credited(self):
        assert credit_subgroups([t("3,4,4")], [t("3,3,4")], 100) == ()

    def test_deterministic_order(self):
        credited = credit_subgroups([t("7,7,7"), t("5,5,5")], [t("3,3,7"), t("3,3,5")], 100)
        assert [c.type for c in credited] == [t("5,5,5"), t("7,7,7")]


class TestClassifySpec:
    """End-to-end classification"""

    @pytest.mark.slow
    def test_item_sample_matches(self):
        report = classify_spec(spec("2,6,3;2,6,3"), SearchConfig(depth=8))
        assert report.verdict is Verdict.MATCH
        assert t("3,6,6") in report.types
        assert report.depth == 8

    def test_negative_sample_is_inconclusive(self):
        report = classify_spec(spec("4,4,4;4,4,4"), SearchConfig(depth=3))
        assert report.expected.kind is ExpectationKind.NONE_EXPECTED
        assert report.verdict is Verdict.INCONCLUSIVE
        assert report.reason == DEPTH_LIMITED
        assert report.found == []

    @pytest.mark.slow
    def test_conjectural_subgroup_credited_through_chain(self):
        report = classify_spec(spec("2,2,3;3,5,2"), SearchConfig(depth=10))
        assert report.verdict is Verdict.MATCH
        assert t("5,5,5") not in report.types
        credit = next(c for c in report.credited if c.type == t("5,5,5"))
        assert credit.via in report.types
        assert credit.chain.index == 3
        witness = report.provenance(credit)
        assert witness is not None and witness.type == credit.via

    @pytest.mark.slow
    def test_unreached_conjectured_type_is_conjecture_data(self):
        report = classify_spec(spec("2,3,3;2,3,4"), SearchConfig(depth=10))
        assert report.expected.kind is ExpectationKind.CONJECTURAL
        assert report.verdict is Verdict.INCONCLUSIVE
        assert report.reason == CONJECTURE_DATA
        assert report.missing == (t("3,4,4"),)
        assert t("3,3,4") in report.types
        assert t("4,4,4") in [c.type for c in report.credited]
