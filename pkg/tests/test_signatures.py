import pytest

from models.errors import NoCandidates
from dsl.signatures import (
    BRANCH_COUNTS, HIGHER_ORDER_OPS, SIGNATURES, SIGNATURES_BY_NAME, branch_for, candidates_for, expand_unions,
    signature_table,
)
from dsl.types import BOOL, EMPTY, INT, REGION


def test_forty_unique_operations():
    assert len(SIGNATURES) == 40
    assert len(SIGNATURES_BY_NAME) == 40


def test_higher_order_operations():
    assert HIGHER_ORDER_OPS == {"Filter", "GroupBy", "Map", "MostCommon", "Sort"}
    for name in HIGHER_ORDER_OPS:
        assert SIGNATURES_BY_NAME[name].function_params() == [1]


def test_union_signatures_expand_to_branches():
    assert BRANCH_COUNTS["Neg"] == 2
    assert BRANCH_COUNTS["Scale"] == 2
    assert BRANCH_COUNTS["Shift"] == 2
    assert BRANCH_COUNTS["Draw"] == 2
    assert BRANCH_COUNTS["Paint"] == 1
    neg = expand_unions(SIGNATURES_BY_NAME["Neg"])
    assert [(b.params, b.ret) for b in neg] == [((INT,), INT), ((BOOL,), BOOL)]


def test_branch_for_variant():
    assert branch_for("Scale", "Int").params[1] == INT
    with pytest.raises(KeyError):
        branch_for("Scale", "Bool")


def test_candidates_for_region():
    found = candidates_for(REGION, EMPTY, [("Scene", REGION), ("Zero", INT)])
    names = [c.name for c in found]
    assert "Paint" in names
    assert "Rotate" in names
    assert "Area" not in names
    symbols = [c.name for c in found if not c.is_op]
    assert symbols == ["Scene"]


def test_candidates_for_can_exclude_higher_order():
    with_ho = {c.name for c in candidates_for(INT, EMPTY, [])}
    without = {c.name for c in candidates_for(INT, EMPTY, [], allow_higher_order=False)}
    assert "MostCommon" in with_ho
    assert "MostCommon" not in without
    assert "Area" in without


def test_no_candidates():
    with pytest.raises(NoCandidates):
        candidates_for(REGION, EMPTY, [("Zero", INT)], include_ops=False)


def test_signature_table_display():
    table = {row["name"]: row for row in signature_table()}
    assert len(table) == 40
    assert table["Map"]["params"] == ["List[A]", "(A -> B)"]
    assert table["Map"]["ret"] == "List[B]"
    assert table["Area"]["category"] == "property-retrieving"
