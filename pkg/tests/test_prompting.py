"""Prompt assembly tests: frozen instruction texts, exemplar selection,
stage construction, and variable-list parsing."""

from pathlib import Path

import pytest

from cldforge.dotio import emit_digraph
from cldforge.prompting import (
    BASELINE_SENTENCE,
    STAGE2_VARIABLES_SLOT,
    EmptyVariableList,
    Exemplar,
    NotEnoughExemplars,
    ParsePlan,
    PreconditionViolation,
    Strategy,
    build_prompt,
    fill_stage2,
    guided_instruction,
    parse_variable_list,
    select_exemplars,
    two_stage_instructions,
)

FIXTURES = Path(__file__).parent / "fixtures" / "prompts"


def _fixture(name: str) -> str:
    return (FIXTURES / f"{name}.txt").read_text(encoding="utf-8")


# --- frozen instruction texts ---------------------------------------------------


def test_baseline_sentence_matches_fixture():
    assert BASELINE_SENTENCE == _fixture("baseline")


def test_guided_instruction_matches_fixture():
    assert guided_instruction() == _fixture("guided")


def test_two_stage_instructions_match_fixtures():
    s1, s2 = two_stage_instructions()
    assert s1 == _fixture("two_stage_1")
    assert s2 == _fixture("two_stage_2")


def test_instruction_spot_strings():
    s1, s2 = two_stage_instructions()
    assert s1.startswith("Render a list of variable names")
    assert "Step 3: Create a DOT format" in s2
    assert "[arrowhead=vee] indicates a positive relationship" in s2
    g = guided_instruction()
    assert g.startswith("First, Render a list of variable names")
    # quirks are part of the frozen text and must not be "fixed"
    assert "Chose names for which the the meaning" in g
    assert "nouns or nouns phrases" in g


def test_instructions_have_no_trailing_newline():
    assert not guided_instruction().endswith("\n")
    for text in two_stage_instructions():
        assert not text.endswith("\n")


# --- exemplar selection ----------------------------------------------------------


def test_select_exemplars_first_k_in_order(goldens):
    picked = select_exemplars(goldens, exclude_id=None, k=3)
    assert [e.dh for e in picked] == [item.dh for item in goldens.items[:3]]
    assert picked[0].digraph == emit_digraph(goldens.items[0].ground_truth)


def test_select_exemplars_leave_one_out(goldens):
    picked = select_exemplars(goldens, exclude_id="rabbit-population", k=3)
    assert [e.dh for e in picked] == [item.dh for item in goldens.items[1:4]]


def test_select_exemplars_excluding_later_item(goldens):
    picked = select_exemplars(goldens, exclude_id="new-car-inventory", k=3)
    expected = [goldens.items[0], goldens.items[1], goldens.items[3]]
    assert [e.dh for e in picked] == [item.dh for item in expected]


def test_select_exemplars_not_enough(goldens):
    with pytest.raises(NotEnoughExemplars):
        select_exemplars(goldens, exclude_id=None, k=5)
    with pytest.raises(NotEnoughExemplars):
        select_exemplars(goldens, exclude_id="rabbit-population", k=4)


def test_select_exemplars_zero_and_negative(goldens):
    assert select_exemplars(goldens, exclude_id=None, k=0) == []
    with pytest.raises(PreconditionViolation):
        select_exemplars(goldens, exclude_id=None, k=-1)


def test_select_exemplars_digraphs_are_canonical(goldens):
    for e in select_exemplars(goldens, exclude_id=None, k=4):
        assert e.digraph.startswith("digraph {\n")
        assert e.digraph.endswith("\n}")


# --- prompt assembly --------------------------------------------------------------


DH = "When demand rises, the backlog grows, which pushes demand back down."

EXEMPLARS = [
    Exemplar(dh="Example one text.", digraph='digraph {\n"a" -> "b" [arrowhead = vee]\n}'),
    Exemplar(dh="Example two text.", digraph='digraph {\n"c" -> "d" [arrowhead = tee]\n}'),
]


def test_baseline_prompt_shape():
    bundle = build_prompt(Strategy.BASELINE, DH, [])
    assert bundle.strategy is Strategy.BASELINE
    assert len(bundle.stages) == 1
    stage = bundle.stages[0]
    assert stage.parse_plan is ParsePlan.EXPECT_DIGRAPH
    assert stage.body == f"{BASELINE_SENTENCE}\n\n{DH}"


def test_minimal_prompt_shape():
    bundle = build_prompt(Strategy.MINIMAL_CONTEXT, DH, EXEMPLARS)
    assert len(bundle.stages) == 1
    body = bundle.stages[0].body
    # k exemplar blocks plus the target block
    assert body.count("Dynamic hypothesis:") == len(EXEMPLARS) + 1
    assert body.count("DOT:") == len(EXEMPLARS) + 1
    assert body.endswith("DOT:")
    # no instruction text of any kind
    assert "variable" not in body.lower()
    assert body.startswith("Dynamic hypothesis:\nExample one text.\n")


def test_minimal_prompt_exemplar_block_format():
    bundle = build_prompt(Strategy.MINIMAL_CONTEXT, DH, EXEMPLARS[:1])
    expected = (
        "Dynamic hypothesis:\nExample one text.\n"
        'DOT:\ndigraph {\n"a" -> "b" [arrowhead = vee]\n}\n'
        f"Dynamic hypothesis:\n{DH}\nDOT:"
    )
    assert bundle.stages[0].body == expected


def test_guided_prompt_shape():
    bundle = build_prompt(Strategy.GUIDED_PROMPTS, DH, EXEMPLARS)
    body = bundle.stages[0].body
    assert body.startswith(guided_instruction() + "\n\n")
    assert body.endswith("DOT:")
    assert body.count("Dynamic hypothesis:") == len(EXEMPLARS) + 1
    # exemplars appear verbatim and in order after the instruction
    first = body.index("Example one text.")
    second = body.index("Example two text.")
    assert 0 < first < second < body.index(DH)


def test_two_stage_prompt_shape():
    bundle = build_prompt(Strategy.TWO_STAGE, DH, [])
    assert len(bundle.stages) == 2
    s1, s2 = bundle.stages
    assert s1.parse_plan is ParsePlan.EXPECT_VARIABLE_LIST
    assert s2.parse_plan is ParsePlan.EXPECT_DIGRAPH
    stage1_text, stage2_text = two_stage_instructions()
    assert s1.body == f"{stage1_text}\n\nDynamic hypothesis:\n{DH}"
    assert s2.body == (
        f"{STAGE2_VARIABLES_SLOT}\n\nDynamic hypothesis:\n{DH}\n\n{stage2_text}"
    )
    # exactly one slot, and no exemplar blocks in either stage
    assert s2.body.count(STAGE2_VARIABLES_SLOT) == 1
    assert s1.body.count("Dynamic hypothesis:") == 1
    assert s2.body.count("Dynamic hypothesis:") == 1


def test_two_stage_ignores_exemplars():
    with_ex = build_prompt(Strategy.TWO_STAGE, DH, EXEMPLARS)
    without = build_prompt(Strategy.TWO_STAGE, DH, [])
    assert with_ex == without


def test_build_prompt_preconditions():
    with pytest.raises(PreconditionViolation):
        build_prompt(Strategy.BASELINE, DH, EXEMPLARS)
    with pytest.raises(PreconditionViolation):
        build_prompt(Strategy.MINIMAL_CONTEXT, DH, [])
    with pytest.raises(PreconditionViolation):
        build_prompt(Strategy.GUIDED_PROMPTS, DH, [])
    for strategy in Strategy:
        with pytest.raises(PreconditionViolation):
            build_prompt(strategy, "   ", [])


def test_build_prompt_deterministic():
    a = build_prompt(Strategy.GUIDED_PROMPTS, DH, EXEMPLARS)
    b = build_prompt(Strategy.GUIDED_PROMPTS, DH, EXEMPLARS)
    assert a == b


def test_strategy_slugs():
    assert {s.value for s in Strategy} == {
        "baseline", "minimal", "guided", "two-stage"}


# --- stage-2 fill ------------------------------------------------------------------


def test_fill_stage2_renders_bulleted_names():
    body = build_prompt(Strategy.TWO_STAGE, DH, []).stages[1].body
    filled = fill_stage2(body, ["demand", "backlog"])
    assert STAGE2_VARIABLES_SLOT not in filled
    assert filled.startswith("Variable names:\n- demand\n- backlog\n\n")
    # the rest of the body is untouched
    assert filled.endswith(two_stage_instructions()[1])


def test_fill_stage2_replaces_only_the_slot():
    body = f"{STAGE2_VARIABLES_SLOT} and literal {{variables}} later"
    filled = fill_stage2(body, ["x"])
    assert filled == "Variable names:\n- x and literal {variables} later"


# --- variable-list parsing -----------------------------------------------------------


def test_parse_variable_list_bullets_and_ordinals():
    completion = "- demand\n* backlog\n1. shipping delay\n2) capacity\n"
    assert parse_variable_list(completion) == [
        "demand", "backlog", "shipping delay", "capacity"]


def test_parse_variable_list_plain_lines_and_quotes():
    completion = 'demand\n"order backlog"\n  \'capacity\'  \n'
    assert parse_variable_list(completion) == [
        "demand", "order backlog", "capacity"]


def test_parse_variable_list_dedupes_by_normalized_name():
    completion = "- Demand\n- demand\n-  DEMAND \n- backlog"
    assert parse_variable_list(completion) == ["Demand", "backlog"]


def test_parse_variable_list_nested_prefixes():
    assert parse_variable_list("1. - demand") == ["demand"]


def test_parse_variable_list_skips_blank_lines():
    assert parse_variable_list("\n\n- demand\n\n") == ["demand"]


def test_parse_variable_list_empty_raises():
    with pytest.raises(EmptyVariableList):
        parse_variable_list("")
    with pytest.raises(EmptyVariableList):
        parse_variable_list("\n  \n-\n")
