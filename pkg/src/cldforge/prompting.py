"""Assemble the four generation strategies' prompts byte-exactly.

Instruction texts are frozen fixture files under cldforge/prompts/ and are
loaded verbatim; prompt assembly is pure string construction so identical
inputs always produce identical request bodies.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from .corpus import Corpus
from .dotio import emit_digraph
from .model import normalize_name

__all__ = [
    "Strategy",
    "ParsePlan",
    "Exemplar",
    "StageRequest",
    "PromptBundle",
    "NotEnoughExemplars",
    "PreconditionViolation",
    "EmptyVariableList",
    "BASELINE_SENTENCE",
    "STAGE2_VARIABLES_SLOT",
    "guided_instruction",
    "two_stage_instructions",
    "select_exemplars",
    "build_prompt",
    "fill_stage2",
    "parse_variable_list",
]


class Strategy(Enum):
    """The four prompting strategies. Values are the wire/CLI slugs."""

    BASELINE = "baseline"
    MINIMAL_CONTEXT = "minimal"
    GUIDED_PROMPTS = "guided"
    TWO_STAGE = "two-stage"


class ParsePlan(Enum):
    EXPECT_DIGRAPH = "digraph"
    EXPECT_VARIABLE_LIST = "variable-list"


@dataclass(frozen=True)
class Exemplar:
    dh: str
    digraph: str  # canonical emit form; parses in strict mode


@dataclass(frozen=True)
class StageRequest:
    body: str
    parse_plan: ParsePlan
    system_preamble: str = ""


@dataclass(frozen=True)
class PromptBundle:
    strategy: Strategy
    stages: tuple[StageRequest, ...]


class NotEnoughExemplars(Exception):
    pass


class PreconditionViolation(Exception):
    pass


class EmptyVariableList(Exception):
    """A variable-list completion yielded zero names."""


@lru_cache(maxsize=None)
def _fixture(name: str) -> str:
    return (
        resources.files("cldforge")
        .joinpath(f"prompts/{name}.txt")
        .read_text(encoding="utf-8")
    )


def guided_instruction() -> str:
    """The frozen single-stage instruction text, verbatim from its fixture."""
    return _fixture("guided")


def two_stage_instructions() -> tuple[str, str]:
    """The frozen (stage-1, stage-2) instruction texts, verbatim."""
    return _fixture("two_stage_1"), _fixture("two_stage_2")


BASELINE_SENTENCE = "Generate a causal loop diagram for the following dynamic hypothesis."

# Literal slot in the assembled stage-2 body, replaced via fill_stage2 once
# the stage-1 variable names are known.
STAGE2_VARIABLES_SLOT = "{variables}"


def select_exemplars(
    corpus: Corpus, exclude_id: str | None, k: int
) -> list[Exemplar]:
    """First k corpus items in order, skipping exclude_id (leave-one-out)."""
    if k < 0:
        raise PreconditionViolation("shot count k must be >= 0")
    pool = [item for item in corpus if item.id != exclude_id]
    if len(pool) < k:
        raise NotEnoughExemplars(
            f"need {k} exemplars but only {len(pool)} items available")
    return [
        Exemplar(dh=item.dh, digraph=emit_digraph(item.ground_truth))
        for item in pool[:k]
    ]


def _exemplar_blocks(exemplars: list[Exemplar]) -> str:
    return "".join(
        f"Dynamic hypothesis:\n{e.dh}\nDOT:\n{e.digraph}\n" for e in exemplars
    )


def _target_block(dh: str) -> str:
    return f"Dynamic hypothesis:\n{dh}\nDOT:"


def build_prompt(
    strategy: Strategy, dh: str, exemplars: list[Exemplar]
) -> PromptBundle:
    """Assemble the request bundle for a strategy; pure and byte-stable.

    Baseline takes no exemplars, MinimalContext and GuidedPrompts require at
    least one, and TwoStage ignores any given (its stages carry instructions
    and the hypothesis only).
    """
    if not dh.strip():
        raise PreconditionViolation("dh must be non-empty")
    if strategy is Strategy.BASELINE and exemplars:
        raise PreconditionViolation("Baseline takes no exemplars")
    if strategy in (Strategy.MINIMAL_CONTEXT, Strategy.GUIDED_PROMPTS) and not exemplars:
        raise PreconditionViolation(f"{strategy.value} requires exemplars")

    if strategy is Strategy.BASELINE:
        body = f"{BASELINE_SENTENCE}\n\n{dh}"
        stages = (StageRequest(body, ParsePlan.EXPECT_DIGRAPH),)
    elif strategy is Strategy.MINIMAL_CONTEXT:
        body = _exemplar_blocks(exemplars) + _target_block(dh)
        stages = (StageRequest(body, ParsePlan.EXPECT_DIGRAPH),)
    elif strategy is Strategy.GUIDED_PROMPTS:
        body = (
            guided_instruction() + "\n\n"
            + _exemplar_blocks(exemplars) + _target_block(dh)
        )
        stages = (StageRequest(body, ParsePlan.EXPECT_DIGRAPH),)
    else:
        stage1_text, stage2_text = two_stage_instructions()
        body1 = f"{stage1_text}\n\nDynamic hypothesis:\n{dh}"
        body2 = (
            f"{STAGE2_VARIABLES_SLOT}\n\n"
            f"Dynamic hypothesis:\n{dh}\n\n{stage2_text}"
        )
        stages = (
            StageRequest(body1, ParsePlan.EXPECT_VARIABLE_LIST),
            StageRequest(body2, ParsePlan.EXPECT_DIGRAPH),
        )
    return PromptBundle(strategy=strategy, stages=stages)


def fill_stage2(body: str, variables: list[str]) -> str:
    """Substitute the stage-2 variables slot with the stage-1 names."""
    rendered = "Variable names:\n" + "\n".join(f"- {v}" for v in variables)
    return body.replace(STAGE2_VARIABLES_SLOT, rendered, 1)


_LINE_PREFIX = re.compile(r"^(?:[-*]\s*|\d+[.)]\s*)+")


def parse_variable_list(completion: str) -> list[str]:
    """Extract variable names from a list-shaped completion.

    Splits on newlines, strips bullets/ordinals/quotes, drops empty lines,
    and de-duplicates by normalized name keeping the first spelling.
    """
    names: list[str] = []
    seen: set[str] = set()
    for line in completion.splitlines():
        s = _LINE_PREFIX.sub("", line.strip()).strip().strip("\"'").strip()
        if not s:
            continue
        norm = normalize_name(s)
        if norm in seen:
            continue
        seen.add(norm)
        names.append(s)
    if not names:
        raise EmptyVariableList("no variable names found in completion")
    return names
