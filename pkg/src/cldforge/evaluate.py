"""Score a generated diagram against ground truth.

Variables are aligned by an optimal one-to-one assignment over normalized
edit-distance similarity (ties broken toward lexicographically smaller name
pairs, so results are order-independent); links are then scored strictly
(direction and polarity) and leniently (direction only), and feedback-loop
structure is compared as a (length, kind) multiset.

Empty-side conventions keep aggregates total: precision over zero generated
items is 1.0 (nothing asserted, nothing wrong), recall over zero truth
items is 1.0, and F1 is 0 when precision + recall is 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import Corpus
from .client import GenerationRecord
from .model import (
    CausalLoopDiagram,
    LoopKind,
    VariableName,
    enumerate_loops,
    normalize_name,
)

__all__ = [
    "DEFAULT_THRESHOLD",
    "NodeMatching",
    "Scores",
    "EvalReport",
    "AlignmentError",
    "ItemReport",
    "AggregateReport",
    "edit_distance",
    "name_similarity",
    "match_nodes",
    "evaluate",
    "batch_report",
]

DEFAULT_THRESHOLD = 0.8

# Slack for comparing sums of similarity ratios; individual similarities are
# small rationals, so genuinely different totals differ by far more than this.
_TOTAL_EPS = 1e-9


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance (unit-cost insert/delete/substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (ca != cb),
            ))
        prev = cur
    return prev[-1]


def name_similarity(a: str, b: str) -> float:
    """1 − normalized edit distance between normalized names, in [0, 1]."""
    na, nb = normalize_name(a), normalize_name(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - edit_distance(na, nb) / longest


@dataclass(frozen=True)
class NodeMatching:
    pairs: tuple[tuple[VariableName, VariableName, float], ...]
    unmatched_generated: tuple[VariableName, ...]
    unmatched_truth: tuple[VariableName, ...]

    @property
    def total_similarity(self) -> float:
        return sum(sim for _, _, sim in self.pairs)


def _max_total(weights: np.ndarray, rows: list[int], cols: list[int]) -> float:
    if not rows or not cols:
        return 0.0
    sub = weights[np.ix_(rows, cols)]
    ri, ci = linear_sum_assignment(sub, maximize=True)
    return float(sub[ri, ci].sum())


def match_nodes(
    generated: CausalLoopDiagram,
    truth: CausalLoopDiagram,
    threshold: float = DEFAULT_THRESHOLD,
) -> NodeMatching:
    """Optimal one-to-one variable alignment at or above the threshold.

    Maximizes total similarity over admissible pairs; among equally good
    matchings, the one whose (generated, truth) normalized name pairs are
    lexicographically smallest wins, fixed greedily pair by pair.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    gen = sorted(generated.variables, key=lambda v: v.normalized)
    tru = sorted(truth.variables, key=lambda v: v.normalized)
    n, m = len(gen), len(tru)
    weights = np.zeros((n, m))
    allowed: list[tuple[str, str, int, int]] = []
    for i, g in enumerate(gen):
        for j, t in enumerate(tru):
            sim = name_similarity(g.normalized, t.normalized)
            if sim >= threshold:
                weights[i, j] = sim
                allowed.append((g.normalized, t.normalized, i, j))
    allowed.sort(key=lambda c: (c[0], c[1]))

    best_total = _max_total(weights, list(range(n)), list(range(m)))

    pairs: list[tuple[VariableName, VariableName, float]] = []
    fixed_weight = 0.0
    used_rows: set[int] = set()
    used_cols: set[int] = set()
    for _, _, i, j in allowed:
        if i in used_rows or j in used_cols:
            continue
        rest_rows = [r for r in range(n) if r not in used_rows and r != i]
        rest_cols = [c for c in range(m) if c not in used_cols and c != j]
        achievable = fixed_weight + weights[i, j] + _max_total(
            weights, rest_rows, rest_cols)
        if achievable >= best_total - _TOTAL_EPS:
            pairs.append((gen[i], tru[j], float(weights[i, j])))
            fixed_weight += weights[i, j]
            used_rows.add(i)
            used_cols.add(j)

    return NodeMatching(
        pairs=tuple(pairs),
        unmatched_generated=tuple(g for i, g in enumerate(gen) if i not in used_rows),
        unmatched_truth=tuple(t for j, t in enumerate(tru) if j not in used_cols),
    )


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, matched: int, generated_count: int, truth_count: int) -> "Scores":
        p = matched / generated_count if generated_count else 1.0
        r = matched / truth_count if truth_count else 1.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        return cls(precision=p, recall=r, f1=f1)

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class EvalReport:
    node: Scores
    link_strict: Scores
    link_lenient: Scores
    polarity_accuracy: float | None
    loops_generated: tuple[tuple[int, LoopKind], ...]
    loops_truth: tuple[tuple[int, LoopKind], ...]
    loop_count_match: bool
    loop_kind_multiset_match: bool
    matching: NodeMatching

    def to_dict(self) -> dict:
        return {
            "node": self.node.to_dict(),
            "link_strict": self.link_strict.to_dict(),
            "link_lenient": self.link_lenient.to_dict(),
            "polarity_accuracy": self.polarity_accuracy,
            "loops": {
                "generated": [[length, kind.value] for length, kind in self.loops_generated],
                "truth": [[length, kind.value] for length, kind in self.loops_truth],
                "loop_count_match": self.loop_count_match,
                "loop_kind_multiset_match": self.loop_kind_multiset_match,
            },
            "matching": {
                "pairs": [[g.raw, t.raw, sim] for g, t, sim in self.matching.pairs],
                "unmatched_generated": [
                    v.raw for v in self.matching.unmatched_generated],
                "unmatched_truth": [v.raw for v in self.matching.unmatched_truth],
            },
        }


def _loop_profile(d: CausalLoopDiagram) -> tuple[tuple[int, LoopKind], ...]:
    return tuple((lp.length, lp.kind) for lp in enumerate_loops(d))


def evaluate(
    generated: CausalLoopDiagram,
    truth: CausalLoopDiagram,
    threshold: float = DEFAULT_THRESHOLD,
) -> EvalReport:
    """Full metric report comparing a generated diagram to ground truth."""
    matching = match_nodes(generated, truth, threshold)
    mapping = {g.normalized: t.normalized for g, t, _ in matching.pairs}

    node = Scores.from_counts(
        len(matching.pairs), len(generated.variables), len(truth.variables))

    lenient = strict = 0
    for lk in generated.links:
        src = mapping.get(lk.source.normalized)
        dst = mapping.get(lk.target.normalized)
        if src is None or dst is None:
            continue
        truth_link = truth.link_by_key.get((src, dst))
        if truth_link is None:
            continue
        lenient += 1
        if truth_link.polarity is lk.polarity:
            strict += 1

    link_strict = Scores.from_counts(strict, len(generated.links), len(truth.links))
    link_lenient = Scores.from_counts(lenient, len(generated.links), len(truth.links))
    polarity = strict / lenient if lenient else None

    loops_g, loops_t = _loop_profile(generated), _loop_profile(truth)

    def key(entry: tuple[int, LoopKind]) -> tuple[int, str]:
        return entry[0], entry[1].value

    return EvalReport(
        node=node,
        link_strict=link_strict,
        link_lenient=link_lenient,
        polarity_accuracy=polarity,
        loops_generated=loops_g,
        loops_truth=loops_t,
        loop_count_match=len(loops_g) == len(loops_t),
        loop_kind_multiset_match=sorted(map(key, loops_g)) == sorted(map(key, loops_t)),
        matching=matching,
    )


class AlignmentError(Exception):
    """Generation records do not line up 1:1 with the corpus items."""


@dataclass(frozen=True)
class ItemReport:
    id: str
    metrics: EvalReport
    no_digraph: bool
    error: str | None = None


_EMPTY = CausalLoopDiagram(variables=(), links=())


def _mean(values: list[float]) -> float | None:
    return fmean(values) if values else None


def batch_report(
    records: list[GenerationRecord],
    corpus: Corpus,
    threshold: float = DEFAULT_THRESHOLD,
) -> "AggregateReport":
    """Per-item reports plus unweighted aggregate means over the corpus.

    Records must align with corpus items by id and order. A record without
    a diagram scores as an empty diagram (all recalls 0) and is flagged.
    """
    if len(records) != len(corpus.items):
        raise AlignmentError(
            f"{len(records)} records for {len(corpus.items)} corpus items")
    items: list[ItemReport] = []
    for record, item in zip(records, corpus.items):
        if record.item_id != item.id:
            raise AlignmentError(
                f"record id {record.item_id!r} does not match corpus item {item.id!r}")
        report = evaluate(record.diagram or _EMPTY, item.ground_truth, threshold)
        items.append(ItemReport(
            id=item.id, metrics=report, no_digraph=record.diagram is None,
            error=record.error))

    def mean_scores(pick) -> dict:
        return {
            "precision": _mean([pick(it).precision for it in items]),
            "recall": _mean([pick(it).recall for it in items]),
            "f1": _mean([pick(it).f1 for it in items]),
        }

    polarity_values = [
        it.metrics.polarity_accuracy for it in items
        if it.metrics.polarity_accuracy is not None
    ]
    aggregate = {
        "node": mean_scores(lambda it: it.metrics.node),
        "link_strict": mean_scores(lambda it: it.metrics.link_strict),
        "link_lenient": mean_scores(lambda it: it.metrics.link_lenient),
        "polarity_accuracy": _mean(polarity_values),
        "loop_count_match_rate": _mean(
            [float(it.metrics.loop_count_match) for it in items]),
        "loop_kind_multiset_match_rate": _mean(
            [float(it.metrics.loop_kind_multiset_match) for it in items]),
        "no_digraph_count": sum(it.no_digraph for it in items),
    }
    return AggregateReport(items=tuple(items), aggregate=aggregate,
                           threshold=threshold)


@dataclass(frozen=True)
class AggregateReport:
    items: tuple[ItemReport, ...]
    aggregate: dict
    threshold: float

    def to_json_dict(self) -> dict:
        return {
            "items": [
                {
                    "id": it.id,
                    "metrics": it.metrics.to_dict(),
                    "no_digraph": it.no_digraph,
                    "error": it.error,
                }
                for it in self.items
            ],
            "aggregate": self.aggregate,
            "threshold": self.threshold,
        }
