"""Shared fixtures: random diagram generation and the acceptance summary."""

from __future__ import annotations

import random
from functools import lru_cache

import pytest

from cldforge.corpus import bundled_goldens
from cldforge.evaluate import name_similarity
from cldforge.model import (
    CausalLoopDiagram,
    Link,
    Polarity,
    VariableName,
    build_diagram,
)

# Small pool of multi-word names so normalization and fuzzy matching both
# get exercised; no backslashes (excluded from the interchange format).
NAME_POOL = [
    "births", "rabbit population", "birth fraction", "inventory",
    "market price", "car production", "retail sales", "work pressure",
    "completion rate", "workweek", "effort", "productivity", "due date",
    "time remaining", "backlog", "smoking", "need for cigarettes",
    "addiction time", "quality", "staff", "fatigue", "errors",
]


def random_diagram(
    rng: random.Random,
    max_nodes: int = 8,
    max_links: int = 20,
    name_pool: list[str] | None = None,
) -> CausalLoopDiagram:
    """A random valid diagram: distinct ordered pairs, random polarities."""
    pool = name_pool or NAME_POOL
    n = rng.randint(1, max_nodes)
    names = rng.sample(pool, n)
    candidates = [(s, t) for s in names for t in names if s != t]
    rng.shuffle(candidates)
    count = rng.randint(0, min(max_links, len(candidates)))
    links = tuple(
        Link(
            source=VariableName.of(s),
            target=VariableName.of(t),
            polarity=rng.choice((Polarity.POSITIVE, Polarity.NEGATIVE)),
        )
        for s, t in candidates[:count]
    )
    if not links:
        return CausalLoopDiagram(variables=(), links=())
    return build_diagram(links)


# --- independent oracles shared across modules --------------------------------
#
# These deliberately share no code with the production implementations they
# check: cycles by brute-force DFS, matching by bitmask DP.


def dfs_cycles(diagram: CausalLoopDiagram) -> set[tuple[str, ...]]:
    """Every simple cycle, as canonical member tuples, by brute-force DFS.

    A cycle is only emitted from its lexicographically smallest member, so
    each cycle appears exactly once and already in canonical rotation.
    """
    adjacency: dict[str, list[str]] = {}
    for lk in diagram.links:
        adjacency.setdefault(lk.source.normalized, []).append(lk.target.normalized)
    found: set[tuple[str, ...]] = set()

    def walk(root: str, node: str, path: list[str], on_path: set[str]) -> None:
        for nxt in adjacency.get(node, ()):
            if nxt == root:
                found.add(tuple(path))
            elif nxt not in on_path and nxt > root:
                path.append(nxt)
                on_path.add(nxt)
                walk(root, nxt, path, on_path)
                on_path.discard(nxt)
                path.pop()

    for root in sorted(adjacency):
        walk(root, root, [root], {root})
    return found


def sign_product(links: tuple[Link, ...]) -> int:
    product = 1
    for lk in links:
        product *= 1 if lk.polarity is Polarity.POSITIVE else -1
    return product


def oracle_best_total(gen_names, truth_names, threshold) -> float:
    """Max total similarity over one-to-one matchings, by bitmask DP."""
    sims = [[name_similarity(g, t) for t in truth_names] for g in gen_names]

    @lru_cache(maxsize=None)
    def best(i: int, used: int) -> float:
        if i == len(gen_names):
            return 0.0
        out = best(i + 1, used)
        for j, sim in enumerate(sims[i]):
            if used & (1 << j) or sim < threshold:
                continue
            out = max(out, sim + best(i + 1, used | (1 << j)))
        return out

    return best(0, 0)


@pytest.fixture(scope="session")
def goldens():
    return bundled_goldens()


@pytest.fixture(scope="session")
def golden_fixture_dir(tmp_path_factory):
    from cldforge.client import write_golden_fixtures

    path = tmp_path_factory.mktemp("mock-fixtures")
    write_golden_fixtures(path, bundled_goldens(), k=3)
    return path


# --- acceptance criterion summary --------------------------------------------

ACCEPTANCE_LABELS = {
    "test_rabbit_digraph_round_trip": "Rabbit digraph round trip (parse/emit stable, <1ms)",
    "test_cycle_enumeration_oracle": "Cycle oracle (1000 random digraphs vs exhaustive DFS)",
    "test_evaluator_fixture": "Evaluator fixture (strict 0.75/0.60/0.667, lenient 0.889, polarity 0.75)",
    "test_matching_oracle": "Matching oracle (500 random pairs vs brute force)",
    "test_prompt_fidelity": "Prompt fidelity (instruction texts byte-equal to fixtures)",
    "test_mock_end_to_end": "Mock end-to-end (batch F1 1.0 all strategies; prose exit 2)",
    "test_self_evaluation_property": "Self-evaluation (500 random diagrams all 1.0)",
    "test_live_smoke": "Live smoke (optional, env-gated)",
}

_acceptance_reports: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    base = item.name.split("[")[0]
    if base not in ACCEPTANCE_LABELS or item.module.__name__ != "test_acceptance":
        return
    if report.when == "call":
        _acceptance_reports[base] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.skipped:
        _acceptance_reports[base] = "SKIP"
    elif report.when == "setup" and report.failed:
        _acceptance_reports[base] = "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_reports:
        return
    terminalreporter.section("acceptance criteria")
    for name, label in ACCEPTANCE_LABELS.items():
        status = _acceptance_reports.get(name)
        if status is None:
            continue
        terminalreporter.write_line(f"ACCEPTANCE {status}: {label}")
