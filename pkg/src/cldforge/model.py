"""Core domain model for causal loop diagrams.

A causal loop diagram (CLD) is a directed graph of named variables whose
signed links express causal influence. Feedback loops are simple cycles,
classified reinforcing or balancing by the parity of their negative links.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import networkx as nx

__all__ = [
    "Polarity",
    "LoopKind",
    "VariableName",
    "Link",
    "CausalLoopDiagram",
    "FeedbackLoop",
    "CldError",
    "DuplicateLinkError",
    "EmptyNameError",
    "NotACycleError",
    "TooManyLoopsError",
    "normalize_name",
    "build_diagram",
    "exogenous_variables",
    "enumerate_loops",
    "classify_loop",
    "DEFAULT_MAX_LOOPS",
]

DEFAULT_MAX_LOOPS = 10_000

_WHITESPACE_RUN = re.compile(r"\s+")


class CldError(Exception):
    """Base class for diagram construction and analysis errors."""


class DuplicateLinkError(CldError):
    """Two links share the same ordered (source, target) pair."""


class EmptyNameError(CldError):
    """A link endpoint normalizes to empty text."""


class NotACycleError(CldError):
    """A link sequence does not chain into a simple cycle."""


class TooManyLoopsError(CldError):
    """Loop enumeration exceeded the configured bound."""


class Polarity(Enum):
    """Sign of a causal link: variables move together (+) or opposite (-)."""

    POSITIVE = "Positive"
    NEGATIVE = "Negative"

    @property
    def arrowhead(self) -> str:
        """DOT arrowhead attribute value: vee for positive, tee for negative."""
        return "vee" if self is Polarity.POSITIVE else "tee"

    @property
    def sign(self) -> int:
        return 1 if self is Polarity.POSITIVE else -1


class LoopKind(Enum):
    """Feedback loop classification by negative-link parity."""

    REINFORCING = "Reinforcing"
    BALANCING = "Balancing"


def normalize_name(raw: str) -> str:
    """Lowercase, trim, and collapse internal whitespace runs to one space.

    Idempotent; empty input yields empty output (callers validate
    non-emptiness where it matters).
    """
    return _WHITESPACE_RUN.sub(" ", raw.strip()).lower()


@dataclass(frozen=True)
class VariableName:
    """A variable's raw spelling plus its normalized identity.

    Identity is the normalized form; raw spelling is kept for display.
    """

    raw: str
    normalized: str

    @classmethod
    def of(cls, raw: str) -> "VariableName":
        return cls(raw=raw, normalized=normalize_name(raw))


@dataclass(frozen=True)
class Link:
    """A signed causal link. Self-loops (source == target) are permitted."""

    source: VariableName
    target: VariableName
    polarity: Polarity

    @property
    def key(self) -> tuple[str, str]:
        """Ordered (source, target) pair of normalized names."""
        return (self.source.normalized, self.target.normalized)


def link(source: str, target: str, polarity: Polarity) -> Link:
    """Build a Link from raw name strings."""
    return Link(VariableName.of(source), VariableName.of(target), polarity)


@dataclass(frozen=True)
class CausalLoopDiagram:
    """An ordered set of variables plus an ordered set of signed links.

    Invariants (enforced by build_diagram): every link endpoint appears in
    variables, at most one link per ordered variable pair, and normalized
    variable names are unique.
    """

    variables: tuple[VariableName, ...]
    links: tuple[Link, ...]

    @cached_property
    def variable_by_norm(self) -> dict[str, VariableName]:
        return {v.normalized: v for v in self.variables}

    @cached_property
    def link_by_key(self) -> dict[tuple[str, str], Link]:
        return {lk.key: lk for lk in self.links}

    def in_degree(self, normalized: str) -> int:
        return sum(1 for lk in self.links if lk.target.normalized == normalized)


@dataclass(frozen=True)
class FeedbackLoop:
    """A simple cycle of links in canonical rotation, with its classification.

    Canonical rotation starts at the lexicographically smallest normalized
    variable name in the loop.
    """

    links: tuple[Link, ...]
    kind: LoopKind

    @property
    def length(self) -> int:
        return len(self.links)

    @property
    def member_names(self) -> tuple[str, ...]:
        """Normalized source names around the loop, in order."""
        return tuple(lk.source.normalized for lk in self.links)


def build_diagram(links: list[Link] | tuple[Link, ...]) -> CausalLoopDiagram:
    """Assemble a validated diagram from links.

    Variables are the union of normalized endpoints in first-appearance
    order (first-seen raw spelling wins). Raises DuplicateLinkError when the
    same ordered pair occurs twice (regardless of polarity) and
    EmptyNameError when an endpoint normalizes to empty text.
    """
    variables: dict[str, VariableName] = {}
    seen_pairs: set[tuple[str, str]] = set()
    for lk in links:
        for endpoint in (lk.source, lk.target):
            if not endpoint.normalized:
                raise EmptyNameError(
                    f"link endpoint {endpoint.raw!r} normalizes to empty text"
                )
            variables.setdefault(endpoint.normalized, endpoint)
        if lk.key in seen_pairs:
            raise DuplicateLinkError(
                f"duplicate link {lk.source.normalized!r} -> {lk.target.normalized!r}"
            )
        seen_pairs.add(lk.key)
    return CausalLoopDiagram(variables=tuple(variables.values()), links=tuple(links))


def exogenous_variables(d: CausalLoopDiagram) -> list[VariableName]:
    """Variables with zero incoming links, in diagram variable order."""
    targets = {lk.target.normalized for lk in d.links}
    return [v for v in d.variables if v.normalized not in targets]


def classify_loop(links: list[Link] | tuple[Link, ...]) -> LoopKind:
    """Classify a simple cycle: reinforcing iff its negative-link count is even.

    Raises NotACycleError when the links do not chain into a simple cycle
    (consecutive targets/sources must match, the last target must close on
    the first source, and no source may repeat).
    """
    if not links:
        raise NotACycleError("empty link list is not a cycle")
    sources = [lk.source.normalized for lk in links]
    if len(set(sources)) != len(sources):
        raise NotACycleError("a variable repeats as a source; not a simple cycle")
    for i, lk in enumerate(links):
        nxt = links[(i + 1) % len(links)]
        if lk.target.normalized != nxt.source.normalized:
            raise NotACycleError(
                f"link {i} targets {lk.target.normalized!r} but the next link "
                f"starts at {nxt.source.normalized!r}"
            )
    negatives = sum(1 for lk in links if lk.polarity is Polarity.NEGATIVE)
    return LoopKind.REINFORCING if negatives % 2 == 0 else LoopKind.BALANCING


def _canonical_rotation(cycle: list[str]) -> list[str]:
    pivot = cycle.index(min(cycle))
    return cycle[pivot:] + cycle[:pivot]


def enumerate_loops(
    d: CausalLoopDiagram, max_loops: int = DEFAULT_MAX_LOOPS
) -> list[FeedbackLoop]:
    """Enumerate every distinct simple cycle exactly once.

    Each loop is returned in canonical rotation (starting at its
    lexicographically smallest normalized variable name) and classified by
    negative-link parity. Output is sorted by (loop length, member name
    sequence). An acyclic diagram yields an empty list.

    Enumeration is exact; diagrams at CLD scale are small, but work is
    bounded by max_loops and TooManyLoopsError is raised beyond that.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(v.normalized for v in d.variables)
    graph.add_edges_from(lk.key for lk in d.links)

    loops: list[FeedbackLoop] = []
    for cycle in nx.simple_cycles(graph):
        if len(loops) >= max_loops:
            raise TooManyLoopsError(f"more than {max_loops} feedback loops")
        nodes = _canonical_rotation(cycle)
        cycle_links = tuple(
            d.link_by_key[(nodes[i], nodes[(i + 1) % len(nodes)])]
            for i in range(len(nodes))
        )
        loops.append(FeedbackLoop(links=cycle_links, kind=classify_loop(cycle_links)))
    loops.sort(key=lambda lp: (lp.length, lp.member_names))
    return loops
