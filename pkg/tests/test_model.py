"""Core domain tests: normalization, diagram construction, loop enumeration.

Loop enumeration is checked against ``dfs_cycles`` from conftest, an
independent exhaustive DFS sharing no code with the library's enumeration.
"""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NAME_POOL, dfs_cycles, random_diagram, sign_product
from cldforge.model import (
    CausalLoopDiagram,
    DuplicateLinkError,
    EmptyNameError,
    FeedbackLoop,
    Link,
    LoopKind,
    NotACycleError,
    Polarity,
    TooManyLoopsError,
    VariableName,
    build_diagram,
    classify_loop,
    enumerate_loops,
    exogenous_variables,
    link,
    normalize_name,
)


# --- normalization ------------------------------------------------------------


def test_normalize_examples():
    assert normalize_name("  Market   Price ") == "market price"
    assert normalize_name("Births") == "births"
    assert normalize_name("a\tb\nc") == "a b c"


@given(st.text())
def test_normalize_idempotent(raw):
    once = normalize_name(raw)
    assert normalize_name(once) == once


@given(st.text())
def test_normalize_no_outer_space_no_runs(raw):
    norm = normalize_name(raw)
    assert norm == norm.strip()
    assert "  " not in norm
    assert norm == norm.lower()


def test_variable_name_of():
    v = VariableName.of("  Rabbit  Population ")
    assert v.raw == "  Rabbit  Population "
    assert v.normalized == "rabbit population"


# --- diagram construction ------------------------------------------------------


def test_build_diagram_first_appearance_order_and_raw():
    links = (
        link("Births", "Rabbit Population", Polarity.POSITIVE),
        link("rabbit population", "births", Polarity.POSITIVE),
    )
    d = build_diagram(links)
    assert [v.normalized for v in d.variables] == ["births", "rabbit population"]
    # First spelling seen is the display spelling.
    assert d.variable_by_norm["births"].raw == "Births"
    assert d.variable_by_norm["rabbit population"].raw == "Rabbit Population"


def test_build_diagram_duplicate_link_rejected():
    links = (
        link("a", "b", Polarity.POSITIVE),
        link("A ", " b", Polarity.NEGATIVE),  # same normalized ordered pair
    )
    with pytest.raises(DuplicateLinkError):
        build_diagram(links)


def test_build_diagram_empty_name_rejected():
    with pytest.raises(EmptyNameError):
        build_diagram((link("  ", "b", Polarity.POSITIVE),))


def test_self_link_allowed():
    d = build_diagram((link("x", "x", Polarity.NEGATIVE),))
    loops = enumerate_loops(d)
    assert len(loops) == 1
    assert loops[0].length == 1
    assert loops[0].kind is LoopKind.BALANCING


# --- classify_loop --------------------------------------------------------------


def chain(names: list[str], polarities: list[Polarity]) -> tuple[Link, ...]:
    pairs = list(zip(names, names[1:] + names[:1]))
    return tuple(
        link(s, t, p) for (s, t), p in zip(pairs, polarities)
    )


def test_classify_loop_parity_examples():
    assert classify_loop(chain(["a", "b"], [Polarity.POSITIVE] * 2)) is LoopKind.REINFORCING
    assert classify_loop(chain(["a", "b"], [Polarity.POSITIVE, Polarity.NEGATIVE])) is LoopKind.BALANCING
    assert classify_loop(chain(["a", "b", "c"], [Polarity.NEGATIVE] * 3)) is LoopKind.BALANCING
    assert classify_loop(chain(["a", "b", "c"], [Polarity.NEGATIVE, Polarity.NEGATIVE, Polarity.POSITIVE])) is LoopKind.REINFORCING


@given(
    st.integers(min_value=1, max_value=6),
    st.lists(st.sampled_from([Polarity.POSITIVE, Polarity.NEGATIVE]), min_size=6, max_size=6),
)
def test_classify_loop_matches_sign_product(length, polarities):
    names = [f"n{i}" for i in range(length)]
    links = chain(names, polarities[:length])
    expected = LoopKind.REINFORCING if sign_product(links) > 0 else LoopKind.BALANCING
    assert classify_loop(links) is expected


def test_classify_loop_rejects_broken_chain():
    bad = (link("a", "b", Polarity.POSITIVE), link("c", "a", Polarity.POSITIVE))
    with pytest.raises(NotACycleError):
        classify_loop(bad)


def test_classify_loop_rejects_unclosed_path():
    bad = (link("a", "b", Polarity.POSITIVE), link("b", "c", Polarity.POSITIVE))
    with pytest.raises(NotACycleError):
        classify_loop(bad)


def test_classify_loop_rejects_repeated_node():
    # chains a -> b -> a -> b -> a, so closure holds but nodes repeat
    bad = (
        link("a", "b", Polarity.POSITIVE),
        link("b", "a", Polarity.POSITIVE),
        link("a", "b", Polarity.NEGATIVE),
        link("b", "a", Polarity.NEGATIVE),
    )
    with pytest.raises(NotACycleError):
        classify_loop(bad)


# --- enumerate_loops -------------------------------------------------------------


def test_enumerate_loops_against_dfs_oracle_random():
    rng = random.Random(20250819)
    for _ in range(200):
        d = random_diagram(rng, max_nodes=7, max_links=16)
        expected = dfs_cycles(d)
        loops = enumerate_loops(d)
        assert {lp.member_names for lp in loops} == expected
        for lp in loops:
            parity = sign_product(lp.links)
            assert lp.kind is (
                LoopKind.REINFORCING if parity > 0 else LoopKind.BALANCING)


def test_enumerate_loops_canonical_rotation_and_order():
    d = build_diagram((
        link("c", "a", Polarity.POSITIVE),
        link("a", "c", Polarity.POSITIVE),
        link("b", "c", Polarity.POSITIVE),
        link("c", "b", Polarity.NEGATIVE),
        link("a", "b", Polarity.POSITIVE),
    ))
    loops = enumerate_loops(d)
    names = [lp.member_names for lp in loops]
    # Each starts at its lexicographically smallest member; sorted by
    # (length, members).
    assert names == [("a", "c"), ("b", "c"), ("a", "b", "c")]
    assert [lp.kind for lp in loops] == [
        LoopKind.REINFORCING, LoopKind.BALANCING, LoopKind.REINFORCING]


def test_enumerate_loops_deterministic_across_runs():
    rng = random.Random(7)
    d = random_diagram(rng, max_nodes=8, max_links=20)
    assert enumerate_loops(d) == enumerate_loops(d)


def test_enumerate_loops_bound():
    names = [f"n{i}" for i in range(6)]
    links = tuple(
        link(s, t, Polarity.POSITIVE) for s in names for t in names if s != t
    )
    d = build_diagram(links)
    with pytest.raises(TooManyLoopsError):
        enumerate_loops(d, max_loops=5)


def test_feedback_loop_fields():
    d = build_diagram((
        link("Births", "Rabbit Population", Polarity.POSITIVE),
        link("Rabbit Population", "Births", Polarity.POSITIVE),
    ))
    (loop,) = enumerate_loops(d)
    assert isinstance(loop, FeedbackLoop)
    assert loop.length == 2
    assert loop.member_names == ("births", "rabbit population")
    assert loop.kind is LoopKind.REINFORCING


# --- exogenous variables -----------------------------------------------------------


def test_exogenous_variables_zero_in_degree():
    d = build_diagram((
        link("birth fraction", "births", Polarity.POSITIVE),
        link("births", "rabbit population", Polarity.POSITIVE),
        link("rabbit population", "births", Polarity.POSITIVE),
    ))
    assert [v.normalized for v in exogenous_variables(d)] == ["birth fraction"]


def test_exogenous_variables_preserve_diagram_order():
    d = build_diagram((
        link("z src", "sink", Polarity.POSITIVE),
        link("a src", "sink", Polarity.NEGATIVE),
    ))
    assert [v.normalized for v in exogenous_variables(d)] == ["z src", "a src"]


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_exogenous_matches_in_degree_count(seed):
    d = random_diagram(random.Random(seed), max_nodes=8, max_links=20)
    exo = {v.normalized for v in exogenous_variables(d)}
    targets = {lk.target.normalized for lk in d.links}
    assert exo == {v.normalized for v in d.variables} - targets
