import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load
from oracles import brute_projections, random_scene, saturate
from tagplan.errors import EmptyDomain, MissingContextSet, SearchBoundExceeded
from tagplan.knowledge import KnowledgeBase, ModalFact, Modality
from tagplan.reference import (
    ReferenceDomains,
    filter_distractors,
    init_domains,
    joint_solutions,
    more_salient,
    most_salient,
    projections,
    verify_unique,
)
from tagplan.terms import Fn, Var, atom

C = Modality.COMMON
IN_START = atom("in", Var("prep"), Fn("start", (Var("time"),)), Var("removed"), Var("source"))
INTENDED = {"removed": "r1", "source": "h1", "prep": "prep1", "time": "t1"}


@pytest.fixture
def rabbit_domains(rabbit):
    scene = rabbit[0]
    doms = init_domains(
        {"removed": "r1", "source": "h1"}, scene.context_sets
    )
    return scene.kb, doms


def test_initial_domains_are_context_sets(rabbit_domains, rabbit):
    _, doms = rabbit_domains
    assert doms["removed"] == frozenset(rabbit[0].entities)
    assert {"r1", "r2", "r3", "f1", "h1", "h2", "b1"} <= doms["source"]


def test_brand_new_variables_have_no_domain(rabbit):
    doms = init_domains({"removing": "a1", "removed": "r1"}, rabbit[0].context_sets, frozenset({"a1"}))
    assert "removing" not in doms and "removed" in doms


def test_singleton_context_set(kitchen):
    assert init_domains({"v": "c1"}, kitchen[0].context_sets)["v"] == {"c1"}


def test_missing_context_set():
    with pytest.raises(MissingContextSet):
        init_domains({"v": "zz"}, {})


def test_rabbit_narrowing(rabbit_domains):
    kb, doms = rabbit_domains
    doms = filter_distractors(kb, doms, [IN_START], INTENDED)
    assert doms["source"] == {"h1", "h2", "b1"}
    doms = filter_distractors(kb, doms, [atom("hat", Var("source"))], INTENDED)
    assert doms["source"] == {"h1", "h2"}
    doms = filter_distractors(kb, doms, [atom("rabbit", Var("removed"))], INTENDED)
    assert doms["removed"] == {"r1"} and doms["source"] == {"h1"}
    assert verify_unique(kb, doms, INTENDED) == {"removed": True, "source": True}


def test_unique_rabbit_hat_pair():
    scene = load("dh")[0]
    x, y = Var("x"), Var("y")
    doms = init_domains({"x": "r5", "y": "h3"}, scene.context_sets)
    doms = filter_distractors(
        scene.kb, doms, [atom("rabbit", x), atom("hat", y), atom("in", x, y)], {"x": "r5", "y": "h3"}
    )
    assert doms["x"] == {"r5"} and doms["y"] == {"h3"}


def _two_rabbits():
    kb = KnowledgeBase()
    for a in [atom("rabbit", "r1"), atom("rabbit", "r2"), atom("hat", "h1"), atom("hat", "h2"),
              atom("in", "r1", "h1"), atom("in", "r2", "h2")]:
        kb.assert_fact(ModalFact(C, a))
    everything = frozenset({"r1", "r2", "h1", "h2"})
    return kb, {e: everything for e in everything}


def test_symmetric_distractor_is_not_unique():
    kb, ctx = _two_rabbits()
    x, y = Var("x"), Var("y")
    intended = {"x": "r1", "y": "h1"}
    doms = filter_distractors(kb, init_domains(intended, ctx),
                              [atom("rabbit", x), atom("hat", y), atom("in", x, y)], intended)
    assert verify_unique(kb, doms, intended) == {"x": False, "y": False}
    assert joint_solutions(kb, doms, intended) == [{"x": "r1", "y": "h1"}, {"x": "r2", "y": "h2"}]


def test_empty_domain():
    kb, ctx = _two_rabbits()
    with pytest.raises(EmptyDomain):
        filter_distractors(kb, init_domains({"x": "r1"}, ctx), [atom("hat", Var("x")), atom("rabbit", Var("x"))],
                           {"x": "r1"})


def test_search_bound():
    kb, ctx = _two_rabbits()
    intended = {"x": "r1", "y": "h1"}
    doms = filter_distractors(kb, init_domains(intended, ctx), [atom("in", Var("x"), Var("y"))], intended)
    with pytest.raises(SearchBoundExceeded):
        joint_solutions(kb, doms, intended, bound=3)


def test_unconstrained_variable_keeps_its_domain():
    kb, ctx = _two_rabbits()
    doms = init_domains({"x": "r1"}, ctx)
    assert projections(kb, doms, {"x": "r1"})["x"] == ctx["r1"]


def test_salience():
    ctx = {"c1": frozenset({"c1"}), "c2": frozenset({"c1", "c2"}), "t": frozenset({"c1", "c2", "t"})}
    assert more_salient("c1", "c2", ctx) and not more_salient("c2", "c1", ctx)
    assert most_salient(ctx) == ["c1"]
    flat = {e: frozenset(ctx) for e in ctx}
    assert most_salient(flat) == []


# -- properties against brute force ------------------------------------------


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**9))
def test_arc_consistency_against_brute_force(seed):
    kb, domains, constraints, assignment, truths = random_scene(random.Random(seed))
    start = ReferenceDomains(domains, ())
    pruned = filter_distractors(kb, start, constraints, assignment)
    exact = brute_projections(domains, constraints, assignment, truths)
    for v in domains:
        assert exact[v] <= pruned[v] <= domains[v]
    unique = verify_unique(kb, pruned, assignment)
    assert unique == {v: exact[v] == {assignment[v]} for v in domains}


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9), st.randoms())
def test_pruning_is_order_independent(seed, shuffler):
    kb, domains, constraints, assignment, _ = random_scene(random.Random(seed))
    start = ReferenceDomains(domains, ())
    one_shot = filter_distractors(kb, start, constraints, assignment)
    shuffled = list(constraints)
    shuffler.shuffle(shuffled)
    incremental = start
    for c in shuffled:
        incremental = filter_distractors(kb, incremental, [c], assignment)
    assert dict(one_shot.domains) == dict(incremental.domains)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_domains_only_shrink(seed):
    kb, domains, constraints, assignment, _ = random_scene(random.Random(seed))
    current = ReferenceDomains(domains, ())
    for c in constraints:
        nxt = filter_distractors(kb, current, [c], assignment)
        assert all(nxt[v] <= current[v] for v in domains)
        current = nxt


def test_fixture_truth_sets_contain_intended(rabbit):
    # the intended referents always satisfy the requirements
    truths = saturate(rabbit[0].kb, C)
    assert atom("in", "prep1", Fn("start", ("t1",)), "r1", "h1") in truths


def test_exact_search_goes_beyond_arc_consistency():
    # a two-colouring of a triangle: every value has pairwise support, but
    # the only joint solution is the intended one
    kb = KnowledgeBase()
    for pair in [("a", "b"), ("b", "a"), ("p", "q"), ("q", "r"), ("p", "r")]:
        kb.assert_fact(ModalFact(C, atom("d", *pair)))
    x, y, z = Var("x"), Var("y"), Var("z")
    intended = {"x": "p", "y": "q", "z": "r"}
    doms = ReferenceDomains({"x": frozenset("abp"), "y": frozenset("abq"), "z": frozenset("abr")}, ())
    pruned = filter_distractors(kb, doms, [atom("d", x, y), atom("d", y, z), atom("d", x, z)], intended)
    assert pruned["x"] == frozenset("abp")
    assert verify_unique(kb, pruned, intended) == {"x": True, "y": True, "z": True}
