import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ground_instance
from hddl.model import Task, TaskNetwork
from hddl.model.core import transitive_closure
from hddl.pipeline import load_ground
from hddl.planner import PROVEN, SOLVED, WITHIN_LIMITS, SearchLimits, canonical, plan, realizable_tasks
from hddl.verification import enumerate_solutions, verify


def test_transport_one_package(transport1):
    run = plan(transport1)
    assert run.status == SOLVED
    assert len(run.plan) == 4
    assert verify(transport1, run.plan, run.tree).accepted


def test_transport_two_packages(transport2):
    run = plan(transport2)
    assert run.status == SOLVED
    assert len(run.plan) == 8
    assert verify(transport2, run.plan, run.tree).accepted


def test_verbatim_problem_proven_unsolvable():
    g = ground_instance("transport-verbatim")
    run = plan(g, SearchLimits(max_depth=None, max_length=None, time_budget=None))
    assert run.status == PROVEN and run.reason == "proven unsolvable"
    # no truck location in the initial state: no drive or deliver can ever be realized
    dead = set(g.tasks) - realizable_tasks(g)
    assert any(t.name == "deliver" for t in dead)


def test_empty_network_solved_at_root():
    run = plan(ground_instance("empty"))
    assert run.solved and len(run.plan) == 0 and run.stats.nodes == 1


def test_node_budget(transport2):
    run = plan(transport2, SearchLimits(node_budget=1))
    assert run.status == WITHIN_LIMITS
    assert run.stats.budget_hit and run.reason == "node budget exhausted"


def test_depth_and_length_limits(transport1):
    assert plan(transport1, SearchLimits(max_depth=1)).reason == "depth limit reached"
    short = plan(transport1, SearchLimits(max_length=3))
    assert short.status == WITHIN_LIMITS and short.reason == "length limit reached"
    assert plan(transport1, SearchLimits(max_length=4)).solved


@pytest.mark.parametrize("field", ["max_depth", "max_length", "node_budget", "time_budget"])
def test_limits_must_be_positive(field):
    with pytest.raises(ValueError):
        SearchLimits(**{field: 0})


def test_stats_lines(transport1):
    lines = plan(transport1).stats.lines()
    assert [ln.split("=")[0] for ln in lines] == [
        "nodes", "duplicates", "max_depth", "iterations", "elapsed", "budget_hit", "dead_tasks",
    ]


def test_search_is_deterministic(transport2):
    a, b = plan(transport2), plan(transport2)
    assert a.plan == b.plan and a.stats.nodes == b.stats.nodes


@pytest.mark.parametrize(
    "key",
    [
        "transport-1",
        "transport-2",
        "transport-verbatim",
        "transport-params",
        "transport-goal",
        "shop-order",
        "quantified",
        "conditional",
        "method-prec-po",
        "constants",
        "factory",
        "empty",
    ],
)
def test_planner_agrees_with_oracle(key):
    g = ground_instance(key)
    run = plan(g)
    oracle = enumerate_solutions(g, 10, 10)
    assert run.solved == bool(oracle)
    if run.solved:
        assert verify(g, run.plan, run.tree).accepted
        assert len(run.plan) >= len(oracle[0][0])
    else:
        assert run.status == PROVEN


def test_method_choice_backtracks(tmp_path):
    # the first method is a dead end that only shows up after an action
    (tmp_path / "d.hddl").write_text(
        """(define (domain d) (:requirements :htn)
      (:predicates (ok))
      (:task t :parameters ())
      (:method m-bad :parameters () :task (t) :ordered-subtasks (and (a) (need)))
      (:method m-good :parameters () :task (t) :ordered-subtasks (and (set) (need)))
      (:action a :parameters ())
      (:action set :parameters () :effect (ok))
      (:action need :parameters () :precondition (ok)))"""
    )
    (tmp_path / "p.hddl").write_text("(define (problem q) (:domain d) (:htn :tasks (t)) (:init))")
    g = load_ground(tmp_path / "d.hddl", tmp_path / "p.hddl")
    run = plan(g)
    assert [t.name for t in run.plan.tasks] == ["set", "need"]
    assert run.tree.nodes[0].method == "m-good"


# -- canonical network descriptions ---------------------------------------------------------

LABELS = [Task("a"), Task("b"), Task("c", ("x",))]


@st.composite
def networks(draw, n_max=5):
    n = draw(st.integers(0, n_max))
    ids = [f"i{k}" for k in range(n)]
    pairs = [(ids[a], ids[b]) for a in range(n) for b in range(a + 1, n) if draw(st.booleans())]
    alpha = {i: draw(st.sampled_from(LABELS)) for i in ids}
    listing = draw(st.permutations(ids))
    return TaskNetwork(tuple(listing), transitive_closure(pairs), alpha)


def isomorphic(x, y):
    if len(x.ids) != len(y.ids) or len(x.order) != len(y.order):
        return False
    for perm in itertools.permutations(y.ids):
        m = dict(zip(x.ids, perm))
        if all(x.alpha[i] == y.alpha[m[i]] for i in x.ids) and {(m[a], m[b]) for a, b in x.order} == set(y.order):
            return True
    return False


@settings(max_examples=300, deadline=None)
@given(networks(), networks())
def test_equal_descriptions_imply_isomorphic(x, y):
    if canonical(x) == canonical(y):
        assert isomorphic(x, y)


@settings(max_examples=100, deadline=None)
@given(networks(), st.data())
def test_description_ignores_identifier_names(x, data):
    names = data.draw(st.permutations([f"r{k}" for k in range(len(x.ids))]))
    m = dict(zip(x.ids, names))
    y = TaskNetwork(tuple(m[i] for i in x.ids), frozenset((m[a], m[b]) for a, b in x.order), {m[i]: t for i, t in x.alpha.items()})
    assert canonical(x) == canonical(y)
