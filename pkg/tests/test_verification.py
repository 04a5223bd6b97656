import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus, ground_instance
from hddl.grounding import GroundMethod
from hddl.model import Task, TaskNetwork
from hddl.pipeline import load_ground
from hddl.verification import (
    DecompositionError,
    DecompositionTree,
    OracleLimitExceeded,
    Plan,
    PlanStep,
    TreeNode,
    WitnessParseError,
    decompose_step,
    enumerate_solutions,
    format_witness,
    parse_witness,
    renumber,
    verify,
)
from mutations import mutants
from set_decomposition import random_case, reference_decompose

A, B, C = Task("a"), Task("b"), Task("c")


def method(ids, order, labels, task=C):
    return GroundMethod("m", (), task, TaskNetwork(tuple(ids), frozenset(order), dict(zip(ids, labels))))


# -- decompose_step -----------------------------------------------------------------------


def test_empty_method_keeps_outer_order():
    tn = TaskNetwork(("i0", "i1", "i2"), frozenset({("i0", "i1"), ("i1", "i2"), ("i0", "i2")}), {"i0": A, "i1": C, "i2": B})
    out = decompose_step(tn, "i1", method([], [], []))
    assert out.ids == ("i0", "i2")
    assert out.order == frozenset({("i0", "i2")})


def test_sole_node_expanded():
    tn = TaskNetwork(("i0",), frozenset(), {"i0": C})
    out = decompose_step(tn, "i0", method(["x", "y"], [("x", "y")], [A, B]))
    assert out.ids == ("i0.0", "i0.1")
    assert out.order == frozenset({("i0.0", "i0.1")})
    assert out.alpha == {"i0.0": A, "i0.1": B}


def test_predecessor_reaches_every_new_id():
    tn = TaskNetwork(("i0", "i1"), frozenset({("i0", "i1")}), {"i0": A, "i1": C})
    out = decompose_step(tn, "i1", method(["x", "y"], [], [A, B]), {"x": "a", "y": "b"})
    assert out.order == frozenset({("i0", "a"), ("i0", "b")})


def test_successor_follows_every_new_id():
    tn = TaskNetwork(("i0", "i1"), frozenset({("i0", "i1")}), {"i0": C, "i1": A})
    out = decompose_step(tn, "i0", method(["x", "y"], [], [A, B]))
    assert out.ids == ("i0.0", "i0.1", "i1")
    assert out.order == frozenset({("i0.0", "i1"), ("i0.1", "i1")})


@pytest.mark.parametrize(
    "target, m, rename",
    [
        ("zz", method([], [], []), None),
        ("i0", method([], [], [], task=A), None),
        ("i0", method(["x"], [], [A]), {"x": "i1"}),
        ("i0", method(["x", "y"], [], [A, B]), {"x": "n", "y": "n"}),
    ],
)
def test_decompose_step_errors(target, m, rename):
    tn = TaskNetwork(("i0", "i1"), frozenset(), {"i0": C, "i1": A})
    with pytest.raises(DecompositionError):
        decompose_step(tn, target, m, rename)


def _compare_with_reference(tn, i, m):
    out = decompose_step(tn, i, m)
    rename = {j: f"{i}.{k}" for k, j in enumerate(m.network.ids)}
    sub = m.network
    ids2, order2, alpha2 = reference_decompose(
        tn.ids,
        tn.order,
        tn.alpha,
        i,
        m.task,
        [rename[j] for j in sub.ids],
        {(rename[a], rename[b]) for a, b in sub.order},
        {rename[j]: t for j, t in sub.alpha.items()},
    )
    assert set(out.ids) == ids2 and len(out.ids) == len(ids2)
    assert set(out.order) == order2
    assert dict(out.alpha) == alpha2
    assert out.is_strict_partial_order()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decompose_step_matches_set_formula(seed):
    _compare_with_reference(*random_case(random.Random(seed)))


def test_decompose_step_thousand_seeded_cases():
    rng = random.Random(7)
    for _ in range(1000):
        _compare_with_reference(*random_case(rng))


# -- witnesses ----------------------------------------------------------------------------

WITNESS = """; comment line
==>
0 drive city-loc-0 city-loc-1
1 pick-up city-loc-1 package-0
2 drive city-loc-1 city-loc-0
3 drop city-loc-0 package-0
root 4
4 deliver package-0 city-loc-0 -> m-deliver 5 1 6 3
5 get-to city-loc-1 -> m-direct 0
6 get-to city-loc-0 -> m-direct 2
<==
"""


def test_parse_witness():
    plan, tree = parse_witness(WITNESS)
    assert plan.ids == ("0", "1", "2", "3")
    assert plan.tasks[1] == Task("pick-up", ("city-loc-1", "package-0"))
    assert tree.roots == ("4",)
    assert tree.node_map()["4"].children == ("5", "1", "6", "3")


def test_witness_round_trip():
    plan, tree = parse_witness(WITNESS)
    assert parse_witness(format_witness(plan, tree)) == (plan, tree)


def test_witness_is_case_insensitive():
    plan, _ = parse_witness(WITNESS.replace("drive", "DRIVE"))
    assert plan.tasks[0].name == "drive"


@pytest.mark.parametrize(
    "text",
    [
        "0 a\nroot 0\n<==",
        "==>\n0 a\nroot 0\n",
        "==>\n0 a\n<==",
        "==>\nroot\nroot\n<==",
        "==>\n0\nroot 0\n<==",
        "==>\nroot 1\n1 t ->\n<==",
        "==>\n==>\nroot\n<==",
    ],
)
def test_malformed_witness(text):
    with pytest.raises(WitnessParseError):
        parse_witness(text)


def test_renumber_order():
    plan = Plan((PlanStep("x", A), PlanStep("y", B)))
    tree = DecompositionTree(("r",), (TreeNode("r", C, "m", ("s", "y")), TreeNode("s", C, "m", ("x",))))
    p2, t2 = renumber(plan, tree)
    assert p2.ids == ("0", "1")
    assert t2.roots == ("2",)
    assert [(n.id, n.children) for n in t2.nodes] == [("2", ("3", "1")), ("3", ("0",))]


# -- verify -------------------------------------------------------------------------------


def test_verify_accepts_witness(transport1):
    assert verify(transport1, *parse_witness(WITNESS)).accepted


def test_verify_rejects_swapped_steps(transport1):
    plan, tree = parse_witness(WITNESS)
    steps = plan.steps
    swapped = Plan((steps[1], steps[0]) + steps[2:])
    v = verify(transport1, swapped, tree)
    assert not v.accepted and v.stage == "ordering"
    assert "stage=ordering" in str(v)


def test_verify_empty_initial_network():
    g = ground_instance("empty")
    assert verify(g, Plan(), DecompositionTree()).accepted
    assert not verify(g, Plan((PlanStep("0", A),)), DecompositionTree(("0",))).accepted


def _chain_model(goal=""):
    text_domain = """(define (domain d) (:requirements :htn)
      (:predicates (q))
      (:task t :parameters ())
      (:method m :parameters () :task (t) :subtasks (and (x (a)) (y (b))))
      (:method m-ordered :parameters () :task (t) :ordered-subtasks (and (x (a)) (y (b))))
      (:action a :parameters ()) (:action b :parameters ()))"""
    text_problem = f"(define (problem q) (:domain d) (:htn :tasks (t)) (:init) {goal})"
    return text_domain, text_problem


def _load_text(tmp_path, d, p):
    (tmp_path / "d.hddl").write_text(d)
    (tmp_path / "p.hddl").write_text(p)
    return load_ground(tmp_path / "d.hddl", tmp_path / "p.hddl")


def test_goal_stage(tmp_path):
    g = _load_text(tmp_path, *_chain_model("(:goal (q))"))
    tree = DecompositionTree(("r",), (TreeNode("r", Task("t"), "m", ("0", "1")),))
    v = verify(g, Plan((PlanStep("0", Task("a")), PlanStep("1", Task("b")))), tree)
    assert not v.accepted and v.stage == "goal"


def test_more_ordered_plan_accepted_less_ordered_rejected(tmp_path):
    g = _load_text(tmp_path, *_chain_model())
    for method_name in ("m", "m-ordered"):
        tree = DecompositionTree(("r",), (TreeNode("r", Task("t"), method_name, ("0", "1")),))
        forward = Plan((PlanStep("0", Task("a")), PlanStep("1", Task("b"))))
        backward = Plan((PlanStep("1", Task("b")), PlanStep("0", Task("a"))))
        # a total order always refines the unordered network
        assert verify(g, forward, tree).accepted
        v = verify(g, backward, tree)
        assert v.accepted == (method_name == "m")
        if not v.accepted:
            assert v.stage == "ordering"


def test_executability_stage():
    g = ground_instance("factory")
    use_first = Plan((PlanStep("0", Task("use", ("w",))), PlanStep("1", Task("make", ("w",)))))
    tree = DecompositionTree(("2",), (TreeNode("2", Task("build", ("w",)), "m-build", ("0", "1")),))
    v = verify(g, use_first, tree)
    assert not v.accepted and v.stage == "executability"
    assert "(made w)" in v.detail
    assert verify(g, Plan(use_first.steps[::-1]), tree).accepted


@pytest.mark.parametrize("key", ["transport-1", "shop-order", "method-prec-po", "factory", "transport-params"])
def test_mutations_rejected_at_expected_stage(key):
    g = ground_instance(key)
    sols = enumerate_solutions(g, 6, 6)
    assert sols
    kinds = Counter()
    for plan, tree in sols[:5]:
        assert verify(g, plan, tree).accepted
        for kind, p, t, stage in mutants(g, plan, tree):
            v = verify(g, p, t)
            assert not v.accepted, (kind, format_witness(p, t))
            assert v.stage == stage, (kind, str(v))
            kinds[kind] += 1
    assert kinds["drop"] and kinds["duplicate"]


# -- oracle -------------------------------------------------------------------------------


def test_oracle_transport_one_length_four(transport1):
    sols = enumerate_solutions(transport1, 10, 4)
    assert {len(p) for p, _ in sols} == {4}
    assert len({t for _, t in sols}) == 1
    assert all(verify(transport1, p, t).accepted for p, t in sols)


def test_oracle_verbatim_problem_has_no_solution():
    assert enumerate_solutions(ground_instance("transport-verbatim"), 10, 10) == []


def test_oracle_mdeliver_verbatim_has_no_solution():
    g = load_ground(corpus("transport-domain-mdeliver-verbatim.hddl"), corpus("transport-p1.hddl"))
    assert enumerate_solutions(g, 10, 10) == []
    assert enumerate_solutions(ground_instance("transport-1"), 10, 10)


def test_oracle_empty_network():
    assert enumerate_solutions(ground_instance("empty")) == [(Plan(), DecompositionTree())]


def test_oracle_budget(transport1):
    with pytest.raises(OracleLimitExceeded):
        enumerate_solutions(transport1, 10, 10, node_budget=5)


# -- method preconditions -------------------------------------------------------------------

PREC_OK = """==>
0 __prec_m-go-in
1 close-door
2 enter
root 3
3 visit -> m-visit 4 1
4 go-in -> m-go-in 0 2
<==
"""


def test_method_precondition_checked_only_at_decomposition():
    # the door is closed after the check and before enter: still a solution
    g = ground_instance("method-prec-po")
    assert verify(g, *parse_witness(PREC_OK)).accepted


def test_method_precondition_must_hold_when_checked():
    g = ground_instance("method-prec-po")
    late = PREC_OK.replace("0 __prec_m-go-in\n1 close-door", "1 close-door\n0 __prec_m-go-in")
    v = verify(g, *parse_witness(late))
    assert not v.accepted and v.stage == "executability"
    assert "door-open" in v.detail
