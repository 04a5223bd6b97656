import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import corpus, model_instance
from hddl.model import (
    OrderingError,
    Task,
    TaskNetwork,
    analyze,
    check_partial_order,
    compile_method_preconditions,
    total_order_expand,
)
from hddl.syntax import parse_domain_text, parse_problem_text
from hddl.syntax.ast import Atom, Term

P1 = corpus("transport-p1.hddl").read_text()


def run(domain_text, problem_text=None, strict=False):
    d = parse_domain_text(domain_text, "d.hddl")
    p = parse_problem_text(problem_text or f"(define (problem q) (:domain {d.name}) (:init))", "p.hddl")
    return analyze(d, p, strict)


def codes(diags, errors_only=True):
    return [x.code for x in diags if x.is_error or not errors_only]


def test_corrected_transport_model():
    m = model_instance("transport-2")
    assert set(m.tasks) == {"deliver", "get-to"}
    assert len(m.methods) == 4
    tn = m.initial_network
    assert len(tn.ids) == 2 and tn.order == frozenset()


def test_corrected_transport_strict_is_clean():
    m, diags = run(corpus("transport-domain.hddl").read_text(), P1, strict=True)
    assert m is not None
    assert codes(diags) == []


def test_verbatim_mdirect_undeclared_variable():
    text = corpus("transport-domain-bad-mdirect.hddl").read_text()
    m, diags = run(text, P1)
    assert m is None
    errors = [d for d in diags if d.is_error]
    assert [e.code for e in errors] == ["undeclared-variable"]
    assert "undeclared variable ?li" in errors[0].message
    line = next(k for k, ln in enumerate(text.splitlines(), 1) if "(not (= ?li ?ld))" in ln)
    assert errors[0].span.start_line == line


def test_verbatim_mdeliver_is_well_formed():
    # The typo only changes meaning (pick up at the destination); solvability
    # is checked against the oracle in the verification tests.
    m, diags = run(corpus("transport-domain-mdeliver-verbatim.hddl").read_text(), P1, strict=True)
    assert m is not None and codes(diags) == []


DOMAIN_HEAD = """(define (domain d) (:requirements :typing :htn)
  (:types vehicle - object truck - vehicle)
  (:predicates (at ?v - vehicle))"""


def test_subtask_argument_of_supertype_rejected():
    text = DOMAIN_HEAD + """
  (:task move :parameters (?t - truck))
  (:task go :parameters (?v - vehicle))
  (:method m :parameters (?v - vehicle) :task (go ?v) :subtasks (move ?v))
  (:method m2 :parameters (?t - truck) :task (move ?t) :subtasks ()))"""
    m, diags = run(text)
    assert m is None and "type-mismatch" in codes(diags)


def test_subtask_argument_of_subtype_accepted():
    text = DOMAIN_HEAD + """
  (:task go :parameters (?v - vehicle))
  (:task move :parameters (?t - truck))
  (:method m :parameters (?t - truck) :task (move ?t) :subtasks (go ?t))
  (:method m2 :parameters (?v - vehicle) :task (go ?v) :subtasks ()))"""
    m, diags = run(text)
    assert m is not None, diags


@pytest.mark.parametrize(
    "body, code",
    [
        ("(:task go :parameters (?v - vehicle)) (:task go :parameters ())", "duplicate-name"),
        ("(:task go :parameters ()) (:action go :parameters ())", "name-clash"),
        ("(:task go :parameters ()) (:method m :parameters () :task (go) :subtasks (fly))", "unknown-task"),
        ("(:method m :parameters () :task (fly) :subtasks ()) (:action fly :parameters ())", "primitive-method-task"),
        ("(:action fly :parameters () :precondition (at ?x))", "undeclared-variable"),
        ("(:action fly :parameters (?v - vehicle) :precondition (at ?v ?v))", "arity-mismatch"),
        ("(:action fly :parameters () :precondition (gone))", "unknown-predicate"),
        ("(:action fly :parameters (?v - plane))", "unknown-type"),
        (
            "(:task go :parameters ()) (:method m :parameters () :task (go)"
            " :subtasks (and (a (go)) (b (go))) :ordering (and (a < b) (b < a)))",
            "ordering-cycle",
        ),
        (
            "(:task go :parameters ()) (:method m :parameters () :task (go)"
            " :subtasks (a (go)) :ordering (a < z))",
            "unknown-ordering-id",
        ),
        (
            "(:task go :parameters ()) (:method m :parameters () :task (go)"
            " :precondition (at truck1) :subtasks ())",
            "missing-requirement",
        ),
    ],
)
def test_semantic_errors(body, code):
    m, diags = run(DOMAIN_HEAD + body + ")")
    assert m is None
    assert code in codes(diags)


def test_either_is_unsupported():
    m, diags = run("(define (domain d) (:types a b) (:constants k - (either a b)))")
    assert m is None and codes(diags) == ["unsupported-feature"]


def test_domain_name_mismatch():
    m, diags = run("(define (domain d))", "(define (problem q) (:domain other) (:init))")
    assert "domain-mismatch" in codes(diags)


def test_strict_requirements():
    text = """(define (domain d) (:requirements :htn)
      (:predicates (p)) (:action a :parameters () :precondition (not (p))))"""
    assert run(text)[0] is not None
    m, diags = run(text, strict=True)
    assert m is None and "missing-requirement" in codes(diags)


def test_warnings_do_not_block():
    text = """(define (domain d) (:requirements :htn)
      (:predicates (p) (never))
      (:task t :parameters ()) (:task lonely :parameters ())
      (:method m :parameters () :task (t) :subtasks (a))
      (:action a :parameters () :effect (p)))"""
    m, diags = run(text, "(define (problem q) (:domain d) (:htn :tasks (t)) (:init))")
    assert m is not None
    assert set(codes(diags, errors_only=False)) == {"unused-predicate", "unreachable-task"}


def test_analyze_is_deterministic():
    text = corpus("transport-domain.hddl").read_text()
    a = run(text, P1)
    b = run(text, P1)
    assert a[0] == b[0]
    assert a[1] == b[1]


def test_htn_parameters_allowed_in_goal():
    m = model_instance("transport-params")
    assert [p.name for p in m.initial_parameters] == ["?l"]
    assert [(c.kind, c.left, c.right) for c in m.initial_network.vc] == [("neq", "?l", "city-loc-0")]


def test_constant_with_two_types():
    m = model_instance("constants")
    assert m.types.membership["hq"] == frozenset({"office", "building"})
    assert m.types.has_type("hq", "office") and m.types.has_type("hq", "building")


# -- ordering checks ------------------------------------------------------------


def _ast_net(order_text, ids=("t1", "t2", "t3")):
    subtasks = " ".join(f"({i} (go))" for i in ids)
    d = parse_domain_text(
        f"""(define (domain d) (:task go :parameters ())
        (:method m :parameters () :task (go) :subtasks (and {subtasks}) :ordering {order_text}))"""
    )
    return d.methods[0].network


def test_partial_order_ok():
    assert check_partial_order(_ast_net("(t1 < t2)")) is None
    assert check_partial_order(_ast_net("()")) is None


def test_partial_order_cycle_witness():
    assert check_partial_order(_ast_net("(and (t1 < t2) (t2 < t1))")) == ["t1", "t2"]


def test_partial_order_unknown_id():
    with pytest.raises(OrderingError):
        check_partial_order(_ast_net("(t1 < t9)"))


def test_five_id_partial_order():
    net = model_instance("shop-order").methods[0].network
    assert net.order == frozenset({("t1", "t4"), ("t2", "t4"), ("t2", "t5"), ("t3", "t5")})
    assert net.is_strict_partial_order()


def test_total_order_expand_mdeliver():
    m = model_instance("transport-1")
    deliver = next(x for x in m.methods if x.name == "m-deliver")
    assert len(deliver.network.order) == 6
    assert deliver.network.is_strict_partial_order()


@given(st.integers(min_value=0, max_value=12))
def test_total_order_expand_pair_count(n):
    ids = tuple(f"i{k}" for k in range(n))
    net = total_order_expand(TaskNetwork(ids, frozenset(), {i: Task("t") for i in ids}))
    assert len(net.order) == n * (n - 1) // 2
    assert net.is_strict_partial_order()
    assert net.minimal() == list(ids[:1])


# -- precondition compilation ------------------------------------------------------


def test_compile_already_there():
    m = compile_method_preconditions(model_instance("transport-1"))
    already = next(x for x in m.methods if x.name == "m-already-there")
    assert already.precondition is None
    (pid,) = already.network.ids
    assert already.network.alpha[pid] == Task("__prec_m-already-there", ("?l",))
    action = m.actions["__prec_m-already-there"]
    assert action.precondition == Atom("tat", (Term("?l"),))
    assert action.effects == ()


def test_compile_leaves_other_methods_alone():
    before = model_instance("transport-1")
    after = compile_method_preconditions(before)
    for a, b in zip(before.methods, after.methods):
        if a.name != "m-already-there":
            assert a == b


def test_compile_partial_order_keeps_siblings_unordered():
    text = """(define (domain d) (:requirements :htn :htn-method-prec)
      (:predicates (p))
      (:task t :parameters ())
      (:method m :parameters () :task (t) :precondition (p)
        :subtasks (and (a (x)) (b (x))))
      (:action x :parameters ()))"""
    model, _ = run(text, "(define (problem q) (:domain d) (:htn :tasks (t)) (:init))")
    net = compile_method_preconditions(model).methods[0].network
    p = net.ids[0]
    assert net.order == frozenset({(p, "a"), (p, "b")})


def test_compile_fresh_names_avoid_collisions():
    text = """(define (domain d) (:requirements :htn :htn-method-prec)
      (:predicates (p))
      (:task t :parameters ())
      (:method m :parameters () :task (t) :precondition (p) :subtasks (__prec (__prec_m)))
      (:action __prec_m :parameters ()))"""
    model, diags = run(text, "(define (problem q) (:domain d) (:htn :tasks (t)) (:init))")
    compiled = compile_method_preconditions(model)
    assert set(compiled.actions) == {"__prec_m", "__prec_m_1"}
    net = compiled.methods[0].network
    assert len(set(net.ids)) == 2 and "__prec" in net.ids
