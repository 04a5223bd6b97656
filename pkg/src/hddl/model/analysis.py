"""Semantic analysis: resolve parse trees into a validated lifted Model."""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from ..diagnostics import ERROR, WARNING, Diagnostic, SourceSpan
from ..formulas import free_variables
from ..syntax import ast
from ..syntax.ast import And, Atom, Equals, Exists, Forall, ForallEffect, Not, Term, When
from .core import (
    EQ,
    NEQ,
    OBJECT,
    ActionSchema,
    CompoundTaskSchema,
    Effect,
    GroundAtom,
    MethodSchema,
    Model,
    Parameter,
    PredicateDecl,
    Task,
    TaskNetwork,
    TypeHierarchy,
    VariableConstraint,
    transitive_closure,
)
from .transform import OrderingError, check_partial_order, total_order_expand

METHOD_PREC_FLAGS = (":htn-method-prec", ":method-preconditions")
HTN_FLAGS = (":htn", ":hierarchy")

# requirement -> flags that imply it
_IMPLIED_BY = {
    ":negative-preconditions": (":adl",),
    ":disjunctive-preconditions": (":adl",),
    ":existential-preconditions": (":adl", ":quantified-preconditions"),
    ":universal-preconditions": (":adl", ":quantified-preconditions"),
    ":conditional-effects": (":adl",),
    ":typing": (":adl",),
}


def requirement_satisfied(flag: str, declared: Iterable[str]) -> bool:
    declared = set(declared)
    if flag in (":htn",):
        return bool(declared & set(HTN_FLAGS))
    if flag == ":htn-method-prec":
        return bool(declared & set(METHOD_PREC_FLAGS))
    return flag in declared or bool(declared & set(_IMPLIED_BY.get(flag, ())))


class _Analyzer:
    def __init__(self, domain: ast.AstDomain, problem: ast.AstProblem, strict: bool):
        self.d = domain
        self.p = problem
        self.strict = strict
        self.diags: List[Diagnostic] = []
        self.requirements = frozenset(domain.requirements) | frozenset(problem.requirements)
        self.used_predicates: Set[str] = set()
        self.used_flags: Dict[str, Optional[SourceSpan]] = {}

    # -- reporting ---------------------------------------------------------

    def error(self, code: str, message: str, span=None):
        self.diags.append(Diagnostic(ERROR, code, message, span))

    def warn(self, code: str, message: str, span=None):
        self.diags.append(Diagnostic(WARNING, code, message, span))

    def need(self, flag: str, span):
        self.used_flags.setdefault(flag, span)

    # -- types and constants ---------------------------------------------

    def build_types(self):
        parents: Dict[str, Set[str]] = {OBJECT: set()}
        declared = {OBJECT}
        for tn in self.d.types:
            declared.add(tn.name)
            parents.setdefault(tn.name, set())
            if isinstance(tn.type, ast.Either):
                self.error("unsupported-feature", f"'either' types are not supported (type {tn.name})", tn.span)
            elif tn.type is not None and tn.name != OBJECT:
                parents[tn.name].add(tn.type)
        for tn in self.d.types:
            if isinstance(tn.type, str) and tn.type not in declared:
                self.warn("implicit-type", f"type '{tn.type}' used as parent but never declared", tn.span)
                declared.add(tn.type)
                parents.setdefault(tn.type, set())
        for t, ps in parents.items():
            if not ps and t != OBJECT:
                ps.add(OBJECT)
        if self.d.types:
            self.need(":typing", self.d.types[0].span)
        self.types = TypeHierarchy(parents, {})
        cycle = self.types.find_cycle()
        if cycle:
            self.error("type-cycle", "cyclic type hierarchy: " + " -> ".join(cycle), self.d.span)
            self.types = TypeHierarchy({t: () for t in parents}, {})

        membership: Dict[str, Set[str]] = {}
        self.domain_constants: Set[str] = set()
        for group, is_domain in ((self.d.constants, True), (self.p.objects, False)):
            for tn in group:
                t = self.type_name(tn.type, tn.span)
                if t is None:
                    continue
                membership.setdefault(tn.name, set()).add(t)
                if is_domain:
                    self.domain_constants.add(tn.name)
        self.types = TypeHierarchy(self.types.parents, membership)

    def type_name(self, tref, span) -> Optional[str]:
        if isinstance(tref, ast.Either):
            self.error("unsupported-feature", f"'either' types are not supported: {tref}", span)
            return None
        if tref is None:
            return OBJECT
        if tref not in self.types.parents:
            self.error("unknown-type", f"unknown type '{tref}'", span)
            return None
        if tref != OBJECT:
            self.need(":typing", span)
        return tref

    def parameters(self, names: Iterable[ast.TypedName], what: str) -> Tuple[Parameter, ...]:
        out, seen = [], set()
        for tn in names:
            if tn.name in seen:
                self.error("duplicate-name", f"duplicate {what} '{tn.name}'", tn.span)
                continue
            seen.add(tn.name)
            t = self.type_name(tn.type, tn.span)
            out.append(Parameter(tn.name, t or OBJECT))
        return tuple(out)

    # -- terms -------------------------------------------------------------

    def term_type(self, term: Term, scope: Mapping[str, str], constants: Set[str]) -> Optional[Set[str]]:
        """Types of a term, or None after reporting it as undeclared."""
        if term.is_variable:
            if term.name not in scope:
                self.error("undeclared-variable", f"undeclared variable {term.name}", term.span)
                return None
            return {scope[term.name]}
        if term.name not in constants:
            self.error("unknown-constant", f"unknown constant '{term.name}'", term.span)
            return None
        return set(self.types.membership.get(term.name, {OBJECT}))

    def check_args(self, what: str, args, expected: Tuple[Parameter, ...], scope, constants, span):
        if len(args) != len(expected):
            self.error(
                "arity-mismatch",
                f"{what} expects {len(expected)} argument(s), got {len(args)}",
                span,
            )
            return
        for term, param in zip(args, expected):
            ts = self.term_type(term, scope, constants)
            if ts is None:
                continue
            ok = any(self.types.is_subtype(t, param.type) for t in ts)
            if not ok:
                self.error(
                    "type-mismatch",
                    f"argument {term.name} of {what} has type {'/'.join(sorted(ts))}, "
                    f"expected {param.type}",
                    term.span,
                )

    # -- formulas ----------------------------------------------------------

    def formula(self, f: ast.Formula, scope: Mapping[str, str], constants: Set[str], effect=False):
        if isinstance(f, Atom):
            decl = self.predicates.get(f.predicate)
            self.used_predicates.add(f.predicate)
            if decl is None:
                self.error("unknown-predicate", f"unknown predicate '{f.predicate}'", f.span)
                for t in f.args:
                    self.term_type(t, scope, constants)
                return
            self.check_args(f"predicate {f.predicate}", f.args, decl.parameters, scope, constants, f.span)
        elif isinstance(f, Equals):
            self.term_type(f.left, scope, constants)
            self.term_type(f.right, scope, constants)
        elif isinstance(f, Not):
            if not effect:
                self.need(f.requirement, f.span)
            self.formula(f.arg, scope, constants, effect)
        elif isinstance(f, (ast.And, ast.Or)):
            if f.requirement:
                self.need(f.requirement, f.span)
            for p in f.parts:
                self.formula(p, scope, constants, effect)
        elif isinstance(f, ast.Imply):
            self.need(f.requirement, f.span)
            self.formula(f.antecedent, scope, constants)
            self.formula(f.consequent, scope, constants)
        elif isinstance(f, (Exists, Forall, ForallEffect)):
            self.need(f.requirement, f.span)
            inner = dict(scope)
            for p in self.parameters(f.variables, "quantified variable"):
                inner[p.name] = p.type
            body = f.effect if isinstance(f, ForallEffect) else f.body
            self.formula(body, inner, constants, effect)
        elif isinstance(f, When):
            self.need(f.requirement, f.span)
            self.formula(f.condition, scope, constants)
            self.formula(f.effect, scope, constants, effect=True)

    def effects(self, f: ast.Formula, cond=None, variables=()) -> List[Effect]:
        if isinstance(f, And):
            return [e for p in f.parts for e in self.effects(p, cond, variables)]
        if isinstance(f, Atom):
            return [Effect(f, True, cond, variables)]
        if isinstance(f, Not):
            return [Effect(f.arg, False, cond, variables)]
        if isinstance(f, When):
            c = f.condition if cond is None else And((cond, f.condition))
            return self.effects(f.effect, c, variables)
        if isinstance(f, ForallEffect):
            vs = tuple(Parameter(v.name, v.type if isinstance(v.type, str) else OBJECT) for v in f.variables)
            return self.effects(f.effect, cond, variables + vs)
        raise TypeError(f"unexpected effect node {f!r}")

    # -- task networks -----------------------------------------------------

    def network(self, tn: ast.AstTaskNetwork, scope, constants, owner: str):
        ids: List[str] = []
        alpha: Dict[str, Task] = {}
        explicit = {st.id for st in tn.subtasks if st.id}
        for k, st in enumerate(tn.subtasks):
            sid = st.id
            if sid is None:
                sid = f"_{k}"
                while sid in explicit or sid in alpha:
                    sid += "'"
            elif sid in alpha:
                self.error("duplicate-name", f"duplicate subtask id '{sid}' in {owner}", st.span)
                continue
            ids.append(sid)
            ref = st.task
            params = self.task_parameters(ref.name, ref.span, owner)
            if params is not None:
                self.check_args(f"task {ref.name}", ref.args, params, scope, constants, ref.span)
            alpha[sid] = Task(ref.name, tuple(t.name for t in ref.args))

        order = frozenset()
        try:
            cycle = check_partial_order(tn)
        except OrderingError as e:
            self.error("unknown-ordering-id", f"{e} in {owner}", e.ordering.span if e.ordering else tn.span)
            cycle = None
        else:
            if cycle:
                self.error(
                    "ordering-cycle",
                    f"orderings of {owner} do not induce a partial order: cycle "
                    + " < ".join(cycle + [cycle[0]]),
                    tn.span,
                )
            else:
                order = transitive_closure((o.before, o.after) for o in tn.orderings)
        net = TaskNetwork(tuple(ids), order, alpha)
        if tn.totally_ordered:
            net = total_order_expand(net)

        vc = []
        for c in tn.constraints:
            self.term_type(c.left, scope, constants)
            self.term_type(c.right, scope, constants)
            left, right = c.left.name, c.right.name
            if not c.left.is_variable and c.right.is_variable:
                left, right = right, left
            vc.append(VariableConstraint(EQ if c.positive else NEQ, left, right))
        return net, tuple(vc)

    def task_parameters(self, name: str, span, owner: str) -> Optional[Tuple[Parameter, ...]]:
        if name in self.actions_ast:
            return self.action_params[name]
        if name in self.tasks:
            return self.tasks[name].parameters
        self.error("unknown-task", f"{owner} references unknown task '{name}'", span)
        return None

    # -- top level ---------------------------------------------------------

    def run(self) -> Optional[Model]:
        d, p = self.d, self.p
        self.build_types()
        domain_consts = set(self.domain_constants)
        all_consts = set(self.types.membership)

        self.predicates: Dict[str, PredicateDecl] = {}
        for pd in d.predicates:
            if pd.name in self.predicates:
                self.error("duplicate-name", f"duplicate predicate '{pd.name}'", pd.span)
                continue
            self.predicates[pd.name] = PredicateDecl(pd.name, self.parameters(pd.parameters, "parameter"))

        self.tasks: Dict[str, CompoundTaskSchema] = {}
        for td in d.tasks:
            if td.name in self.tasks:
                self.error("duplicate-name", f"duplicate task '{td.name}'", td.span)
                continue
            self.tasks[td.name] = CompoundTaskSchema(td.name, self.parameters(td.parameters, "parameter"))
        if d.tasks or d.methods:
            self.need(":htn", (d.tasks or d.methods)[0].span)

        self.actions_ast: Dict[str, ast.AstAction] = {}
        self.action_params: Dict[str, Tuple[Parameter, ...]] = {}
        for ad in d.actions:
            if ad.name in self.actions_ast:
                self.error("duplicate-name", f"duplicate action '{ad.name}'", ad.span)
                continue
            if ad.name in self.tasks:
                self.error(
                    "name-clash",
                    f"'{ad.name}' is declared both as compound task and as action",
                    ad.span,
                )
            self.actions_ast[ad.name] = ad
            self.action_params[ad.name] = self.parameters(ad.parameters, "parameter")

        actions: Dict[str, ActionSchema] = {}
        for name, ad in self.actions_ast.items():
            params = self.action_params[name]
            scope = {q.name: q.type for q in params}
            pre = ad.precondition if ad.precondition is not None else And(())
            self.formula(pre, scope, domain_consts)
            effects: List[Effect] = []
            if ad.effect is not None:
                self.formula(ad.effect, scope, domain_consts, effect=True)
                effects = self.effects(ad.effect)
            actions[name] = ActionSchema(name, params, pre, tuple(effects))

        methods: List[MethodSchema] = []
        seen_methods: Set[str] = set()
        for md in d.methods:
            if md.name in seen_methods:
                self.error("duplicate-name", f"duplicate method '{md.name}'", md.span)
                continue
            seen_methods.add(md.name)
            m = self.method(md, domain_consts)
            if m is not None:
                methods.append(m)

        if p.domain_name != d.name:
            self.error(
                "domain-mismatch",
                f"problem '{p.name}' is for domain '{p.domain_name}', not '{d.name}'",
                p.span,
            )

        init: Set[GroundAtom] = set()
        for lit in p.init:
            atom = lit.arg if isinstance(lit, Not) else lit
            self.formula(atom, {}, all_consts)
            if isinstance(lit, Not):
                self.warn("negative-init", f"negative initial literal {atom} ignored (closed world)", lit.span)
                continue
            init.add(GroundAtom(atom.predicate, tuple(t.name for t in atom.args)))

        htn_params: Tuple[Parameter, ...] = ()
        tn_init = TaskNetwork()
        if p.htn is not None:
            self.need(":htn", p.htn.span)
            htn_params = self.parameters(p.htn.parameters, "parameter")
            scope = {q.name: q.type for q in htn_params}
            tn_init, vc = self.network(p.htn.network, scope, all_consts, "initial task network")
            tn_init = TaskNetwork(tn_init.ids, tn_init.order, tn_init.alpha, vc)
            used = {a for t in tn_init.tasks() for a in t.args} | {v for c in vc for v in c.variables()}
            for q, tnode in zip(htn_params, p.htn.parameters):
                if q.name not in used:
                    self.warn("unused-parameter", f"parameter {q.name} of the initial task network is unused", tnode.span)

        goal = None
        if p.goal is not None:
            self.formula(p.goal, {q.name: q.type for q in htn_params}, all_consts)
            goal = p.goal

        self.lint(methods, tn_init)
        self.check_requirements()
        if any(x.is_error for x in self.diags):
            return None
        return Model(
            domain_name=d.name,
            problem_name=p.name,
            requirements=self.requirements,
            types=self.types,
            predicates=self.predicates,
            actions=actions,
            tasks=self.tasks,
            methods=tuple(methods),
            objects=tuple(sorted(all_consts)),
            init=frozenset(init),
            initial_network=tn_init,
            initial_parameters=htn_params,
            goal=goal,
        )

    def method(self, md: ast.AstMethod, constants: Set[str]) -> Optional[MethodSchema]:
        params = self.parameters(md.parameters, "parameter")
        scope = {q.name: q.type for q in params}
        owner = f"method {md.name}"
        ok = True
        if md.task.name in self.actions_ast:
            self.error("primitive-method-task", f"{owner} decomposes primitive task '{md.task.name}'", md.task.span)
            ok = False
        elif md.task.name not in self.tasks:
            self.error("unknown-task", f"{owner} decomposes unknown task '{md.task.name}'", md.task.span)
            ok = False
        else:
            self.check_args(f"task {md.task.name}", md.task.args, self.tasks[md.task.name].parameters,
                            scope, constants, md.task.span)
        if md.precondition is not None:
            if not requirement_satisfied(":htn-method-prec", self.requirements):
                self.error(
                    "missing-requirement",
                    f"{owner} has a precondition but :htn-method-prec is not required",
                    md.precondition.span or md.span,
                )
            self.formula(md.precondition, scope, constants)
        net, vc = self.network(md.network, scope, constants, owner)

        used: Set[str] = {t.name for t in md.task.args if t.is_variable}
        for t in net.tasks():
            used.update(a for a in t.args if a.startswith("?"))
        for c in vc:
            used.update(c.variables())
        if md.precondition is not None:
            used.update(free_variables(md.precondition))
        for q, tnode in zip(params, md.parameters):
            if q.name not in used:
                self.warn("unused-parameter", f"parameter {q.name} of {owner} is unused", tnode.span)
        if not ok:
            return None
        task = Task(md.task.name, tuple(t.name for t in md.task.args))
        return MethodSchema(md.name, params, task, net, vc, md.precondition)

    def lint(self, methods: List[MethodSchema], tn_init: TaskNetwork):
        for name, decl in self.predicates.items():
            if name not in self.used_predicates:
                span = next((pd.span for pd in self.d.predicates if pd.name == name), None)
                self.warn("unused-predicate", f"predicate '{name}' is never used", span)
        reached: Set[str] = set()
        frontier = [t.name for t in tn_init.tasks()]
        by_task: Dict[str, List[MethodSchema]] = {}
        for m in methods:
            by_task.setdefault(m.task.name, []).append(m)
        while frontier:
            n = frontier.pop()
            if n in reached:
                continue
            reached.add(n)
            for m in by_task.get(n, ()):
                frontier.extend(t.name for t in m.network.tasks())
        for td in self.d.tasks:
            if td.name not in reached:
                self.warn("unreachable-task", f"task '{td.name}' is unreachable from the initial task network", td.span)
        for ad in self.d.actions:
            if ad.name not in reached:
                self.warn("unreachable-task", f"action '{ad.name}' is unreachable from the initial task network", ad.span)

    def check_requirements(self):
        if not self.strict:
            return
        for flag, span in self.used_flags.items():
            if flag and not requirement_satisfied(flag, self.requirements):
                self.error("missing-requirement", f"feature needs requirement {flag}", span)


def analyze(
    domain: ast.AstDomain, problem: ast.AstProblem, strict: bool = False
) -> Tuple[Optional[Model], List[Diagnostic]]:
    """Validate a domain/problem pair.

    Returns the Model (None if any error was found) and all diagnostics in
    discovery order. With ``strict``, every feature must be licensed by a
    declared requirement flag.
    """
    a = _Analyzer(domain, problem, strict)
    model = a.run()
    return model, a.diags
