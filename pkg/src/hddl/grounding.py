"""Instantiate a lifted Model into a GroundModel.

Grounding is exhaustive typed enumeration filtered by variable constraints.
Predicates no action ever changes are static; their atoms are evaluated
against the initial state when ground preconditions are built. Quantifiers
are expanded over the constants of their type, so ground formulas are
quantifier-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .diagnostics import HDDLError
from .formulas import substitute
from .model.core import (
    EQ,
    NEQ,
    TYPE,
    GroundAtom,
    Model,
    Parameter,
    Task,
    TaskNetwork,
    TypeHierarchy,
    VariableConstraint,
)
from .syntax.ast import FALSE, TRUE, And, Atom, Equals, Exists, Forall, Formula, Imply, Not, Or


class GroundingError(HDDLError):
    pass


# -- substitutions ------------------------------------------------------------


def _constraint_holds(c: VariableConstraint, binding: Mapping[str, str], types: TypeHierarchy) -> bool:
    left = binding[c.left]
    if c.kind in (EQ, NEQ):
        right = binding.get(c.right, c.right) if c.right.startswith("?") else c.right
        return (left == right) == (c.kind == EQ)
    has = types.has_type(left, c.right)
    return has if c.kind == TYPE else not has


def substitutions(
    params: Sequence[Parameter],
    types: TypeHierarchy,
    vc: Sequence[VariableConstraint] = (),
) -> Iterator[Dict[str, str]]:
    """All type-consistent variable->constant maps satisfying ``vc``.

    Constraints are checked as soon as their variables are bound. Maps are
    produced in lexicographic order of the constants.
    """
    names = [p.name for p in params]
    position = {n: k for k, n in enumerate(names)}
    checks: List[List[VariableConstraint]] = [[] for _ in names]
    for c in vc:
        last = max(position[v] for v in c.variables())
        checks[last].append(c)
    domains = [types.constants_of(p.type) for p in params]
    binding: Dict[str, str] = {}

    def rec(k):
        if k == len(names):
            yield dict(binding)
            return
        for const in domains[k]:
            binding[names[k]] = const
            if all(_constraint_holds(c, binding, types) for c in checks[k]):
                yield from rec(k + 1)
        binding.pop(names[k], None)

    yield from rec(0)


# -- ground formulas -----------------------------------------------------------


def expand_quantifiers(f: Formula, types: TypeHierarchy) -> Formula:
    if isinstance(f, (Exists, Forall)):
        params = [Parameter(v.name, v.type if isinstance(v.type, str) else "object") for v in f.variables]
        body = expand_quantifiers(f.body, types)
        parts = tuple(substitute(body, b) for b in substitutions(params, types))
        return Or(parts) if isinstance(f, Exists) else And(parts)
    if isinstance(f, And):
        return And(tuple(expand_quantifiers(p, types) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(expand_quantifiers(p, types) for p in f.parts))
    if isinstance(f, Not):
        return Not(expand_quantifiers(f.arg, types))
    if isinstance(f, Imply):
        return Imply(expand_quantifiers(f.antecedent, types), expand_quantifiers(f.consequent, types))
    return f


def simplify(f: Formula, init: FrozenSet[GroundAtom] = frozenset(), static: FrozenSet[str] = frozenset()) -> Formula:
    """Partially evaluate a ground quantifier-free formula.

    Atoms of ``static`` predicates are replaced by their truth value in
    ``init``; ground equalities are decided. TRUE is ``(and)`` and FALSE is
    ``(or)``.
    """
    if isinstance(f, Atom):
        if f.predicate in static:
            return TRUE if to_atom(f) in init else FALSE
        return Atom(f.predicate, f.args)
    if isinstance(f, Equals):
        return TRUE if f.left.name == f.right.name else FALSE
    if isinstance(f, Not):
        arg = simplify(f.arg, init, static)
        if arg == TRUE:
            return FALSE
        if arg == FALSE:
            return TRUE
        return Not(arg)
    if isinstance(f, Imply):
        return simplify(Or((Not(f.antecedent), f.consequent)), init, static)
    if isinstance(f, (And, Or)):
        unit, zero = (TRUE, FALSE) if isinstance(f, And) else (FALSE, TRUE)
        parts: List[Formula] = []
        for p in f.parts:
            s = simplify(p, init, static)
            if s == zero:
                return zero
            if s == unit:
                continue
            if type(s) is type(f):
                parts.extend(s.parts)
            else:
                parts.append(s)
        if len(parts) == 1:
            return parts[0]
        return type(f)(tuple(parts))
    raise TypeError(f"cannot simplify {f!r}")


def to_atom(a: Atom) -> GroundAtom:
    return GroundAtom(a.predicate, tuple(t.name for t in a.args))


def literal_sets(f: Formula) -> Optional[Tuple[FrozenSet[GroundAtom], FrozenSet[GroundAtom]]]:
    """(positive, negative) atoms if ``f`` is a conjunction of literals."""
    parts = f.parts if isinstance(f, And) else (f,)
    pos, neg = set(), set()
    for p in parts:
        if isinstance(p, Atom):
            pos.add(to_atom(p))
        elif isinstance(p, Not) and isinstance(p.arg, Atom):
            neg.add(to_atom(p.arg))
        else:
            return None
    return frozenset(pos), frozenset(neg)


# -- ground records -------------------------------------------------------------


@dataclass(frozen=True)
class ConditionalEffect:
    condition: Formula
    add: FrozenSet[GroundAtom] = frozenset()
    delete: FrozenSet[GroundAtom] = frozenset()


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: Tuple[str, ...]
    precondition: Formula = TRUE
    add: FrozenSet[GroundAtom] = frozenset()
    delete: FrozenSet[GroundAtom] = frozenset()
    conditional: Tuple[ConditionalEffect, ...] = ()
    pre_literals: Optional[Tuple[FrozenSet[GroundAtom], FrozenSet[GroundAtom]]] = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self):
        if self.pre_literals is None:
            object.__setattr__(self, "pre_literals", literal_sets(self.precondition))

    @property
    def task(self) -> Task:
        return Task(self.name, self.args)

    @property
    def key(self) -> str:
        return self.task.key

    def __str__(self):
        return str(self.task)


@dataclass(frozen=True)
class GroundMethod:
    name: str
    args: Tuple[str, ...]
    task: Task
    network: TaskNetwork
    precondition: Optional[Formula] = None
    index: int = 0

    @property
    def key(self) -> str:
        return f"{self.name}[{','.join(self.args)}]"


@dataclass(frozen=True)
class InitialNetwork:
    """One instantiation of the initial task network (and goal)."""

    binding: Tuple[Tuple[str, str], ...]
    network: TaskNetwork
    goal: Optional[Formula] = None


@dataclass
class GroundModel:
    actions: Dict[Task, GroundAction]
    tasks: FrozenSet[Task]
    methods: Tuple[GroundMethod, ...]
    init: FrozenSet[GroundAtom]
    roots: Tuple[InitialNetwork, ...]
    types: TypeHierarchy
    static_predicates: FrozenSet[str] = frozenset()
    _by_task: Dict[Task, List[GroundMethod]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_task = {}
        for m in self.methods:
            self._by_task.setdefault(m.task, []).append(m)

    def methods_for(self, task: Task) -> List[GroundMethod]:
        return self._by_task.get(task, [])

    def is_primitive(self, task: Task) -> bool:
        return task in self.actions

    @property
    def initial_network(self) -> TaskNetwork:
        if len(self.roots) != 1:
            raise ValueError("initial task network has several instantiations")
        return self.roots[0].network

    @property
    def goal(self) -> Optional[Formula]:
        return self.roots[0].goal if len(self.roots) == 1 else None

    def stats(self) -> Dict[str, int]:
        never = sum(1 for a in self.actions.values() if a.precondition == FALSE)
        return {
            "actions": len(self.actions),
            "compound_tasks": len(self.tasks),
            "methods": len(self.methods),
            "init_atoms": len(self.init),
            "initial_networks": len(self.roots),
            "static_predicates": len(self.static_predicates),
            "statically_inapplicable_actions": never,
        }


# -- grounding ----------------------------------------------------------------


def _ground_task(t: Task, binding: Mapping[str, str]) -> Task:
    return Task(t.name, tuple(binding.get(a, a) for a in t.args))


def _ground_network(net: TaskNetwork, binding: Mapping[str, str]) -> TaskNetwork:
    alpha = {i: _ground_task(t, binding) for i, t in net.alpha.items()}
    return TaskNetwork(net.ids, net.order, alpha)


def _ground_formula(f: Formula, binding, types, init, static) -> Formula:
    return simplify(expand_quantifiers(substitute(f, binding), types), init, static)


def ground(model: Model, prune: bool = True) -> GroundModel:
    """Instantiate every schema; optionally drop what tn_I can never reach."""
    types = model.types
    static = frozenset(
        model.predicates.keys()
        - {e.atom.predicate for a in model.actions.values() for e in a.effects}
    )
    init = model.init

    actions: Dict[Task, GroundAction] = {}
    for schema in model.actions.values():
        for b in substitutions(schema.parameters, types):
            args = tuple(b[p.name] for p in schema.parameters)
            pre = _ground_formula(schema.precondition, b, types, init, static)
            add: Set[GroundAtom] = set()
            delete: Set[GroundAtom] = set()
            conditional: List[ConditionalEffect] = []
            for eff in schema.effects:
                for eb in substitutions(eff.variables, types):
                    full = {**b, **eb}
                    atom = to_atom(substitute(eff.atom, full))
                    cond = TRUE
                    if eff.condition is not None:
                        cond = _ground_formula(eff.condition, full, types, init, static)
                    if cond == FALSE:
                        continue
                    if cond == TRUE:
                        (add if eff.positive else delete).add(atom)
                    elif eff.positive:
                        conditional.append(ConditionalEffect(cond, add=frozenset([atom])))
                    else:
                        conditional.append(ConditionalEffect(cond, delete=frozenset([atom])))
            ga = GroundAction(schema.name, args, pre, frozenset(add), frozenset(delete), tuple(conditional))
            actions[ga.task] = ga

    tasks: Set[Task] = set()
    for schema in model.tasks.values():
        for b in substitutions(schema.parameters, types):
            tasks.add(Task(schema.name, tuple(b[p.name] for p in schema.parameters)))

    methods: List[GroundMethod] = []
    for index, m in enumerate(model.methods):
        for b in substitutions(m.parameters, types, m.vc):
            pre = None
            if m.precondition is not None:
                pre = _ground_formula(m.precondition, b, types, init, static)
            methods.append(
                GroundMethod(
                    m.name,
                    tuple(b[p.name] for p in m.parameters),
                    _ground_task(m.task, b),
                    _ground_network(m.network, b),
                    pre,
                    index,
                )
            )

    roots: List[InitialNetwork] = []
    tn = model.initial_network
    for b in substitutions(model.initial_parameters, types, tn.vc):
        goal = None
        if model.goal is not None:
            goal = _ground_formula(model.goal, b, types, init, static)
        binding = tuple((p.name, b[p.name]) for p in model.initial_parameters)
        roots.append(InitialNetwork(binding, _ground_network(tn, b), goal))
    if not roots:
        raise GroundingError("the initial task network has no valid instantiation of its parameters")

    g = GroundModel(actions, frozenset(tasks), tuple(methods), init, tuple(roots), types, static)
    return reachability_prune(g) if prune else g


def reachability_prune(g: GroundModel) -> GroundModel:
    """Keep only tasks and methods reachable from tn_I through decomposition."""
    reached: Set[Task] = set()
    frontier = [t for r in g.roots for t in r.network.tasks()]
    while frontier:
        t = frontier.pop()
        if t in reached:
            continue
        reached.add(t)
        for m in g.methods_for(t):
            frontier.extend(m.network.tasks())
    return GroundModel(
        actions={t: a for t, a in g.actions.items() if t in reached},
        tasks=frozenset(t for t in g.tasks if t in reached),
        methods=tuple(m for m in g.methods if m.task in reached),
        init=g.init,
        roots=g.roots,
        types=g.types,
        static_predicates=g.static_predicates,
    )


def emit_ground(g: GroundModel) -> str:
    """Line-oriented listing with canonical keys, sorted for diffing."""
    lines = []
    for a in sorted(g.actions.values(), key=lambda a: a.key):
        lines.append(f"action {a.key}")
    for t in sorted(g.tasks, key=lambda t: t.key):
        lines.append(f"task {t.key}")
    for m in sorted(g.methods, key=lambda m: (m.key, m.task.key)):
        subtasks = " ".join(m.network.alpha[i].key for i in m.network.ids)
        lines.append(f"method {m.key} {m.task.key} -> {subtasks}".rstrip())
    for atom in sorted(g.init):
        lines.append(f"init {atom.predicate}[{','.join(atom.args)}]")
    for k, r in enumerate(g.roots):
        tasks = " ".join(r.network.alpha[i].key for i in r.network.ids)
        lines.append(f"root {k} {tasks}".rstrip())
    return "\n".join(lines) + "\n"
