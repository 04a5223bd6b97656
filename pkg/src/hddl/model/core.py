"""Lifted model records: type hierarchy, schemas, task networks, the Model."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from ..syntax.ast import Atom, Formula, Term

OBJECT = "object"


class Parameter(NamedTuple):
    name: str
    type: str

    def __str__(self):
        return f"{self.name} - {self.type}"


class Task(NamedTuple):
    """A task name applied to arguments; ground when no argument is a variable."""

    name: str
    args: Tuple[str, ...] = ()

    @property
    def key(self) -> str:
        return f"{self.name}[{','.join(self.args)}]"

    @property
    def is_ground(self) -> bool:
        return not any(a.startswith("?") for a in self.args)

    def __str__(self):
        return "(" + " ".join((self.name,) + self.args) + ")"


class GroundAtom(NamedTuple):
    predicate: str
    args: Tuple[str, ...] = ()

    def __str__(self):
        return "(" + " ".join((self.predicate,) + self.args) + ")"


EQ, NEQ, TYPE, NOT_TYPE = "eq", "neq", "type", "not-type"


@dataclass(frozen=True)
class VariableConstraint:
    """``left`` is a variable; ``right`` a term for (n)eq, a type for (not-)type."""

    kind: str
    left: str
    right: str

    def variables(self) -> Tuple[str, ...]:
        if self.kind in (EQ, NEQ) and self.right.startswith("?"):
            return (self.left, self.right)
        return (self.left,)


def transitive_closure(pairs: Iterable[Tuple[str, str]]) -> FrozenSet[Tuple[str, str]]:
    succ: Dict[str, set] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    closed = set()
    for start in succ:
        stack = list(succ[start])
        seen = set()
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            closed.add((start, x))
            stack.extend(succ.get(x, ()))
    return frozenset(closed)


@dataclass(frozen=True)
class TaskNetwork:
    """Identifiers, a strict partial order over them, their labels, constraints.

    ``ids`` keeps a stable listing order; ``order`` holds (before, after)
    pairs and is kept transitively closed by every constructor in this
    package.
    """

    ids: Tuple[str, ...] = ()
    order: FrozenSet[Tuple[str, str]] = frozenset()
    alpha: Mapping[str, Task] = field(default_factory=dict)
    vc: Tuple[VariableConstraint, ...] = ()

    def __post_init__(self):
        if set(self.ids) != set(self.alpha) or len(set(self.ids)) != len(self.ids):
            raise ValueError("alpha must be total on the identifiers")

    def __len__(self):
        return len(self.ids)

    def predecessors(self, i: str) -> List[str]:
        return [a for a, b in self.order if b == i]

    def minimal(self) -> List[str]:
        """Identifiers without predecessors, in listing order."""
        blocked = {b for _, b in self.order}
        return [i for i in self.ids if i not in blocked]

    def is_strict_partial_order(self) -> bool:
        ids = set(self.ids)
        for a, b in self.order:
            if a == b or a not in ids or b not in ids:
                return False
        return transitive_closure(self.order) == self.order

    def tasks(self) -> List[Task]:
        return [self.alpha[i] for i in self.ids]

    def __str__(self):
        parts = [f"{i}:{self.alpha[i]}" for i in self.ids]
        order = " ".join(f"{a}<{b}" for a, b in sorted(self.order))
        return "{" + " ".join(parts) + (" | " + order if order else "") + "}"


class TypeHierarchy:
    """Type symbols with parent edges and the declared types of each constant."""

    def __init__(self, parents: Mapping[str, Iterable[str]], membership: Mapping[str, Iterable[str]]):
        self.parents: Dict[str, FrozenSet[str]] = {t: frozenset(p) for t, p in parents.items()}
        self.parents.setdefault(OBJECT, frozenset())
        self.membership: Dict[str, FrozenSet[str]] = {c: frozenset(ts) for c, ts in membership.items()}
        self._subtype = lru_cache(maxsize=None)(self._compute_subtype)
        self._constants: Dict[str, Tuple[str, ...]] = {}

    @property
    def types(self) -> FrozenSet[str]:
        return frozenset(self.parents)

    def __eq__(self, other):
        if not isinstance(other, TypeHierarchy):
            return NotImplemented
        return self.parents == other.parents and self.membership == other.membership

    def __repr__(self):
        return f"TypeHierarchy({self.parents!r}, {self.membership!r})"

    def _compute_subtype(self, a: str, b: str) -> bool:
        if a == b or b == OBJECT:
            return True
        stack, seen = [a], set()
        while stack:
            t = stack.pop()
            if t == b:
                return True
            if t in seen:
                continue
            seen.add(t)
            stack.extend(self.parents.get(t, ()))
        return False

    def is_subtype(self, a: str, b: str) -> bool:
        return self._subtype(a, b)

    def has_type(self, constant: str, t: str) -> bool:
        return any(self.is_subtype(ct, t) for ct in self.membership.get(constant, ()))

    def constants_of(self, t: str) -> Tuple[str, ...]:
        if t not in self._constants:
            self._constants[t] = tuple(sorted(c for c in self.membership if self.has_type(c, t)))
        return self._constants[t]

    def find_cycle(self) -> Optional[List[str]]:
        color: Dict[str, int] = {}
        path: List[str] = []

        def visit(t):
            color[t] = 1
            path.append(t)
            for p in sorted(self.parents.get(t, ())):
                if color.get(p) == 1:
                    return path[path.index(p):] + [p]
                if p not in color:
                    found = visit(p)
                    if found:
                        return found
            path.pop()
            color[t] = 2
            return None

        for t in sorted(self.parents):
            if t not in color:
                found = visit(t)
                if found:
                    return found
        return None


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    parameters: Tuple[Parameter, ...]

    @property
    def arity(self) -> int:
        return len(self.parameters)


@dataclass(frozen=True)
class Effect:
    """One literal of an effect, possibly under ``forall`` and ``when``."""

    atom: Atom
    positive: bool
    condition: Optional[Formula] = None
    variables: Tuple[Parameter, ...] = ()

    @property
    def unconditional(self) -> bool:
        return self.condition is None and not self.variables


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: Tuple[Parameter, ...]
    precondition: Formula
    effects: Tuple[Effect, ...] = ()

    @property
    def task(self) -> Task:
        return Task(self.name, tuple(p.name for p in self.parameters))

    @property
    def add(self) -> Tuple[Atom, ...]:
        return tuple(e.atom for e in self.effects if e.positive and e.unconditional)

    @property
    def delete(self) -> Tuple[Atom, ...]:
        return tuple(e.atom for e in self.effects if not e.positive and e.unconditional)


@dataclass(frozen=True)
class CompoundTaskSchema:
    name: str
    parameters: Tuple[Parameter, ...]


@dataclass(frozen=True)
class MethodSchema:
    name: str
    parameters: Tuple[Parameter, ...]
    task: Task
    network: TaskNetwork
    vc: Tuple[VariableConstraint, ...] = ()
    precondition: Optional[Formula] = None


@dataclass(frozen=True)
class Model:
    domain_name: str
    problem_name: str
    requirements: FrozenSet[str]
    types: TypeHierarchy
    predicates: Mapping[str, PredicateDecl]
    actions: Mapping[str, ActionSchema]
    tasks: Mapping[str, CompoundTaskSchema]
    methods: Tuple[MethodSchema, ...]
    objects: Tuple[str, ...]
    init: FrozenSet[GroundAtom]
    initial_network: TaskNetwork
    initial_parameters: Tuple[Parameter, ...] = ()
    goal: Optional[Formula] = None

    def methods_for(self, task_name: str) -> List[MethodSchema]:
        return [m for m in self.methods if m.task.name == task_name]


def term_names(terms: Iterable[Term]) -> Tuple[str, ...]:
    return tuple(t.name for t in terms)
