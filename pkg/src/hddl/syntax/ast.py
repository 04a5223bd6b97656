"""Parse-tree node types for HDDL domains and problems.

Every node carries an optional ``span``; spans never take part in equality,
so two trees compare equal when they are structurally identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from ..diagnostics import SourceSpan


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Term:
    """A constant name or a variable; variables keep their ``?`` prefix."""

    name: str
    span: Optional[SourceSpan] = _span()

    @property
    def is_variable(self) -> bool:
        return self.name.startswith("?")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Either:
    types: Tuple[str, ...]

    def __str__(self):
        return "(either " + " ".join(self.types) + ")"


TypeRef = Union[str, Either]


@dataclass(frozen=True)
class TypedName:
    """One entry of a typed list. ``type`` is None only inside ``:types``."""

    name: str
    type: Optional[TypeRef]
    span: Optional[SourceSpan] = _span()


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[Term, ...] = ()
    span: Optional[SourceSpan] = _span()
    requirement = None

    def __str__(self):
        return "(" + " ".join([self.predicate, *map(str, self.args)]) + ")"


@dataclass(frozen=True)
class Equals:
    left: Term
    right: Term
    span: Optional[SourceSpan] = _span()
    requirement = None


@dataclass(frozen=True)
class Not:
    arg: "Formula"
    span: Optional[SourceSpan] = _span()

    @property
    def requirement(self):
        if isinstance(self.arg, (Atom, Equals)):
            return ":negative-preconditions"
        return ":disjunctive-preconditions"


@dataclass(frozen=True)
class And:
    parts: Tuple["Formula", ...] = ()
    span: Optional[SourceSpan] = _span()
    requirement = None


@dataclass(frozen=True)
class Or:
    parts: Tuple["Formula", ...] = ()
    span: Optional[SourceSpan] = _span()
    requirement = ":disjunctive-preconditions"


@dataclass(frozen=True)
class Imply:
    antecedent: "Formula"
    consequent: "Formula"
    span: Optional[SourceSpan] = _span()
    requirement = ":disjunctive-preconditions"


@dataclass(frozen=True)
class Exists:
    variables: Tuple[TypedName, ...]
    body: "Formula"
    span: Optional[SourceSpan] = _span()
    requirement = ":existential-preconditions"


@dataclass(frozen=True)
class Forall:
    variables: Tuple[TypedName, ...]
    body: "Formula"
    span: Optional[SourceSpan] = _span()
    requirement = ":universal-preconditions"


@dataclass(frozen=True)
class When:
    condition: "Formula"
    effect: "Formula"
    span: Optional[SourceSpan] = _span()
    requirement = ":conditional-effects"


@dataclass(frozen=True)
class ForallEffect:
    variables: Tuple[TypedName, ...]
    effect: "Formula"
    span: Optional[SourceSpan] = _span()
    requirement = ":conditional-effects"


Formula = Union[Atom, Equals, Not, And, Or, Imply, Exists, Forall, When, ForallEffect]

TRUE = And(())
FALSE = Or(())


# -- domain -----------------------------------------------------------------


@dataclass(frozen=True)
class AstPredicate:
    name: str
    parameters: Tuple[TypedName, ...]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AstTaskDef:
    name: str
    parameters: Tuple[TypedName, ...]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AstAction:
    name: str
    parameters: Tuple[TypedName, ...]
    precondition: Optional[Formula] = None
    effect: Optional[Formula] = None
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AstTaskRef:
    name: str
    args: Tuple[Term, ...]
    span: Optional[SourceSpan] = _span()

    def __str__(self):
        return "(" + " ".join([self.name, *map(str, self.args)]) + ")"


@dataclass(frozen=True)
class AstSubtask:
    id: Optional[str]
    task: AstTaskRef
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AstOrdering:
    before: str
    after: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AstConstraint:
    left: Term
    right: Term
    positive: bool
    span: Optional[SourceSpan] = _span()


SUBTASK_KEYWORDS = ("tasks", "subtasks", "ordered-tasks", "ordered-subtasks")
ORDERING_KEYWORDS = ("order", "ordering")


@dataclass(frozen=True)
class AstTaskNetwork:
    """A task network section as written.

    ``subtasks_keyword`` and ``ordering_keyword`` record which spelling was
    used (None when the section is absent) so printing reproduces it.
    """

    subtasks: Tuple[AstSubtask, ...] = ()
    subtasks_keyword: Optional[str] = None
    orderings: Tuple[AstOrdering, ...] = ()
    ordering_keyword: Optional[str] = None
    constraints: Tuple[AstConstraint, ...] = ()
    has_constraints: bool = False
    span: Optional[SourceSpan] = _span()

    @property
    def totally_ordered(self) -> bool:
        return bool(self.subtasks_keyword and self.subtasks_keyword.startswith("ordered-"))


@dataclass(frozen=True)
class AstMethod:
    name: str
    parameters: Tuple[TypedName, ...]
    task: AstTaskRef
    precondition: Optional[Formula]
    network: AstTaskNetwork
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AstDomain:
    name: str
    requirements: Tuple[str, ...] = ()
    types: Tuple[TypedName, ...] = ()
    constants: Tuple[TypedName, ...] = ()
    predicates: Tuple[AstPredicate, ...] = ()
    tasks: Tuple[AstTaskDef, ...] = ()
    methods: Tuple[AstMethod, ...] = ()
    actions: Tuple[AstAction, ...] = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AstHtn:
    problem_class: str
    parameters: Tuple[TypedName, ...]
    network: AstTaskNetwork
    has_parameters: bool = False
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AstProblem:
    name: str
    domain_name: str
    requirements: Tuple[str, ...] = ()
    objects: Tuple[TypedName, ...] = ()
    htn: Optional[AstHtn] = None
    init: Tuple[Formula, ...] = ()
    goal: Optional[Formula] = None
    span: Optional[SourceSpan] = _span()
