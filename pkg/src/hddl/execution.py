"""States, formula evaluation, the transition function and executability."""

from __future__ import annotations

from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from .diagnostics import HDDLError
from .grounding import GroundAction, substitutions
from .model.core import GroundAtom, Parameter, Task, TaskNetwork, TypeHierarchy
from .syntax.ast import And, Atom, Equals, Exists, Forall, Formula, Imply, Not, Or, Term
from .syntax.printer import formula

State = FrozenSet[GroundAtom]


class PreconditionViolated(HDDLError):
    def __init__(self, action: GroundAction, literal: Formula):
        super().__init__(f"{action} is not applicable: {formula(literal)} does not hold")
        self.action = action
        self.literal = literal


def _name(t: Term, binding: Optional[Mapping[str, str]]) -> str:
    if binding and t.name in binding:
        return binding[t.name]
    return t.name


def holds(
    state: State,
    f: Formula,
    types: Optional[TypeHierarchy] = None,
    binding: Optional[Mapping[str, str]] = None,
) -> bool:
    """Closed-world truth of ``f`` in ``state``.

    Quantified variables range over the constants of their type, which is
    the only use of ``types``.
    """
    if isinstance(f, Atom):
        return GroundAtom(f.predicate, tuple(_name(t, binding) for t in f.args)) in state
    if isinstance(f, Equals):
        return _name(f.left, binding) == _name(f.right, binding)
    if isinstance(f, Not):
        return not holds(state, f.arg, types, binding)
    if isinstance(f, And):
        return all(holds(state, p, types, binding) for p in f.parts)
    if isinstance(f, Or):
        return any(holds(state, p, types, binding) for p in f.parts)
    if isinstance(f, Imply):
        return not holds(state, f.antecedent, types, binding) or holds(state, f.consequent, types, binding)
    if isinstance(f, (Exists, Forall)):
        if types is None:
            raise ValueError("quantified formula needs a type hierarchy")
        params = [Parameter(v.name, v.type if isinstance(v.type, str) else "object") for v in f.variables]
        outer = dict(binding or {})
        results = (
            holds(state, f.body, types, {**outer, **b}) for b in substitutions(params, types)
        )
        return any(results) if isinstance(f, Exists) else all(results)
    raise TypeError(f"not a goal description: {f!r}")


def failing_literal(state: State, f: Formula) -> Optional[Formula]:
    """The first conjunct (descending through ``and``) that is false."""
    if isinstance(f, And):
        for p in f.parts:
            bad = failing_literal(state, p)
            if bad is not None:
                return bad
        return None
    return None if holds(state, f) else f


def applicable(state: State, a: GroundAction) -> bool:
    if a.pre_literals is not None:
        pos, neg = a.pre_literals
        return pos <= state and not (neg & state)
    return holds(state, a.precondition)


def apply(state: State, a: GroundAction) -> State:
    """(s minus del) union add, with conditional effects judged in ``s``.

    An atom both added and deleted ends up true.
    """
    if not applicable(state, a):
        raise PreconditionViolated(a, failing_literal(state, a.precondition) or a.precondition)
    add: Set[GroundAtom] = set(a.add)
    delete: Set[GroundAtom] = set(a.delete)
    for ce in a.conditional:
        if holds(state, ce.condition):
            add |= ce.add
            delete |= ce.delete
    return frozenset((state - delete) | add)


def execute(state: State, actions: List[GroundAction]) -> State:
    for a in actions:
        state = apply(state, a)
    return state


def executable_linearization(
    net: TaskNetwork, s0: State, actions: Mapping[Task, GroundAction]
) -> Optional[Tuple[Tuple[str, ...], State]]:
    """Some linear extension of the network's order executable from ``s0``.

    Depth-first over ready identifiers; a (done-set, state) pair that once
    failed is not explored again.
    """
    preds: Dict[str, Set[str]] = {i: set() for i in net.ids}
    for a, b in net.order:
        preds[b].add(a)
    failed: Set[Tuple[FrozenSet[str], State]] = set()
    sequence: List[str] = []

    def dfs(done: FrozenSet[str], state: State) -> Optional[State]:
        if len(done) == len(net.ids):
            return state
        if (done, state) in failed:
            return None
        for i in net.ids:
            if i in done or not preds[i] <= done:
                continue
            act = actions[net.alpha[i]]
            if not applicable(state, act):
                continue
            sequence.append(i)
            final = dfs(done | {i}, apply(state, act))
            if final is not None:
                return final
            sequence.pop()
        failed.add((done, state))
        return None

    final = dfs(frozenset(), frozenset(s0))
    if final is None:
        return None
    return tuple(sequence), final
