"""Order checks and model-to-model rewrites."""

from __future__ import annotations

import dataclasses
from typing import Dict, List, Optional

from ..diagnostics import HDDLError
from ..formulas import free_variables
from ..syntax.ast import And, AstTaskNetwork
from .core import ActionSchema, Model, Parameter, Task, TaskNetwork


class OrderingError(HDDLError):
    def __init__(self, message, ordering=None):
        super().__init__(message)
        self.ordering = ordering


def check_partial_order(net: AstTaskNetwork) -> Optional[List[str]]:
    """Return None if the orderings induce a strict partial order, else a cycle.

    The cycle is listed without repeating its first identifier, so
    ``{t1<t2, t2<t1}`` gives ``['t1', 't2']``.
    """
    ids = {st.id for st in net.subtasks if st.id is not None}
    succ: Dict[str, List[str]] = {}
    for o in net.orderings:
        for x in (o.before, o.after):
            if x not in ids:
                raise OrderingError(f"unknown subtask id '{x}' in ordering", o)
        succ.setdefault(o.before, []).append(o.after)

    state: Dict[str, int] = {}
    path: List[str] = []

    def visit(n):
        state[n] = 1
        path.append(n)
        for m in succ.get(n, ()):
            if state.get(m) == 1:
                return path[path.index(m):]
            if m not in state:
                found = visit(m)
                if found:
                    return found
        path.pop()
        state[n] = 2
        return None

    for st in net.subtasks:
        if st.id is not None and st.id not in state:
            found = visit(st.id)
            if found:
                return list(found)
    return None


def total_order_expand(net: TaskNetwork) -> TaskNetwork:
    """Order the identifiers exactly as listed: all n(n-1)/2 pairs."""
    ids = net.ids
    order = frozenset((ids[j], ids[k]) for j in range(len(ids)) for k in range(j + 1, len(ids)))
    return TaskNetwork(ids, order, dict(net.alpha), net.vc)


PREC_PREFIX = "__prec_"


def _fresh(base: str, taken) -> str:
    name, k = base, 1
    while name in taken:
        name = f"{base}_{k}"
        k += 1
    return name


def compile_method_preconditions(model: Model) -> Model:
    """Move every method precondition into a fresh effect-free action.

    The action takes the precondition's free variables as parameters and is
    ordered before all of the method's original subtasks.
    """
    taken = set(model.actions) | set(model.tasks)
    actions = dict(model.actions)
    methods = []
    for m in model.methods:
        pre = m.precondition
        if pre is None or pre == And(()):
            methods.append(dataclasses.replace(m, precondition=None))
            continue
        name = _fresh(PREC_PREFIX + m.name, taken)
        taken.add(name)
        free = set(free_variables(pre))
        params = tuple(Parameter(p.name, p.type) for p in m.parameters if p.name in free)
        actions[name] = ActionSchema(name, params, pre, ())
        net = m.network
        pid = _fresh("__prec", set(net.ids))
        alpha = dict(net.alpha)
        alpha[pid] = Task(name, tuple(p.name for p in params))
        order = net.order | {(pid, i) for i in net.ids}
        network = TaskNetwork((pid,) + net.ids, frozenset(order), alpha, net.vc)
        methods.append(dataclasses.replace(m, network=network, precondition=None))
    return dataclasses.replace(model, actions=actions, methods=tuple(methods))
