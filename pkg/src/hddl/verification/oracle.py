"""Exhaustive solution enumeration for small instances.

Every decomposition tree within the bounds is built, replayed into a
primitive network, and every executable linear extension is checked
against the goal. This is deliberately naive: it is the reference the
planner is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from ..diagnostics import HDDLError
from ..execution import applicable, apply, holds
from ..grounding import GroundMethod, GroundModel
from ..model.core import Task, TaskNetwork
from ..syntax.ast import FALSE
from .decomposition import decompose_step
from .witness import DecompositionTree, Plan, PlanStep, TreeNode


class OracleLimitExceeded(HDDLError):
    pass


@dataclass(frozen=True)
class _Sub:
    """A decomposition subtree: a leaf action or a method with children."""

    task: Task
    method: Optional[GroundMethod]
    children: Tuple["_Sub", ...]
    decompositions: int
    leaves: int


class _Enumerator:
    def __init__(self, g: GroundModel, node_budget: int):
        self.g = g
        self.budget = node_budget
        self.built = 0
        self.memo: Dict[Tuple[Task, int, int], List[_Sub]] = {}

    def _count(self):
        self.built += 1
        if self.built > self.budget:
            raise OracleLimitExceeded(f"more than {self.budget} subtrees")

    def expansions(self, task: Task, depth: int, length: int) -> List[_Sub]:
        key = (task, depth, length)
        if key in self.memo:
            return self.memo[key]
        out: List[_Sub] = []
        action = self.g.actions.get(task)
        if action is not None:
            if length >= 1 and action.precondition != FALSE:
                self._count()
                out.append(_Sub(task, None, (), 0, 1))
        elif depth >= 1:
            for m in self.g.methods_for(task):
                for kids in self.sequences(m.network.tasks(), depth - 1, length):
                    self._count()
                    d = 1 + sum(k.decompositions for k in kids)
                    n = sum(k.leaves for k in kids)
                    out.append(_Sub(task, m, kids, d, n))
        self.memo[key] = out
        return out

    def sequences(self, tasks: Sequence[Task], depth: int, length: int) -> Iterator[Tuple[_Sub, ...]]:
        if not tasks:
            yield ()
            return
        for first in self.expansions(tasks[0], depth, length):
            for rest in self.sequences(tasks[1:], depth - first.decompositions, length - first.leaves):
                yield (first,) + rest


def _build(tn: TaskNetwork, i: str, sub: _Sub, nodes: List[TreeNode]) -> TaskNetwork:
    if sub.method is None:
        return tn
    m = sub.method
    tn = decompose_step(tn, i, m)
    child_ids = tuple(f"{i}.{k}" for k in range(len(m.network.ids)))
    nodes.append(TreeNode(i, sub.task, m.name, child_ids))
    for cid, kid in zip(child_ids, sub.children):
        tn = _build(tn, cid, kid, nodes)
    return tn


def _linearizations(g: GroundModel, tn: TaskNetwork, goal) -> Iterator[Tuple[str, ...]]:
    preds = {i: {a for a, b in tn.order if b == i} for i in tn.ids}
    seq: List[str] = []

    def rec(done, state):
        if len(done) == len(tn.ids):
            if goal is None or holds(state, goal, g.types):
                yield tuple(seq)
            return
        for i in tn.ids:
            if i in done or not preds[i] <= done:
                continue
            act = g.actions[tn.alpha[i]]
            if not applicable(state, act):
                continue
            seq.append(i)
            yield from rec(done | {i}, apply(state, act))
            seq.pop()

    yield from rec(frozenset(), g.init)


def enumerate_solutions(
    g: GroundModel, max_depth: int = 10, max_len: int = 10, node_budget: int = 200_000
) -> List[Tuple[Plan, DecompositionTree]]:
    """All solutions with at most ``max_depth`` decompositions and ``max_len`` actions.

    Sorted by plan length, then action keys, then tree. Raises
    OracleLimitExceeded once more than ``node_budget`` subtrees are built.
    """
    enum = _Enumerator(g, node_budget)
    found = set()
    for root in g.roots:
        tn0 = root.network
        for subs in enum.sequences(tn0.tasks(), max_depth, max_len):
            nodes: List[TreeNode] = []
            tn = tn0
            for i, sub in zip(tn0.ids, subs):
                tn = _build(tn, i, sub, nodes)
            tree = DecompositionTree(tn0.ids, tuple(nodes))
            for seq in _linearizations(g, tn, root.goal):
                plan = Plan(tuple(PlanStep(i, tn.alpha[i]) for i in seq))
                found.add((plan, tree))

    def key(item):
        plan, tree = item
        return (len(plan), [t.key for t in plan.tasks], plan.ids, repr(tree))

    return sorted(found, key=key)
