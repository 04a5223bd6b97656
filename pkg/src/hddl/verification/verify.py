from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Dict, Optional

from ..execution import PreconditionViolated, apply, holds
from ..grounding import GroundMethod, GroundModel, InitialNetwork
from ..model.core import Task, TaskNetwork
from .decomposition import decompose_step
from .witness import DecompositionTree, Plan, TreeNode, match_by_task

STAGES = ("parse", "mapping", "method", "ordering", "executability", "goal")


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    stage: Optional[str] = None
    detail: str = ""

    @classmethod
    def accept(cls) -> "Verdict":
        return cls(True)

    @classmethod
    def reject(cls, stage: str, detail: str) -> "Verdict":
        assert stage in STAGES
        return cls(False, stage, detail)

    def __str__(self):
        if self.accepted:
            return "accepted"
        return f"rejected (stage={self.stage}): {self.detail}"


class _Reject(Exception):
    def __init__(self, stage, detail):
        self.verdict = Verdict.reject(stage, detail)


def _check_shape(g: GroundModel, plan: Plan, tree: DecompositionTree) -> Dict[str, Task]:
    labels: Dict[str, Task] = {}
    for s in plan.steps:
        if s.id in labels:
            raise _Reject("mapping", f"identifier '{s.id}' used twice")
        if s.task not in g.actions:
            raise _Reject("mapping", f"plan step {s.id} {s.task} is not a ground action")
        labels[s.id] = s.task
    for n in tree.nodes:
        if n.id in labels:
            raise _Reject("mapping", f"identifier '{n.id}' used twice")
        if n.task not in g.tasks:
            raise _Reject("mapping", f"node {n.id} {n.task} is not a ground compound task")
        labels[n.id] = n.task

    refs = Counter(tree.roots)
    for n in tree.nodes:
        refs.update(n.children)
    for i, count in refs.items():
        if i not in labels:
            raise _Reject("mapping", f"identifier '{i}' is referenced but not defined")
        if count > 1:
            raise _Reject("mapping", f"identifier '{i}' is referenced {count} times")
    for i in labels:
        if i not in refs:
            raise _Reject("mapping", f"identifier '{i}' is not part of the tree")
    return labels


def _find_method(g: GroundModel, node: TreeNode, labels: Dict[str, Task]) -> GroundMethod:
    wanted = Counter(labels[c] for c in node.children)
    for m in g.methods_for(node.task):
        if m.name == node.method and Counter(m.network.tasks()) == wanted:
            return m
    raise _Reject("method", f"no ground method {node.method} decomposes {node.task} into the listed children")


def _replay(g: GroundModel, root: InitialNetwork, tree: DecompositionTree, labels) -> TaskNetwork:
    tn0 = root.network
    pairs = match_by_task(tree.roots, labels, [(i, tn0.alpha[i]) for i in tn0.ids])
    if pairs is None:
        raise _Reject("mapping", "root tasks do not match the initial task network")
    tn = TaskNetwork(
        tuple(pairs[i] for i in tn0.ids),
        frozenset((pairs[a], pairs[b]) for a, b in tn0.order),
        {pairs[i]: tn0.alpha[i] for i in tn0.ids},
    )
    by_id = tree.node_map()
    queue = deque(r for r in tree.roots if r in by_id)
    while queue:
        node = by_id[queue.popleft()]
        m = _find_method(g, node, labels)
        rename = match_by_task(node.children, labels, [(j, m.network.alpha[j]) for j in m.network.ids])
        tn = decompose_step(tn, node.id, m, rename)
        queue.extend(c for c in node.children if c in by_id)
    return tn


def _verify_root(g: GroundModel, root: InitialNetwork, plan: Plan, tree: DecompositionTree, labels) -> Verdict:
    try:
        tn = _replay(g, root, tree, labels)
    except _Reject as r:
        return r.verdict
    if set(tn.ids) != set(plan.ids) or any(tn.alpha[s.id] != s.task for s in plan.steps):
        return Verdict.reject("mapping", "plan steps do not match the leaves of the tree")

    position = {s.id: k for k, s in enumerate(plan.steps)}
    for a, b in sorted(tn.order):
        if position[a] > position[b]:
            return Verdict.reject(
                "ordering", f"step {b} {tn.alpha[b]} must come after step {a} {tn.alpha[a]}"
            )

    state = g.init
    for k, s in enumerate(plan.steps):
        try:
            state = apply(state, g.actions[s.task])
        except PreconditionViolated as e:
            return Verdict.reject("executability", f"step {k} ({s.id}): {e}")

    if root.goal is not None and not holds(state, root.goal, g.types):
        return Verdict.reject("goal", "the final state does not satisfy the goal")
    return Verdict.accept()


def verify(g: GroundModel, plan: Plan, tree: DecompositionTree) -> Verdict:
    """Check that ``plan`` with ``tree`` is a solution of ``g``.

    With several instantiations of the initial network, any one may be used.
    Otherwise the rejection that got furthest through the stages is
    reported (the first such instantiation on ties).
    """
    try:
        labels = _check_shape(g, plan, tree)
    except _Reject as r:
        return r.verdict
    best: Optional[Verdict] = None
    for root in g.roots:
        v = _verify_root(g, root, plan, tree, labels)
        if v.accepted:
            return v
        if best is None or STAGES.index(v.stage) > STAGES.index(best.stage):
            best = v
    return best or Verdict.reject("mapping", "no initial task network")
