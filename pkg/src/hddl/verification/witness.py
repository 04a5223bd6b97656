"""Plans, decomposition trees and their line-oriented text form.

A witness looks like::

    ==>
    0 drive c0 c1
    1 pick-up c1 p0
    root 4
    4 deliver p0 c0 -> m-deliver 5 1 6 3
    <==

Action lines give the plan in order; ``root`` lists the identifiers of the
initial network; each compound node names its task, method and children.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from ..diagnostics import HDDLError
from ..model.core import Task


class WitnessParseError(HDDLError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class PlanStep:
    id: str
    task: Task


@dataclass(frozen=True)
class Plan:
    steps: Tuple[PlanStep, ...] = ()

    def __len__(self):
        return len(self.steps)

    @property
    def tasks(self) -> Tuple[Task, ...]:
        return tuple(s.task for s in self.steps)

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(s.id for s in self.steps)


@dataclass(frozen=True)
class TreeNode:
    id: str
    task: Task
    method: str
    children: Tuple[str, ...] = ()


@dataclass(frozen=True)
class DecompositionTree:
    roots: Tuple[str, ...] = ()
    nodes: Tuple[TreeNode, ...] = ()

    def node_map(self) -> Dict[str, TreeNode]:
        return {n.id: n for n in self.nodes}


def parse_witness(text: str) -> Tuple[Plan, DecompositionTree]:
    inside, closed = False, False
    steps: List[PlanStep] = []
    nodes: List[TreeNode] = []
    roots: Optional[Tuple[str, ...]] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if line == "==>":
            if inside or closed:
                raise WitnessParseError("unexpected '==>'", lineno)
            inside = True
            continue
        if not inside:
            continue
        if line == "<==":
            inside, closed = False, True
            continue
        words = line.split()
        if words[0].lower() == "root":
            if roots is not None:
                raise WitnessParseError("second 'root' line", lineno)
            roots = tuple(words[1:])
            continue
        if "->" in words:
            arrow = words.index("->")
            head, tail = words[:arrow], words[arrow + 1:]
            if len(head) < 2 or not tail:
                raise WitnessParseError("compound line needs '<id> <task> ... -> <method> <children>'", lineno)
            task = Task(head[1].lower(), tuple(w.lower() for w in head[2:]))
            nodes.append(TreeNode(head[0], task, tail[0].lower(), tuple(tail[1:])))
        else:
            if len(words) < 2:
                raise WitnessParseError("action line needs '<id> <action> <args>'", lineno)
            steps.append(PlanStep(words[0], Task(words[1].lower(), tuple(w.lower() for w in words[2:]))))
    if inside:
        raise WitnessParseError("missing '<=='")
    if not closed:
        raise WitnessParseError("missing '==>'")
    if roots is None:
        raise WitnessParseError("missing 'root' line")
    return Plan(tuple(steps)), DecompositionTree(roots, tuple(nodes))


def format_witness(plan: Plan, tree: DecompositionTree) -> str:
    lines = ["==>"]
    for s in plan.steps:
        lines.append(" ".join((s.id, s.task.name) + s.task.args))
    lines.append(" ".join(("root",) + tree.roots))
    for n in tree.nodes:
        lines.append(" ".join((n.id, n.task.name) + n.task.args + ("->", n.method) + n.children))
    lines.append("<==")
    return "\n".join(lines) + "\n"


def renumber(plan: Plan, tree: DecompositionTree) -> Tuple[Plan, DecompositionTree]:
    """Actions become 0..n-1 in plan order; compound nodes follow in preorder."""
    new: Dict[str, str] = {s.id: str(k) for k, s in enumerate(plan.steps)}
    by_id = tree.node_map()
    ordered: List[TreeNode] = []

    def visit(i: str):
        node = by_id.get(i)
        if node is None:
            return
        new[i] = str(len(plan.steps) + len(ordered))
        ordered.append(node)
        for c in node.children:
            visit(c)

    for r in tree.roots:
        visit(r)
    steps = tuple(PlanStep(new[s.id], s.task) for s in plan.steps)
    nodes = tuple(
        TreeNode(new[n.id], n.task, n.method, tuple(new[c] for c in n.children)) for n in ordered
    )
    return Plan(steps), DecompositionTree(tuple(new[r] for r in tree.roots), nodes)


def match_by_task(ids: Iterable[str], tasks: Dict[str, Task], wanted: List[Tuple[str, Task]]) -> Optional[Dict[str, str]]:
    """Pair each (key, task) in ``wanted`` with an id labelled by the same task.

    Among ids with equal tasks the listing order is kept. Returns key->id,
    or None if the task multisets differ.
    """
    pool: Dict[Task, List[str]] = {}
    for i in ids:
        pool.setdefault(tasks[i], []).append(i)
    out: Dict[str, str] = {}
    for key, t in wanted:
        bucket = pool.get(t)
        if not bucket:
            return None
        out[key] = bucket.pop(0)
    if any(pool.values()):
        return None
    return out
