"""Progression search over a ground model.

Each step either decomposes the first compound task without predecessors
(method choice is the only branching) or, when every such task is
primitive, applies one of the applicable ones. The search runs depth-first
with iterative deepening on the number of decompositions. Identical
(state, remaining network) pairs are only revisited with a larger remaining
budget. Tasks that cannot be refined into actions even under the delete
relaxation are never expanded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .execution import applicable, apply, holds
from .grounding import GroundAction, GroundModel, InitialNetwork
from .model.core import GroundAtom, Task, TaskNetwork
from .syntax.ast import And, Atom, Equals, Exists, Forall, Formula, Imply, Not, Or
from .verification.decomposition import decompose_step
from .verification.witness import DecompositionTree, Plan, PlanStep, TreeNode

SOLVED = "solved"
WITHIN_LIMITS = "unsolvable-within-limits"
PROVEN = "proven-unsolvable"


@dataclass(frozen=True)
class SearchLimits:
    """``None`` means unbounded for depth, length and time."""

    max_depth: Optional[int] = None
    max_length: Optional[int] = None
    node_budget: int = 1_000_000
    time_budget: Optional[float] = 60.0

    def __post_init__(self):
        for name in ("max_depth", "max_length", "node_budget", "time_budget"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class SearchStats:
    nodes: int = 0
    duplicates: int = 0
    max_depth: int = 0
    iterations: int = 0
    elapsed: float = 0.0
    budget_hit: bool = False
    dead_tasks: int = 0

    def lines(self) -> List[str]:
        return [
            f"nodes={self.nodes}",
            f"duplicates={self.duplicates}",
            f"max_depth={self.max_depth}",
            f"iterations={self.iterations}",
            f"elapsed={self.elapsed:.3f}",
            f"budget_hit={'true' if self.budget_hit else 'false'}",
            f"dead_tasks={self.dead_tasks}",
        ]


@dataclass
class SearchResult:
    status: str
    plan: Optional[Plan] = None
    tree: Optional[DecompositionTree] = None
    stats: SearchStats = field(default_factory=SearchStats)
    reason: str = ""

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


def search_stats(run: SearchResult) -> SearchStats:
    return run.stats


# -- relaxed reachability -------------------------------------------------------


def _relaxed_holds(f: Formula, reached: Set[GroundAtom]) -> bool:
    """Optimistic truth: negative conditions may always be made true."""
    if isinstance(f, Atom):
        return (f.predicate, tuple(t.name for t in f.args)) in reached
    if isinstance(f, Equals):
        return f.left.name == f.right.name
    if isinstance(f, Not):
        return True
    if isinstance(f, And):
        return all(_relaxed_holds(p, reached) for p in f.parts)
    if isinstance(f, Or):
        return any(_relaxed_holds(p, reached) for p in f.parts)
    if isinstance(f, Imply):
        return True
    if isinstance(f, (Exists, Forall)):
        return True
    raise TypeError(f"unexpected formula {f!r}")


def realizable_tasks(g: GroundModel) -> FrozenSet[Task]:
    """Tasks with some refinement whose actions are all relaxed-applicable."""
    reached: Set[GroundAtom] = set(g.init)
    usable: Set[Task] = set()
    changed = True
    while changed:
        changed = False
        for t, a in g.actions.items():
            if t in usable or not _relaxed_holds(a.precondition, reached):
                continue
            usable.add(t)
            changed = True
        for t in usable:
            a = g.actions[t]
            new = set(a.add)
            for ce in a.conditional:
                if _relaxed_holds(ce.condition, reached):
                    new |= ce.add
            if not new <= reached:
                reached |= new
                changed = True
    realizable = set(usable)
    changed = True
    while changed:
        changed = False
        for m in g.methods:
            if m.task not in realizable and all(t in realizable for t in m.network.tasks()):
                realizable.add(m.task)
                changed = True
    return frozenset(realizable)


# -- search ---------------------------------------------------------------------


def canonical(tn: TaskNetwork) -> Tuple:
    """A hashable description of a network up to identifier names.

    Ids are ranked layer by layer (tasks without remaining predecessors
    first) by task key and predecessor layers, then listing position.
    Equal descriptions imply isomorphic networks because the description
    lists every label and edge. Isomorphic networks that only differ in
    how equal-looking ids are listed may get different descriptions, which
    costs a missed duplicate and nothing else.
    """
    position = {i: k for k, i in enumerate(tn.ids)}
    preds: Dict[str, Set[str]] = {i: set() for i in tn.ids}
    for a, b in tn.order:
        preds[b].add(a)
    rank: Dict[str, int] = {}
    layer_of: Dict[str, int] = {}
    left = set(tn.ids)
    layer = 0
    while left:
        ready = [i for i in left if not (preds[i] & left)]
        ready.sort(key=lambda i: (tn.alpha[i].key, sorted(layer_of[p] for p in preds[i]), position[i]))
        for i in ready:
            rank[i] = len(rank)
            layer_of[i] = layer
        left -= set(ready)
        layer += 1
    labels = tuple(tn.alpha[i].key for i in sorted(tn.ids, key=rank.__getitem__))
    edges = tuple(sorted((rank[a], rank[b]) for a, b in tn.order))
    return labels, edges


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, g: GroundModel, limits: SearchLimits):
        self.g = g
        self.limits = limits
        self.stats = SearchStats()
        self.realizable = realizable_tasks(g)
        self.stats.dead_tasks = len((set(g.tasks) | set(g.actions)) - self.realizable)
        self.start = time.monotonic()
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"#{self.counter}"

    def tick(self):
        self.stats.nodes += 1
        if self.stats.nodes > self.limits.node_budget:
            self.stats.budget_hit = True
            raise _Budget("node budget exhausted")
        tb = self.limits.time_budget
        if tb is not None and self.stats.nodes % 256 == 0 and time.monotonic() - self.start > tb:
            self.stats.budget_hit = True
            raise _Budget("time budget exhausted")

    def run_iteration(self, root: InitialNetwork, bound: int) -> Optional[Tuple[List[PlanStep], List[TreeNode]]]:
        self.cutoff = False
        self.length_cut = False
        self.seen: Dict[Tuple, int] = {}
        self.plan: List[PlanStep] = []
        self.nodes: List[TreeNode] = []
        self.goal = root.goal
        if not all(t in self.realizable for t in root.network.tasks()):
            return None
        if self.dfs(self.g.init, root.network, bound, 0):
            return list(self.plan), list(self.nodes)
        return None

    def dfs(self, state, tn: TaskNetwork, budget: int, depth: int) -> bool:
        self.tick()
        self.stats.max_depth = max(self.stats.max_depth, depth)
        if not tn.ids:
            return self.goal is None or holds(state, self.goal, self.g.types)

        max_len = self.limits.max_length
        if max_len is not None:
            primitive = sum(1 for t in tn.tasks() if t in self.g.actions)
            if len(self.plan) + primitive > max_len:
                self.length_cut = True
                return False

        key = (state, canonical(tn))
        if max_len is not None:
            # the length cutoff depends on the prefix, so equal pairs are not interchangeable
            key += (len(self.plan),)
        if self.seen.get(key, -1) >= budget:
            self.stats.duplicates += 1
            return False
        self.seen[key] = budget

        ready = tn.minimal()
        compound = next((i for i in ready if tn.alpha[i] not in self.g.actions), None)
        if compound is not None:
            if budget == 0:
                self.cutoff = True
                return False
            task = tn.alpha[compound]
            for m in self.g.methods_for(task):
                if not all(t in self.realizable for t in m.network.tasks()):
                    continue
                rename = {j: self.fresh() for j in m.network.ids}
                child = decompose_step(tn, compound, m, rename)
                node = TreeNode(compound, task, m.name, tuple(rename[j] for j in m.network.ids))
                self.nodes.append(node)
                if self.dfs(state, child, budget - 1, depth + 1):
                    return True
                self.nodes.pop()
            return False

        for i in ready:
            action: GroundAction = self.g.actions[tn.alpha[i]]
            if not applicable(state, action):
                continue
            rest = TaskNetwork(
                tuple(x for x in tn.ids if x != i),
                frozenset(p for p in tn.order if p[0] != i),
                {x: t for x, t in tn.alpha.items() if x != i},
            )
            self.plan.append(PlanStep(i, action.task))
            if self.dfs(apply(state, action), rest, budget, depth + 1):
                return True
            self.plan.pop()
        return False


def plan(g: GroundModel, limits: SearchLimits = SearchLimits()) -> SearchResult:
    """Search for a solution; see the module docstring for the strategy.

    ``proven-unsolvable`` is reported only when an iteration finished without
    cutting off any branch, so the whole search space was explored. If the
    only cutoffs came from the length limit, deepening further is pointless
    and the search stops within limits.
    """
    s = _Search(g, limits)
    bound = 0
    try:
        while True:
            s.stats.iterations += 1
            any_cutoff = any_length_cut = False
            for root in g.roots:
                found = s.run_iteration(root, bound)
                if found is not None:
                    steps, nodes = found
                    s.stats.elapsed = time.monotonic() - s.start
                    tree = DecompositionTree(root.network.ids, tuple(nodes))
                    return SearchResult(SOLVED, Plan(tuple(steps)), tree, s.stats)
                any_cutoff = any_cutoff or s.cutoff
                any_length_cut = any_length_cut or s.length_cut
            if not any_cutoff:
                s.stats.elapsed = time.monotonic() - s.start
                if any_length_cut:
                    # a larger decomposition bound cannot get past the length limit
                    return SearchResult(WITHIN_LIMITS, stats=s.stats, reason="length limit reached")
                return SearchResult(PROVEN, stats=s.stats, reason="proven unsolvable")
            if limits.max_depth is not None and bound >= limits.max_depth:
                s.stats.elapsed = time.monotonic() - s.start
                return SearchResult(WITHIN_LIMITS, stats=s.stats, reason="depth limit reached")
            bound += 1
    except _Budget as e:
        s.stats.elapsed = time.monotonic() - s.start
        return SearchResult(WITHIN_LIMITS, stats=s.stats, reason=str(e))
