"""Canonical pretty-printing of HDDL trees.

The output reparses to a structurally equal tree, and printing is a pure
function of structure, so formatting twice is the same as formatting once.
"""

from __future__ import annotations

from itertools import groupby
from typing import List, Sequence, Union

from . import ast

INDENT = "  "


def typed_list(names: Sequence[ast.TypedName]) -> str:
    parts: List[str] = []
    for tref, group in groupby(names, key=lambda n: n.type):
        parts.extend(n.name for n in group)
        if tref is not None:
            parts.extend(["-", str(tref)])
    return " ".join(parts)


def formula(f: ast.Formula) -> str:
    """Single-line rendering of a goal description or effect."""
    if isinstance(f, ast.Atom):
        return str(f)
    if isinstance(f, ast.Equals):
        return f"(= {f.left} {f.right})"
    if isinstance(f, ast.Not):
        return f"(not {formula(f.arg)})"
    if isinstance(f, ast.And):
        return "(" + " ".join(["and", *map(formula, f.parts)]) + ")"
    if isinstance(f, ast.Or):
        return "(" + " ".join(["or", *map(formula, f.parts)]) + ")"
    if isinstance(f, ast.Imply):
        return f"(imply {formula(f.antecedent)} {formula(f.consequent)})"
    if isinstance(f, ast.Exists):
        return f"(exists ({typed_list(f.variables)}) {formula(f.body)})"
    if isinstance(f, ast.Forall):
        return f"(forall ({typed_list(f.variables)}) {formula(f.body)})"
    if isinstance(f, ast.When):
        return f"(when {formula(f.condition)} {formula(f.effect)})"
    if isinstance(f, ast.ForallEffect):
        return f"(forall ({typed_list(f.variables)}) {formula(f.effect)})"
    raise TypeError(f"not a formula: {f!r}")


def _block(f: ast.Formula, depth: int) -> str:
    """Top-level conjunctions go one conjunct per line."""
    if isinstance(f, ast.And) and len(f.parts) > 1:
        pad = INDENT * (depth + 1)
        return "(and\n" + "\n".join(pad + formula(p) for p in f.parts) + ")"
    return formula(f)


def _subtask(st: ast.AstSubtask) -> str:
    return f"({st.id} {st.task})" if st.id else str(st.task)


def _conj(items: List[str], depth: int) -> str:
    if not items:
        return "()"
    if len(items) == 1:
        return items[0]
    pad = INDENT * (depth + 1)
    return "(and\n" + "\n".join(pad + x for x in items) + ")"


def task_network(tn: ast.AstTaskNetwork, depth: int) -> List[str]:
    pad = INDENT * depth
    lines = []
    if tn.subtasks_keyword:
        body = _conj([_subtask(s) for s in tn.subtasks], depth)
        lines.append(f"{pad}:{tn.subtasks_keyword} {body}")
    if tn.ordering_keyword:
        body = _conj([f"({o.before} < {o.after})" for o in tn.orderings], depth)
        lines.append(f"{pad}:{tn.ordering_keyword} {body}")
    if tn.has_constraints:
        cs = []
        for c in tn.constraints:
            eq = f"(= {c.left} {c.right})"
            cs.append(eq if c.positive else f"(not {eq})")
        lines.append(f"{pad}:constraints {_conj(cs, depth)}")
    return lines


def _closing(lines: List[str]) -> List[str]:
    lines[-1] += ")"
    return lines


def emit_domain(d: ast.AstDomain) -> str:
    out = [f"(define (domain {d.name})"]
    if d.requirements:
        out.append(f"{INDENT}(:requirements {' '.join(d.requirements)})")
    if d.types:
        out.append(f"{INDENT}(:types {typed_list(d.types)})")
    if d.constants:
        out.append(f"{INDENT}(:constants {typed_list(d.constants)})")
    if d.predicates:
        out.append(f"{INDENT}(:predicates")
        for p in d.predicates:
            sep = " " if p.parameters else ""
            out.append(f"{INDENT * 2}({p.name}{sep}{typed_list(p.parameters)})")
        out[-1] += ")"
    for t in d.tasks:
        out.append(f"{INDENT}(:task {t.name} :parameters ({typed_list(t.parameters)}))")
    for m in d.methods:
        lines = [
            f"{INDENT}(:method {m.name}",
            f"{INDENT * 2}:parameters ({typed_list(m.parameters)})",
            f"{INDENT * 2}:task {m.task}",
        ]
        if m.precondition is not None:
            lines.append(f"{INDENT * 2}:precondition {_block(m.precondition, 2)}")
        lines.extend(task_network(m.network, 2))
        out.extend(_closing(lines))
    for a in d.actions:
        lines = [
            f"{INDENT}(:action {a.name}",
            f"{INDENT * 2}:parameters ({typed_list(a.parameters)})",
        ]
        if a.precondition is not None:
            lines.append(f"{INDENT * 2}:precondition {_block(a.precondition, 2)}")
        if a.effect is not None:
            lines.append(f"{INDENT * 2}:effect {_block(a.effect, 2)}")
        out.extend(_closing(lines))
    out.append(")")
    return "\n".join(out)


def emit_problem(p: ast.AstProblem) -> str:
    out = [f"(define (problem {p.name})", f"{INDENT}(:domain {p.domain_name})"]
    if p.requirements:
        out.append(f"{INDENT}(:requirements {' '.join(p.requirements)})")
    if p.objects:
        out.append(f"{INDENT}(:objects {typed_list(p.objects)})")
    if p.htn is not None:
        lines = [f"{INDENT}(:{p.htn.problem_class}"]
        if p.htn.has_parameters:
            lines.append(f"{INDENT * 2}:parameters ({typed_list(p.htn.parameters)})")
        lines.extend(task_network(p.htn.network, 2))
        out.extend(_closing(lines))
    out.append(f"{INDENT}(:init")
    for lit in p.init:
        out.append(f"{INDENT * 2}{formula(lit)}")
    out[-1] += ")"
    if p.goal is not None:
        out.append(f"{INDENT}(:goal {_block(p.goal, 1)})")
    out.append(")")
    return "\n".join(out)


def emit(tree: Union[ast.AstDomain, ast.AstProblem]) -> str:
    if isinstance(tree, ast.AstDomain):
        return emit_domain(tree)
    return emit_problem(tree)
