"""Traversal helpers over goal descriptions and effects."""

from __future__ import annotations

from typing import Dict, Iterator, List, Mapping

from .syntax.ast import (
    And,
    Atom,
    Equals,
    Exists,
    Forall,
    ForallEffect,
    Formula,
    Imply,
    Not,
    Or,
    Term,
    When,
)


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, (And, Or)):
        for p in f.parts:
            yield from walk(p)
    elif isinstance(f, Not):
        yield from walk(f.arg)
    elif isinstance(f, Imply):
        yield from walk(f.antecedent)
        yield from walk(f.consequent)
    elif isinstance(f, (Exists, Forall)):
        yield from walk(f.body)
    elif isinstance(f, When):
        yield from walk(f.condition)
        yield from walk(f.effect)
    elif isinstance(f, ForallEffect):
        yield from walk(f.effect)


def free_variables(f: Formula) -> List[str]:
    """Free variables in order of first occurrence."""
    out: Dict[str, None] = {}

    def visit(g, bound):
        if isinstance(g, Atom):
            for t in g.args:
                if t.is_variable and t.name not in bound:
                    out.setdefault(t.name)
        elif isinstance(g, Equals):
            for t in (g.left, g.right):
                if t.is_variable and t.name not in bound:
                    out.setdefault(t.name)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                visit(p, bound)
        elif isinstance(g, Not):
            visit(g.arg, bound)
        elif isinstance(g, Imply):
            visit(g.antecedent, bound)
            visit(g.consequent, bound)
        elif isinstance(g, (Exists, Forall)):
            visit(g.body, bound | {v.name for v in g.variables})
        elif isinstance(g, When):
            visit(g.condition, bound)
            visit(g.effect, bound)
        elif isinstance(g, ForallEffect):
            visit(g.effect, bound | {v.name for v in g.variables})

    visit(f, frozenset())
    return list(out)


def _sub_term(t: Term, mapping: Mapping[str, str]) -> Term:
    if t.is_variable and t.name in mapping:
        return Term(mapping[t.name], t.span)
    return t


def substitute(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Replace free variables by ``mapping``; bound variables are left alone."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.predicate, tuple(_sub_term(t, mapping) for t in f.args), f.span)
    if isinstance(f, Equals):
        return Equals(_sub_term(f.left, mapping), _sub_term(f.right, mapping), f.span)
    if isinstance(f, And):
        return And(tuple(substitute(p, mapping) for p in f.parts), f.span)
    if isinstance(f, Or):
        return Or(tuple(substitute(p, mapping) for p in f.parts), f.span)
    if isinstance(f, Not):
        return Not(substitute(f.arg, mapping), f.span)
    if isinstance(f, Imply):
        return Imply(substitute(f.antecedent, mapping), substitute(f.consequent, mapping), f.span)
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k not in {x.name for x in f.variables}}
        return type(f)(f.variables, substitute(f.body, inner), f.span)
    if isinstance(f, When):
        return When(substitute(f.condition, mapping), substitute(f.effect, mapping), f.span)
    if isinstance(f, ForallEffect):
        inner = {k: v for k, v in mapping.items() if k not in {x.name for x in f.variables}}
        return ForallEffect(f.variables, substitute(f.effect, inner), f.span)
    raise TypeError(f"not a formula: {f!r}")
