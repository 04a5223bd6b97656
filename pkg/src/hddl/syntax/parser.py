"""Recursive-descent parser turning HDDL tokens into the trees in ``ast``.

Tokens are first grouped into nested lists, then each construct is read off
those lists. Errors carry the offending span and the set of tokens or forms
that would have been accepted there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..diagnostics import HDDLSyntaxError, SourceSpan
from . import ast
from .lexer import Tok, Token, end_span, tokenize


@dataclass
class SList:
    items: List["Node"]
    span: SourceSpan


Node = Union[SList, Token]


def read_tree(tokens: Sequence[Token], eof: Optional[SourceSpan] = None) -> SList:
    """Group a token sequence holding exactly one parenthesised form."""
    if not tokens:
        raise HDDLSyntaxError("empty input", eof or SourceSpan("<input>", 1, 1, 1, 1), ["("])
    if tokens[0].kind is not Tok.LPAREN:
        raise HDDLSyntaxError("unexpected token", tokens[0].span, ["("])
    eof = eof or tokens[-1].span
    stack: List[Tuple[Token, List[Node]]] = []
    result = None
    for pos, tok in enumerate(tokens):
        if result is not None:
            raise HDDLSyntaxError("unexpected token after end of definition", tok.span, ["end of input"])
        if tok.kind is Tok.LPAREN:
            stack.append((tok, []))
        elif tok.kind is Tok.RPAREN:
            if not stack:
                raise HDDLSyntaxError("unbalanced ')'", tok.span)
            open_tok, items = stack.pop()
            node = SList(items, open_tok.span.merge(tok.span))
            if stack:
                stack[-1][1].append(node)
            else:
                result = node
        else:
            stack[-1][1].append(tok)
    if result is None:
        raise HDDLSyntaxError("unexpected end of input", eof, [")"])
    return result


# -- small helpers ------------------------------------------------------------


def _describe(node: Node) -> str:
    if isinstance(node, SList):
        return "list"
    return repr(node.text)


def _is_id(node: Node, value: Optional[str] = None) -> bool:
    return isinstance(node, Token) and node.kind is Tok.ID and (value is None or node.value == value)


def _is_kw(node: Node, value: Optional[str] = None) -> bool:
    return isinstance(node, Token) and node.kind is Tok.KW and (value is None or node.value == value)


def _expect_list(node: Node, what: str) -> SList:
    if not isinstance(node, SList):
        raise HDDLSyntaxError(f"expected {what}, found {_describe(node)}", node.span, ["("])
    return node


def _expect_name(node: Node, what: str = "name") -> Token:
    if not _is_id(node):
        raise HDDLSyntaxError(f"expected {what}, found {_describe(node)}", node.span, ["identifier"])
    return node


def _need(items: List[Node], idx: int, parent: SList, expected: Sequence[str]) -> Node:
    if idx >= len(items):
        at = parent.span
        point = SourceSpan(at.file, at.end_line, at.end_col, at.end_line, at.end_col)
        raise HDDLSyntaxError("unexpected ')'", point, expected)
    return items[idx]


def _term(node: Node) -> ast.Term:
    if isinstance(node, Token) and node.kind in (Tok.ID, Tok.VAR) and node.value != "=":
        return ast.Term(node.text, node.span)
    raise HDDLSyntaxError(f"expected term, found {_describe(node)}", node.span, ["identifier", "variable"])


def _name_term(node: Node) -> ast.Term:
    if _is_id(node) and node.value != "=":
        return ast.Term(node.text, node.span)
    raise HDDLSyntaxError(f"expected constant, found {_describe(node)}", node.span, ["identifier"])


def _keyword_pairs(
    items: List[Node], parent: SList, allowed: Sequence[str]
) -> Dict[str, Tuple[Token, Node]]:
    """Read ``:key value`` pairs; each key at most once."""
    pairs: Dict[str, Tuple[Token, Node]] = {}
    expected = [":" + k for k in allowed]
    i = 0
    while i < len(items):
        key = items[i]
        if not _is_kw(key) or key.value not in allowed:
            raise HDDLSyntaxError(f"unexpected {_describe(key)}", key.span, expected)
        if key.value in pairs:
            raise HDDLSyntaxError(f"duplicate :{key.value}", key.span)
        value = _need(items, i + 1, parent, ["value for :" + key.value])
        pairs[key.value] = (key, value)
        i += 2
    return pairs


# -- typed lists --------------------------------------------------------------


def _type_ref(node: Node) -> ast.TypeRef:
    if isinstance(node, SList):
        items = node.items
        if not items or not _is_id(items[0], "either"):
            raise HDDLSyntaxError("expected type", node.span, ["identifier", "(either"])
        if len(items) < 2:
            raise HDDLSyntaxError("either needs at least one type", node.span, ["identifier"])
        return ast.Either(tuple(_expect_name(t, "type").value for t in items[1:]))
    return _expect_name(node, "type").value


def parse_typed_list(
    items: Sequence[Node], kind: Tok, require_types: bool, what: str
) -> Tuple[ast.TypedName, ...]:
    """``x+ - <type> [<typed list (x)>]``; trailing untyped names only if allowed."""
    out: List[ast.TypedName] = []
    pending: List[Token] = []
    i = 0
    while i < len(items):
        node = items[i]
        if isinstance(node, Token) and node.kind is Tok.DASH:
            if not pending:
                raise HDDLSyntaxError(f"'-' without preceding {what}", node.span, [what])
            if i + 1 >= len(items):
                raise HDDLSyntaxError("missing type after '-'", node.span, ["type"])
            tref = _type_ref(items[i + 1])
            out.extend(ast.TypedName(t.text, tref, t.span) for t in pending)
            pending = []
            i += 2
            continue
        if not (isinstance(node, Token) and node.kind is kind and node.value != "="):
            expected = ["variable" if kind is Tok.VAR else "identifier", "-"]
            raise HDDLSyntaxError(f"expected {what}, found {_describe(node)}", node.span, expected)
        pending.append(node)
        i += 1
    if pending:
        if require_types:
            raise HDDLSyntaxError(
                f"untyped {what} '{pending[0].text}': typed list must end in '- <type>'",
                pending[0].span,
                ["-"],
            )
        out.extend(ast.TypedName(t.text, None, t.span) for t in pending)
    return tuple(out)


# -- formulas -----------------------------------------------------------------


_GD_HEADS = ["and", "or", "not", "imply", "exists", "forall", "=", "predicate"]


def parse_gd(node: Node) -> ast.Formula:
    lst = _expect_list(node, "goal description")
    items = lst.items
    if not items:
        return ast.And((), lst.span)
    head = items[0]
    if not _is_id(head):
        raise HDDLSyntaxError(f"unexpected {_describe(head)}", head.span, _GD_HEADS)
    op = head.value
    if op == "and":
        return ast.And(tuple(parse_gd(x) for x in items[1:]), lst.span)
    if op == "or":
        return ast.Or(tuple(parse_gd(x) for x in items[1:]), lst.span)
    if op == "not":
        _arity(lst, 1)
        return ast.Not(parse_gd(items[1]), lst.span)
    if op == "imply":
        _arity(lst, 2)
        return ast.Imply(parse_gd(items[1]), parse_gd(items[2]), lst.span)
    if op in ("exists", "forall"):
        _arity(lst, 2)
        params = _expect_list(items[1], "variable list")
        variables = parse_typed_list(params.items, Tok.VAR, True, "variable")
        cls = ast.Exists if op == "exists" else ast.Forall
        return cls(variables, parse_gd(items[2]), lst.span)
    if op == "=":
        _arity(lst, 2)
        return ast.Equals(_term(items[1]), _term(items[2]), lst.span)
    return ast.Atom(op, tuple(_term(x) for x in items[1:]), lst.span)


def _arity(lst: SList, n: int):
    if len(lst.items) - 1 != n:
        head = lst.items[0].value
        raise HDDLSyntaxError(f"'{head}' takes {n} argument(s), got {len(lst.items) - 1}", lst.span)


def _atomic(node: Node, term=_term) -> ast.Atom:
    lst = _expect_list(node, "atomic formula")
    if not lst.items:
        raise HDDLSyntaxError("empty atomic formula", lst.span, ["predicate"])
    pred = _expect_name(lst.items[0], "predicate")
    if pred.value in ("and", "or", "not", "imply", "exists", "forall", "when", "="):
        raise HDDLSyntaxError(f"'{pred.value}' not allowed here", pred.span, ["predicate"])
    return ast.Atom(pred.value, tuple(term(x) for x in lst.items[1:]), lst.span)


def _literal(node: Node, term=_term) -> ast.Formula:
    lst = _expect_list(node, "literal")
    if lst.items and _is_id(lst.items[0], "not"):
        _arity(lst, 1)
        return ast.Not(_atomic(lst.items[1], term), lst.span)
    return _atomic(lst, term)


def parse_effect(node: Node) -> ast.Formula:
    lst = _expect_list(node, "effect")
    if not lst.items:
        return ast.And((), lst.span)
    if _is_id(lst.items[0], "and"):
        return ast.And(tuple(_c_effect(x) for x in lst.items[1:]), lst.span)
    return _c_effect(lst)


def _c_effect(node: Node) -> ast.Formula:
    lst = _expect_list(node, "effect")
    head = lst.items[0] if lst.items else None
    if head is not None and _is_id(head, "forall"):
        _arity(lst, 2)
        params = _expect_list(lst.items[1], "variable list")
        variables = parse_typed_list(params.items, Tok.VAR, False, "variable")
        return ast.ForallEffect(variables, parse_effect(lst.items[2]), lst.span)
    if head is not None and _is_id(head, "when"):
        _arity(lst, 2)
        cond = parse_gd(lst.items[1])
        eff = _expect_list(lst.items[2], "conditional effect")
        if eff.items and _is_id(eff.items[0], "and"):
            body = ast.And(tuple(_literal(x) for x in eff.items[1:]), eff.span)
        else:
            body = _literal(eff)
        return ast.When(cond, body, lst.span)
    return _literal(lst)


# -- task networks ------------------------------------------------------------


TN_KEYS = ast.SUBTASK_KEYWORDS + ast.ORDERING_KEYWORDS + ("constraints",)


def _task_ref(node: Node) -> ast.AstTaskRef:
    lst = _expect_list(node, "task")
    if not lst.items:
        raise HDDLSyntaxError("empty task", lst.span, ["task symbol"])
    name = _expect_name(lst.items[0], "task symbol")
    return ast.AstTaskRef(name.value, tuple(_term(x) for x in lst.items[1:]), lst.span)


def _subtask(node: Node) -> ast.AstSubtask:
    lst = _expect_list(node, "subtask")
    if len(lst.items) == 2 and isinstance(lst.items[1], SList):
        sid = _expect_name(lst.items[0], "subtask id")
        return ast.AstSubtask(sid.value, _task_ref(lst.items[1]), lst.span)
    return ast.AstSubtask(None, _task_ref(lst), lst.span)


def _conj(node: Node, what: str) -> List[Node]:
    """``() | <x> | (and <x>+)`` as a list of the ``<x>`` nodes."""
    lst = _expect_list(node, what)
    if not lst.items:
        return []
    if _is_id(lst.items[0], "and"):
        return list(lst.items[1:])
    return [lst]


def _ordering(node: Node) -> ast.AstOrdering:
    lst = _expect_list(node, "ordering constraint")
    items = lst.items
    if len(items) == 3 and isinstance(items[1], Token) and items[1].kind is Tok.LT:
        a, b = items[0], items[2]
    elif len(items) == 3 and isinstance(items[0], Token) and items[0].kind is Tok.LT:
        a, b = items[1], items[2]
    else:
        raise HDDLSyntaxError("expected (<id> < <id>)", lst.span, ["<"])
    return ast.AstOrdering(_expect_name(a, "subtask id").value, _expect_name(b, "subtask id").value, lst.span)


def _constraint(node: Node) -> Optional[ast.AstConstraint]:
    lst = _expect_list(node, "constraint")
    if not lst.items:
        return None
    positive = True
    inner = lst
    if _is_id(lst.items[0], "not"):
        _arity(lst, 1)
        inner = _expect_list(lst.items[1], "(= <term> <term>)")
        positive = False
    if not inner.items or not _is_id(inner.items[0], "="):
        raise HDDLSyntaxError("expected equality constraint", inner.span, ["=", "not"])
    _arity(inner, 2)
    return ast.AstConstraint(_term(inner.items[1]), _term(inner.items[2]), positive, lst.span)


def parse_task_network(pairs: Dict[str, Tuple[Token, Node]], span: SourceSpan) -> ast.AstTaskNetwork:
    sub_keys = [k for k in ast.SUBTASK_KEYWORDS if k in pairs]
    ord_keys = [k for k in ast.ORDERING_KEYWORDS if k in pairs]
    if len(sub_keys) > 1:
        raise HDDLSyntaxError("more than one subtask section", pairs[sub_keys[1]][0].span)
    if len(ord_keys) > 1:
        raise HDDLSyntaxError("more than one ordering section", pairs[ord_keys[1]][0].span)
    subtasks: Tuple[ast.AstSubtask, ...] = ()
    sub_kw = sub_keys[0] if sub_keys else None
    if sub_kw:
        subtasks = tuple(_subtask(x) for x in _conj(pairs[sub_kw][1], "subtasks"))
    ord_kw = ord_keys[0] if ord_keys else None
    orderings: Tuple[ast.AstOrdering, ...] = ()
    if ord_kw:
        orderings = tuple(_ordering(x) for x in _conj(pairs[ord_kw][1], "orderings"))
        if sub_kw and sub_kw.startswith("ordered-") and orderings:
            raise HDDLSyntaxError(
                "explicit orderings conflict with a totally ordered subtask list",
                pairs[ord_kw][0].span,
            )
    constraints: Tuple[ast.AstConstraint, ...] = ()
    if "constraints" in pairs:
        cs = (_constraint(x) for x in _conj(pairs["constraints"][1], "constraints"))
        constraints = tuple(c for c in cs if c is not None)
    return ast.AstTaskNetwork(
        subtasks, sub_kw, orderings, ord_kw, constraints, "constraints" in pairs, span
    )


# -- domain -------------------------------------------------------------------


_DOMAIN_SECTIONS = {
    "requirements": 0,
    "types": 1,
    "constants": 2,
    "predicates": 3,
    "task": 4,
    "method": 5,
    "action": 6,
}
_REPEATABLE = {"task", "method", "action"}


def _header(tree: SList, kind: str) -> Tuple[Token, List[Node]]:
    items = tree.items
    if not items or not _is_id(items[0], "define"):
        raise HDDLSyntaxError("expected (define ...)", tree.span, ["define"])
    head = _expect_list(_need(items, 1, tree, [f"({kind} <name>)"]), f"({kind} <name>)")
    if len(head.items) != 2 or not _is_id(head.items[0], kind):
        raise HDDLSyntaxError(f"expected ({kind} <name>)", head.span, [kind])
    return _expect_name(head.items[1], f"{kind} name"), items[2:]


def _params(pairs, key: str, owner: SList) -> Tuple[ast.TypedName, ...]:
    if key not in pairs:
        raise HDDLSyntaxError(f"missing :{key}", owner.span, [":" + key])
    lst = _expect_list(pairs[key][1], "parameter list")
    return parse_typed_list(lst.items, Tok.VAR, True, "parameter")


def _task_def(lst: SList, allowed: Sequence[str]) -> Tuple[Token, Dict[str, Tuple[Token, Node]]]:
    name = _expect_name(_need(lst.items, 1, lst, ["name"]), "name")
    pairs = _keyword_pairs(lst.items[2:], lst, allowed)
    return name, pairs


def _parse_action(lst: SList) -> ast.AstAction:
    name, pairs = _task_def(lst, ["parameters", "precondition", "effect", "effects"])
    if "effect" in pairs and "effects" in pairs:
        raise HDDLSyntaxError("both :effect and :effects given", pairs["effects"][0].span)
    pre = parse_gd(pairs["precondition"][1]) if "precondition" in pairs else None
    eff_node = pairs.get("effect") or pairs.get("effects")
    eff = parse_effect(eff_node[1]) if eff_node else None
    return ast.AstAction(name.value, _params(pairs, "parameters", lst), pre, eff, lst.span)


def _parse_method(lst: SList) -> ast.AstMethod:
    name, pairs = _task_def(lst, ("parameters", "task", "precondition") + TN_KEYS)
    if "task" not in pairs:
        raise HDDLSyntaxError("missing :task", lst.span, [":task"])
    task = _task_ref(pairs["task"][1])
    pre = parse_gd(pairs["precondition"][1]) if "precondition" in pairs else None
    tn = parse_task_network({k: v for k, v in pairs.items() if k in TN_KEYS}, lst.span)
    return ast.AstMethod(name.value, _params(pairs, "parameters", lst), task, pre, tn, lst.span)


def parse_domain(tokens: Sequence[Token], eof: Optional[SourceSpan] = None) -> ast.AstDomain:
    tree = read_tree(tokens, eof)
    name, sections = _header(tree, "domain")
    fields: Dict[str, object] = {k: [] for k in ("tasks", "methods", "actions")}
    seen: Dict[str, bool] = {}
    rank = -1
    for node in sections:
        lst = _expect_list(node, "domain section")
        head = lst.items[0] if lst.items else lst
        if not _is_kw(head) or head.value not in _DOMAIN_SECTIONS:
            expected = [":" + k for k in _DOMAIN_SECTIONS]
            raise HDDLSyntaxError(f"unknown domain section {_describe(head)}", head.span, expected)
        key = head.value
        if _DOMAIN_SECTIONS[key] < rank:
            raise HDDLSyntaxError(f"section :{key} out of order", head.span)
        if key in seen and key not in _REPEATABLE:
            raise HDDLSyntaxError(f"duplicate section :{key}", head.span)
        seen[key] = True
        rank = _DOMAIN_SECTIONS[key]
        body = lst.items[1:]
        if key == "requirements":
            fields["requirements"] = tuple(_requirement(x) for x in body)
        elif key == "types":
            fields["types"] = parse_typed_list(body, Tok.ID, False, "type")
        elif key == "constants":
            fields["constants"] = parse_typed_list(body, Tok.ID, True, "constant")
        elif key == "predicates":
            preds = []
            for p in body:
                pl = _expect_list(p, "predicate skeleton")
                pname = _expect_name(_need(pl.items, 0, pl, ["predicate"]), "predicate")
                params = parse_typed_list(pl.items[1:], Tok.VAR, True, "parameter")
                preds.append(ast.AstPredicate(pname.value, params, pl.span))
            fields["predicates"] = tuple(preds)
        elif key == "task":
            tname, pairs = _task_def(lst, ["parameters"])
            fields["tasks"].append(ast.AstTaskDef(tname.value, _params(pairs, "parameters", lst), lst.span))
        elif key == "method":
            fields["methods"].append(_parse_method(lst))
        else:
            fields["actions"].append(_parse_action(lst))
    for k in ("tasks", "methods", "actions"):
        fields[k] = tuple(fields[k])
    return ast.AstDomain(name.value, span=tree.span, **fields)


def _requirement(node: Node) -> str:
    if not _is_kw(node):
        raise HDDLSyntaxError(f"expected requirement key, found {_describe(node)}", node.span, [":<requirement>"])
    return node.text


# -- problem ------------------------------------------------------------------


_PROBLEM_SECTIONS = {"domain": 0, "requirements": 1, "objects": 2, "htn": 3, "init": 4, "goal": 5}


def _parse_htn(lst: SList) -> ast.AstHtn:
    pairs = _keyword_pairs(lst.items[1:], lst, ("parameters",) + TN_KEYS)
    params: Tuple[ast.TypedName, ...] = ()
    if "parameters" in pairs:
        plist = _expect_list(pairs["parameters"][1], "parameter list")
        params = parse_typed_list(plist.items, Tok.VAR, True, "parameter")
    tn = parse_task_network({k: v for k, v in pairs.items() if k in TN_KEYS}, lst.span)
    return ast.AstHtn(lst.items[0].value, params, tn, "parameters" in pairs, lst.span)


def parse_problem(tokens: Sequence[Token], eof: Optional[SourceSpan] = None) -> ast.AstProblem:
    tree = read_tree(tokens, eof)
    name, sections = _header(tree, "problem")
    fields: Dict[str, object] = {}
    rank = -1
    for node in sections:
        lst = _expect_list(node, "problem section")
        head = lst.items[0] if lst.items else lst
        if not _is_kw(head) or head.value not in _PROBLEM_SECTIONS:
            expected = [":" + k for k in _PROBLEM_SECTIONS]
            raise HDDLSyntaxError(f"unknown problem section {_describe(head)}", head.span, expected)
        key = head.value
        if key in fields or (key == "domain" and "domain_name" in fields):
            raise HDDLSyntaxError(f"duplicate section :{key}", head.span)
        if _PROBLEM_SECTIONS[key] < rank:
            raise HDDLSyntaxError(f"section :{key} out of order", head.span)
        rank = _PROBLEM_SECTIONS[key]
        body = lst.items[1:]
        if key == "domain":
            if len(body) != 1:
                raise HDDLSyntaxError("expected (:domain <name>)", lst.span, ["identifier"])
            fields["domain_name"] = _expect_name(body[0], "domain name").value
        elif key == "requirements":
            fields["requirements"] = tuple(_requirement(x) for x in body)
        elif key == "objects":
            fields["objects"] = parse_typed_list(body, Tok.ID, True, "object")
        elif key == "htn":
            fields["htn"] = _parse_htn(lst)
        elif key == "init":
            fields["init"] = tuple(_literal(x, _name_term) for x in body)
        else:
            if len(body) != 1:
                raise HDDLSyntaxError("expected (:goal <gd>)", lst.span)
            fields["goal"] = parse_gd(body[0])
    if "domain_name" not in fields:
        raise HDDLSyntaxError("missing (:domain <name>)", tree.span, [":domain"])
    if "init" not in fields:
        raise HDDLSyntaxError("missing (:init ...)", tree.span, [":init"])
    return ast.AstProblem(name.value, span=tree.span, **fields)


# -- text entry points --------------------------------------------------------


def parse_domain_text(text: str, file: str = "<input>") -> ast.AstDomain:
    return parse_domain(tokenize(text, file), end_span(text, file))


def parse_problem_text(text: str, file: str = "<input>") -> ast.AstProblem:
    return parse_problem(tokenize(text, file), end_span(text, file))


def parse_text(text: str, file: str = "<input>") -> Union[ast.AstDomain, ast.AstProblem]:
    """Parse either kind of file, dispatching on ``(define (domain|problem ...``."""
    tokens = tokenize(text, file)
    if len(tokens) >= 4 and tokens[3].kind is Tok.ID and tokens[3].value == "problem":
        return parse_problem(tokens, end_span(text, file))
    return parse_domain(tokens, end_span(text, file))
