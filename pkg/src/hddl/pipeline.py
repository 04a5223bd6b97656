"""File-to-GroundModel plumbing shared by the CLI and the tests."""

from __future__ import annotations

from pathlib import Path
from typing import List, Tuple, Union

from .diagnostics import Diagnostic, HDDLError, HDDLSemanticError
from .grounding import GroundModel, ground
from .model import Model, analyze, compile_method_preconditions
from .syntax import parse_domain_text, parse_problem_text
from .syntax.ast import TRUE


class UncompiledPreconditions(HDDLError):
    pass


def load_model(
    domain: Union[str, Path], problem: Union[str, Path], strict: bool = False
) -> Tuple[Model, List[Diagnostic]]:
    """Parse and analyze two files; raise on any syntax or semantic error."""
    d = parse_domain_text(Path(domain).read_text(), str(domain))
    p = parse_problem_text(Path(problem).read_text(), str(problem))
    model, diags = analyze(d, p, strict)
    if model is None:
        raise HDDLSemanticError(diags)
    return model, diags


def load_ground(
    domain: Union[str, Path],
    problem: Union[str, Path],
    strict: bool = False,
    compile_preconditions: bool = True,
    prune: bool = True,
) -> GroundModel:
    model, _ = load_model(domain, problem, strict)
    if compile_preconditions:
        model = compile_method_preconditions(model)
    elif any(m.precondition not in (None, TRUE) for m in model.methods):
        raise UncompiledPreconditions(
            "method preconditions must be compiled for planning and verification"
        )
    return ground(model, prune=prune)
