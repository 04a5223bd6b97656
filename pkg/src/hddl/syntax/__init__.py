"""Lexing, parsing and printing of HDDL text."""

from .ast import AstDomain, AstProblem
from .lexer import Tok, Token, tokenize
from .parser import parse_domain, parse_domain_text, parse_problem, parse_problem_text, parse_text
from .printer import emit

__all__ = [
    "AstDomain",
    "AstProblem",
    "Tok",
    "Token",
    "emit",
    "parse_domain",
    "parse_domain_text",
    "parse_problem",
    "parse_problem_text",
    "parse_text",
    "tokenize",
]
