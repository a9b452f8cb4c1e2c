"""Textual front end: ASCII TLA+ subset to spec-core and back."""

from .lexer import Token, tokenize
from .parser import (
    ParsedModule,
    parse,
    parse_expression,
    parse_module,
    to_spec,
)
from .printer import pretty_print, print_expression, print_spec

__all__ = [
    "ParsedModule",
    "Token",
    "parse",
    "parse_expression",
    "parse_module",
    "pretty_print",
    "print_expression",
    "print_spec",
    "to_spec",
    "tokenize",
]
