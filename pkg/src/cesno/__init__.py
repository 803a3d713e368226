"""Cesno: lexer, parser, static checker, and tree-walking interpreter."""

from .checker import Checker, CheckResult, check_source
from .diagnostics import Diagnostic, DiagnosticSink
from .interpreter import Interpreter
from .lexer import tokenize
from .modules import ModuleLoader
from .parser import parse_module, parse_source

__all__ = [
    "Checker",
    "CheckResult",
    "check_source",
    "Diagnostic",
    "DiagnosticSink",
    "Interpreter",
    "ModuleLoader",
    "parse_module",
    "parse_source",
    "tokenize",
]
