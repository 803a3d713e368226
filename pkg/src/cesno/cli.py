"""Batch CLI: `cesno run|check|dump <file>`.

Exit codes: 0 on success, the argument of `exit(n)` when the program
calls it, 1 on an uncaught thrown error, 2 on compile errors or I/O
failures.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import nodes as N
from .checker import Checker
from .diagnostics import DiagnosticSink
from .interpreter import Interpreter
from .lexer import LexError, tokenize
from .modules import ModuleLoader, SOURCE_EXTENSIONS
from .parser import parse_module
from .runtime import CesnoThrow, ExitSignal


def _project_root(entry: Path) -> Path:
    env_root = os.environ.get("CESNO_ROOT")
    if env_root:
        return Path(env_root)
    return entry.parent


def _read_entry(path_text: str, stderr) -> tuple[Path, str] | None:
    entry = Path(path_text)
    if entry.suffix not in SOURCE_EXTENSIONS:
        print(f"error: {entry} does not have a recognized extension {SOURCE_EXTENSIONS}", file=stderr)
        return None
    try:
        return entry, entry.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {entry}: {exc}", file=stderr)
        return None


def _front_end(entry: Path, source: str, stderr) -> tuple[N.Module | None, DiagnosticSink]:
    sink = DiagnosticSink()
    try:
        tokens = tokenize(source, str(entry), sink)
    except LexError:
        return None, sink
    module = parse_module(tokens, str(entry), sink)
    return module, sink


def _print_diags(sink: DiagnosticSink, stderr) -> None:
    for d in sink.items:
        print(d.render(), file=stderr)


def cmd_check(args, stdout, stderr) -> int:
    loaded = _read_entry(args.file, stderr)
    if loaded is None:
        return 2
    entry, source = loaded
    module, sink = _front_end(entry, source, stderr)
    if module is not None:
        checker = Checker(str(entry), _project_root(entry))
        checker.sink = sink
        checker.check_module(module)
    _print_diags(sink, stderr)
    return 0 if not sink.has_errors() else 2


def cmd_run(args, stdin, stdout, stderr) -> int:
    loaded = _read_entry(args.file, stderr)
    if loaded is None:
        return 2
    entry, source = loaded
    module, sink = _front_end(entry, source, stderr)
    if module is None or sink.has_errors():
        _print_diags(sink, stderr)
        return 2
    root = _project_root(entry)
    checker = Checker(str(entry), root)
    checker.sink = sink
    checker.check_module(module)
    _print_diags(sink, stderr)
    if sink.has_errors():
        return 2
    interp = Interpreter(stdin=stdin, stdout=stdout, seed=args.seed)
    interp.loader = ModuleLoader(interp, root)
    try:
        interp.loader.load_entry(entry)
    except ExitSignal as sig:
        return sig.code
    except CesnoThrow as exc:
        print(f"uncaught error: {exc}", file=stderr)
        return 1
    return 0


def cmd_dump(args, stdout, stderr) -> int:
    loaded = _read_entry(args.file, stderr)
    if loaded is None:
        return 2
    entry, source = loaded
    sink = DiagnosticSink()
    try:
        tokens = tokenize(source, str(entry), sink)
    except LexError:
        _print_diags(sink, stderr)
        return 2
    if args.dump == "tokens":
        for tok in tokens:
            if tok.kind in ("newline", "eof"):
                continue
            text = tok.text.replace("\n", "\\n")
            print(f'{tok.kind} "{text}" {tok.span.line}:{tok.span.column}', file=stdout)
        return 0
    module = parse_module(tokens, str(entry), sink)
    if sink.has_errors():
        _print_diags(sink, stderr)
        return 2
    for stmt in module.statements:
        print(N.dump(stmt), file=stdout)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cesno", description="Cesno batch driver")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="check and execute a program")
    run_p.add_argument("file")
    run_p.add_argument("--seed", type=int, default=None, help="seed the random generator for reproducible runs")

    check_p = sub.add_parser("check", help="report diagnostics without executing")
    check_p.add_argument("file")

    dump_p = sub.add_parser("dump", help="dump tokens or the AST")
    dump_p.add_argument("file")
    dump_p.add_argument("--dump", choices=["tokens", "ast"], default="ast")
    return parser


def main(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    args = build_arg_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args, stdin, stdout, stderr)
    if args.command == "check":
        return cmd_check(args, stdout, stderr)
    if args.command == "dump":
        return cmd_dump(args, stdout, stderr)
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
