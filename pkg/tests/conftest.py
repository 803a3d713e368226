from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import pytest

from cesno.diagnostics import DiagnosticSink
from cesno.interpreter import Interpreter
from cesno.modules import ModuleLoader
from cesno.parser import parse_source
from cesno.runtime import CesnoThrow, ExitSignal, Value


@dataclass
class RunResult:
    stdout: str
    value: Value | None
    error: CesnoThrow | None
    exit_code: int | None
    interp: Interpreter

    @property
    def ok(self) -> bool:
        return self.error is None


def run_program(source: str, stdin: str = "", seed: int = 0, root: Path | None = None) -> RunResult:
    """Parse and execute a single module; diagnostics must be clean."""
    sink = DiagnosticSink()
    module = parse_source(source, "<test>", sink)
    assert not sink.has_errors(), [d.render() for d in sink.items]
    interp = Interpreter(stdin=io.StringIO(stdin), stdout=io.StringIO(), seed=seed)
    if root is not None:
        interp.loader = ModuleLoader(interp, root)
    env = interp.make_root_env().child("module")
    value = None
    error = None
    exit_code = None
    try:
        value = interp.run_module_ast(module, env)
    except CesnoThrow as exc:
        error = exc
    except ExitSignal as sig:
        exit_code = sig.code
    return RunResult(interp.stdout.getvalue(), value, error, exit_code, interp)


@pytest.fixture
def run():
    return run_program


def run_entry(root: Path, entry_name: str, stdin: str = "", seed: int = 0) -> RunResult:
    """Execute a file inside a project tree through the module loader."""
    interp = Interpreter(stdin=io.StringIO(stdin), stdout=io.StringIO(), seed=seed)
    interp.loader = ModuleLoader(interp, root)
    error = None
    exit_code = None
    try:
        interp.loader.load_entry(root / entry_name)
    except CesnoThrow as exc:
        error = exc
    except ExitSignal as sig:
        exit_code = sig.code
    return RunResult(interp.stdout.getvalue(), None, error, exit_code, interp)
