"""Module loading: each file is a namespace, dotted paths map to dirs/files.

Exports are opt-in (`export`, or `inpackage export` for directory-subtree
visibility); everything else is sealed inside the file. A `prelude.ces`
is auto-imported by files in its directory and below. A module evaluates
at most once per program run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import nodes as N
from .parser import parse_source
from .diagnostics import DiagnosticSink
from .runtime import Environment, NamespaceValue, Value
from .types import ANY

SOURCE_EXTENSIONS = (".ces", ".cesno")

PUBLIC = "public"
INPACKAGE = "inpackage"


@dataclass
class ModuleRecord:
    dotted: str
    path: Path
    env: Environment | None = None
    exports: dict[str, str] = field(default_factory=dict)  # name -> scope
    exported_operators: list = field(default_factory=list)
    extensions: list = field(default_factory=list)
    loaded: bool = False


class ImportFailure(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ModuleLoader:
    def __init__(self, interp, project_root: Path):
        self.interp = interp
        self.root = Path(project_root).resolve()
        self.cache: dict[Path, ModuleRecord] = {}
        self.loading: list[Path] = []

    # ------------------------------------------------------------------
    # path resolution
    # ------------------------------------------------------------------

    def _file_for(self, base: Path) -> Path | None:
        for ext in SOURCE_EXTENSIONS:
            candidate = base.with_suffix(ext)
            if candidate.is_file():
                return candidate
        return None

    def resolve_segments(self, segments: list[str]):
        """-> ("package", dir) | ("module", file) | ("member", file, name)"""
        base = self.root
        for i, seg in enumerate(segments):
            as_dir = base / seg
            as_file = self._file_for(base / seg)
            if as_dir.is_dir():
                base = as_dir
                continue
            if as_file is not None:
                rest = segments[i + 1 :]
                if not rest:
                    return ("module", as_file)
                if len(rest) == 1:
                    return ("member", as_file, rest[0])
                raise ImportFailure(f"{'.'.join(segments)}: {seg} is a module, not a package")
            if i == 0 and seg in self.interp.b.modules:
                if len(segments) == 1:
                    return ("builtin", seg)
                return ("builtin-member", seg, segments[1])
            raise ImportFailure(f"cannot resolve import path {'.'.join(segments)!r} at {seg!r}")
        return ("package", base)

    # ------------------------------------------------------------------
    # imports
    # ------------------------------------------------------------------

    def import_path(self, segments: list[str], env: Environment) -> tuple[Value, str]:
        kind, *payload = self._resolve_or_throw(segments)
        if kind == "package":
            (dirpath,) = payload
            ns = NamespaceValue(segments[-1], "package", dirpath)
            return Value(ANY, ns), segments[-1]
        if kind == "module":
            (path,) = payload
            record = self.load_module(path)
            self._activate(record, env)
            ns = NamespaceValue(segments[-1], "module", path, record)
            return Value(ANY, ns), segments[-1]
        if kind == "member":
            path, member = payload
            record = self.load_module(path)
            self._activate(record, env)
            return self.exported_value(record, member), member
        if kind == "builtin":
            (name,) = payload
            return self.interp._builtin_module_value(name), name
        if kind == "builtin-member":
            name, member = payload
            table = self.interp.b.modules[name]
            if member not in table:
                raise self._import_error(f"builtin module {name!r} has no member {member!r}")
            fn = table[member]
            return Value(fn.function_type(), fn), member
        raise self._import_error(f"unsupported import {'.'.join(segments)!r}")

    def import_members(self, segments: list[str], names: list[str], env: Environment) -> list[Value]:
        kind, *payload = self._resolve_or_throw(segments)
        if kind != "module":
            raise self._import_error(f"from-import requires a module path, got {'.'.join(segments)!r}")
        (path,) = payload
        record = self.load_module(path)
        self._activate(record, env)
        return [self.exported_value(record, name) for name in names]

    def _resolve_or_throw(self, segments: list[str]):
        try:
            return self.resolve_segments(segments)
        except ImportFailure as exc:
            raise self._import_error(exc.message) from None

    def _import_error(self, message: str):
        return self.interp.b.make_error("ImportError", message)

    def _activate(self, record: ModuleRecord, env: Environment) -> None:
        """Exported operator definitions become visible in the importing scope."""
        for op in record.exported_operators:
            if op not in env.operators:
                env.operators.append(op)

    def exported_value(self, record: ModuleRecord, name: str) -> Value:
        scope = record.exports.get(name)
        if scope is None:
            raise self._import_error(f"{name!r} is not exported by {record.dotted or record.path.name}")
        if scope == INPACKAGE and not self._same_package(record):
            raise self._import_error(f"{name!r} is only exported inside {record.path.parent}")
        assert record.env is not None
        value = record.env.lookup(name)
        if value is None:
            raise self._import_error(f"{name!r} vanished from {record.dotted}")
        return value

    def _same_package(self, record: ModuleRecord) -> bool:
        importer = self.current_module_path()
        if importer is None:
            return True
        exporter_dir = record.path.parent.resolve()
        try:
            importer.resolve().relative_to(exporter_dir)
            return True
        except ValueError:
            return False

    def current_module_path(self) -> Path | None:
        record = self.interp._current_record()
        return record.path if record is not None else None

    def namespace_member(self, ns: NamespaceValue, name: str) -> Value:
        if ns.kind == "package":
            base = Path(ns.path)
            sub = base / name
            if sub.is_dir():
                return Value(ANY, NamespaceValue(name, "package", sub))
            as_file = self._file_for(base / name)
            if as_file is not None:
                record = self.load_module(as_file)
                return Value(ANY, NamespaceValue(name, "module", as_file, record))
            raise self._import_error(f"package {ns.name!r} has no member {name!r}")
        if ns.kind == "module":
            record = ns.record or self.load_module(Path(ns.path))
            return self.exported_value(record, name)
        raise self._import_error(f"namespace {ns.name!r} has no member {name!r}")

    # ------------------------------------------------------------------
    # loading & evaluation
    # ------------------------------------------------------------------

    def dotted_for(self, path: Path) -> str:
        try:
            rel = path.resolve().relative_to(self.root)
        except ValueError:
            return path.stem
        parts = list(rel.parts)
        parts[-1] = Path(parts[-1]).stem
        return ".".join(parts)

    def load_module(self, path: Path) -> ModuleRecord:
        path = path.resolve()
        record = self.cache.get(path)
        if record is not None and record.loaded:
            return record
        if path in self.loading:
            raise self._import_error(f"circular import of {self.dotted_for(path)!r}")
        record = ModuleRecord(self.dotted_for(path), path)
        self.cache[path] = record
        self.loading.append(path)
        try:
            self._evaluate(record)
        finally:
            self.loading.pop()
        return record

    def load_entry(self, path: Path) -> ModuleRecord:
        return self.load_module(Path(path))

    def _evaluate(self, record: ModuleRecord) -> None:
        source = record.path.read_text(encoding="utf-8")
        sink = DiagnosticSink()
        module = parse_source(source, str(record.path), sink)
        if sink.has_errors():
            first = sink.errors[0]
            raise self._import_error(f"syntax error in {record.path.name}: {first.message}")
        env = self.interp.make_root_env().child(f"module {record.dotted}")
        record.env = env
        self.interp.module_stack.append(record)
        try:
            self._import_preludes(record, env)
            self.interp.run_module_ast(module, env)
        finally:
            self.interp.module_stack.pop()
        record.loaded = True
        self._collect_exports(record)

    def _import_preludes(self, record: ModuleRecord, env: Environment) -> None:
        if record.path.name in tuple(f"prelude{ext}" for ext in SOURCE_EXTENSIONS):
            return
        chain: list[Path] = []
        directory = record.path.parent.resolve()
        while True:
            chain.append(directory)
            if directory == self.root or directory.parent == directory:
                break
            directory = directory.parent
        for directory in reversed(chain):
            prelude = self._file_for(directory / "prelude")
            if prelude is None:
                continue
            prelude_record = self.load_module(prelude)
            for name, scope in prelude_record.exports.items():
                value = prelude_record.env.lookup(name)
                if value is not None and name not in env.bindings:
                    env.declare(name, value)
            self._activate(prelude_record, env)

    def _collect_exports(self, record: ModuleRecord) -> None:
        assert record.env is not None
        for name, item in record.env.bindings.items():
            if "export" in item.modifiers:
                scope = INPACKAGE if "inpackage" in item.modifiers else PUBLIC
                record.exports[name] = scope
