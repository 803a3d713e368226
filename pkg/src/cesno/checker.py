"""Static checks over a parsed module.

Types are inferred bottom-up; `any` (dynamic) defers to the runtime check
that every value carries. Conditions must be bool, null/undefined only
flow into unions naming them, float `==` warns, effectively-equal
overloads and inseparable variadic signatures are definition errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import nodes as N
from .builtins import Builtins, shared_builtins
from .callables import (
    Argument,
    BindError,
    OverloadError,
    Parameter,
    Signature,
    bind_arguments,
    select_overload,
    signatures_effectively_equal,
    validate_variadic_separability,
)
from .declare import (
    OperatorInfo,
    StaticDecl,
    TypeResolutionError,
    TypeResolver,
    build_class_info,
    build_enum_info,
    build_generic_params,
    build_signature,
    build_trait_info,
    collect_infer_names,
)
from .diagnostics import DiagnosticSink
from .lexer import NumberLiteral, TextLiteral
from .types import (
    ANY,
    AnyType,
    ClassInfo,
    EnumInfo,
    FunctionType,
    GenericRef,
    InferType,
    InferenceError,
    LiteralType,
    MemberSetType,
    NULL,
    NominalType,
    NullType,
    ParamSig,
    PendingEnumType,
    TraitInfo,
    TypeAliasInfo,
    TypeDescriptor,
    UNDEFINED,
    UndefinedType,
    UnionType,
    VOID,
    infer_generics,
    is_assignable,
    is_nullish,
    member_map_of,
    normalize_union,
    strip_nullish,
    substitute,
    types_equal,
)


@dataclass
class StaticFn:
    """A checked function: signature plus its body for later descent."""

    decl: N.FunctionDef
    signature: Signature
    name: str
    kind: str = "function"
    owner: ClassInfo | None = None
    generic_params: list = field(default_factory=list)

    def function_type(self) -> FunctionType:
        return self.signature.function_type()

    def bind(self, _obj) -> "StaticFn":
        return self


@dataclass
class CBinding:
    type: TypeDescriptor
    modifiers: tuple[str, ...] = ()
    assigned: bool = True
    narrowed: TypeDescriptor | None = None

    @property
    def is_const(self) -> bool:
        return "const" in self.modifiers or "readonly" in self.modifiers

    def effective(self) -> TypeDescriptor:
        return self.narrowed if self.narrowed is not None else self.type


class Scope:
    def __init__(self, parent: "Scope | None" = None):
        self.parent = parent
        self.bindings: dict[str, CBinding] = {}

    def child(self) -> "Scope":
        return Scope(self)

    def lookup(self, name: str) -> CBinding | None:
        scope: Scope | None = self
        while scope is not None:
            if name in scope.bindings:
                return scope.bindings[name]
            scope = scope.parent
        return None

    def declare(self, name: str, binding: CBinding) -> bool:
        if name in self.bindings:
            return False
        self.bindings[name] = binding
        return True


@dataclass
class CheckResult:
    diagnostics: DiagnosticSink
    binding_types: dict[str, TypeDescriptor]

    def ok(self) -> bool:
        return not self.diagnostics.has_errors()


class Checker:
    def __init__(self, file_id: str = "<input>", project_root: Path | None = None):
        self.b: Builtins = shared_builtins()
        self.file_id = file_id
        self.sink = DiagnosticSink()
        self.project_root = project_root
        self._self_stack: list[ClassInfo] = []
        self._fn_depth = 0
        self.binding_types: dict[str, TypeDescriptor] = {}
        self._checked_modules: set[Path] = set()

    # ------------------------------------------------------------------

    def error(self, code: str, message: str, node: N.Node) -> None:
        self.sink.error(code, message, self.file_id, node.span.line, node.span.column)

    def warning(self, code: str, message: str, node: N.Node) -> None:
        self.sink.warning(code, message, self.file_id, node.span.line, node.span.column)

    def check_module(self, module: N.Module) -> CheckResult:
        scope = self.root_scope().child()  # user names may shadow builtins
        for stmt in module.statements:
            self.check_statement(stmt, scope)
        for name, binding in scope.bindings.items():
            self.binding_types[name] = binding.type
        return CheckResult(self.sink, self.binding_types)

    def root_scope(self) -> Scope:
        scope = Scope()
        b = self.b
        for name, info in b.classes.items():
            if name.startswith("Std"):
                continue
            scope.declare(name, CBinding(b.t("type"), ("builtin",)))
            scope.bindings[name].decl = info
        for alias, target in b.aliases.items():
            scope.declare(alias, CBinding(b.t("type"), ("builtin",)))
            scope.bindings[alias].decl = b.classes[target]
        for name, trait in b.traits.items():
            scope.declare(name, CBinding(b.t("type"), ("builtin",)))
            scope.bindings[name].decl = trait
        for name, fn in b.functions.items():
            binding = CBinding(fn.function_type(), ("builtin",))
            binding.overloads = [fn]
            scope.declare(name, binding)
        scope.declare("stdin", CBinding(NominalType(b.classes["StdInStream"])))
        scope.declare("stdout", CBinding(NominalType(b.classes["StdOutStream"])))
        return scope

    def resolver_for(self, scope: Scope, owner: ClassInfo | None = None) -> TypeResolver:
        def lookup(name: str):
            if owner is not None and name in owner.type_aliases:
                return owner.type_aliases[name]
            for cls in self._self_stack:
                if name in cls.type_aliases:
                    return cls.type_aliases[name]
            binding = scope.lookup(name)
            if binding is not None:
                decl = getattr(binding, "decl", None)
                if decl is not None:
                    return decl
            return None

        resolver = TypeResolver(self.b, lookup)
        if owner is not None:
            resolver = resolver.with_self(owner)
        elif self._self_stack:
            resolver = resolver.with_self(self._self_stack[-1])
        return resolver

    def resolve_type(self, texpr: N.TypeExpr, scope: Scope, node: N.Node | None = None) -> TypeDescriptor:
        try:
            return self.resolver_for(scope).resolve(texpr)
        except TypeResolutionError as exc:
            self.error("E_UNRESOLVED", exc.message, node or texpr)
            return ANY

    # ------------------------------------------------------------------
    # statements
    # ------------------------------------------------------------------

    def check_statement(self, stmt: N.Node, scope: Scope) -> TypeDescriptor:
        handler = getattr(self, f"_chk_{type(stmt).__name__}", None)
        if handler is not None:
            result = handler(stmt, scope)
            return result if result is not None else VOID
        return self.infer_expr(stmt, scope)

    def check_block(self, block: N.Block, scope: Scope, new_scope: bool = True) -> TypeDescriptor:
        inner = scope.child() if new_scope else scope
        result: TypeDescriptor = VOID
        override = None
        for stmt in block.statements:
            if isinstance(stmt, N.EvalStmt):
                override = self.infer_expr(stmt.expr, inner)
                result = override
            else:
                result = self.check_statement(stmt, inner)
        return override if override is not None else result

    def _chk_ExpressionStmt(self, stmt: N.ExpressionStmt, scope: Scope) -> TypeDescriptor:
        return self.infer_expr(stmt.expr, scope)

    def _chk_Block(self, stmt: N.Block, scope: Scope) -> TypeDescriptor:
        return self.check_block(stmt, scope)

    def _chk_EvalStmt(self, stmt: N.EvalStmt, scope: Scope) -> TypeDescriptor:
        return self.infer_expr(stmt.expr, scope)

    def _chk_Declaration(self, stmt: N.Declaration, scope: Scope) -> TypeDescriptor:
        mods = tuple(stmt.modifiers)
        if stmt.shorthand == "const":
            mods = mods + ("const",)
        declared = None
        if stmt.declared_type is not None:
            declared = self.resolve_type(stmt.declared_type, scope, stmt)
        init_t: TypeDescriptor | None = None
        if stmt.init is not None:
            init_t = self.infer_expr(stmt.init, scope, expected=declared)
            if declared is not None:
                self._check_assignable(init_t, declared, stmt)
        binding_type = declared if declared is not None else (init_t if init_t is not None else ANY)
        binding = CBinding(binding_type, mods, assigned=stmt.init is not None)
        if not scope.declare(stmt.name, binding):
            self.error("E_REDECLARED", f"{stmt.name!r} is already declared in this scope", stmt)
        return init_t if init_t is not None else UNDEFINED

    def _check_assignable(self, src: TypeDescriptor, dst: TypeDescriptor, node: N.Node) -> None:
        if is_assignable(src, dst):
            return
        if is_nullish(src) and not is_nullish(dst):
            self.error(
                "E_NULL_ASSIGN",
                f"cannot assign {src.display()} to non-nullable {dst.display()}; declare the union explicitly",
                node,
            )
            return
        self.error("E_TYPE_MISMATCH", f"{src.display()} is not assignable to {dst.display()}", node)

    def _chk_Assignment(self, stmt: N.Assignment, scope: Scope) -> TypeDescriptor:
        value_t = self.infer_expr(stmt.value, scope)
        if stmt.op != "=":
            left_t = self.infer_expr(stmt.target, scope)
            value_t = self._binary_result(stmt.op[:-1], left_t, value_t, stmt)
        self._check_assign_target(stmt.target, value_t, scope, stmt)
        return value_t

    def _check_assign_target(self, target: N.Node, value_t: TypeDescriptor, scope: Scope, node: N.Node) -> None:
        if isinstance(target, N.Identifier):
            binding = scope.lookup(target.name)
            if binding is None:
                self.error("E_UNRESOLVED", f"{target.name!r} is not declared", node)
                return
            if binding.is_const and binding.assigned:
                self.error("E_CONST_REASSIGN", f"cannot reassign constant {target.name!r}", node)
            if not isinstance(binding.type, AnyType) or binding.modifiers:
                self._check_assignable(value_t, binding.type, node)
            binding.assigned = True
            binding.narrowed = None
            return
        if isinstance(target, N.DeclExpr):
            self._chk_Declaration(target.decl, scope)
            return
        if isinstance(target, N.Member):
            obj_t = self.infer_expr(target.obj, scope)
            self._check_member_assign(obj_t, target.name, value_t, node)
            return
        if isinstance(target, N.Index):
            obj_t = self.infer_expr(target.obj, scope)
            self.infer_expr(target.index, scope)
            return
        self.error("E_TYPE_MISMATCH", "invalid assignment target", node)

    def _check_member_assign(self, obj_t: TypeDescriptor, name: str, value_t: TypeDescriptor, node: N.Node) -> None:
        decl = obj_t.decl if isinstance(obj_t, NominalType) else None
        if isinstance(decl, ClassInfo):
            for info in decl.mro():
                if name in info.properties:
                    prop = info.properties[name]
                    if not prop.setters:
                        self.error("E_NO_SETTER", f"property {name!r} has no setter", node)
                        return
                    for setter in prop.setters:
                        sig = setter.signature
                        if sig.params and is_assignable(value_t, sig.params[0].type):
                            return
                    self.error("E_NO_SETTER", f"no setter of {name!r} accepts {value_t.display()}", node)
                    return
                if name in info.fields:
                    ftype = substitute(info.fields[name].type, self._mapping_for(obj_t))
                    self._check_assignable(value_t, ftype, node)
                    return
        # dynamic or unknown receivers defer to runtime

    def _mapping_for(self, t: TypeDescriptor) -> dict[str, object]:
        if isinstance(t, NominalType) and isinstance(t.decl, (ClassInfo, EnumInfo)):
            return {gp.name: t.args[i] for i, gp in enumerate(t.decl.generic_params) if i < len(t.args)}
        return {}

    def _chk_Return(self, stmt: N.Return, scope: Scope) -> TypeDescriptor:
        if stmt.value is not None:
            return self.infer_expr(stmt.value, scope)
        return VOID

    def _chk_Break(self, stmt: N.Break, scope: Scope) -> TypeDescriptor:
        if stmt.eval_expr is not None:
            return self.infer_expr(stmt.eval_expr, scope)
        return VOID

    def _chk_Continue(self, stmt: N.Continue, scope: Scope) -> TypeDescriptor:
        return VOID

    def _chk_Delete(self, stmt: N.Delete, scope: Scope) -> TypeDescriptor:
        binding = scope.lookup(stmt.name)
        if binding is None:
            self.error("E_UNRESOLVED", f"{stmt.name!r} is not declared", stmt)
        else:
            sc: Scope | None = scope
            while sc is not None:
                if stmt.name in sc.bindings:
                    del sc.bindings[stmt.name]
                    break
                sc = sc.parent
        return VOID

    def _chk_Assert(self, stmt: N.Assert, scope: Scope) -> TypeDescriptor:
        t = self.infer_expr(stmt.expr, scope)
        if not self._bool_ok(t):
            self.error("E_COND_NOT_BOOL", f"assert requires a bool, found {t.display()}", stmt)
        return VOID

    def _bool_ok(self, t: TypeDescriptor) -> bool:
        if isinstance(t, AnyType):
            return True
        if isinstance(t, LiteralType):
            return isinstance(t.value, bool)
        return isinstance(t, NominalType) and t.decl is self.b.classes["bool"]

    def _chk_ModifierBlock(self, stmt: N.ModifierBlock, scope: Scope) -> TypeDescriptor:
        result: TypeDescriptor = VOID
        for inner in stmt.statements:
            result = self.check_statement(inner, scope)
        return result

    def _chk_Import(self, stmt: N.Import, scope: Scope) -> TypeDescriptor:
        name = stmt.segments[-1]
        t = self._static_import(stmt.segments, stmt)
        if not scope.declare(name, CBinding(t if t is not None else ANY)):
            self.error("E_REDECLARED", f"{name!r} is already declared in this scope", stmt)
        return VOID

    def _chk_FromImport(self, stmt: N.FromImport, scope: Scope) -> TypeDescriptor:
        exports = self._peek_module_exports(stmt.segments, stmt)
        for name, alias in stmt.names:
            if exports is not None and name not in exports:
                self.error("E_NOT_EXPORTED", f"{name!r} is not exported by {'.'.join(stmt.segments)}", stmt)
            if not scope.declare(alias or name, CBinding(ANY)):
                self.error("E_REDECLARED", f"{alias or name!r} is already declared in this scope", stmt)
        return VOID

    def _static_import(self, segments: list[str], node: N.Node) -> TypeDescriptor | None:
        if self.project_root is None:
            return ANY
        base = self.project_root
        for i, seg in enumerate(segments):
            as_dir = base / seg
            as_file = None
            for ext in (".ces", ".cesno"):
                if (base / (seg + ext)).is_file():
                    as_file = base / (seg + ext)
                    break
            if as_dir.is_dir():
                base = as_dir
                continue
            if as_file is not None:
                rest = segments[i + 1 :]
                if len(rest) > 1:
                    self.error("E_IMPORT", f"{seg} is a module, not a package", node)
                    return ANY
                if rest:
                    exports = self._exports_of(as_file)
                    if exports is not None and rest[0] not in exports:
                        self.error("E_NOT_EXPORTED", f"{rest[0]!r} is not exported by {seg}", node)
                return ANY
            if i == 0 and seg in self.b.modules:
                return ANY
            self.error("E_IMPORT", f"cannot resolve import path {'.'.join(segments)!r}", node)
            return ANY
        return ANY

    def _peek_module_exports(self, segments: list[str], node: N.Node) -> set[str] | None:
        if self.project_root is None:
            return None
        base = self.project_root
        for seg in segments[:-1]:
            base = base / seg
        for ext in (".ces", ".cesno"):
            candidate = base / (segments[-1] + ext)
            if candidate.is_file():
                return self._exports_of(candidate)
        self.error("E_IMPORT", f"cannot resolve import path {'.'.join(segments)!r}", node)
        return None

    def _exports_of(self, path: Path) -> set[str] | None:
        from .parser import parse_source

        try:
            source = path.read_text(encoding="utf-8")
        except OSError:
            return None
        sink = DiagnosticSink()
        module = parse_source(source, str(path), sink)
        names: set[str] = set()

        def scan(statements, exported: bool):
            for s in statements:
                mods = getattr(s, "modifiers", [])
                is_exp = exported or "export" in mods
                if isinstance(s, N.ModifierBlock):
                    scan(s.statements, exported or "export" in s.modifiers)
                elif is_exp and getattr(s, "name", None):
                    names.add(s.name)

        scan(module.statements, False)
        return names

    # -- definitions -----------------------------------------------------

    def _make_static_fn(self, func: N.FunctionDef, scope: Scope, kind: str, owner: ClassInfo | None = None) -> StaticFn:
        resolver = self.resolver_for(scope, owner)
        generics = build_generic_params(func.generic_params, resolver)
        try:
            signature = build_signature(func, resolver, generics)
        except TypeResolutionError as exc:
            self.error("E_UNRESOLVED", exc.message, func)
            signature = Signature(tuple(Parameter(p.name) for p in func.params), ANY)
        try:
            validate_variadic_separability(signature)
        except BindError as exc:
            self.error(exc.code, exc.message, func)
        return StaticFn(func, signature, func.name or "<anonymous>", kind, owner, generics)

    def _chk_FunctionDef(self, stmt: N.FunctionDef, scope: Scope) -> TypeDescriptor:
        fn = self._make_static_fn(stmt, scope, stmt.kind)
        if stmt.name is not None:
            existing = scope.bindings.get(stmt.name)
            if existing is not None and hasattr(existing, "overloads"):
                for other in existing.overloads:
                    if signatures_effectively_equal(other.signature, fn.signature):
                        self.error(
                            "E_DUP_OVERLOAD",
                            f"overload of {stmt.name!r} is effectively equal to an existing signature",
                            stmt,
                        )
                existing.overloads.append(fn)
            else:
                binding = CBinding(fn.function_type())
                binding.overloads = [fn]
                if not scope.declare(stmt.name, binding):
                    self.error("E_REDECLARED", f"{stmt.name!r} is already declared", stmt)
        self._check_function_body(fn, scope)
        return fn.function_type()

    def _check_function_body(self, fn: StaticFn, scope: Scope) -> None:
        if fn.decl.body is None:
            return
        inner = scope.child()
        infer_names = set()
        for p in fn.decl.params:
            if p.declared_type is not None:
                infer_names |= collect_infer_names(p.declared_type)
        for gp in fn.generic_params:
            inner.declare(gp.name, CBinding(ANY, ("const",)))
        for name in infer_names:
            inner.declare(name, CBinding(ANY, ("const",)))
        if fn.owner is not None:
            inner.declare("self", CBinding(NominalType(fn.owner, tuple(GenericRef(gp.name) for gp in fn.owner.generic_params))))
            if fn.kind in ("getter", "setter"):
                inner.declare("__accessor__", CBinding(ANY))
        for p in fn.signature.params:
            t = p.type
            if p.variadic:
                t = self.b.t("tuple")
            elif p.optional and not p.has_default:
                t = normalize_union([t, UNDEFINED])
            inner.declare(p.name, CBinding(t))
        self._fn_depth += 1
        if fn.owner is not None:
            self._self_stack.append(fn.owner)
        try:
            self.check_block(fn.decl.body, inner, new_scope=False)
        finally:
            self._fn_depth -= 1
            if fn.owner is not None:
                self._self_stack.pop()

    def _chk_ClassDef(self, stmt: N.ClassDef, scope: Scope) -> TypeDescriptor:
        info = ClassInfo(stmt.name)
        binding = CBinding(self.b.t("type"))
        binding.decl = info
        if not scope.declare(stmt.name, binding):
            self.error("E_REDECLARED", f"{stmt.name!r} is already declared", stmt)

        fns: list[StaticFn] = []

        def make_function(func_node, kind, owner, r):
            fn = self._make_static_fn(func_node, scope, kind, owner)
            fns.append(fn)
            return fn

        try:
            build_class_info(stmt, self.resolver_for(scope), make_function, info)
        except TypeResolutionError as exc:
            self.error("E_UNRESOLVED", exc.message, stmt)
            return self.b.t("type")
        # rebuild with self generics visible
        resolver = self.resolver_for(scope, info)
        for fn in fns:
            try:
                fn.signature = build_signature(fn.decl, resolver, fn.generic_params)
            except TypeResolutionError as exc:
                self.error("E_UNRESOLVED", exc.message, fn.decl)
        for name, overloads in list(info.methods.items()) + list(info.functions.items()):
            for i in range(len(overloads)):
                for j in range(i + 1, len(overloads)):
                    if signatures_effectively_equal(overloads[i].signature, overloads[j].signature):
                        self.error("E_DUP_OVERLOAD", f"overloads of {name!r} are effectively equal", stmt)
        for name, static in info.statics.items():
            if isinstance(static, StaticDecl) and static.node.init is not None:
                static.static_type = self.infer_expr(static.node.init, scope.child())
        for fn in fns:
            self._check_function_body(fn, scope)
        return self.b.t("type")

    def _chk_EnumDef(self, stmt: N.EnumDef, scope: Scope) -> TypeDescriptor:
        try:
            info = build_enum_info(stmt, self.resolver_for(scope))
        except TypeResolutionError as exc:
            self.error("E_UNRESOLVED", exc.message, stmt)
            info = EnumInfo(stmt.name)
        binding = CBinding(self.b.t("type"))
        binding.decl = info
        if not scope.declare(stmt.name, binding):
            self.error("E_REDECLARED", f"{stmt.name!r} is already declared", stmt)
        return self.b.t("type")

    def _chk_TraitDef(self, stmt: N.TraitDef, scope: Scope) -> TypeDescriptor:
        try:
            info = build_trait_info(stmt, self.resolver_for(scope))
        except TypeResolutionError as exc:
            self.error("E_UNRESOLVED", exc.message, stmt)
            info = TraitInfo(stmt.name)
        binding = CBinding(self.b.t("type"))
        binding.decl = info
        if not scope.declare(stmt.name, binding):
            self.error("E_REDECLARED", f"{stmt.name!r} is already declared", stmt)
        return self.b.t("type")

    def _chk_TypeAliasDef(self, stmt: N.TypeAliasDef, scope: Scope) -> TypeDescriptor:
        resolver = self.resolver_for(scope)
        generics = build_generic_params(stmt.generic_params, resolver)
        rr = resolver.with_generics([gp.name for gp in generics])
        try:
            target = rr.resolve(stmt.target)
        except TypeResolutionError as exc:
            self.error("E_UNRESOLVED", exc.message, stmt)
            target = ANY
        alias = TypeAliasInfo(stmt.name, generics, target)
        binding = CBinding(self.b.t("type"))
        binding.decl = alias
        if not scope.declare(stmt.name, binding):
            self.error("E_REDECLARED", f"{stmt.name!r} is already declared", stmt)
        return self.b.t("type")

    def _chk_OperatorDef(self, stmt: N.OperatorDef, scope: Scope) -> TypeDescriptor:
        fn = self._make_static_fn(stmt.func, scope, "operator")
        self._check_function_body(fn, scope)
        return fn.function_type()

    def _chk_ImplementBlock(self, stmt: N.ImplementBlock, scope: Scope) -> TypeDescriptor:
        generic_names = []
        if isinstance(stmt.target, N.TName) and stmt.target.generic_args:
            for arg in stmt.target.generic_args:
                if arg.declares_name is not None:
                    generic_names.append(arg.declares_name)
        resolver = self.resolver_for(scope).with_generics(generic_names)
        try:
            target_t = resolver.resolve(stmt.target)
        except TypeResolutionError as exc:
            self.error("E_UNRESOLVED", exc.message, stmt)
            return VOID
        owner = target_t.decl if isinstance(target_t, NominalType) and isinstance(target_t.decl, ClassInfo) else None
        for member in stmt.members:
            self._check_implement_member(member, scope, owner, generic_names)
        return VOID

    def _check_implement_member(self, member: N.Node, scope: Scope, owner, generic_names) -> None:
        if isinstance(member, N.ModifierBlock):
            for inner in member.statements:
                self._check_implement_member(inner, scope, owner, generic_names)
            return
        if isinstance(member, N.FunctionDef):
            inner_scope = scope.child()
            for name in generic_names:
                inner_scope.declare(name, CBinding(ANY, ("const",)))
            fn = self._make_static_fn(member, inner_scope, member.kind, owner)
            saved = self._self_stack[:]
            if owner is None:
                # enum targets: self is dynamic inside the body
                body_scope = inner_scope.child()
                body_scope.declare("self", CBinding(ANY))
                for p in fn.signature.params:
                    body_scope.declare(p.name, CBinding(p.type))
                if member.body is not None:
                    self.check_block(member.body, body_scope, new_scope=False)
                return
            self._check_function_body(fn, inner_scope)
            self._self_stack = saved
            return
        if isinstance(member, N.PropertyDecl):
            for accessor in member.getters + member.setters:
                self._check_implement_member(accessor, scope, owner, generic_names)
            return

    # -- flow control ------------------------------------------------------

    def _chk_If(self, stmt: N.If, scope: Scope) -> TypeDescriptor:
        results = []
        for cond, block in stmt.branches:
            t = self.infer_expr(cond, scope)
            if not self._bool_ok(t):
                self.error("E_COND_NOT_BOOL", f"if condition must be bool, found {t.display()}", cond)
            results.append(self.check_block(block, scope))
        if stmt.else_block is not None:
            results.append(self.check_block(stmt.else_block, scope))
        else:
            results.append(VOID)
        return normalize_union(results) if results else VOID

    def _chk_Match(self, stmt: N.Match, scope: Scope) -> TypeDescriptor:
        subject_t = self.infer_expr(stmt.subject, scope)
        subject_name = stmt.subject.name if isinstance(stmt.subject, N.Identifier) else None
        results = []
        for arm in stmt.arms:
            arm_scope = scope.child()
            narrowed = None
            for pattern in arm.patterns:
                pt = self._pattern_type(pattern, scope)
                if pt is not None:
                    narrowed = pt if narrowed is None else normalize_union([narrowed, pt])
                else:
                    self.infer_expr(pattern, scope)
            if subject_name is not None and narrowed is not None:
                arm_scope.declare(subject_name, CBinding(narrowed))
            if isinstance(arm.body, N.Block):
                results.append(self.check_block(arm.body, arm_scope, new_scope=False))
            else:
                results.append(self.infer_expr(arm.body, arm_scope))
        return normalize_union(results) if results else VOID

    def _pattern_type(self, pattern: N.Node, scope: Scope) -> TypeDescriptor | None:
        if isinstance(pattern, N.Identifier):
            binding = scope.lookup(pattern.name)
            decl = getattr(binding, "decl", None) if binding is not None else None
            if isinstance(decl, (ClassInfo, EnumInfo)):
                return NominalType(decl)
            if isinstance(decl, TraitInfo):
                return NominalType(decl)
        if isinstance(pattern, N.Literal):
            if pattern.lit_kind == "null":
                return NULL
            if pattern.lit_kind == "undefined":
                return UNDEFINED
        return None

    def _chk_ForLoop(self, stmt: N.ForLoop, scope: Scope) -> TypeDescriptor:
        loop_scope = scope.child()
        for ind in stmt.indicators:
            if isinstance(ind, N.CStyleIndicator):
                if ind.init is not None:
                    self.check_statement(ind.init, loop_scope)
                if ind.condition is not None:
                    t = self.infer_expr(ind.condition, loop_scope)
                    if not self._bool_ok(t):
                        self.error("E_COND_NOT_BOOL", "loop condition must be bool", ind.condition)
                if ind.step is not None:
                    self.check_statement(ind.step, loop_scope)
            else:
                it = self.infer_expr(ind.iterable, loop_scope)
                elem = self._element_type(it)
                declared = None
                if ind.declared_type is not None:
                    declared = self.resolve_type(ind.declared_type, loop_scope, ind)
                # an exhausted indicator becomes undefined while others continue
                elem_t = declared if declared is not None else elem
                if len(stmt.indicators) > 1:
                    elem_t = normalize_union([elem_t, UNDEFINED])
                loop_scope.declare(ind.binding_name, CBinding(elem_t, ("const",) if ind.binding_kind == "const" else ()))
        result = self.check_block(stmt.body, loop_scope)
        if stmt.then_block is not None:
            result = self.check_block(stmt.then_block, loop_scope)
        if stmt.else_block is not None:
            result = self.check_block(stmt.else_block, loop_scope)
        return result

    def _element_type(self, t: TypeDescriptor) -> TypeDescriptor:
        if isinstance(t, NominalType):
            name = t.decl.name if t.decl is not None else ""
            if name in ("array", "list", "set") and t.args:
                arg = t.args[0]
                return arg if isinstance(arg, TypeDescriptor) else ANY
            if name == "sequence" and t.args:
                arg = t.args[0]
                return arg if isinstance(arg, TypeDescriptor) else ANY
            if name == "dictionary" and t.args:
                arg = t.args[0]
                return arg if isinstance(arg, TypeDescriptor) else ANY
            if name == "string":
                return self.b.t("char")
            if name == "tuple":
                return normalize_union([a for a in t.args if isinstance(a, TypeDescriptor)]) if t.args else ANY
        if isinstance(t, AnyType):
            return ANY
        if isinstance(t, UnionType):
            return normalize_union([self._element_type(a) for a in t.alternatives])
        self_t = t
        return ANY

    def _chk_WhileLoop(self, stmt: N.WhileLoop, scope: Scope) -> TypeDescriptor:
        t = self.infer_expr(stmt.condition, scope)
        if not self._bool_ok(t):
            self.error("E_COND_NOT_BOOL", f"while condition must be bool, found {t.display()}", stmt.condition)
        loop_scope = scope.child()
        result = self.check_block(stmt.body, loop_scope)
        if stmt.then_block is not None:
            result = self.check_block(stmt.then_block, loop_scope)
        if stmt.else_block is not None:
            result = self.check_block(stmt.else_block, loop_scope)
        return result

    def _chk_DoLoop(self, stmt: N.DoLoop, scope: Scope) -> TypeDescriptor:
        loop_scope = scope.child()
        result = self.check_block(stmt.body, loop_scope)
        t = self.infer_expr(stmt.condition, loop_scope)
        if not self._bool_ok(t):
            self.error("E_COND_NOT_BOOL", "do-while condition must be bool", stmt.condition)
        if stmt.then_block is not None:
            result = self.check_block(stmt.then_block, loop_scope)
        if stmt.else_block is not None:
            result = self.check_block(stmt.else_block, loop_scope)
        return result

    def _chk_Try(self, stmt: N.Try, scope: Scope) -> TypeDescriptor:
        results = [self.check_block(stmt.body, scope)]
        for arm in stmt.catches:
            arm_scope = scope.child()
            t = self.resolve_type(arm.type_expr, scope, arm)
            arm_scope.declare(arm.name, CBinding(t))
            results.append(self.check_block(arm.body, arm_scope, new_scope=False))
        return normalize_union(results)

    # ------------------------------------------------------------------
    # expressions
    # ------------------------------------------------------------------

    def infer_expr(self, node: N.Node, scope: Scope, expected: TypeDescriptor | None = None) -> TypeDescriptor:
        handler = getattr(self, f"_inf_{type(node).__name__}", None)
        if handler is not None:
            return handler(node, scope, expected)
        stmt_handler = getattr(self, f"_chk_{type(node).__name__}", None)
        if stmt_handler is not None:
            result = stmt_handler(node, scope)
            return result if result is not None else VOID
        self.error("E_UNSUPPORTED", f"cannot infer type of {node.node_kind()}", node)
        return ANY

    def _inf_Literal(self, node: N.Literal, scope: Scope, expected=None) -> TypeDescriptor:
        kind = node.lit_kind
        if kind == "number":
            lit: NumberLiteral = node.value
            suffix = lit.type_suffix
            if suffix == "n":
                return self.b.t("bigint")
            if suffix in ("i8", "i32", "i64"):
                return self.b.t({"i8": "byte", "i32": "int", "i64": "long"}[suffix])
            if suffix == "f32":
                return self.b.t("floatsg")
            if suffix == "f64" or isinstance(lit.value, float):
                return self.b.t("float")
            return self.b.t("int")
        if kind == "text":
            lit: TextLiteral = node.value
            return self.b.t("char") if lit.is_char else self.b.t("string")
        if kind == "bool":
            return self.b.t("bool")
        if kind == "null":
            return NULL
        if kind == "undefined":
            return UNDEFINED
        if kind == "void":
            return VOID
        if kind == "paradox":
            return self.b.t("logic")
        return ANY

    def _inf_RegexExpr(self, node: N.RegexExpr, scope: Scope, expected=None) -> TypeDescriptor:
        return NominalType(self.b.classes["regex"])

    def _inf_TemplateExpr(self, node: N.TemplateExpr, scope: Scope, expected=None) -> TypeDescriptor:
        for kind, payload in node.parts:
            if kind == "expr":
                self.infer_expr(payload, scope)
        return self.b.t("string")

    def _inf_Identifier(self, node: N.Identifier, scope: Scope, expected=None) -> TypeDescriptor:
        binding = scope.lookup(node.name)
        if binding is not None:
            if not binding.assigned:
                self.error("E_UNDEFINED_USE", f"{node.name!r} is declared but not yet defined", node)
            return binding.effective()
        if self._self_stack:
            member_t = self._member_type(
                NominalType(self._self_stack[-1], tuple(GenericRef(gp.name) for gp in self._self_stack[-1].generic_params)),
                node.name,
                node,
                quiet=True,
            )
            if member_t is not None:
                return member_t
        self.error("E_UNRESOLVED", f"{node.name!r} is not declared", node)
        return ANY

    def _inf_Binary(self, node: N.Binary, scope: Scope, expected=None) -> TypeDescriptor:
        left = self.infer_expr(node.left, scope)
        right = self.infer_expr(node.right, scope)
        return self._binary_result(node.op, left, right, node)

    def _numeric_name(self, t: TypeDescriptor) -> str | None:
        if isinstance(t, LiteralType):
            t = t.base
        if isinstance(t, NominalType) and t.decl.name in ("int", "long", "byte", "usize", "bigint", "float", "floatsg"):
            return t.decl.name
        return None

    def _binary_result(self, op: str, left: TypeDescriptor, right: TypeDescriptor, node: N.Node) -> TypeDescriptor:
        bool_t = self.b.t("bool")
        if op in ("==", "!="):
            if "float" in (self._numeric_name(left), self._numeric_name(right)) or "floatsg" in (
                self._numeric_name(left),
                self._numeric_name(right),
            ):
                self.warning("W_FLOAT_EQ", "'==' on float values is approximate; use '~=' instead", node)
            return bool_t
        if op in ("===", "~=", "in"):
            return bool_t
        if op in ("<", ">", "<=", ">="):
            return bool_t
        if op in ("and", "or", "xor"):
            for t in (left, right):
                if not self._bool_ok(t):
                    self.error("E_TYPE_MISMATCH", f"'{op}' requires bool operands, found {t.display()}", node)
            return bool_t
        if op == "??:":
            stripped = strip_nullish(left)
            if stripped is None:
                return right
            return normalize_union([stripped, right])
        # arithmetic / bitwise / shifts / user operators
        if isinstance(left, AnyType) or isinstance(right, AnyType):
            return ANY
        user = self._user_operator_result(op, left, right, node)
        if user is not None:
            return user
        ln, rn = self._numeric_name(left), self._numeric_name(right)
        if op in ("+", "-", "*", "/", "%"):
            if op == "+" and self._is_stringish(left) and self._is_stringish(right):
                return self.b.t("string")
            if ln and rn:
                if "bigint" in (ln, rn):
                    return self.b.t("bigint")
                if "float" in (ln, rn):
                    return self.b.t("float")
                if "floatsg" in (ln, rn):
                    return self.b.t("floatsg") if {ln, rn} <= {"floatsg"} else self.b.t("float")
                for name in ("usize", "long", "int", "byte"):
                    if name in (ln, rn):
                        return self.b.t(name)
            if self._union_arith(left, right):
                return ANY
            self.error(
                "E_TYPE_MISMATCH",
                f"operator {op!r} is not defined for {left.display()} and {right.display()}",
                node,
            )
            return ANY
        if op.startswith("bit"):
            if not (ln and rn):
                self.error("E_TYPE_MISMATCH", f"{op} requires integer operands", node)
            return left if isinstance(left, NominalType) else ANY
        return ANY

    def _union_arith(self, left: TypeDescriptor, right: TypeDescriptor) -> bool:
        # `char|int` style operands flow through builtin overloads at runtime
        return isinstance(left, UnionType) or isinstance(right, UnionType)

    def _is_stringish(self, t: TypeDescriptor) -> bool:
        if isinstance(t, LiteralType):
            t = t.base
        return isinstance(t, NominalType) and t.decl.name in ("string", "char")

    def _user_operator_result(self, op: str, left: TypeDescriptor, right: TypeDescriptor, node: N.Node) -> TypeDescriptor | None:
        for t, right_form in ((left, False), (right, True)):
            if isinstance(t, NominalType) and isinstance(t.decl, ClassInfo):
                mapping = self._mapping_for(t)
                for info in t.decl.mro():
                    for opinfo in info.operators:
                        if opinfo.symbol != op or opinfo.right_form != right_form:
                            continue
                        sig = opinfo.function.signature
                        if not sig.params:
                            continue
                        other = right if not right_form else left
                        ptype = substitute(sig.params[0].type, mapping)
                        bindings: dict[str, object] = {}
                        try:
                            if self._mentions_generics(ptype):
                                infer_generics(ptype, other, bindings)
                            elif not is_assignable(other, ptype):
                                continue
                        except InferenceError as exc:
                            self.error("E_GENERIC_MISMATCH", str(exc), node)
                            return ANY
                        ret = substitute(substitute(sig.return_type, mapping), bindings)
                        return ret
        return None

    def _mentions_generics(self, t: TypeDescriptor) -> bool:
        if isinstance(t, (InferType, GenericRef)):
            return True
        if isinstance(t, NominalType):
            return any(
                (isinstance(a, TypeDescriptor) and self._mentions_generics(a)) or isinstance(a, (InferType, GenericRef))
                for a in t.args
            )
        if isinstance(t, UnionType):
            return any(self._mentions_generics(a) for a in t.alternatives)
        if isinstance(t, FunctionType):
            return any(self._mentions_generics(p.type) for p in t.params) or self._mentions_generics(t.ret)
        return False

    def _inf_Unary(self, node: N.Unary, scope: Scope, expected=None) -> TypeDescriptor:
        t = self.infer_expr(node.operand, scope)
        op = node.op
        bool_t = self.b.t("bool")
        if op == "??":
            # returnof distribution over unions: object -> true, nullish -> false
            return self._nullish_test_type(t, falsy=False)
        if op == "???":
            return self._nullish_test_type(t, falsy=True)
        if op == "not":
            if not self._bool_ok(t):
                self.error("E_TYPE_MISMATCH", f"'not' requires a bool operand, found {t.display()}", node)
            return bool_t
        if op in ("++", "--", "-", "+"):
            return t
        if op == "bitnot":
            return t
        return ANY

    def _nullish_test_type(self, t: TypeDescriptor, falsy: bool) -> TypeDescriptor:
        bool_cls = self.b.t("bool")

        def single(alt: TypeDescriptor) -> TypeDescriptor:
            if isinstance(alt, (NullType, UndefinedType)):
                return LiteralType(bool_cls, False)
            if isinstance(alt, AnyType):
                return bool_cls
            if falsy:
                decl = alt.decl if isinstance(alt, NominalType) else None
                if isinstance(decl, ClassInfo) and any(
                    getattr(tr.decl, "name", "") == "HasFalsy" for tr in decl.traits
                ):
                    return bool_cls
                return LiteralType(bool_cls, True)
            return LiteralType(bool_cls, True)

        if isinstance(t, UnionType):
            return normalize_union([single(a) for a in t.alternatives])
        return single(t)

    def _inf_Ternary(self, node: N.Ternary, scope: Scope, expected=None) -> TypeDescriptor:
        t = self.infer_expr(node.condition, scope)
        if not self._bool_ok(t):
            self.error("E_COND_NOT_BOOL", f"conditional operator requires a bool condition, found {t.display()}", node)
        a = self.infer_expr(node.then_expr, scope)
        b = self.infer_expr(node.else_expr, scope)
        return normalize_union([a, b])

    def _inf_TupleExpr(self, node: N.TupleExpr, scope: Scope, expected=None) -> TypeDescriptor:
        items = [self.infer_expr(i, scope) for i in node.items]
        return self.b.t("tuple", *items)

    def _inf_ArrayExpr(self, node: N.ArrayExpr, scope: Scope, expected=None) -> TypeDescriptor:
        expected_elem = None
        if expected is not None and isinstance(expected, NominalType) and expected.decl.name in ("array", "list", "sequence"):
            if expected.args:
                arg = expected.args[0]
                expected_elem = arg if isinstance(arg, TypeDescriptor) else None
            if expected.decl.name == "sequence" and len(expected.args) == 2:
                length = expected.args[1]
                if isinstance(length, int) and length != len(node.items):
                    self.error(
                        "E_GENERIC_MISMATCH",
                        f"sequence literal has {len(node.items)} element(s), expected {length}",
                        node,
                    )
        items = [self.infer_expr(i, scope, expected=expected_elem) for i in node.items]
        if expected is not None and isinstance(expected, NominalType) and expected.decl.name == "sequence":
            elem = expected.args[0] if expected.args and isinstance(expected.args[0], TypeDescriptor) else (
                normalize_union(items) if items else ANY
            )
            return NominalType(self.b.classes["sequence"], (elem, len(node.items)))
        elem = normalize_union(items) if items else ANY
        return self.b.t("array", elem)

    def _inf_DictExpr(self, node: N.DictExpr, scope: Scope, expected=None) -> TypeDescriptor:
        keys = [self.infer_expr(k, scope) for k, _ in node.pairs]
        values = [self.infer_expr(v, scope) for _, v in node.pairs]
        kt = normalize_union(keys) if keys else ANY
        vt = normalize_union(values) if values else ANY
        return self.b.t("dictionary", kt, vt)

    def _inf_SetExpr(self, node: N.SetExpr, scope: Scope, expected=None) -> TypeDescriptor:
        items = [self.infer_expr(i, scope) for i in node.items]
        return self.b.t("set", normalize_union(items) if items else ANY)

    def _inf_DeclExpr(self, node: N.DeclExpr, scope: Scope, expected=None) -> TypeDescriptor:
        return self._chk_Declaration(node.decl, scope)

    def _inf_ArrowFunction(self, node: N.ArrowFunction, scope: Scope, expected=None) -> TypeDescriptor:
        param_types: list[TypeDescriptor] = [ANY] * len(node.params)
        if isinstance(expected, FunctionType):
            req = [p for p in expected.params if not p.keyword_only]
            for i in range(min(len(req), len(param_types))):
                param_types[i] = req[i].type
        inner = scope.child()
        params = []
        for p, t in zip(node.params, param_types):
            inner.declare(p.name, CBinding(t))
            params.append(ParamSig(p.name, t, optional=p.optional))
        if isinstance(node.body, N.Block):
            ret = self._returns_of_block(node.body, inner)
        else:
            ret = self.infer_expr(node.body, inner)
        return FunctionType(tuple(params), ret)

    def _returns_of_block(self, block: N.Block, scope: Scope) -> TypeDescriptor:
        self.check_block(block, scope, new_scope=False)
        returns: list[TypeDescriptor] = []

        def walk(node):
            if isinstance(node, N.Return):
                returns.append(ANY)
            if isinstance(node, N.Node):
                for attr in vars(node).values():
                    walk_val(attr)

        def walk_val(value):
            if isinstance(value, N.Node):
                walk(value)
            elif isinstance(value, (list, tuple)):
                for item in value:
                    walk_val(item)

        walk(block)
        return ANY if returns else VOID

    def _inf_FunctionExpr(self, node: N.FunctionExpr, scope: Scope, expected=None) -> TypeDescriptor:
        fn = self._make_static_fn(node.func, scope, node.func.kind)
        self._check_function_body(fn, scope)
        return fn.function_type()

    def _inf_OperatorRef(self, node: N.OperatorRef, scope: Scope, expected=None) -> TypeDescriptor:
        return FunctionType((ParamSig("left", ANY), ParamSig("right", ANY)), ANY)

    def _inf_EnumMemberRef(self, node: N.EnumMemberRef, scope: Scope, expected=None) -> TypeDescriptor:
        if node.args:
            for a in node.args:
                self.infer_expr(a.value, scope)
        if expected is not None:
            target = self._enum_in(expected, node.name)
            if target is not None:
                return NominalType(target)
        return PendingEnumType(node.name, node.args is not None)

    def _enum_in(self, t: TypeDescriptor, member: str) -> EnumInfo | None:
        if isinstance(t, NominalType) and isinstance(t.decl, EnumInfo) and member in t.decl.members:
            return t.decl
        if isinstance(t, UnionType):
            for alt in t.alternatives:
                found = self._enum_in(alt, member)
                if found is not None:
                    return found
        return None

    def _inf_WithPartial(self, node: N.WithPartial, scope: Scope, expected=None) -> TypeDescriptor:
        target_t = self.infer_expr(node.target, scope)
        overrides = {}
        for name, expr in node.overrides:
            overrides[name] = self.infer_expr(expr, scope)
        overload_list = self._overloads_for(node.target, target_t, scope)
        if overload_list:
            from .callables import derive_partial_signature

            for ov in overload_list:
                try:
                    sig = derive_partial_signature(ov.signature, overrides)
                    return sig.function_type()
                except BindError:
                    continue
            self.error("E_UNKNOWN_KEYWORD", "'with' overrides do not match any overload", node)
            return ANY
        if isinstance(target_t, FunctionType):
            return target_t
        return ANY

    def _overloads_for(self, callee: N.Node, callee_t: TypeDescriptor, scope: Scope) -> list | None:
        if isinstance(callee, N.Identifier):
            binding = scope.lookup(callee.name)
            if binding is not None:
                decl = getattr(binding, "decl", None)
                if isinstance(decl, ClassInfo):
                    return decl.constructors or None
                overloads = getattr(binding, "overloads", None)
                if overloads:
                    return overloads
        return None

    def _inf_ObjectLiteral(self, node: N.ObjectLiteral, scope: Scope, expected=None) -> TypeDescriptor:
        target_t = self.infer_expr(node.class_expr, scope)
        decl = None
        if isinstance(node.class_expr, N.Identifier):
            binding = scope.lookup(node.class_expr.name)
            decl = getattr(binding, "decl", None) if binding is not None else None
        if not isinstance(decl, ClassInfo):
            self.error("E_TYPE_MISMATCH", "object literal requires a class before '@'", node)
            return ANY
        stored: dict[str, TypeDescriptor] = {}
        for cls in reversed(decl.mro()):
            for fname, finfo in cls.fields.items():
                if not finfo.is_static:
                    stored[fname] = finfo.type
        seen = set()
        for fname, expr in node.fields:
            t = self.infer_expr(expr, scope)
            if fname not in stored:
                self.error("E_UNKNOWN_MEMBER", f"class {decl.name} has no member {fname!r}", node)
            else:
                self._check_assignable(t, stored[fname], node)
                seen.add(fname)
        missing = [f for f in stored if f not in seen]
        if missing:
            self.error("E_MISSING_ARG", f"object literal is missing member(s): {', '.join(missing)}", node)
        args = self._generic_args_from_nodes(decl, node.generic_args, scope)
        return NominalType(decl, args)

    def _generic_args_from_nodes(self, decl, nodes, scope: Scope) -> tuple:
        if not nodes:
            return ()
        resolver = self.resolver_for(scope)
        out = []
        for n in nodes:
            try:
                out.append(resolver.resolve_generic_arg(n))
            except TypeResolutionError as exc:
                self.error("E_UNRESOLVED", exc.message, n)
                out.append(ANY)
        return tuple(out)

    def _inf_Member(self, node: N.Member, scope: Scope, expected=None) -> TypeDescriptor:
        obj_t = self.infer_expr(node.obj, scope)
        t = self._member_type(obj_t, node.name, node)
        return t if t is not None else ANY

    def _member_type(self, obj_t: TypeDescriptor, name: str, node: N.Node, quiet: bool = False) -> TypeDescriptor | None:
        if isinstance(obj_t, AnyType):
            return ANY
        if isinstance(obj_t, LiteralType):
            obj_t = obj_t.base
        if isinstance(obj_t, UnionType):
            results = []
            for alt in obj_t.alternatives:
                t = self._member_type(alt, name, node, quiet=True)
                if t is None:
                    if not quiet:
                        self.error(
                            "E_UNION_MEMBER",
                            f"member {name!r} is not available on every alternative of {obj_t.display()}; narrow the union first",
                            node,
                        )
                    return None
                results.append(t)
            return normalize_union(results)
        if isinstance(obj_t, MemberSetType):
            mapped = obj_t.member_map().get(name)
            if mapped is None and not quiet:
                self.error("E_UNKNOWN_MEMBER", f"{obj_t.display()} has no member {name!r}", node)
            return mapped
        if isinstance(obj_t, (NullType, UndefinedType)):
            if not quiet:
                self.error("E_UNION_MEMBER", f"cannot access member {name!r} on {obj_t.display()}", node)
            return None
        if isinstance(obj_t, NominalType):
            decl = obj_t.decl
            mapping = self._mapping_for(obj_t)
            if isinstance(decl, ClassInfo):
                for i, gp in enumerate(decl.generic_params):
                    if gp.name == name:
                        if gp.param_kind == "type":
                            return self.b.t("type")
                        arg = obj_t.args[i] if i < len(obj_t.args) else None
                        if isinstance(arg, int):
                            return LiteralType(self.b.t("usize"), arg)
                        return self.b.t(gp.param_kind) if gp.param_kind in self.b.classes else ANY
                for info in decl.mro():
                    if name in info.fields:
                        return substitute(info.fields[name].type, mapping)
                    if name in info.properties:
                        return substitute(info.properties[name].type, mapping)
                    if name in info.methods:
                        return substitute(info.methods[name][0].function_type(), mapping)
                    if name in info.functions:
                        return substitute(info.functions[name][0].function_type(), mapping)
                    if ":" in name and name in info.statics:
                        static = info.statics[name]
                        t = getattr(static, "static_type", None)
                        return t if t is not None else ANY
                ext = self._extension_member_type(decl, name)
                if ext is not None:
                    return ext
            if isinstance(decl, EnumInfo):
                ext = self._extension_member_type(decl, name)
                if ext is not None:
                    return ext
        if not quiet:
            self.error("E_UNKNOWN_MEMBER", f"{obj_t.display()} has no member {name!r}", node)
        return None

    def _extension_member_type(self, decl, name: str) -> TypeDescriptor | None:
        for ext in getattr(self, "extensions", []):
            if ext["target"] is decl or (
                isinstance(decl, ClassInfo) and isinstance(ext["target"], ClassInfo) and ext["target"] in decl.mro()
            ):
                if name in ext["methods"]:
                    return ext["methods"][name][0].function_type()
                if name in ext["properties"]:
                    return ext["properties"][name].type
        return None

    def _inf_Index(self, node: N.Index, scope: Scope, expected=None) -> TypeDescriptor:
        obj_t = self.infer_expr(node.obj, scope)
        index_t = self.infer_expr(node.index, scope)
        if isinstance(obj_t, LiteralType):
            obj_t = obj_t.base
        if isinstance(obj_t, NominalType):
            name = obj_t.decl.name
            if name in ("array", "list", "sequence"):
                arg = obj_t.args[0] if obj_t.args else ANY
                return arg if isinstance(arg, TypeDescriptor) else ANY
            if name == "tuple":
                alts = [a for a in obj_t.args if isinstance(a, TypeDescriptor)]
                if isinstance(node.index, N.Literal) and node.index.lit_kind == "number":
                    i = node.index.value.value
                    if isinstance(i, int) and 0 <= i < len(alts):
                        return alts[i]
                return normalize_union(alts) if alts else ANY
            if name == "dictionary":
                arg = obj_t.args[1] if len(obj_t.args) > 1 else ANY
                return arg if isinstance(arg, TypeDescriptor) else ANY
            if name == "string":
                return self.b.t("char")
        return ANY

    def _inf_Call(self, node: N.Call, scope: Scope, expected=None) -> TypeDescriptor:
        if isinstance(node.callee, N.Identifier) and node.callee.name in ("super", "setter", "getter") and self._self_stack:
            for a in node.args:
                self.infer_expr(a.value, scope)
            return VOID
        # class construction / overloads known statically
        overloads = None
        receiver_t = None
        decl = None
        if isinstance(node.callee, N.Identifier):
            binding = scope.lookup(node.callee.name)
            if binding is not None:
                decl = getattr(binding, "decl", None)
                overloads = getattr(binding, "overloads", None)
        elif isinstance(node.callee, N.Member):
            receiver_t = self.infer_expr(node.callee.obj, scope)
            overloads = self._method_overloads(receiver_t, node.callee.name)
            if overloads is None:
                t = self._member_type(receiver_t, node.callee.name, node.callee)
                return self._call_function_type(t, node, scope)

        if isinstance(decl, ClassInfo):
            return self._check_construction(decl, node, scope)
        if isinstance(decl, EnumInfo):
            self.error("E_TYPE_MISMATCH", f"enum {decl.name} is not callable", node)
            return ANY
        if overloads:
            return self._check_overloaded_call(overloads, node, scope, receiver_t)
        callee_t = self.infer_expr(node.callee, scope)
        return self._call_function_type(callee_t, node, scope)

    def _method_overloads(self, receiver_t: TypeDescriptor, name: str) -> list | None:
        t = receiver_t
        if isinstance(t, LiteralType):
            t = t.base
        if isinstance(t, NominalType) and isinstance(t.decl, ClassInfo):
            for info in t.decl.mro():
                if name in info.methods:
                    return info.methods[name]
                if name in info.functions:
                    return info.functions[name]
        return None

    def _check_overloaded_call(self, overloads: list, node: N.Call, scope: Scope, receiver_t: TypeDescriptor | None) -> TypeDescriptor:
        mapping = self._mapping_for(receiver_t) if receiver_t is not None else {}
        args = self._static_args(node.args, scope, overloads, mapping)
        bind_args = [a for a, _ in args]
        substituted = []
        for ov in overloads:
            sig = ov.signature
            params = tuple(
                Parameter(
                    p.name,
                    substitute(p.type, mapping),
                    p.variadic,
                    p.optional,
                    p.has_default,
                    p.positional_only,
                    p.keyword_only,
                    p.constraint,
                    p.default_expr,
                )
                for p in sig.params
            )
            substituted.append((ov, Signature(params, substitute(sig.return_type, mapping), sig.is_method)))

        chosen = None
        chosen_sig = None
        last_error: BindError | None = None
        from .callables import rank_overload

        ranked = []
        for ov, sig in substituted:
            r = rank_overload(sig, bind_args)
            if r is not None:
                ranked.append((r, ov, sig))
        if not ranked:
            try:
                bind_arguments(substituted[0][1], bind_args)
            except BindError as exc:
                self.error(exc.code if exc.code.startswith("E_") else "E_NO_OVERLOAD", exc.message, node)
                return ANY
            self.error("E_NO_OVERLOAD", "no overload accepts the given arguments", node)
            return ANY
        ranked.sort(key=lambda item: item[0])
        chosen, chosen_sig = ranked[0][1], ranked[0][2]
        best = ranked[0][0]
        tied = [item for item in ranked if item[0] == best]
        if len(tied) > 1:
            self.error("E_AMBIGUOUS_OVERLOAD", "ambiguous call: multiple overloads match equally well", node)
        # generic inference for the return type
        bindings: dict[str, object] = {}
        try:
            binding = bind_arguments(chosen_sig, bind_args)
            by_name = {p.name: p for p in chosen_sig.params}
            for pname, slot in binding.slots.items():
                param = by_name[pname]
                if not self._mentions_generics(param.type):
                    continue
                slots = slot if isinstance(slot, list) else [slot]
                for s in slots:
                    if isinstance(s, Argument):
                        infer_generics(param.type, s.type, bindings)
        except (BindError, InferenceError) as exc:
            code = "E_GENERIC_MISMATCH" if isinstance(exc, InferenceError) else exc.code
            self.error(code, str(exc), node)
            return ANY
        self._check_static_constraints(chosen_sig, bind_args, args, node, scope)
        ret = substitute(chosen_sig.return_type, bindings)
        return self._builtin_return_special(chosen, node, ret, receiver_t, scope)

    def _builtin_return_special(self, chosen, node: N.Call, ret: TypeDescriptor, receiver_t, scope: Scope) -> TypeDescriptor:
        name = getattr(chosen, "name", "")
        if name in ("map",) and node.args:
            mapper_t = self.infer_expr(node.args[0].value, scope, expected=None)
            if isinstance(mapper_t, FunctionType):
                return self.b.t("array", mapper_t.ret)
        if name in ("sort", "push", "append", "appendHead") and receiver_t is not None:
            return receiver_t
        if name in ("keys",) and isinstance(receiver_t, NominalType) and receiver_t.args:
            arg = receiver_t.args[0]
            return self.b.t("array", arg if isinstance(arg, TypeDescriptor) else ANY)
        if name in ("values",) and isinstance(receiver_t, NominalType) and len(receiver_t.args) > 1:
            arg = receiver_t.args[1]
            return self.b.t("array", arg if isinstance(arg, TypeDescriptor) else ANY)
        if name in ("pop",) and isinstance(receiver_t, NominalType) and receiver_t.args:
            arg = receiver_t.args[0]
            return arg if isinstance(arg, TypeDescriptor) else ANY
        if name in ("sorted", "reversed") and node.args:
            arg_t = self.infer_expr(node.args[0].value, scope)
            return self.b.t("array", self._element_type(arg_t))
        return ret

    def _static_args(self, arg_nodes: list[N.Argument], scope: Scope, overloads: list | None, mapping: dict) -> list[tuple[Argument, N.Argument]]:
        expected_for: dict[int, TypeDescriptor] = {}
        if overloads and len(overloads) >= 1:
            sig = overloads[0].signature
            positional_params = [p for p in sig.params if not p.keyword_only]
            pi = 0
            for i, a in enumerate(arg_nodes):
                if a.name is not None:
                    match = next((p for p in sig.params if p.name == a.name), None)
                    if match is not None:
                        expected_for[i] = substitute(match.type, mapping)
                elif pi < len(positional_params):
                    expected_for[i] = substitute(positional_params[pi].type, mapping)
                    if not positional_params[pi].variadic:
                        pi += 1
        out = []
        for i, a in enumerate(arg_nodes):
            t = self.infer_expr(a.value, scope, expected=expected_for.get(i))
            is_const = isinstance(a.value, N.Literal)
            if isinstance(a.value, N.Identifier):
                binding = scope.lookup(a.value.name)
                is_const = bool(binding is not None and binding.is_const)
            out.append((Argument(a.name, t, None, is_const), a))
        return out

    def _check_static_constraints(self, sig: Signature, bind_args: list[Argument], args, node: N.Call, scope: Scope) -> None:
        try:
            binding = bind_arguments(sig, bind_args)
        except BindError:
            return
        by_name = {p.name: p for p in sig.params}
        for pname, slot in binding.slots.items():
            param = by_name[pname]
            if param.constraint is None:
                continue
            slots = slot if isinstance(slot, list) else [slot]
            for s in slots:
                if not isinstance(s, Argument):
                    continue
                self._static_constraint_check(param, s, node)

    def _static_constraint_check(self, param: Parameter, arg: Argument, node: N.Call) -> None:
        c = param.constraint
        violations = self._constraint_static_violation(c, param, arg)
        if violations:
            self.error("E_CONSTRAINT", violations, node)

    def _constraint_static_violation(self, c, param: Parameter, arg: Argument) -> str | None:
        if c is None:
            return None
        if isinstance(c, N.ModifierCheck):
            if c.modifier in ("const", "readonly") and not arg.is_const:
                return f"argument for {param.name!r} must be a constant"
            return None
        if isinstance(c, N.TypeCheck):
            return None  # covered by binding
        if isinstance(c, N.BoolCheck):
            return None  # evaluated before the call at runtime
        if isinstance(c, N.ConstraintJoin):
            if c.op == "or":
                results = [self._constraint_static_violation(i, param, arg) for i in c.items]
                if all(r is not None for r in results):
                    return results[0]
                return None
            for item in c.items:
                v = self._constraint_static_violation(item, param, arg)
                if v is not None:
                    return v
            return None
        return None

    def _check_construction(self, decl: ClassInfo, node: N.Call, scope: Scope) -> TypeDescriptor:
        explicit = self._generic_args_from_nodes(decl, node.generic_args, scope)
        mapping: dict[str, object] = {}
        for i, gp in enumerate(decl.generic_params):
            if i < len(explicit) and explicit[i] is not None:
                mapping[gp.name] = explicit[i]
        if not decl.constructors:
            if node.args:
                self.error("E_NO_OVERLOAD", f"class {decl.name} has no constructor", node)
            for a in node.args:
                self.infer_expr(a.value, scope)
            return NominalType(decl, explicit)
        args = self._static_args(node.args, scope, decl.constructors, mapping)
        bind_args = [a for a, _ in args]
        bindings: dict[str, object] = dict(mapping)
        chosen = None
        last_exc = None
        for ctor in decl.constructors:
            sig = ctor.signature
            try:
                binding = bind_arguments(sig, bind_args)
            except BindError as exc:
                last_exc = exc
                continue
            chosen = (ctor, sig, binding)
            break
        if chosen is None:
            if last_exc is not None:
                self.error(last_exc.code, last_exc.message, node)
            return NominalType(decl, explicit)
        ctor, sig, binding = chosen
        by_name = {p.name: p for p in sig.params}
        try:
            for pname, slot in binding.slots.items():
                param = by_name[pname]
                ptype = substitute(param.type, mapping)
                if not self._mentions_generics(ptype):
                    continue
                slots = slot if isinstance(slot, list) else [slot]
                for s in slots:
                    if isinstance(s, Argument):
                        infer_generics(ptype, s.type, bindings)
        except InferenceError as exc:
            self.error("E_GENERIC_MISMATCH", str(exc), node)
        final_args = []
        for i, gp in enumerate(decl.generic_params):
            if gp.name in bindings:
                final_args.append(bindings[gp.name])
            elif i < len(explicit) and explicit[i] is not None:
                final_args.append(explicit[i])
            elif gp.default is not None:
                final_args.append(gp.default)
            else:
                final_args.append(ANY)
        return NominalType(decl, tuple(final_args))

    def _call_function_type(self, callee_t: TypeDescriptor, node: N.Call, scope: Scope) -> TypeDescriptor:
        if isinstance(callee_t, FunctionType):
            params = tuple(
                Parameter(p.name, p.type, p.variadic, p.optional, p.optional, p.positional_only, p.keyword_only)
                for p in callee_t.params
            )
            sig = Signature(params, callee_t.ret)
            args = self._static_args(node.args, scope, [StaticFn(None, sig, "<fn>")], {})
            try:
                bind_arguments(sig, [a for a, _ in args])
            except BindError as exc:
                self.error(exc.code, exc.message, node)
            return callee_t.ret
        if isinstance(callee_t, AnyType):
            for a in node.args:
                self.infer_expr(a.value, scope)
            return ANY
        if isinstance(callee_t, NominalType) and callee_t.decl is self.b.classes.get("type"):
            for a in node.args:
                self.infer_expr(a.value, scope)
            return ANY
        for a in node.args:
            self.infer_expr(a.value, scope)
        self.error("E_TYPE_MISMATCH", f"{callee_t.display()} is not callable", node)
        return ANY


def check_source(source: str, file_id: str = "<input>", project_root: Path | None = None) -> CheckResult:
    from .parser import parse_source

    sink = DiagnosticSink()
    module = parse_source(source, file_id, sink)
    checker = Checker(file_id, project_root)
    checker.sink = sink
    return checker.check_module(module)
