"""Tree-walking evaluator.

Every executed statement yields exactly one evaluated value; control
signals (break/continue/return/throw/exit) travel as exceptions. Scope
exit runs the destructors of scope-owned instances in reverse declaration
order, whichever way the scope is left.
"""

from __future__ import annotations

import math
import random
import sys
from dataclasses import dataclass, field

from . import nodes as N
from .builtins import Builtins, RegexData, StringBufferData, make_regex_value, shared_builtins
from .callables import (
    Argument,
    BindError,
    OverloadError,
    Parameter,
    Signature,
    USE_DEFAULT,
    OMITTED,
    bind_arguments,
    derive_partial_signature,
    select_overload,
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
    build_inline_enum,
    build_signature,
    build_trait_info,
)
from .lexer import NumberLiteral, TextLiteral
from .runtime import (
    BoundItem,
    BreakSignal,
    BuiltinCallable,
    CesnoDict,
    CesnoSet,
    CesnoThrow,
    ContinueSignal,
    Environment,
    EnvironmentError_,
    EnumValueData,
    ExitSignal,
    InstanceData,
    NULL_VALUE,
    NamespaceValue,
    Overloads,
    PartialFunction,
    ReturnSignal,
    UNDEFINED_VALUE,
    UserFunction,
    VOID_VALUE,
    Value,
    callable_overloads,
    values_equal,
    values_identical,
)
from .types import (
    ANY,
    AnyType,
    ClassInfo,
    EnumInfo,
    GenericRef,
    InferType,
    InferenceError,
    LiteralType,
    NominalType,
    NullType,
    PendingEnumType,
    TraitInfo,
    TypeAliasInfo,
    TypeDescriptor,
    UndefinedType,
    UnionType,
    infer_generics,
    is_assignable,
    normalize_union,
    substitute,
    types_equal,
)

APPROX_RTOL = 1e-9
APPROX_ATOL = 1e-12

INT_LIMITS = {
    "byte": (-(2**7), 2**7 - 1),
    "int": (-(2**31), 2**31 - 1),
    "long": (-(2**63), 2**63 - 1),
    "usize": (0, 2**64 - 1),
}


@dataclass
class CallArg:
    name: str | None
    value: Value
    is_const: bool = False

    def to_bind_arg(self) -> Argument:
        return Argument(self.name, self.value.type, self.value, self.is_const)


@dataclass
class PendingEnumData:
    member: str
    args: list[CallArg] = field(default_factory=list)


@dataclass
class ExtensionInfo:
    """An `implement` block's additions to an existing type."""

    target: object  # ClassInfo | EnumInfo
    generic_bounds: dict[str, TypeDescriptor]
    methods: dict[str, list] = field(default_factory=dict)
    properties: dict[str, object] = field(default_factory=dict)


class Interpreter:
    def __init__(self, stdin=None, stdout=None, seed: int | None = None, loader=None):
        self.b: Builtins = shared_builtins()
        self.stdin = stdin if stdin is not None else sys.stdin
        self.stdout = stdout if stdout is not None else sys.stdout
        self.rng = random.Random(seed)
        self.loader = loader
        self.extensions: list[ExtensionInfo] = []
        self.secondary_errors: list[CesnoThrow] = []
        self._class_stack: list[ClassInfo] = []
        self._extra_mods: list[str] = []
        self.module_stack: list = []

    # ------------------------------------------------------------------
    # setup
    # ------------------------------------------------------------------

    def make_root_env(self) -> Environment:
        env = Environment(label="root")
        b = self.b
        for name, info in b.classes.items():
            if name.startswith("Std"):
                continue
            env.declare(name, b.class_value(info), ("builtin",))
        for alias, target in b.aliases.items():
            env.declare(alias, b.class_value(b.classes[target]), ("builtin",))
        for name, trait in b.traits.items():
            env.declare(name, Value(b.t("type"), trait), ("builtin",))
        for name, fn in b.functions.items():
            env.declare(name, Value(fn.function_type(), fn), ("builtin",))
        stdin_cls = b.classes["StdInStream"]
        stdout_cls = b.classes["StdOutStream"]
        env.declare("stdin", Value(NominalType(stdin_cls), InstanceData(stdin_cls, ())), ("builtin",))
        env.declare("stdout", Value(NominalType(stdout_cls), InstanceData(stdout_cls, ())), ("builtin",))
        return env

    def throw(self, error_name: str, message: str):
        raise self.b.make_error(error_name, message)

    # ------------------------------------------------------------------
    # module / block execution
    # ------------------------------------------------------------------

    def run_module_ast(self, module: N.Module, env: Environment) -> Value:
        result = VOID_VALUE
        override = None
        for stmt in module.statements:
            if isinstance(stmt, N.EvalStmt):
                override = self.exec_statement(stmt, env)
                result = override
            else:
                result = self.exec_statement(stmt, env)
        return override if override is not None else result

    def exec_block(self, block: N.Block, env: Environment, new_scope: bool = True, consumed: bool = False) -> Value:
        """Run a block; `consumed` marks that its evaluated value escapes
        (expression position), so a resulting owned instance stays alive."""
        scope = env.child() if new_scope else env
        result = VOID_VALUE
        override = None
        try:
            for stmt in block.statements:
                if isinstance(stmt, N.EvalStmt):
                    override = self.exec_statement(stmt, scope)
                    result = override
                else:
                    result = self.exec_statement(stmt, scope, consumed=consumed and stmt is block.statements[-1])
        except (ReturnSignal, BreakSignal) as sig:
            if new_scope:
                carried = getattr(sig, "value", None) or getattr(sig, "eval_value", None)
                self.destroy_scope(scope, carried)
            raise
        except BaseException:
            if new_scope:
                self.destroy_scope(scope, None)
            raise
        final = override if override is not None else result
        if new_scope:
            self.destroy_scope(scope, final if consumed else None)
        return final

    def destroy_scope(self, scope: Environment, keep: Value | None) -> None:
        keep_id = id(keep.payload) if keep is not None else None
        for value in reversed(scope.owned):
            data = value.payload
            if not isinstance(data, InstanceData) or data.destroyed:
                continue
            if keep_id is not None and id(data) == keep_id:
                continue
            self.destroy_instance(value)

    def destroy_instance(self, value: Value) -> None:
        data = value.payload
        if data.destroyed:
            return
        data.destroyed = True
        for info in data.class_info.mro():
            dtor = info.destructor
            if dtor is not None:
                try:
                    self.call_value(dtor.bind(value) if hasattr(dtor, "bind") else dtor, [])
                except CesnoThrow as exc:
                    self.secondary_errors.append(exc)
                break

    # ------------------------------------------------------------------
    # statements
    # ------------------------------------------------------------------

    _VALUE_CARRYING = ("If", "Match", "ForLoop", "WhileLoop", "DoLoop", "Try", "Block")

    def exec_statement(self, stmt: N.Node, env: Environment, consumed: bool = False) -> Value:
        kind = type(stmt).__name__
        method = getattr(self, f"_stmt_{kind}", None)
        if method is None:
            return self.eval_expr(stmt, env)
        if kind in self._VALUE_CARRYING:
            return method(stmt, env, consumed)
        return method(stmt, env)

    def _stmt_ExpressionStmt(self, stmt: N.ExpressionStmt, env: Environment) -> Value:
        return self.eval_expr(stmt.expr, env)

    def _stmt_Block(self, stmt: N.Block, env: Environment, consumed: bool = False) -> Value:
        return self.exec_block(stmt, env, consumed=consumed)

    def _stmt_EvalStmt(self, stmt: N.EvalStmt, env: Environment) -> Value:
        return self.eval_expr(stmt.expr, env)

    def _stmt_Declaration(self, stmt: N.Declaration, env: Environment) -> Value:
        mods = tuple(stmt.modifiers) + tuple(self._extra_mods)
        if stmt.shorthand == "const" and "const" not in mods:
            mods = mods + ("const",)
        declared_type = None
        if stmt.declared_type is not None:
            declared_type = self.resolve_type(stmt.declared_type, env)
        if stmt.is_ref:
            if not isinstance(stmt.init, N.Identifier):
                self.throw("TypeError", "a `ref` declaration must alias an identifier")
            item = env.lookup_item(stmt.init.name)
            if item is None:
                self.throw("UndefinedError", f"{stmt.init.name!r} is not declared")
            try:
                env.declare_ref(stmt.name, item)
            except EnvironmentError_ as exc:
                self.throw("TypeError", exc.message)
            return item.value
        if stmt.init is None:
            try:
                env.declare(stmt.name, UNDEFINED_VALUE, mods, declared_type, assigned=False)
            except EnvironmentError_ as exc:
                self.throw("TypeError", exc.message)
            return UNDEFINED_VALUE
        value = self.eval_expr(stmt.init, env)
        if stmt.init_op != "=":
            self.throw("TypeError", "compound assignment requires an existing binding")
        if declared_type is not None:
            value = self.adapt_value(value, declared_type)
        try:
            env.declare(stmt.name, value, mods, declared_type)
        except EnvironmentError_ as exc:
            self.throw("TypeError", exc.message)
        env.own(value)
        return value

    def _stmt_Assignment(self, stmt: N.Assignment, env: Environment) -> Value:
        value = self.eval_expr(stmt.value, env)
        if stmt.op != "=":
            current = self.eval_expr(stmt.target, env)
            value = self.binary_op(stmt.op[:-1], current, value, env)
        self.assign_target(stmt.target, value, env)
        return value

    def assign_target(self, target: N.Node, value: Value, env: Environment) -> None:
        if isinstance(target, N.Identifier):
            item = env.lookup_item(target.name)
            if item is None:
                self.throw("UndefinedError", f"{target.name!r} is not declared")
            if item.declared_type is not None:
                value = self.adapt_value(value, item.declared_type)
            try:
                env.assign(target.name, value)
            except EnvironmentError_ as exc:
                self.throw("TypeError", exc.message)
            return
        if isinstance(target, N.DeclExpr):
            self._stmt_Declaration(target.decl, env)
            self.assign_target(N.Identifier(target.span, target.decl.name), value, env)
            return
        if isinstance(target, N.Member):
            obj = self.eval_expr(target.obj, env)
            self.assign_member(obj, target.name, value, env)
            return
        if isinstance(target, N.Index):
            obj = self.eval_expr(target.obj, env)
            index = self.eval_expr(target.index, env)
            self.assign_index(obj, index, value)
            return
        self.throw("TypeError", "invalid assignment target")

    def _stmt_Return(self, stmt: N.Return, env: Environment) -> Value:
        value = self.eval_expr(stmt.value, env) if stmt.value is not None else VOID_VALUE
        raise ReturnSignal(value)

    def _stmt_Break(self, stmt: N.Break, env: Environment) -> Value:
        value = self.eval_expr(stmt.eval_expr, env) if stmt.eval_expr is not None else None
        raise BreakSignal(stmt.indicator, value)

    def _stmt_Continue(self, stmt: N.Continue, env: Environment) -> Value:
        raise ContinueSignal(stmt.indicator)

    def _stmt_Delete(self, stmt: N.Delete, env: Environment) -> Value:
        try:
            value = env.delete(stmt.name)
        except EnvironmentError_ as exc:
            self.throw("UndefinedError", exc.message)
        if isinstance(value.payload, InstanceData):
            self.destroy_instance(value)
        return VOID_VALUE

    def _stmt_Assert(self, stmt: N.Assert, env: Environment) -> Value:
        value = self.eval_expr(stmt.expr, env)
        if not isinstance(value.payload, bool):
            self.throw("TypeError", "assert requires a bool condition")
        if not value.payload:
            self.throw("AssertionError", "assertion failed")
        return VOID_VALUE

    def _stmt_ModifierBlock(self, stmt: N.ModifierBlock, env: Environment) -> Value:
        self._extra_mods.extend(stmt.modifiers)
        try:
            result = VOID_VALUE
            for inner in stmt.statements:
                result = self.exec_statement(inner, env)
            return result
        finally:
            del self._extra_mods[-len(stmt.modifiers) :]

    # -- definitions ---------------------------------------------------

    def _make_function_value(self, func: N.FunctionDef, env: Environment, kind: str, owner: ClassInfo | None = None) -> UserFunction:
        resolver = self.make_resolver(env, owner)
        generics = build_generic_params(func.generic_params, resolver)
        signature = build_signature(func, resolver, generics)
        try:
            validate_variadic_separability(signature)
        except BindError as exc:
            self.throw("TypeError", exc.message)
        return UserFunction(func, signature, env, func.name or "<anonymous>", kind, owner, None, generics)

    def _stmt_FunctionDef(self, stmt: N.FunctionDef, env: Environment) -> Value:
        fn = self._make_function_value(stmt, env, stmt.kind)
        mods = tuple(stmt.modifiers) + tuple(self._extra_mods)
        if stmt.name is None:
            return Value(fn.signature.function_type(), fn)
        existing = env.bindings.get(stmt.name)
        if existing is not None and isinstance(existing.value.payload, (UserFunction, Overloads)):
            payload = existing.value.payload
            items = payload.items if isinstance(payload, Overloads) else [payload]
            for other in items:
                from .callables import signatures_effectively_equal

                if signatures_effectively_equal(other.signature, fn.signature):
                    self.throw("TypeError", f"overload of {stmt.name!r} is effectively equal to an existing signature")
            overloads = Overloads(stmt.name, items + [fn])
            value = Value(fn.signature.function_type(), overloads)
            existing.value = value
            return value
        value = Value(fn.signature.function_type(), fn)
        try:
            env.declare(stmt.name, value, mods)
        except EnvironmentError_ as exc:
            self.throw("TypeError", exc.message)
        return value

    def _stmt_ClassDef(self, stmt: N.ClassDef, env: Environment) -> Value:
        resolver = self.make_resolver(env)
        # Bind the name first so the body can refer to its own class.
        info = ClassInfo(stmt.name)
        mods = tuple(stmt.modifiers) + tuple(self._extra_mods)
        value = self.b.class_value(info)
        try:
            env.declare(stmt.name, value, mods)
        except EnvironmentError_ as exc:
            self.throw("TypeError", exc.message)

        def make_function(func_node, kind, owner, r):
            fn = self._make_function_value(func_node, env, kind, owner)
            return fn

        try:
            build_class_info(stmt, resolver, make_function, info)
        except TypeResolutionError as exc:
            self.throw("TypeError", exc.message)
        # rebuild member signatures with self-class generics in scope
        self._rebuild_class_functions(info, env)
        self._eval_class_statics(info, env)
        self._check_trait_conformance(info)
        for name in stmt.trailing_instances:
            try:
                instance = self.construct(info, [], [], env)
                env.declare(name, instance, ())
                env.own(instance)
            except (CesnoThrow, OverloadError):
                env.declare(name, UNDEFINED_VALUE, (), NominalType(info), assigned=False)
        return value

    def _rebuild_class_functions(self, info: ClassInfo, env: Environment) -> None:
        resolver = self.make_resolver(env, info)
        for overloads in list(info.methods.values()) + list(info.functions.values()):
            for fn in overloads:
                if isinstance(fn, UserFunction):
                    fn.signature = build_signature(fn.decl, resolver, fn.generic_params)
        for fn in info.constructors:
            if isinstance(fn, UserFunction):
                fn.signature = build_signature(fn.decl, resolver, fn.generic_params)
        for op in info.operators:
            if isinstance(op.function, UserFunction):
                op.function.signature = build_signature(op.function.decl, resolver, op.function.generic_params)
        for prop in info.properties.values():
            for fn in prop.getters + prop.setters:
                if isinstance(fn, UserFunction):
                    fn.signature = build_signature(fn.decl, resolver, fn.generic_params)
        # duplicate-overload rejection
        from .callables import signatures_effectively_equal

        for name, overloads in list(info.methods.items()) + list(info.functions.items()):
            for i in range(len(overloads)):
                for j in range(i + 1, len(overloads)):
                    if signatures_effectively_equal(overloads[i].signature, overloads[j].signature):
                        self.throw("TypeError", f"overloads of {name!r} are effectively equal")

    def _eval_class_statics(self, info: ClassInfo, env: Environment) -> None:
        class_env = env.child()
        for name, static in info.statics.items():
            if isinstance(static, StaticDecl) and static.node.init is not None:
                static.value = self.eval_expr(static.node.init, class_env)

    def _check_trait_conformance(self, info: ClassInfo) -> None:
        for trait_t in info.traits:
            trait = trait_t.decl
            if not isinstance(trait, TraitInfo):
                continue
            for req in trait.required_statics:
                qualified = f"{trait.name}:{req}"
                if qualified not in info.statics and req not in info.statics:
                    self.throw("TypeError", f"class {info.name} implements {trait.name} but is missing {req}")
            for req in trait.required_methods:
                if req not in info.methods and req not in info.functions:
                    self.throw("TypeError", f"class {info.name} implements {trait.name} but is missing method {req!r}")

    def _stmt_EnumDef(self, stmt: N.EnumDef, env: Environment) -> Value:
        resolver = self.make_resolver(env)
        try:
            info = build_enum_info(stmt, resolver)
        except TypeResolutionError as exc:
            self.throw("TypeError", exc.message)
        value = Value(self.b.t("type"), info)
        mods = tuple(stmt.modifiers) + tuple(self._extra_mods)
        try:
            env.declare(stmt.name, value, mods)
        except EnvironmentError_ as exc:
            self.throw("TypeError", exc.message)
        return value

    def _stmt_TraitDef(self, stmt: N.TraitDef, env: Environment) -> Value:
        resolver = self.make_resolver(env)
        try:
            info = build_trait_info(stmt, resolver)
        except TypeResolutionError as exc:
            self.throw("TypeError", exc.message)
        value = Value(self.b.t("type"), info)
        mods = tuple(stmt.modifiers) + tuple(self._extra_mods)
        try:
            env.declare(stmt.name, value, mods)
        except EnvironmentError_ as exc:
            self.throw("TypeError", exc.message)
        return value

    def _stmt_TypeAliasDef(self, stmt: N.TypeAliasDef, env: Environment) -> Value:
        resolver = self.make_resolver(env)
        generics = build_generic_params(stmt.generic_params, resolver)
        rr = resolver.with_generics([gp.name for gp in generics])
        try:
            target = rr.resolve(stmt.target)
        except TypeResolutionError as exc:
            self.throw("TypeError", exc.message)
        alias = TypeAliasInfo(stmt.name, generics, target)
        value = Value(self.b.t("type"), alias)
        mods = tuple(stmt.modifiers) + tuple(self._extra_mods)
        try:
            env.declare(stmt.name, value, mods)
        except EnvironmentError_ as exc:
            self.throw("TypeError", exc.message)
        return value

    def _stmt_OperatorDef(self, stmt: N.OperatorDef, env: Environment) -> Value:
        fn = self._make_function_value(stmt.func, env, "operator")
        info = OperatorInfo(stmt.func.operator_symbol, stmt.func.operator_right, fn)
        env.operators.append(info)
        if "export" in self._extra_mods or "export" in stmt.func.modifiers:
            record = self._current_record()
            if record is not None:
                record.exported_operators.append(info)
        return Value(fn.signature.function_type(), fn)

    def _current_record(self):
        return self.module_stack[-1] if self.module_stack else None

    def _stmt_ImplementBlock(self, stmt: N.ImplementBlock, env: Environment) -> Value:
        resolver = self.make_resolver(env)
        target_node = stmt.target
        generic_bounds: dict[str, TypeDescriptor] = {}
        if isinstance(target_node, N.TName) and target_node.generic_args:
            for arg in target_node.generic_args:
                if arg.declares_name is not None:
                    bound = resolver.resolve(arg.declares_bound) if arg.declares_bound is not None else None
                    generic_bounds[arg.declares_name] = bound if bound is not None else ANY
        r = resolver.with_generics(generic_bounds.keys())
        try:
            target_t = r.resolve(target_node)
        except TypeResolutionError as exc:
            self.throw("TypeError", exc.message)
        if not isinstance(target_t, NominalType):
            self.throw("TypeError", "implement requires a class or enum target")
        ext = ExtensionInfo(target_t.decl, generic_bounds)
        from .declare import fill_members

        holder = ClassInfo(f"<implement {target_t.decl.name}>")

        def make_function(func_node, kind, owner_info, rr):
            return self._make_function_value(func_node, env, kind, target_t.decl if isinstance(target_t.decl, ClassInfo) else None)

        fill_members(holder, stmt.members, r, make_function)
        ext.methods = holder.methods
        ext.properties = holder.properties
        for name, fns in holder.functions.items():
            ext.methods.setdefault(name, []).extend(fns)
        self.extensions.append(ext)
        record = self._current_record()
        if record is not None:
            record.extensions.append(ext)
        return VOID_VALUE

    # -- imports ---------------------------------------------------------

    def _stmt_Import(self, stmt: N.Import, env: Environment) -> Value:
        if self.loader is None:
            if stmt.segments[0] in self.b.modules and len(stmt.segments) == 1:
                value = self._builtin_module_value(stmt.segments[0])
                env.declare(stmt.segments[0], value)
                return value
            self.throw("ImportError", "no module loader configured")
        value, bind_name = self.loader.import_path(stmt.segments, env)
        try:
            env.declare(bind_name, value)
        except EnvironmentError_ as exc:
            self.throw("ImportError", exc.message)
        return value

    def _builtin_module_value(self, name: str) -> Value:
        members = {}
        for member_name, fn in self.b.modules[name].items():
            members[member_name] = Value(fn.function_type(), fn)
        ns = NamespaceValue(name, "builtin", members=members)
        return Value(ANY, ns)

    def _stmt_FromImport(self, stmt: N.FromImport, env: Environment) -> Value:
        if self.loader is None:
            self.throw("ImportError", "no module loader configured")
        pairs = self.loader.import_members(stmt.segments, [n for n, _ in stmt.names], env)
        result = VOID_VALUE
        for (name, alias), value in zip(stmt.names, pairs):
            try:
                env.declare(alias or name, value)
            except EnvironmentError_ as exc:
                self.throw("ImportError", exc.message)
            result = value
        return result

    # -- flow control -----------------------------------------------------

    def _stmt_If(self, stmt: N.If, env: Environment, consumed: bool = False) -> Value:
        for cond, block in stmt.branches:
            test = self.eval_expr(cond, env)
            if not isinstance(test.payload, bool):
                self.throw("TypeError", "if condition must be a bool")
            if test.payload:
                return self.exec_block(block, env, consumed=consumed)
        if stmt.else_block is not None:
            return self.exec_block(stmt.else_block, env, consumed=consumed)
        return VOID_VALUE

    def _stmt_Match(self, stmt: N.Match, env: Environment, consumed: bool = False) -> Value:
        subject = self.eval_expr(stmt.subject, env)
        for arm in stmt.arms:
            if arm.is_otherwise or self._arm_matches(arm, subject, env):
                scope = env.child()
                if isinstance(stmt.subject, N.Identifier):
                    scope.declare(stmt.subject.name, subject)
                if isinstance(arm.body, N.Block):
                    return self.exec_block(arm.body, scope, new_scope=False, consumed=consumed)
                return self.eval_expr(arm.body, scope)
        raise self.b.make_error("MatchError", "no match arm matched the subject")

    def _arm_matches(self, arm: N.MatchArm, subject: Value, env: Environment) -> bool:
        for pattern in arm.patterns:
            if isinstance(pattern, N.Identifier):
                bound = env.lookup(pattern.name)
                if bound is not None and isinstance(bound.payload, (ClassInfo, EnumInfo, TraitInfo)):
                    if self.value_matches_type(subject, bound.payload):
                        return True
                    continue
            value = self.eval_expr(pattern, env)
            if isinstance(value.payload, (ClassInfo, EnumInfo, TraitInfo)):
                if self.value_matches_type(subject, value.payload):
                    return True
                continue
            if values_equal(subject, value):
                return True
        return False

    def value_matches_type(self, value: Value, decl) -> bool:
        if isinstance(decl, TraitInfo):
            cls = self.runtime_class(value)
            return isinstance(cls, ClassInfo) and cls.implements(decl)
        if isinstance(decl, EnumInfo):
            return isinstance(value.payload, EnumValueData) and value.payload.enum_info is decl
        cls = self.runtime_class(value)
        if isinstance(cls, ClassInfo):
            return any(info is decl for info in cls.mro())
        return False

    def _stmt_Try(self, stmt: N.Try, env: Environment, consumed: bool = False) -> Value:
        try:
            return self.exec_block(stmt.body, env, consumed=consumed)
        except CesnoThrow as exc:
            for arm in stmt.catches:
                arm_type = self.resolve_type(arm.type_expr, env)
                if is_assignable(exc.value.type, arm_type):
                    scope = env.child()
                    scope.declare(arm.name, exc.value)
                    return self.exec_block(arm.body, scope, new_scope=False, consumed=consumed)
            raise

    # -- loops -------------------------------------------------------------

    def iterable_items(self, value: Value) -> list[Value]:
        p = value.payload
        if isinstance(p, list):
            return list(p)
        if isinstance(p, str) and self.b.is_instance_of(value, "string"):
            return [self.b.value_of_char(c) for c in p]
        if isinstance(p, CesnoDict):
            return p.keys()
        if isinstance(p, CesnoSet):
            return list(p.items)
        self.throw("TypeError", f"{value.type.display()} is not iterable")

    def _stmt_ForLoop(self, stmt: N.ForLoop, env: Environment, consumed: bool = False) -> Value:
        if len(stmt.indicators) == 1 and isinstance(stmt.indicators[0], N.CStyleIndicator):
            return self._run_cstyle_loop(stmt, stmt.indicators[0], env)
        scope = env.child("loop")
        names: list[str] = []
        streams: list[list[Value]] = []
        for ind in stmt.indicators:
            items = self.iterable_items(self.eval_expr(ind.iterable, scope))
            names.append(ind.binding_name)
            streams.append(items)
            scope.declare(ind.binding_name, UNDEFINED_VALUE)
        total = max((len(s) for s in streams), default=0)

        def step(i: int) -> None:
            for name, items in zip(names, streams):
                scope.bindings[name].value = items[i] if i < len(items) else UNDEFINED_VALUE

        return self._run_loop_core(stmt, scope, names, total, step, env)

    def _run_loop_core(self, stmt, scope: Environment, names: list[str], total, step, env: Environment) -> Value:
        result = VOID_VALUE
        break_eval: Value | None = None
        broke = False
        i = 0
        while True:
            if total is not None and i >= total:
                break
            if total is None and not step(i):
                break
            if total is not None:
                step(i)
            try:
                result = self.exec_block(stmt.body, scope)
            except BreakSignal as sig:
                if sig.indicator is None or sig.indicator in names:
                    broke = True
                    if sig.eval_value is not None:
                        break_eval = sig.eval_value
                    break
                raise
            except ContinueSignal as sig:
                if sig.indicator is None or sig.indicator in names:
                    i += 1
                    continue
                raise
            i += 1
        clause = stmt.else_block if broke else stmt.then_block
        if clause is not None:
            result = self.exec_block(clause, scope)
        if break_eval is not None:
            result = break_eval
        self.destroy_scope(scope, result)
        return result

    def _run_cstyle_loop(self, stmt: N.ForLoop, ind: N.CStyleIndicator, env: Environment) -> Value:
        scope = env.child("loop")
        names: list[str] = []
        if ind.init is not None:
            self.exec_statement(ind.init, scope)
            if isinstance(ind.init, N.Declaration):
                names.append(ind.init.name)
        result = VOID_VALUE
        break_eval = None
        broke = False
        while True:
            if ind.condition is not None:
                test = self.eval_expr(ind.condition, scope)
                if not isinstance(test.payload, bool):
                    self.throw("TypeError", "loop condition must be a bool")
                if not test.payload:
                    break
            try:
                result = self.exec_block(stmt.body, scope)
            except BreakSignal as sig:
                if sig.indicator is None or sig.indicator in names:
                    broke = True
                    if sig.eval_value is not None:
                        break_eval = sig.eval_value
                    break
                raise
            except ContinueSignal as sig:
                if not (sig.indicator is None or sig.indicator in names):
                    raise
            if ind.step is not None:
                self.exec_statement(ind.step, scope)
        clause = stmt.else_block if broke else stmt.then_block
        if clause is not None:
            result = self.exec_block(clause, scope)
        if break_eval is not None:
            result = break_eval
        self.destroy_scope(scope, result)
        return result

    def _stmt_WhileLoop(self, stmt: N.WhileLoop, env: Environment, consumed: bool = False) -> Value:
        return self._run_condition_loop(stmt, env, check_first=True)

    def _stmt_DoLoop(self, stmt: N.DoLoop, env: Environment, consumed: bool = False) -> Value:
        return self._run_condition_loop(stmt, env, check_first=False)

    def _run_condition_loop(self, stmt, env: Environment, check_first: bool) -> Value:
        scope = env.child("loop")
        result = VOID_VALUE
        break_eval = None
        broke = False
        first = True
        while True:
            if check_first or not first:
                test = self.eval_expr(stmt.condition, scope)
                if not isinstance(test.payload, bool):
                    self.throw("TypeError", "loop condition must be a bool")
                if not test.payload:
                    break
            first = False
            try:
                result = self.exec_block(stmt.body, scope)
            except BreakSignal as sig:
                if sig.indicator is None:
                    broke = True
                    if sig.eval_value is not None:
                        break_eval = sig.eval_value
                    break
                raise
            except ContinueSignal as sig:
                if sig.indicator is not None:
                    raise
            if not check_first:
                test = self.eval_expr(stmt.condition, scope)
                if not isinstance(test.payload, bool):
                    self.throw("TypeError", "loop condition must be a bool")
                if not test.payload:
                    break
        clause = stmt.else_block if broke else stmt.then_block
        if clause is not None:
            result = self.exec_block(clause, scope)
        if break_eval is not None:
            result = break_eval
        self.destroy_scope(scope, result)
        return result

    # ------------------------------------------------------------------
    # expressions
    # ------------------------------------------------------------------

    def eval_expr(self, node: N.Node, env: Environment) -> Value:
        kind = type(node).__name__
        method = getattr(self, f"_expr_{kind}", None)
        if method is not None:
            return method(node, env)
        # Flow structures and assignments are statements with evaluated
        # values, so they work in expression position too.
        method = getattr(self, f"_stmt_{kind}", None)
        if method is None:
            self.throw("TypeError", f"cannot evaluate {node.node_kind()}")
        if kind in self._VALUE_CARRYING:
            return method(node, env, True)
        return method(node, env)

    def _expr_Literal(self, node: N.Literal, env: Environment) -> Value:
        kind = node.lit_kind
        if kind == "number":
            return self.number_value(node.value)
        if kind == "text":
            lit: TextLiteral = node.value
            if lit.is_char:
                return self.b.value_of_char(lit.decoded)
            return self.b.value_of_string(lit.decoded)
        if kind == "bool":
            return self.b.value_of_bool(node.value)
        if kind == "null":
            return NULL_VALUE
        if kind == "undefined":
            return UNDEFINED_VALUE
        if kind == "void":
            return VOID_VALUE
        if kind == "paradox":
            return Value(self.b.t("logic"), "paradox")
        self.throw("TypeError", f"unknown literal kind {kind}")

    def number_value(self, lit: NumberLiteral) -> Value:
        suffix = lit.type_suffix
        if suffix == "n":
            return Value(self.b.t("bigint"), lit.value)
        if suffix in ("i8", "i32", "i64"):
            cls = {"i8": "byte", "i32": "int", "i64": "long"}[suffix]
            return Value(self.b.t(cls), lit.value)
        if suffix == "f32":
            return Value(self.b.t("floatsg"), lit.value)
        if suffix == "f64" or isinstance(lit.value, float):
            return Value(self.b.t("float"), lit.value)
        return Value(self.b.t("int"), lit.value)

    def _expr_RegexExpr(self, node: N.RegexExpr, env: Environment) -> Value:
        return make_regex_value(self.b, node.literal.pattern, node.literal.flags)

    def _expr_TemplateExpr(self, node: N.TemplateExpr, env: Environment) -> Value:
        out = []
        for kind, payload in node.parts:
            if kind == "text":
                out.append(payload)
            else:
                out.append(self.to_string(self.eval_expr(payload, env)))
        return self.b.value_of_string("".join(out))

    def _expr_Identifier(self, node: N.Identifier, env: Environment) -> Value:
        item = env.lookup_item(node.name)
        if item is not None:
            if not item.assigned:
                self.throw("UndefinedError", f"{node.name!r} is declared but not yet defined")
            return item.value
        # implicit member access on self inside methods
        self_item = env.lookup_item("self")
        if self_item is not None:
            try:
                return self.access_member(self_item.value, node.name, env)
            except CesnoThrow:
                pass
        self.throw("UndefinedError", f"{node.name!r} is not declared")

    def _expr_Identifier_type(self, name: str, env: Environment):
        value = env.lookup(name)
        if value is not None and isinstance(value.payload, (ClassInfo, EnumInfo, TraitInfo, TypeAliasInfo)):
            return value.payload
        return None

    def _expr_Binary(self, node: N.Binary, env: Environment) -> Value:
        op = node.op
        if op in ("and", "or"):
            left = self.eval_expr(node.left, env)
            if not isinstance(left.payload, bool):
                self.throw("TypeError", f"'{op}' requires bool operands")
            if op == "and" and not left.payload:
                return self.b.value_of_bool(False)
            if op == "or" and left.payload:
                return self.b.value_of_bool(True)
            right = self.eval_expr(node.right, env)
            if not isinstance(right.payload, bool):
                self.throw("TypeError", f"'{op}' requires bool operands")
            return self.b.value_of_bool(right.payload)
        if op == "??:":
            left = self.eval_expr(node.left, env)
            if isinstance(left.type, (NullType, UndefinedType)):
                return self.eval_expr(node.right, env)
            return left
        left = self.eval_expr(node.left, env)
        right = self.eval_expr(node.right, env)
        return self.binary_op(op, left, right, env)

    def _expr_Unary(self, node: N.Unary, env: Environment) -> Value:
        op = node.op
        if op in ("++", "--"):
            current = self.eval_expr(node.operand, env)
            one = self.b.value_of_int(1)
            updated = self.binary_op("+" if op == "++" else "-", current, one, env)
            self.assign_target(node.operand, updated, env)
            return updated if node.prefix else current
        if op == "??":
            value = self.eval_expr(node.operand, env)
            return self.b.value_of_bool(not self._is_nullish_value(value))
        if op == "???":
            value = self.eval_expr(node.operand, env)
            return self.b.value_of_bool(not self.eval_falsiness(value))
        value = self.eval_expr(node.operand, env)
        if op == "not":
            if not isinstance(value.payload, bool):
                self.throw("TypeError", "'not' requires a bool operand")
            return self.b.value_of_bool(not value.payload)
        if op == "bitnot":
            if not self._is_int_family(value):
                self.throw("TypeError", "'bitnot' requires an integer operand")
            width = self._int_width(value)
            result = self._wrap_signed(~value.payload, width)
            return Value(value.type, result)
        if op == "-":
            if not self.b.is_numeric(value):
                return self.resolve_user_unary(op, value, env)
            result = -value.payload
            return self._numeric_result(result, value, value)
        if op == "+":
            if not self.b.is_numeric(value):
                self.throw("TypeError", "unary '+' requires a numeric operand")
            return value
        self.throw("TypeError", f"unknown unary operator {op!r}")

    def resolve_user_unary(self, op: str, value: Value, env: Environment) -> Value:
        fn = self._find_class_operator(value, op, None)
        if fn is not None:
            return self.call_value(fn, [])
        self.throw("TypeError", f"operator {op!r} is not defined for {value.type.display()}")

    def _is_nullish_value(self, value: Value) -> bool:
        return isinstance(value.type, (NullType, UndefinedType))

    def _implements_named(self, cls: ClassInfo, trait_name: str) -> bool:
        info = cls
        while info is not None:
            for t in info.traits:
                if getattr(t.decl, "name", None) == trait_name:
                    return True
            sup = info.superclass
            info = sup.decl if sup is not None else None
        return False

    def eval_falsiness(self, value: Value) -> bool:
        """True when the value counts as falsy for `???`."""
        if self._is_nullish_value(value):
            return True
        cls = self.runtime_class(value)
        if isinstance(cls, ClassInfo) and self._implements_named(cls, "HasFalsy"):
            zeros = self._trait_static(cls, "HasFalsy", "$zeros_value")
            if zeros is not None and isinstance(zeros.payload, list):
                for zero in zeros.payload:
                    if values_equal(value, zero):
                        return True
            validators = self._trait_static(cls, "HasFalsy", "$zeros_validator")
            if validators is not None and isinstance(validators.payload, list):
                for fn in validators.payload:
                    result = self.call_callback(fn, [value])
                    if isinstance(result.payload, bool) and result.payload:
                        return True
            return False
        return False

    def _trait_static(self, cls: ClassInfo, trait: str, name: str) -> Value | None:
        for info in cls.mro():
            static = info.statics.get(f"{trait}:{name}") or info.statics.get(name)
            if isinstance(static, StaticDecl) and isinstance(static.value, Value):
                return static.value
        return None

    def _expr_Ternary(self, node: N.Ternary, env: Environment) -> Value:
        test = self.eval_expr(node.condition, env)
        if not isinstance(test.payload, bool):
            self.throw("TypeError", "conditional operator requires a bool condition")
        return self.eval_expr(node.then_expr if test.payload else node.else_expr, env)

    def _expr_TupleExpr(self, node: N.TupleExpr, env: Environment) -> Value:
        items = [self.eval_expr(i, env) for i in node.items]
        return Value(self.b.t("tuple", *[v.type for v in items]), items)

    def _expr_ArrayExpr(self, node: N.ArrayExpr, env: Environment) -> Value:
        items = [self.eval_expr(i, env) for i in node.items]
        return self.b.array_value(items)

    def _expr_DictExpr(self, node: N.DictExpr, env: Environment) -> Value:
        data = CesnoDict()
        for key_node, value_node in node.pairs:
            key = self.eval_expr(key_node, env)
            if data.find(key) >= 0:
                self.throw("ValueError", "dict keys must be different")
            data.set(key, self.eval_expr(value_node, env))
        key_t = normalize_union([k.type for k, _ in data.pairs]) if data.pairs else ANY
        val_t = normalize_union([v.type for _, v in data.pairs]) if data.pairs else ANY
        return Value(self.b.t("dictionary", key_t, val_t), data)

    def _expr_SetExpr(self, node: N.SetExpr, env: Environment) -> Value:
        data = CesnoSet()
        for item in node.items:
            data.add(self.eval_expr(item, env))
        elem_t = normalize_union([v.type for v in data.items]) if data.items else ANY
        return Value(self.b.t("set", elem_t), data)

    def _expr_DeclExpr(self, node: N.DeclExpr, env: Environment) -> Value:
        return self._stmt_Declaration(node.decl, env)

    def _expr_ArrowFunction(self, node: N.ArrowFunction, env: Environment) -> Value:
        params = tuple(Parameter(p.name, ANY, optional=p.optional) for p in node.params)
        signature = Signature(params, ANY)
        body = node.body
        func = N.FunctionDef(node.span, None, "function", [], [], node.params, None, [], body if isinstance(body, N.Block) else None)
        fn = UserFunction(func, signature, env, "<arrow>")
        fn.arrow_body = None if isinstance(body, N.Block) else body
        return Value(signature.function_type(), fn)

    def _expr_FunctionExpr(self, node: N.FunctionExpr, env: Environment) -> Value:
        scope = env.child()
        fn = self._make_function_value(node.func, scope, node.func.kind)
        value = Value(fn.signature.function_type(), fn)
        if node.func.name:
            scope.declare(node.func.name, value)
        return value

    def _expr_OperatorRef(self, node: N.OperatorRef, env: Environment) -> Value:
        symbol = node.name

        def impl(interp, self_value, bound):
            return interp.binary_op(symbol, bound["left"], bound["right"], env)

        fn = BuiltinCallable(f"operator::{symbol}", Signature((Parameter("left"), Parameter("right"))), impl)
        return Value(fn.function_type(), fn)

    def _expr_EnumMemberRef(self, node: N.EnumMemberRef, env: Environment) -> Value:
        args = [CallArg(a.name, self.eval_expr(a.value, env)) for a in node.args] if node.args is not None else []
        return Value(PendingEnumType(node.name, node.args is not None), PendingEnumData(node.name, args))

    def _expr_WithPartial(self, node: N.WithPartial, env: Environment) -> Value:
        target = self.eval_expr(node.target, env)
        payload = target.payload
        overrides = {name: self.eval_expr(expr, env) for name, expr in node.overrides}
        if isinstance(payload, ClassInfo):
            payload = Overloads(payload.name, payload.constructors)
        if isinstance(payload, PartialFunction):
            merged = dict(payload.overrides)
            merged.update(overrides)
            return Value(target.type, PartialFunction(payload.target, merged, payload.signature))
        base_sig = None
        for candidate in callable_overloads(payload):
            try:
                base_sig = derive_partial_signature(candidate.signature, overrides)
                break
            except BindError:
                continue
        if base_sig is None:
            self.throw("TypeError", "'with' overrides do not match any overload")
        partial = PartialFunction(payload, overrides, base_sig)
        return Value(base_sig.function_type(), partial)

    def _expr_ObjectLiteral(self, node: N.ObjectLiteral, env: Environment) -> Value:
        target = self.eval_expr(node.class_expr, env)
        if not isinstance(target.payload, ClassInfo):
            self.throw("TypeError", "object literal requires a class before '@'")
        info: ClassInfo = target.payload
        generic_args = self._resolve_generic_args(info, node.generic_args, env)
        fields = {}
        for name, expr in node.fields:
            fields[name] = self.eval_expr(expr, env)
        stored = {}
        for cls in reversed(info.mro()):
            for fname, finfo in cls.fields.items():
                if finfo.is_static:
                    continue
                stored[fname] = finfo
        for fname in fields:
            if fname not in stored:
                self.throw("TypeError", f"class {info.name} has no member {fname!r}")
        missing = [fname for fname in stored if fname not in fields]
        if missing:
            self.throw("TypeError", f"object literal is missing member(s): {', '.join(missing)}")
        data = InstanceData(info, generic_args, fields)
        return Value(NominalType(info, generic_args), data)

    def _expr_Member(self, node: N.Member, env: Environment) -> Value:
        obj = self.eval_expr(node.obj, env)
        return self.access_member(obj, node.name, env)

    def _expr_Index(self, node: N.Index, env: Environment) -> Value:
        obj = self.eval_expr(node.obj, env)
        index = self.eval_expr(node.index, env)
        return self.index_value(obj, index)

    def _expr_Call(self, node: N.Call, env: Environment) -> Value:
        if isinstance(node.callee, N.Identifier) and node.callee.name == "super":
            return self._call_super(node, env)
        if isinstance(node.callee, N.Identifier) and node.callee.name in ("setter", "getter"):
            accessor = env.lookup(f"__{node.callee.name}__")
            if accessor is not None:
                args = self._eval_args(node.args, env)
                return self.call_value(accessor.payload, args)
        callee = self.eval_expr(node.callee, env)
        args = self._eval_args(node.args, env)
        generic_args = node.generic_args
        payload = callee.payload
        if isinstance(payload, ClassInfo):
            return self.construct(payload, generic_args or [], args, env)
        if isinstance(payload, EnumInfo):
            self.throw("TypeError", f"enum {payload.name} is not callable; reference a member")
        if isinstance(payload, PendingEnumData):
            self.throw("TypeError", f"#{payload.member} must be passed to an enum-typed parameter")
        return self.call_value(payload, args, generic_args=generic_args, env=env)

    def _eval_args(self, arg_nodes: list[N.Argument], env: Environment) -> list[CallArg]:
        args = []
        for a in arg_nodes:
            value = self.eval_expr(a.value, env)
            is_const = False
            if isinstance(a.value, N.Identifier):
                item = env.lookup_item(a.value.name)
                is_const = bool(item is not None and item.is_const)
            elif isinstance(a.value, N.Literal):
                is_const = True
            args.append(CallArg(a.name, value, is_const))
        return args

    def _call_super(self, node: N.Call, env: Environment) -> Value:
        self_item = env.lookup_item("self")
        owner_item = env.lookup_item("__owner__")
        if self_item is None or owner_item is None:
            self.throw("TypeError", "'super' is only available inside methods")
        owner: ClassInfo = owner_item.value.payload
        if owner.superclass is None:
            self.throw("TypeError", f"class {owner.name} has no superclass")
        sup_info = owner.superclass.decl
        args = self._eval_args(node.args, env)
        self._run_constructor(sup_info, self_item.value, args, env)
        return VOID_VALUE

    # ------------------------------------------------------------------
    # member access
    # ------------------------------------------------------------------

    def runtime_class(self, value: Value):
        t = value.type
        if isinstance(t, LiteralType):
            t = t.base
        if isinstance(t, NominalType):
            return t.decl
        return None

    def access_member(self, obj: Value, name: str, env: Environment) -> Value:
        payload = obj.payload
        if isinstance(payload, NamespaceValue):
            return self._namespace_member(obj, name, env)
        if isinstance(payload, ClassInfo):
            return self._static_member(payload, name, obj, env)
        if isinstance(payload, EnumInfo):
            return self._enum_member_value(payload, name)
        if isinstance(payload, TraitInfo):
            self.throw("TypeError", f"trait {payload.name} has no accessible member {name!r}")
        cls = self.runtime_class(obj)
        if isinstance(cls, (ClassInfo, EnumInfo)):
            found = self._instance_member(obj, cls, name, env)
            if found is not None:
                return found
        self.throw("TypeError", f"{obj.type.display()} has no member {name!r}")

    def _namespace_member(self, obj: Value, name: str, env: Environment) -> Value:
        ns: NamespaceValue = obj.payload
        if name in ns.members:
            return ns.members[name]
        if self.loader is not None and ns.kind in ("package", "module"):
            return self.loader.namespace_member(ns, name)
        self.throw("TypeError", f"namespace {ns.name} has no member {name!r}")

    def _static_member(self, info: ClassInfo, name: str, obj: Value, env: Environment) -> Value:
        for cls in info.mro() if isinstance(info, ClassInfo) else [info]:
            if name in cls.functions:
                overloads = cls.functions[name]
                payload = overloads[0] if len(overloads) == 1 else Overloads(name, overloads)
                return Value(overloads[0].function_type(), payload)
            static = cls.statics.get(name)
            if isinstance(static, StaticDecl) and isinstance(static.value, Value):
                return static.value
            if name in cls.methods:
                overloads = cls.methods[name]
                payload = overloads[0] if len(overloads) == 1 else Overloads(name, overloads)
                return Value(overloads[0].function_type(), payload)
        self.throw("TypeError", f"class {info.name} has no static member {name!r}")

    def _enum_member_value(self, info: EnumInfo, name: str) -> Value:
        member = info.members.get(name)
        if member is None:
            found = self._extension_member_for_enum(info, name)
            if found is not None:
                return found
            self.throw("TypeError", f"enum {info.name} has no member {name!r}")
        data = EnumValueData(info, name, [])
        return Value(NominalType(info), data)

    def _extension_member_for_enum(self, info: EnumInfo, name: str):
        return None

    def _instance_member(self, obj: Value, cls, name: str, env: Environment) -> Value | None:
        if isinstance(payload := obj.payload, InstanceData):
            # generic parameters are const instance variables
            for i, gp in enumerate(payload.class_info.generic_params):
                if gp.name == name and i < len(payload.generic_args):
                    return self._generic_arg_value(payload.generic_args[i])
            if ":" in name:
                static = self._find_static(payload.class_info, name)
                if static is not None:
                    return static
            if name in payload.slots and not name.startswith("__"):
                finfo = self._find_field(payload.class_info, name)
                if finfo is not None and finfo.is_private and not self._inside_class(payload.class_info):
                    self.throw("TypeError", f"member {name!r} of {payload.class_info.name} is private")
                return payload.slots[name]
        if isinstance(cls, ClassInfo):
            for info in cls.mro():
                if name in info.properties:
                    prop = info.properties[name]
                    if prop.is_private and not self._inside_class(cls):
                        self.throw("TypeError", f"property {name!r} of {info.name} is private")
                    if not prop.getters:
                        self.throw("TypeError", f"property {name!r} has no getter")
                    return self.invoke_accessor(prop.getters[0], obj, [], prop)
                if name in info.methods:
                    overloads = [self._bind_callable(fn, obj) for fn in info.methods[name]]
                    mods_private = self._method_private(info, name)
                    if mods_private and not self._inside_class(cls):
                        self.throw("TypeError", f"method {name!r} of {info.name} is private")
                    payload = overloads[0] if len(overloads) == 1 else Overloads(name, overloads)
                    return Value(overloads[0].function_type(), payload)
                if ":" in name:
                    static = self._find_static(info, name)
                    if static is not None:
                        return static
            ext = self._extension_member(obj, cls, name, env)
            if ext is not None:
                return ext
        if isinstance(cls, EnumInfo):
            ext = self._extension_member(obj, cls, name, env)
            if ext is not None:
                return ext
        return None

    def _generic_arg_value(self, arg: object) -> Value:
        if isinstance(arg, Value):
            return arg
        if isinstance(arg, bool):
            return self.b.value_of_bool(arg)
        if isinstance(arg, int):
            return self.b.value_of_int(arg, "usize")
        if isinstance(arg, str):
            return self.b.value_of_string(arg)
        if isinstance(arg, TypeDescriptor):
            return Value(self.b.t("type"), arg.decl if isinstance(arg, NominalType) and not arg.args else arg)
        return Value(ANY, arg)

    def _method_private(self, info: ClassInfo, name: str) -> bool:
        if info.is_builtin:
            return False
        for fn in info.methods.get(name, []):
            decl = getattr(fn, "decl", None)
            if decl is not None and "public" in decl.modifiers:
                return False
            if decl is None:
                return False
        return True

    def _find_field(self, cls: ClassInfo, name: str):
        for info in cls.mro():
            if name in info.fields:
                return info.fields[name]
        return None

    def _find_static(self, cls: ClassInfo, name: str) -> Value | None:
        for info in cls.mro():
            static = info.statics.get(name)
            if isinstance(static, StaticDecl) and isinstance(static.value, Value):
                return static.value
        return None

    def _inside_class(self, cls: ClassInfo) -> bool:
        return any(c is cls or cls in c.mro() or c in cls.mro() for c in self._class_stack)

    def _extension_member(self, obj: Value, cls, name: str, env: Environment) -> Value | None:
        for ext in reversed(self.extensions):
            if ext.target is not cls and not (
                isinstance(cls, ClassInfo) and isinstance(ext.target, ClassInfo) and ext.target in cls.mro()
            ):
                continue
            if not self._extension_applies(ext, obj):
                continue
            if name in ext.methods:
                overloads = [self._bind_callable(fn, obj) for fn in ext.methods[name]]
                payload = overloads[0] if len(overloads) == 1 else Overloads(name, overloads)
                return Value(overloads[0].function_type(), payload)
            if name in ext.properties:
                prop = ext.properties[name]
                if prop.getters:
                    return self.invoke_accessor(prop.getters[0], obj, [], prop)
        return None

    def _extension_applies(self, ext: ExtensionInfo, obj: Value) -> bool:
        if not ext.generic_bounds:
            return True
        t = obj.type
        args = t.args if isinstance(t, NominalType) else ()
        params = getattr(ext.target, "generic_params", [])
        for i, gp in enumerate(params):
            bound = ext.generic_bounds.get(gp.name)
            if bound is None or isinstance(bound, AnyType):
                continue
            if i >= len(args):
                continue
            arg = args[i]
            if isinstance(arg, TypeDescriptor) and not isinstance(arg, AnyType):
                if not is_assignable(arg, bound):
                    return False
        return True

    def _bind_callable(self, fn, obj: Value):
        return fn.bind(obj) if hasattr(fn, "bind") else fn

    def invoke_accessor(self, fn, obj: Value, args: list[CallArg], prop=None) -> Value:
        bound = self._bind_callable(fn, obj)
        return self.call_value(bound, args)

    def assign_member(self, obj: Value, name: str, value: Value, env: Environment) -> None:
        payload = obj.payload
        cls = self.runtime_class(obj)
        if isinstance(cls, ClassInfo):
            for info in cls.mro():
                if name in info.properties:
                    prop = info.properties[name]
                    if prop.is_private and not self._inside_class(cls):
                        self.throw("TypeError", f"property {name!r} of {info.name} is private")
                    setter = self._select_setter(prop, value)
                    if setter is None:
                        self.throw("TypeError", f"no setter of {name!r} accepts {value.type.display()}")
                    self.invoke_accessor(setter, obj, [CallArg(None, value)], prop)
                    return
        if isinstance(payload, InstanceData):
            finfo = self._find_field(payload.class_info, name)
            if finfo is None:
                self.throw("TypeError", f"class {payload.class_info.name} has no member {name!r}")
            if finfo.is_private and not self._inside_class(payload.class_info):
                self.throw("TypeError", f"member {name!r} of {payload.class_info.name} is private")
            if "readonly" in finfo.modifiers and name in payload.slots and not self._inside_class(payload.class_info):
                self.throw("TypeError", f"member {name!r} is readonly")
            payload.slots[name] = self.adapt_value(value, substitute(finfo.type, self._instance_mapping(payload)))
            return
        self.throw("TypeError", f"cannot assign member {name!r} on {obj.type.display()}")

    def _instance_mapping(self, data: InstanceData) -> dict[str, object]:
        mapping = {}
        for i, gp in enumerate(data.class_info.generic_params):
            if i < len(data.generic_args):
                mapping[gp.name] = data.generic_args[i]
        return mapping

    def _select_setter(self, prop, value: Value):
        candidates = []
        for setter in prop.setters:
            sig = setter.signature
            if not sig.params:
                continue
            ptype = sig.params[0].type
            if is_assignable(value.type, ptype):
                candidates.append((0 if types_equal(value.type, ptype) else 1, setter))
        if not candidates:
            return None
        candidates.sort(key=lambda p: p[0])
        return candidates[0][1]

    def index_value(self, obj: Value, index: Value) -> Value:
        p = obj.payload
        if isinstance(p, list):
            if not isinstance(index.payload, int) or isinstance(index.payload, bool):
                self.throw("TypeError", "container index must be an integer")
            i = index.payload
            if not 0 <= i < len(p):
                self.throw("IndexError", f"index {i} out of range for length {len(p)}")
            return p[i]
        if isinstance(p, str):
            if not isinstance(index.payload, int):
                self.throw("TypeError", "string index must be an integer")
            if not 0 <= index.payload < len(p):
                self.throw("IndexError", f"index {index.payload} out of range")
            return self.b.value_of_char(p[index.payload])
        if isinstance(p, CesnoDict):
            found = p.get(index)
            if found is None:
                self.throw("KeyError", f"key {self.to_string(index)} not in dict")
            return found
        self.throw("TypeError", f"{obj.type.display()} is not indexable")

    def assign_index(self, obj: Value, index: Value, value: Value) -> None:
        p = obj.payload
        if isinstance(p, list):
            if not isinstance(index.payload, int) or isinstance(index.payload, bool):
                self.throw("TypeError", "container index must be an integer")
            i = index.payload
            if not 0 <= i < len(p):
                self.throw("IndexError", f"index {i} out of range for length {len(p)}")
            p[i] = value
            return
        if isinstance(p, CesnoDict):
            p.set(index, value)
            return
        self.throw("TypeError", f"{obj.type.display()} does not support index assignment")

    # ------------------------------------------------------------------
    # calls
    # ------------------------------------------------------------------

    def call_value(self, payload, args: list[CallArg], generic_args=None, env: Environment | None = None) -> Value:
        if isinstance(payload, Value):
            payload = payload.payload
        if isinstance(payload, ClassInfo):
            return self.construct(payload, generic_args or [], args, env or Environment())
        if isinstance(payload, Overloads):
            bind_args = [a.to_bind_arg() for a in args]
            try:
                chosen = select_overload(payload.items, bind_args)
            except OverloadError as exc:
                self.throw("TypeError", f"{payload.name}: {exc.message}")
            return self.call_value(chosen, args, generic_args, env)
        if isinstance(payload, PartialFunction):
            merged = list(args)
            given = {a.name for a in args if a.name is not None}
            for name, value in payload.overrides.items():
                if name not in given:
                    merged.append(CallArg(name, value))
            return self.call_value(payload.target, merged, generic_args, env)
        if isinstance(payload, BuiltinCallable):
            return self._call_builtin(payload, args)
        if isinstance(payload, UserFunction):
            return self._call_user(payload, args, generic_args)
        if isinstance(payload, EnumValueData) and not payload.payload:
            member = payload.enum_info.members.get(payload.member)
            if member is not None and member.payload is not None:
                pending = PendingEnumData(payload.member, args)
                return self._make_enum_value(payload.enum_info, pending)
        self.throw("TypeError", f"value of type {type(payload).__name__} is not callable")

    def _bind_or_throw(self, signature: Signature, args: list[CallArg], name: str):
        try:
            return bind_arguments(signature, [a.to_bind_arg() for a in args])
        except BindError as exc:
            raise self.b.make_error("TypeError", f"{name}: {exc.message}") from None

    def _call_builtin(self, fn: BuiltinCallable, args: list[CallArg]) -> Value:
        binding = self._bind_or_throw(fn.signature, args, fn.name)
        bound: dict[str, object] = {}
        by_name = {p.name: p for p in fn.signature.params}
        for pname, slot in binding.slots.items():
            param = by_name[pname]
            if slot is USE_DEFAULT:
                default = param.default_expr
                bound[pname] = default if isinstance(default, Value) else UNDEFINED_VALUE
            elif slot is OMITTED:
                bound[pname] = UNDEFINED_VALUE
            elif isinstance(slot, list):
                bound[pname] = [self._materialize(a, param) for a in slot]
            else:
                bound[pname] = self._materialize(slot, param)
        return fn.impl(self, fn.self_value, bound)

    def _materialize(self, bind_arg: Argument, param: Parameter) -> Value:
        value: Value = bind_arg.value
        return self.adapt_value(value, param.type)

    def adapt_value(self, value: Value, target: TypeDescriptor, bindings: dict | None = None) -> Value:
        """Coerce pending enum refs and literal arrays toward the target type."""
        if isinstance(value.payload, PendingEnumData):
            enum_info = self._enum_for_target(target, value.payload.member)
            if enum_info is None:
                self.throw("TypeError", f"#{value.payload.member} does not match an enum parameter")
            return self._make_enum_value(enum_info, value.payload)
        if isinstance(target, NominalType) and isinstance(target.decl, ClassInfo) and target.decl is self.b.classes.get("sequence"):
            return self._coerce_seq(value, target, bindings)
        if isinstance(target, (AnyType, GenericRef, InferType)):
            return value
        if isinstance(target, UnionType):
            for alt in target.alternatives:
                if is_assignable(value.type, alt):
                    return value
            for alt in target.alternatives:
                try:
                    return self.adapt_value(value, alt)
                except CesnoThrow:
                    continue
            self.throw("TypeError", f"{value.type.display()} is not assignable to {target.display()}")
        if not is_assignable(value.type, target):
            self.throw("TypeError", f"{value.type.display()} is not assignable to {target.display()}")
        return value

    def _coerce_seq(self, value: Value, target: NominalType, bindings: dict | None) -> Value:
        if not isinstance(value.payload, list):
            self.throw("TypeError", f"{value.type.display()} is not a sequence")
        elem_target, length = target.args if len(target.args) == 2 else (ANY, None)
        items = value.payload
        if isinstance(length, (InferType, GenericRef)):
            if bindings is not None:
                prior = bindings.get(length.name)
                if prior is not None and prior != len(items):
                    self.throw("TypeError", f"sequence length mismatch: expected {prior}, found {len(items)}")
                if bindings is not None:
                    bindings[length.name] = len(items)
            length_val = len(items)
        elif isinstance(length, int):
            if len(items) != length:
                self.throw("TypeError", f"sequence length mismatch: expected {length}, found {len(items)}")
            length_val = length
        else:
            length_val = len(items)
        new_items = [
            self.adapt_value(item, elem_target, bindings) if isinstance(elem_target, TypeDescriptor) else item
            for item in items
        ]
        resolved_elem = elem_target
        if isinstance(elem_target, TypeDescriptor) and bindings:
            resolved_elem = substitute(elem_target, bindings)
        if isinstance(resolved_elem, (InferType, GenericRef, AnyType)):
            resolved_elem = normalize_union([v.type for v in new_items]) if new_items else ANY
        return Value(NominalType(target.decl, (resolved_elem, length_val)), new_items)

    def _enum_for_target(self, target: TypeDescriptor, member: str) -> EnumInfo | None:
        if isinstance(target, NominalType) and isinstance(target.decl, EnumInfo):
            if member in target.decl.members:
                return target.decl
        if isinstance(target, UnionType):
            for alt in target.alternatives:
                found = self._enum_for_target(alt, member)
                if found is not None:
                    return found
        return None

    def _make_enum_value(self, info: EnumInfo, pending: PendingEnumData) -> Value:
        member = info.members[pending.member]
        payload_values: list[Value] = []
        if member.payload:
            if len(pending.args) != len(member.payload):
                self.throw("TypeError", f"enum member {pending.member!r} expects {len(member.payload)} argument(s)")
            for arg, psig in zip(pending.args, member.payload):
                payload_values.append(self.adapt_value(arg.value, psig.type))
        elif pending.args:
            self.throw("TypeError", f"enum member {pending.member!r} carries no payload")
        return Value(NominalType(info), EnumValueData(info, pending.member, payload_values))

    def _call_user(self, fn: UserFunction, args: list[CallArg], generic_args=None) -> Value:
        binding = self._bind_or_throw(fn.signature, args, fn.name)
        closure = fn.closure if fn.closure is not None else Environment()
        scope = closure.child(f"call {fn.name}")
        generic_bindings: dict[str, object] = {}
        if fn.self_value is not None:
            scope.declare("self", fn.self_value)
            data = fn.self_value.payload
            if isinstance(data, InstanceData):
                for i, gp in enumerate(data.class_info.generic_params):
                    if i < len(data.generic_args):
                        generic_bindings[gp.name] = data.generic_args[i]
        if fn.owner is not None:
            scope.declare("__owner__", Value(ANY, fn.owner))
        if fn.kind in ("getter", "setter") and fn.owner is not None and fn.self_value is not None:
            self._bind_accessor_names(scope, fn)
        # explicit generic arguments
        if generic_args:
            resolver = self.make_resolver(scope, fn.owner)
            for node, gp in zip(generic_args, fn.generic_params):
                generic_bindings[gp.name] = resolver.resolve_generic_arg(node)
        by_name = {p.name: p for p in fn.signature.params}
        materialized: dict[str, Value] = {}
        for pname, slot in binding.slots.items():
            param = by_name[pname]
            ptype = substitute(param.type, generic_bindings)
            if slot is USE_DEFAULT:
                default_node = param.default_expr
                value = self.eval_expr(default_node, scope) if default_node is not None else UNDEFINED_VALUE
                value = self.adapt_value(value, ptype, generic_bindings)
            elif slot is OMITTED:
                value = UNDEFINED_VALUE
            elif isinstance(slot, list):
                items = [self._adapt_with_inference(a.value, ptype, generic_bindings) for a in slot]
                value = Value(self.b.t("tuple", *[v.type for v in items]), items)
            else:
                value = self._adapt_with_inference(slot.value, ptype, generic_bindings)
            materialized[pname] = value
        # generic bound checks
        for gp in fn.generic_params:
            bound = gp.bound
            if bound is None:
                continue
            actual = generic_bindings.get(gp.name)
            if isinstance(actual, TypeDescriptor) and not isinstance(actual, AnyType):
                if not is_assignable(actual, bound):
                    self.throw(
                        "TypeError",
                        f"generic argument {actual.display()} does not satisfy constraint {bound.display()}",
                    )
        # generic parameters are in scope as const values inside the body
        for gname, gval in generic_bindings.items():
            if gname not in scope.bindings:
                scope.declare(gname, self._generic_arg_value(gval), ("const",))
        # parameter constraints
        for pname, value in materialized.items():
            param = by_name[pname]
            if param.constraint is not None:
                self.check_runtime_constraint(param, value, binding, args, scope)
        for pname, value in materialized.items():
            scope.declare(pname, value)
        if fn.owner is not None:
            self._class_stack.append(fn.owner)
        try:
            arrow_body = getattr(fn, "arrow_body", None)
            if arrow_body is not None:
                return self.eval_expr(arrow_body, scope)
            if fn.decl is None or fn.decl.body is None:
                self.throw("TypeError", f"function {fn.name!r} has no body to execute")
            try:
                self.exec_block(fn.decl.body, scope, new_scope=False)
            except ReturnSignal as sig:
                self.destroy_scope(scope, sig.value)
                return sig.value
            except BaseException:
                self.destroy_scope(scope, None)
                raise
            self.destroy_scope(scope, None)
            return VOID_VALUE
        finally:
            if fn.owner is not None:
                self._class_stack.pop()

    def _bind_accessor_names(self, scope: Environment, fn: UserFunction) -> None:
        """Inside getter/setter bodies, `getter(...)`/`setter(...)` call siblings."""
        prop = None
        for info in fn.owner.mro():
            if fn.name in info.properties:
                prop = info.properties[fn.name]
                break
        if prop is None:
            return
        if prop.getters:
            bound = [self._bind_callable(g, fn.self_value) for g in prop.getters]
            payload = bound[0] if len(bound) == 1 else Overloads("getter", bound)
            scope.declare("__getter__", Value(bound[0].function_type(), payload))
        if prop.setters:
            bound = [self._bind_callable(s, fn.self_value) for s in prop.setters]
            payload = bound[0] if len(bound) == 1 else Overloads("setter", bound)
            scope.declare("__setter__", Value(bound[0].function_type(), payload))

    def _adapt_with_inference(self, value: Value, ptype: TypeDescriptor, bindings: dict[str, object]) -> Value:
        ptype = substitute(ptype, bindings)
        if self._mentions_inference(ptype):
            adapted = self.adapt_value(value, ptype, bindings)
            try:
                infer_generics(ptype, adapted.type, bindings)
            except InferenceError as exc:
                self.throw("TypeError", str(exc))
            return adapted
        return self.adapt_value(value, ptype, bindings)

    def _mentions_inference(self, t: TypeDescriptor) -> bool:
        if isinstance(t, (InferType, GenericRef)):
            return True
        if isinstance(t, NominalType):
            return any(isinstance(a, TypeDescriptor) and self._mentions_inference(a) or isinstance(a, (InferType, GenericRef)) for a in t.args)
        if isinstance(t, UnionType):
            return any(self._mentions_inference(a) for a in t.alternatives)
        return False

    def check_runtime_constraint(self, param: Parameter, value: Value, binding, args: list[CallArg], scope: Environment) -> None:
        constraint = param.constraint
        arg_is_const = False
        for a in args:
            if a.name == param.name:
                arg_is_const = a.is_const
                break
        else:
            positional = [a for a in args if a.name is None]
            if positional:
                arg_is_const = all(a.is_const for a in positional if values_identical(a.value, value)) and any(
                    values_identical(a.value, value) for a in positional
                )
        self._check_constraint_node(constraint, param, value, arg_is_const, scope)

    def _check_constraint_node(self, c, param: Parameter, value: Value, arg_is_const: bool, scope: Environment) -> None:
        ok = self._constraint_holds(c, param, value, arg_is_const, scope)
        if not ok:
            self.throw(
                "ConstraintNotFulfilledError",
                f"argument for {param.name!r} does not satisfy its constraint",
            )

    def _constraint_holds(self, c, param: Parameter, value: Value, arg_is_const: bool, scope: Environment) -> bool:
        if c is None:
            return True
        if isinstance(c, N.ModifierCheck):
            if c.modifier in ("const", "readonly"):
                return arg_is_const
            return True
        if isinstance(c, N.TypeCheck):
            resolver = self.make_resolver(scope)
            try:
                t = resolver.resolve(c.type_expr)
            except TypeResolutionError:
                return True
            if isinstance(t, NominalType) and isinstance(t.decl, EnumInfo) and t.decl.inline:
                # inline enums resolve to a fresh declaration each time;
                # membership is by member name
                p = value.payload
                return isinstance(p, EnumValueData) and p.member in t.decl.members
            return is_assignable(value.type, t)
        if isinstance(c, N.BoolCheck):
            inner = scope.child()
            if param.name not in inner.bindings:
                inner.declare(param.name, value)
            result = self.eval_expr(c.expr, inner)
            return isinstance(result.payload, bool) and result.payload
        if isinstance(c, N.ReturnsCheck):
            return True
        if isinstance(c, N.ConstraintJoin):
            results = (self._constraint_holds(i, param, value, arg_is_const, scope) for i in c.items)
            if c.op == "or":
                return any(results)
            return all(results)
        if isinstance(c, N.ParamConstraint):
            return self._constraint_holds(c.constraint, param, value, arg_is_const, scope)
        return True

    def call_callback(self, fn: Value | object, values: list[Value]) -> Value:
        payload = fn.payload if isinstance(fn, Value) else fn
        signature = getattr(payload, "signature", None)
        if signature is None:
            self.throw("TypeError", "value is not callable")
        positional = [p for p in signature.params if not p.keyword_only]
        fixed = [p for p in positional if not p.variadic]
        # Variadic callbacks receive only the primary argument, so passing
        # `print` to foreach prints each element alone.
        capacity = len(fixed)
        if capacity == 0 and any(p.variadic for p in positional):
            capacity = 1
        args = [CallArg(None, v) for v in values[: min(capacity, len(values))]]
        return self.call_value(payload, args)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def _runtime_generic_arg(self, node: N.GenericArgNode, env: Environment, resolver: TypeResolver):
        # A bare name may be a generic const value bound in the current scope.
        if node.type_expr is not None and isinstance(node.type_expr, N.TName) and node.type_expr.generic_args is None:
            bound = env.lookup(node.type_expr.name)
            if bound is not None:
                p = bound.payload
                if isinstance(p, (bool, int, str)):
                    return p
                if isinstance(p, (ClassInfo, EnumInfo)):
                    return NominalType(p)
                if isinstance(p, TypeDescriptor):
                    return p
        return resolver.resolve_generic_arg(node)

    def _resolve_generic_args(self, info, nodes, env: Environment) -> tuple:
        params = getattr(info, "generic_params", [])
        if not nodes:
            return ()
        resolver = self.make_resolver(env)
        by_name = {gp.name: i for i, gp in enumerate(params)}
        out: list = [None] * len(params)
        pos = 0
        for node in nodes:
            value = self._runtime_generic_arg(node, env, resolver)
            if node.name is not None:
                if node.name not in by_name:
                    self.throw("TypeError", f"class {info.name} has no generic parameter {node.name!r}")
                out[by_name[node.name]] = value
            else:
                if pos >= len(out):
                    self.throw("TypeError", f"too many generic arguments for {info.name}")
                out[pos] = value
                pos += 1
        for i, gp in enumerate(params):
            if out[i] is None and gp.default is not None:
                out[i] = gp.default
        return tuple(out)

    def construct(self, info: ClassInfo, generic_arg_nodes, args: list[CallArg], env: Environment) -> Value:
        if isinstance(info, (TraitInfo,)):
            self.throw("TypeError", f"trait {info.name} cannot be instantiated")
        explicit = self._resolve_generic_args(info, generic_arg_nodes, env) if generic_arg_nodes else ()
        if not info.constructors:
            self.throw("TypeError", f"class {info.name} has no constructor")
        bind_args = [a.to_bind_arg() for a in args]
        try:
            ctor = select_overload(info.constructors, bind_args)
        except OverloadError as exc:
            self.throw("TypeError", f"{info.name}: {exc.message}")
        if isinstance(ctor, BuiltinCallable):
            return self._call_builtin(ctor, args)
        return self._construct_user(info, ctor, explicit, args, env)

    def _construct_user(self, info: ClassInfo, ctor: UserFunction, explicit: tuple, args: list[CallArg], env: Environment) -> Value:
        binding = self._bind_or_throw(ctor.signature, args, info.name)
        generic_bindings: dict[str, object] = {}
        for i, gp in enumerate(info.generic_params):
            if i < len(explicit) and explicit[i] is not None:
                generic_bindings[gp.name] = explicit[i]
        by_name = {p.name: p for p in ctor.signature.params}
        materialized: dict[str, Value] = {}
        for pname, slot in binding.slots.items():
            param = by_name[pname]
            if slot is USE_DEFAULT:
                value = self.eval_expr(param.default_expr, env) if param.default_expr is not None else UNDEFINED_VALUE
            elif slot is OMITTED:
                value = UNDEFINED_VALUE
            elif isinstance(slot, list):
                items = [self._adapt_with_inference(a.value, param.type, generic_bindings) for a in slot]
                value = Value(self.b.t("tuple", *[v.type for v in items]), items)
            else:
                value = self._adapt_with_inference(slot.value, param.type, generic_bindings)
            materialized[pname] = value
        final_args = []
        for i, gp in enumerate(info.generic_params):
            if gp.name in generic_bindings:
                final_args.append(generic_bindings[gp.name])
            elif i < len(explicit) and explicit[i] is not None:
                final_args.append(explicit[i])
            elif gp.default is not None:
                final_args.append(gp.default)
            else:
                final_args.append(ANY)
        final_tuple = tuple(final_args)
        data = InstanceData(info, final_tuple)
        value = Value(NominalType(info, final_tuple), data)
        # field initializers, then constructor body
        ctor_env = (ctor.closure or env).child(f"constructor {info.name}")
        ctor_env.declare("self", value)
        ctor_env.declare("__owner__", Value(ANY, info))
        self._class_stack.append(info)
        try:
            for cls in reversed(info.mro()):
                for fname, init_node in cls.field_inits.items():
                    data.slots[fname] = self.eval_expr(init_node, ctor_env)
            for pname, pvalue in materialized.items():
                ctor_env.declare(pname, pvalue)
            if ctor.decl is not None and ctor.decl.body is not None:
                try:
                    self.exec_block(ctor.decl.body, ctor_env, new_scope=False)
                except ReturnSignal:
                    pass
        finally:
            self._class_stack.pop()
        return value

    def _run_constructor(self, info: ClassInfo, self_value: Value, args: list[CallArg], env: Environment) -> None:
        if not info.constructors:
            self.throw("TypeError", f"class {info.name} has no constructor")
        bind_args = [a.to_bind_arg() for a in args]
        try:
            ctor = select_overload(info.constructors, bind_args)
        except OverloadError as exc:
            self.throw("TypeError", f"{info.name}: {exc.message}")
        if isinstance(ctor, BuiltinCallable):
            self.throw("TypeError", f"cannot call builtin constructor of {info.name} via super")
        binding = self._bind_or_throw(ctor.signature, args, info.name)
        scope = (ctor.closure or env).child(f"constructor {info.name}")
        scope.declare("self", self_value)
        scope.declare("__owner__", Value(ANY, info))
        by_name = {p.name: p for p in ctor.signature.params}
        for pname, slot in binding.slots.items():
            param = by_name[pname]
            if slot is USE_DEFAULT:
                value = self.eval_expr(param.default_expr, scope) if param.default_expr is not None else UNDEFINED_VALUE
            elif slot is OMITTED:
                value = UNDEFINED_VALUE
            elif isinstance(slot, list):
                items = [a.value for a in slot]
                value = Value(self.b.t("tuple", *[v.type for v in items]), items)
            else:
                value = self.adapt_value(slot.value, param.type)
            scope.declare(pname, value)
        data = self_value.payload
        self._class_stack.append(info)
        try:
            for cls in [info]:
                for fname, init_node in cls.field_inits.items():
                    if fname not in data.slots:
                        data.slots[fname] = self.eval_expr(init_node, scope)
            if ctor.decl is not None and ctor.decl.body is not None:
                try:
                    self.exec_block(ctor.decl.body, scope, new_scope=False)
                except ReturnSignal:
                    pass
        finally:
            self._class_stack.pop()

    # ------------------------------------------------------------------
    # operators
    # ------------------------------------------------------------------

    def binary_op(self, symbol: str, left: Value, right: Value, env: Environment | None = None) -> Value:
        # 1. left operand's class operator
        fn = self._find_class_operator(left, symbol, right, right_form=False)
        if fn is not None:
            return self.call_value(fn, [CallArg(None, right)])
        # 2. right operand's class right-form operator
        fn = self._find_class_operator(right, symbol, left, right_form=True)
        if fn is not None:
            return self.call_value(fn, [CallArg(None, left)])
        # 3. scope operator definitions
        if env is not None:
            for op in env.scope_operators():
                if op.symbol != symbol or op.right_form:
                    continue
                sig = op.function.signature
                if len(sig.params) == 2:
                    if is_assignable(left.type, sig.params[0].type) and is_assignable(right.type, sig.params[1].type):
                        return self.call_value(op.function, [CallArg(None, left), CallArg(None, right)])
        # 4. builtin
        return self.apply_builtin_operator(symbol, left, right)

    def _find_class_operator(self, operand: Value, symbol: str, other: Value | None, right_form: bool = False):
        cls = self.runtime_class(operand)
        if not isinstance(cls, ClassInfo):
            return None
        mapping = {}
        if isinstance(operand.payload, InstanceData):
            mapping = self._instance_mapping(operand.payload)
        for info in cls.mro():
            for op in info.operators:
                if op.symbol != symbol or op.right_form != right_form:
                    continue
                sig = op.function.signature
                if other is not None:
                    if not sig.params:
                        continue
                    ptype = substitute(sig.params[0].type, mapping)
                    if not (
                        is_assignable(other.type, ptype)
                        or self._mentions_inference(ptype)
                    ):
                        continue
                bound = op.function.bind(operand) if hasattr(op.function, "bind") else op.function
                return bound
        return None

    # -- builtin operator matrix ---------------------------------------

    def _is_int_family(self, v: Value) -> bool:
        return self.b.is_integer_kind(v) and not self.b.is_instance_of(v, "bigint")

    def _int_width(self, v: Value) -> int:
        name = v.type.decl.name if isinstance(v.type, NominalType) else "int"
        return {"byte": 8, "int": 32, "long": 64, "usize": 64}.get(name, 32)

    def _wrap_signed(self, n: int, width: int) -> int:
        mask = (1 << width) - 1
        n &= mask
        if n >= 1 << (width - 1):
            n -= 1 << width
        return n

    def _numeric_result_class(self, left: Value, right: Value) -> str:
        names = set()
        for v in (left, right):
            if isinstance(v.type, NominalType):
                names.add(v.type.decl.name)
        if "bigint" in names:
            return "bigint"
        if "float" in names:
            return "float"
        if "floatsg" in names:
            return "floatsg" if names <= {"floatsg"} else "float"
        for candidate in ("usize", "long", "int", "byte"):
            if candidate in names:
                return candidate
        return "int"

    def _numeric_result(self, raw, left: Value, right: Value) -> Value:
        cls = self._numeric_result_class(left, right)
        if isinstance(raw, float):
            if cls in ("int", "long", "byte", "usize", "bigint"):
                cls = "float"
            return Value(self.b.t(cls), raw)
        if cls in ("float", "floatsg"):
            return Value(self.b.t(cls), float(raw))
        if cls != "bigint":
            lo, hi = INT_LIMITS.get(cls, INT_LIMITS["int"])
            if not lo <= raw <= hi:
                self.throw("OverflowError", f"arithmetic overflow: {raw} does not fit {cls}")
        return Value(self.b.t(cls), raw)

    def apply_builtin_operator(self, symbol: str, left: Value, right: Value) -> Value:
        b = self.b
        lp, rp = left.payload, right.payload

        if symbol == "==":
            return b.value_of_bool(values_equal(left, right))
        if symbol == "!=":
            return b.value_of_bool(not values_equal(left, right))
        if symbol == "===":
            return b.value_of_bool(values_identical(left, right))
        if symbol == "~=":
            if not (b.is_numeric(left) and b.is_numeric(right)):
                self.throw("TypeError", "'~=' is only defined for numbers")
            diff = abs(lp - rp)
            return b.value_of_bool(diff <= APPROX_RTOL * max(abs(lp), abs(rp)) + APPROX_ATOL)
        if symbol == "in":
            return b.value_of_bool(self._membership(left, right))
        if symbol in ("xor", "and", "or"):
            if isinstance(lp, bool) and isinstance(rp, bool):
                result = {"xor": lp != rp, "and": lp and rp, "or": lp or rp}[symbol]
                return b.value_of_bool(result)
            self.throw("TypeError", f"'{symbol}' requires bool operands")

        if symbol in ("<", ">", "<=", ">="):
            if b.is_numeric(left) and b.is_numeric(right):
                pass
            elif isinstance(lp, str) and isinstance(rp, str):
                pass
            else:
                self.throw("TypeError", f"operator {symbol!r} is not defined for {left.type.display()} and {right.type.display()}")
            result = {"<": lp < rp, ">": lp > rp, "<=": lp <= rp, ">=": lp >= rp}[symbol]
            return b.value_of_bool(result)

        if symbol in ("bitand", "bitor", "bitxor"):
            if not (self._is_int_family(left) and self._is_int_family(right)):
                self.throw("TypeError", f"{symbol} requires integer operands")
            op = {"bitand": lambda a, c: a & c, "bitor": lambda a, c: a | c, "bitxor": lambda a, c: a ^ c}[symbol]
            return self._numeric_result(op(lp, rp), left, right)

        if symbol in ("bitshl", "bitshr", "bitushl", "bitushr"):
            if not (self._is_int_family(left) and self._is_int_family(right)):
                self.throw("TypeError", f"{symbol} requires integer operands")
            if rp < 0:
                self.throw("ValueError", "shift by a negative amount")
            width = self._int_width(left)
            if symbol == "bitshl":
                return Value(left.type, self._wrap_signed(lp << rp, width))
            if symbol == "bitshr":
                return Value(left.type, lp >> rp)
            unsigned = lp & ((1 << width) - 1)
            if symbol == "bitushl":
                return Value(left.type, self._wrap_signed(unsigned << rp, width))
            return Value(left.type, self._wrap_signed(unsigned >> rp, width))

        if symbol in ("+", "-", "*", "/", "%"):
            if isinstance(lp, str) and isinstance(rp, str) and symbol == "+":
                if b.is_instance_of(left, "char") and b.is_instance_of(right, "char"):
                    return b.value_of_string(lp + rp)
                return b.value_of_string(lp + rp)
            if not (b.is_numeric(left) and b.is_numeric(right)):
                self.throw(
                    "TypeError",
                    f"operator {symbol!r} is not defined for {left.type.display()} and {right.type.display()}",
                )
            if symbol == "+":
                return self._numeric_result(lp + rp, left, right)
            if symbol == "-":
                return self._numeric_result(lp - rp, left, right)
            if symbol == "*":
                return self._numeric_result(lp * rp, left, right)
            if symbol == "/":
                if rp == 0:
                    self.throw("DivisionByZeroError", "division by zero")
                if isinstance(lp, float) or isinstance(rp, float):
                    return self._numeric_result(lp / rp, left, right)
                q = abs(lp) // abs(rp)
                if (lp < 0) != (rp < 0):
                    q = -q
                return self._numeric_result(q, left, right)
            if symbol == "%":
                if rp == 0:
                    self.throw("DivisionByZeroError", "remainder by zero")
                r = abs(lp) % abs(rp)
                if lp < 0:
                    r = -r
                if isinstance(lp, float) or isinstance(rp, float):
                    return self._numeric_result(float(r), left, right)
                return self._numeric_result(r, left, right)

        self.throw(
            "TypeError",
            f"operator {symbol!r} is not defined for {left.type.display()} and {right.type.display()}",
        )

    def _membership(self, needle: Value, haystack: Value) -> bool:
        p = haystack.payload
        if isinstance(p, list):
            return any(values_equal(needle, item) for item in p)
        if isinstance(p, CesnoDict):
            return p.find(needle) >= 0
        if isinstance(p, CesnoSet):
            return p.contains(needle)
        if isinstance(p, str):
            if not isinstance(needle.payload, str):
                self.throw("TypeError", "'in' on a string requires a string or char")
            return needle.payload in p
        self.throw("TypeError", f"'in' is not defined for {haystack.type.display()}")

    # ------------------------------------------------------------------
    # type resolution in an environment
    # ------------------------------------------------------------------

    def make_resolver(self, env: Environment, owner: ClassInfo | None = None) -> TypeResolver:
        def lookup(name: str):
            if owner is not None and name in owner.type_aliases:
                return owner.type_aliases[name]
            value = env.lookup(name)
            if value is not None and isinstance(value.payload, (ClassInfo, EnumInfo, TraitInfo, TypeAliasInfo)):
                return value.payload
            return None

        resolver = TypeResolver(self.b, lookup)
        if owner is not None:
            resolver = resolver.with_self(owner)
        return resolver

    def resolve_type(self, texpr: N.TypeExpr, env: Environment) -> TypeDescriptor:
        try:
            return self.make_resolver(env).resolve(texpr)
        except TypeResolutionError as exc:
            self.throw("TypeError", exc.message)

    # ------------------------------------------------------------------
    # string conversion
    # ------------------------------------------------------------------

    def to_string(self, value: Value, literal: bool = False) -> str:
        p = value.payload
        t = value.type
        if isinstance(t, NullType):
            return "null"
        if isinstance(t, UndefinedType):
            return "undefined"
        if p == "empty" and types_equal(t, VOID_VALUE.type):
            return "empty"
        if isinstance(p, bool):
            return "true" if p else "false"
        if isinstance(p, int):
            return str(p)
        if isinstance(p, float):
            return repr(p)
        if isinstance(p, str):
            if self.b.is_instance_of(value, "char"):
                return f"'{p}'" if literal else p
            if self.b.is_instance_of(value, "logic"):
                return p
            return f'"{p}"' if literal else p
        if isinstance(p, list):
            decl_name = t.decl.name if isinstance(t, NominalType) else "array"
            inner = ", ".join(self.to_string(v, literal=True) for v in p)
            if decl_name == "tuple":
                return f"({inner})"
            return f"[{inner}]"
        if isinstance(p, CesnoDict):
            inner = ", ".join(
                f"{self.to_string(k, literal=True)}: {self.to_string(v, literal=True)}" for k, v in p.pairs
            )
            return "{" + inner + "}"
        if isinstance(p, CesnoSet):
            inner = ", ".join(self.to_string(v, literal=True) for v in p.items)
            if len(p.items) == 1:
                inner += ","
            return "{" + inner + "}"
        if isinstance(p, StringBufferData):
            return p.text()
        if isinstance(p, EnumValueData):
            prefix = f"#{p.member}" if p.enum_info.inline else f"{p.enum_info.name}.{p.member}"
            if p.payload:
                return prefix + "(" + ", ".join(self.to_string(v, literal=True) for v in p.payload) + ")"
            return prefix
        if isinstance(p, RegexData):
            return f"/{p.pattern}/{''.join(sorted(p.flags))}"
        if isinstance(p, InstanceData):
            info = p.class_info
            for cls in info.mro():
                if "toString" in cls.methods:
                    result = self.call_value(cls.methods["toString"][0].bind(value), [])
                    return result.payload if isinstance(result.payload, str) else str(result.payload)
            inner = ", ".join(f"{k}: {self.to_string(v, literal=True)}" for k, v in p.slots.items() if not k.startswith("__"))
            return f"{info.name}@{{{inner}}}"
        if isinstance(p, (ClassInfo, EnumInfo, TraitInfo)):
            return p.name
        if isinstance(p, (BuiltinCallable, UserFunction, Overloads, PartialFunction)):
            return f"<function {getattr(p, 'name', '?')}>"
        if isinstance(p, NamespaceValue):
            return f"<namespace {p.name}>"
        if isinstance(p, TypeAliasInfo):
            return p.name
        if isinstance(p, PendingEnumData):
            return f"#{p.member}"
        return str(p)
