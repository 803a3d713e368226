"""Shared AST-to-semantics builders: type resolution, signatures, classes.

Both the static checker and the interpreter build the same ClassInfo /
Signature structures from declaration nodes; they differ only in how
names are looked up and how function bodies are represented, so those
parts are injected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import nodes as N
from .builtins import Builtins
from .callables import Parameter, Signature
from .types import (
    ANY,
    ClassInfo,
    EnumInfo,
    EnumMemberInfo,
    FieldInfo,
    GenericParam,
    GenericRef,
    InferType,
    LiteralType,
    NULL,
    NominalType,
    ParamSig,
    PropertyInfo,
    TraitInfo,
    TypeAliasInfo,
    TypeDescriptor,
    UNDEFINED,
    VOID,
    add_members,
    intersect,
    normalize_union,
    substitute,
    subtract_members,
)


class TypeResolutionError(Exception):
    def __init__(self, message: str, span=None):
        super().__init__(message)
        self.message = message
        self.span = span


SPECIAL_TYPE_NAMES = {"null": NULL, "undefined": UNDEFINED, "void": VOID, "any": ANY, "dynamic": ANY}


@dataclass
class TypeResolver:
    builtins: Builtins
    lookup: object  # fn(name) -> ClassInfo | EnumInfo | TraitInfo | TypeAliasInfo | TypeDescriptor | None
    generic_names: frozenset = frozenset()
    self_class: ClassInfo | None = None

    def with_generics(self, names) -> "TypeResolver":
        return TypeResolver(self.builtins, self.lookup, self.generic_names | frozenset(names), self.self_class)

    def with_self(self, info: ClassInfo) -> "TypeResolver":
        names = frozenset(gp.name for gp in info.generic_params)
        return TypeResolver(self.builtins, self.lookup, self.generic_names | names, info)

    # ------------------------------------------------------------------

    def resolve(self, t: N.TypeExpr) -> TypeDescriptor:
        if isinstance(t, N.TName):
            return self._resolve_name(t)
        if isinstance(t, N.TMember):
            return self._resolve_member(t)
        if isinstance(t, N.TUnion):
            return normalize_union([self.resolve(i) for i in t.items])
        if isinstance(t, N.TIntersect):
            out = self.resolve(t.items[0])
            for item in t.items[1:]:
                out = intersect(out, self.resolve(item))
            return out
        if isinstance(t, N.TAdd):
            return add_members(self.resolve(t.left), self.resolve(t.right))
        if isinstance(t, N.TSub):
            return subtract_members(self.resolve(t.left), self.resolve(t.right))
        if isinstance(t, N.TArray):
            return NominalType(self.builtins.classes["array"], (self.resolve(t.element),))
        if isinstance(t, N.TSeq):
            length = self.resolve_generic_arg(t.length)
            return NominalType(self.builtins.classes["sequence"], (self.resolve(t.element), length))
        if isinstance(t, N.TFunc):
            params = tuple(self._param_sig(p) for p in t.params)
            ret = self.resolve(t.ret) if t.ret is not None else ANY
            from .types import FunctionType

            return FunctionType(params, ret)
        if isinstance(t, N.TTuple):
            return NominalType(self.builtins.classes["tuple"], tuple(self.resolve(i) for i in t.items))
        if isinstance(t, N.TLiteral):
            return LiteralType(self._literal_base(t.value), t.value)
        if isinstance(t, N.TInfer):
            return InferType(t.name)
        if isinstance(t, N.TEnumInline):
            return NominalType(build_inline_enum(t, self))
        raise TypeResolutionError(f"unsupported type expression {t.node_kind()}", t.span)

    def _literal_base(self, value: object) -> TypeDescriptor:
        if isinstance(value, bool):
            return self.builtins.t("bool")
        if isinstance(value, int):
            return self.builtins.t("int")
        if isinstance(value, float):
            return self.builtins.t("float")
        if isinstance(value, str):
            return self.builtins.t("string")
        return ANY

    def _resolve_name(self, t: N.TName) -> TypeDescriptor:
        name = t.name
        if name in SPECIAL_TYPE_NAMES and t.generic_args is None:
            return SPECIAL_TYPE_NAMES[name]
        if name in ("SelfType", "ImplType", "ImplementerType"):
            if self.self_class is not None:
                args = tuple(GenericRef(gp.name) for gp in self.self_class.generic_params)
                return NominalType(self.self_class, args)
            return GenericRef(name)  # inside a trait: filled per implementer
        if name in self.generic_names and t.generic_args is None:
            return GenericRef(name)
        decl = self._find_decl(name)
        if decl is None:
            raise TypeResolutionError(f"unknown type {name!r}", t.span)
        args = tuple(self.resolve_generic_arg(a) for a in t.generic_args) if t.generic_args else ()
        if isinstance(decl, TypeAliasInfo):
            return decl.expand(args)
        if isinstance(decl, TypeDescriptor):
            return decl
        return NominalType(decl, self._align_args(decl, args, t))

    def _align_args(self, decl, args: tuple, t: N.TName) -> tuple:
        params = getattr(decl, "generic_params", [])
        if not args:
            return ()
        if t.generic_args and any(a.name for a in t.generic_args):
            by_name = {gp.name: i for i, gp in enumerate(params)}
            out: list = [None] * len(params)
            pos = 0
            for node, val in zip(t.generic_args, args):
                if node.name is not None:
                    if node.name not in by_name:
                        raise TypeResolutionError(f"unknown generic parameter {node.name!r}", t.span)
                    out[by_name[node.name]] = val
                else:
                    out[pos] = val
                    pos += 1
            for i, gp in enumerate(params):
                if out[i] is None and gp.default is not None:
                    out[i] = gp.default
            if any(v is None for v in out):
                raise TypeResolutionError(f"missing generic argument for {decl.name}", t.span)
            return tuple(out)
        if params and len(args) < len(params):
            args = args + tuple(
                gp.default for gp in params[len(args) :] if gp.default is not None
            )
        return args

    def _find_decl(self, name: str):
        canonical = self.builtins.aliases.get(name, name)
        found = self.lookup(name) if self.lookup is not None else None
        if found is not None:
            return found
        if canonical in self.builtins.classes:
            return self.builtins.classes[canonical]
        if name in self.builtins.traits:
            return self.builtins.traits[name]
        return None

    def _resolve_member(self, t: N.TMember) -> TypeDescriptor:
        # `SelfType.Columns` style access to an enclosing generic parameter
        if isinstance(t.base, N.TName) and t.base.name in ("SelfType", "ImplType", "ImplementerType"):
            return GenericRef(t.name)
        base = t.base
        if isinstance(base, N.TName):
            decl = self._find_decl(base.name)
            if isinstance(decl, ClassInfo) and t.name in decl.type_aliases:
                return decl.type_aliases[t.name].expand(())
        raise TypeResolutionError(f"cannot resolve type member {t.name!r}", t.span)

    def resolve_generic_arg(self, a: N.GenericArgNode) -> object:
        if a.is_const:
            return a.const_value
        if a.declares_name is not None:
            # declaration-style arg in implement headers: acts as a fresh generic
            return GenericRef(a.declares_name)
        if a.type_expr is not None:
            if isinstance(a.type_expr, N.TName) and a.type_expr.generic_args is None and a.type_expr.name in self.generic_names:
                return GenericRef(a.type_expr.name)
            return self.resolve(a.type_expr)
        raise TypeResolutionError("malformed generic argument", a.span)

    def _param_sig(self, p: N.ParameterNode) -> ParamSig:
        ptype = self.resolve(p.declared_type) if p.declared_type is not None else ANY
        if p.constraint is not None and p.declared_type is None:
            t = constraint_primary_type(p.constraint, self)
            if t is not None:
                ptype = t
        return ParamSig(p.name, ptype, p.variadic, p.optional, p.positional_only, p.keyword_only)


def constraint_primary_type(c: N.ConstraintNode, resolver: TypeResolver) -> TypeDescriptor | None:
    """The type a constraint narrows its parameter to, when it names one."""
    if isinstance(c, N.TypeCheck):
        return resolver.resolve(c.type_expr)
    if isinstance(c, N.ConstraintJoin) and c.op == "and":
        types = [constraint_primary_type(i, resolver) for i in c.items]
        types = [t for t in types if t is not None]
        if len(types) == 1:
            return types[0]
        if types:
            out = types[0]
            for t in types[1:]:
                out = intersect(out, t)
            return out
    return None


def build_generic_params(nodes: list[N.GenericParamNode], resolver: TypeResolver) -> list[GenericParam]:
    out = []
    names = [gp.name for gp in nodes]
    inner = resolver.with_generics(names)
    for gp in nodes:
        bound = inner.resolve(gp.bound) if gp.bound is not None else None
        default = None
        if gp.default is not None:
            if isinstance(gp.default, N.TypeExpr):
                default = inner.resolve(gp.default)
            elif isinstance(gp.default, N.Literal):
                default = gp.default.value.value if hasattr(gp.default.value, "value") else gp.default.value
        out.append(GenericParam(gp.name, gp.kind, bound, default))
    return out


def collect_infer_names(node) -> set[str]:
    """All `infer NAME` markers inside a type expression tree."""
    names: set[str] = set()

    def walk(value):
        if isinstance(value, N.TInfer):
            names.add(value.name)
        if isinstance(value, N.Node):
            for attr in vars(value).values():
                walk(attr)
        elif isinstance(value, (list, tuple)):
            for item in value:
                walk(item)

    walk(node)
    return names


def build_signature(
    func: N.FunctionDef,
    resolver: TypeResolver,
    extra_generics: list[GenericParam] | None = None,
) -> Signature:
    generics = [gp.name for gp in (extra_generics or [])]
    for p in func.params:
        if p.declared_type is not None:
            generics.extend(collect_infer_names(p.declared_type))
    r = resolver.with_generics(generics) if generics else resolver
    params = []
    for p in func.params:
        ptype = r.resolve(p.declared_type) if p.declared_type is not None else ANY
        constraint = p.constraint
        if constraint is not None and p.declared_type is None:
            named = constraint_primary_type(constraint, r)
            if named is not None:
                ptype = named
        params.append(
            Parameter(
                p.name,
                ptype,
                variadic=p.variadic,
                optional=p.optional,
                has_default=p.default is not None,
                positional_only=p.positional_only,
                keyword_only=p.keyword_only,
                constraint=constraint,
                default_expr=p.default,
            )
        )
    ret = r.resolve(func.return_type) if func.return_type is not None else ANY
    for c in func.constraints:
        if isinstance(c, N.ReturnsCheck):
            ret = r.resolve(c.type_expr)
        elif isinstance(c, N.ParamConstraint):
            for i, p in enumerate(params):
                if p.name == c.param_name:
                    named = constraint_primary_type(c.constraint, r)
                    params[i] = Parameter(
                        p.name,
                        named if named is not None and p.type is ANY else p.type,
                        variadic=p.variadic,
                        optional=p.optional,
                        has_default=p.has_default,
                        positional_only=p.positional_only,
                        keyword_only=p.keyword_only,
                        constraint=c.constraint,
                        default_expr=p.default_expr,
                    )
    is_method = func.kind in ("method", "getter", "setter", "operator", "constructor", "destructor")
    return Signature(tuple(params), ret, is_method)


def build_inline_enum(t: N.TEnumInline, resolver: TypeResolver) -> EnumInfo:
    info = EnumInfo("<inline>", inline=True)
    _fill_enum_members(info, t.members, resolver)
    return info


def _fill_enum_members(info: EnumInfo, members: list[N.EnumMemberNode], resolver: TypeResolver) -> None:
    for m in members:
        payload = None
        if m.payload is not None:
            payload = [resolver._param_sig(p) for p in m.payload]
        info.members[m.name] = EnumMemberInfo(m.name, payload)


def build_enum_info(node: N.EnumDef, resolver: TypeResolver) -> EnumInfo:
    info = EnumInfo(node.name)
    _fill_enum_members(info, node.members, resolver)
    return info


def build_trait_info(node: N.TraitDef, resolver: TypeResolver) -> TraitInfo:
    info = TraitInfo(node.name)
    r = TypeResolver(resolver.builtins, resolver.lookup, resolver.generic_names)
    for member in node.members:
        if isinstance(member, N.Declaration):
            t = r.resolve(member.declared_type) if member.declared_type is not None else ANY
            info.required_statics[member.name] = t
        elif isinstance(member, N.FunctionDef):
            sig = build_signature(member, r)
            info.required_methods.setdefault(member.name or member.kind, []).append(sig)
    return info


@dataclass
class OperatorInfo:
    symbol: str
    right_form: bool
    function: object  # exposes .signature


def build_class_info(
    node: N.ClassDef,
    resolver: TypeResolver,
    make_function,  # fn(func_node, kind, owner_info, resolver) -> object with .signature
    info: ClassInfo | None = None,
) -> ClassInfo:
    info = info if info is not None else ClassInfo(node.name)
    base_resolver = resolver
    info.generic_params = build_generic_params(node.generic_params, base_resolver)
    r = base_resolver.with_self(info)
    if node.inherits is not None:
        sup = r.resolve(node.inherits)
        if not isinstance(sup, NominalType) or not isinstance(sup.decl, ClassInfo):
            raise TypeResolutionError("a class can only inherit from a class", node.inherits.span)
        info.superclass = sup
    for t in node.implements:
        tr = r.resolve(t)
        if not isinstance(tr, NominalType) or not isinstance(tr.decl, TraitInfo):
            raise TypeResolutionError("'implements' requires a trait", t.span)
        info.traits.append(tr)
    fill_members(info, node.members, r, make_function)
    return info


def fill_members(info: ClassInfo, members: list[N.Node], r: TypeResolver, make_function, extra_mods: tuple[str, ...] = ()) -> None:
    for member in members:
        if isinstance(member, N.ModifierBlock):
            fill_members(info, member.statements, r, make_function, extra_mods + tuple(member.modifiers))
            continue
        if isinstance(member, N.Declaration):
            mods = tuple(member.modifiers) + extra_mods
            if member.qualified_trait is not None or "static" in mods:
                name = f"{member.qualified_trait}:{member.name}" if member.qualified_trait else member.name
                info.statics[name] = StaticDecl(name, mods, member)
                continue
            ftype = r.resolve(member.declared_type) if member.declared_type is not None else ANY
            info.fields[member.name] = FieldInfo(member.name, ftype, mods)
            if member.init is not None:
                info.field_inits[member.name] = member.init
            continue
        if isinstance(member, N.PropertyDecl):
            mods = tuple(member.modifiers) + extra_mods
            ptype = r.resolve(member.declared_type) if member.declared_type is not None else ANY
            prop = PropertyInfo(member.name, ptype, mods)
            for g in member.getters:
                prop.getters.append(make_function(g, "getter", info, r))
            for s in member.setters:
                prop.setters.append(make_function(s, "setter", info, r))
            info.properties[member.name] = prop
            continue
        if isinstance(member, N.FunctionDef):
            kind = member.kind
            fn = make_function(member, kind, info, r)
            if kind == "constructor":
                info.constructors.append(fn)
            elif kind == "destructor":
                info.destructor = fn
            elif kind == "function":
                info.functions.setdefault(member.name, []).append(fn)
            else:
                info.methods.setdefault(member.name, []).append(fn)
            continue
        if isinstance(member, N.OperatorDef):
            fn = make_function(member.func, "operator", info, r)
            info.operators.append(OperatorInfo(member.func.operator_symbol, member.func.operator_right, fn))
            continue
        if isinstance(member, N.TypeAliasDef):
            alias_generics = build_generic_params(member.generic_params, r)
            rr = r.with_generics([gp.name for gp in alias_generics])
            target = rr.resolve(member.target)
            info.type_aliases[member.name] = TypeAliasInfo(member.name, alias_generics, target)
            continue
        if isinstance(member, N.EnumDef):
            continue  # nested enums handled by the caller's scope
        raise TypeResolutionError(f"unsupported class member {member.node_kind()}", member.span)


@dataclass
class StaticDecl:
    name: str
    modifiers: tuple[str, ...]
    node: N.Declaration
    value: object = None  # filled by the interpreter on evaluation
