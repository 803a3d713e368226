"""Type descriptors and the type-manipulation algebra.

A type is a class plus its generic arguments; generic arguments may be
types or compile-time constant values. Unions are flattened sets, literal
types carry a single constant, and `&`/`+`/`-` produce anonymous member
sets checked structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field


# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------


class TypeDescriptor:
    def display(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.display()


@dataclass(frozen=True, repr=False)
class VoidType(TypeDescriptor):
    def display(self) -> str:
        return "void"


@dataclass(frozen=True, repr=False)
class NullType(TypeDescriptor):
    def display(self) -> str:
        return "null"


@dataclass(frozen=True, repr=False)
class UndefinedType(TypeDescriptor):
    def display(self) -> str:
        return "undefined"


@dataclass(frozen=True, repr=False)
class AnyType(TypeDescriptor):
    def display(self) -> str:
        return "any"


VOID = VoidType()
NULL = NullType()
UNDEFINED = UndefinedType()
ANY = AnyType()


@dataclass(frozen=True, repr=False)
class NominalType(TypeDescriptor):
    decl: "Decl" = field(hash=False, compare=False)
    args: tuple = ()
    # identity of the declaration participates via its id
    decl_id: int = field(default=0, hash=True, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "decl_id", id(self.decl))

    def display(self) -> str:
        if not self.args:
            return self.decl.name
        inner = ", ".join(a.display() if isinstance(a, TypeDescriptor) else repr(a) for a in self.args)
        return f"{self.decl.name}<{inner}>"


@dataclass(frozen=True, repr=False)
class UnionType(TypeDescriptor):
    alternatives: frozenset[TypeDescriptor]

    def display(self) -> str:
        return "|".join(sorted(t.display() for t in self.alternatives))


@dataclass(frozen=True, repr=False)
class LiteralType(TypeDescriptor):
    base: TypeDescriptor
    value: object

    def display(self) -> str:
        if isinstance(self.value, str):
            return f'"{self.value}"'
        if isinstance(self.value, bool):
            return "true" if self.value else "false"
        return str(self.value)


@dataclass(frozen=True, repr=False)
class ParamSig:
    name: str
    type: TypeDescriptor
    variadic: bool = False
    optional: bool = False
    positional_only: bool = False
    keyword_only: bool = False


@dataclass(frozen=True, repr=False)
class FunctionType(TypeDescriptor):
    params: tuple[ParamSig, ...]
    ret: TypeDescriptor

    def display(self) -> str:
        inner = ", ".join(
            ("..." if p.variadic else "") + p.type.display() + ("?" if p.optional else "") for p in self.params
        )
        return f"({inner}) -> {self.ret.display()}"


@dataclass(frozen=True, repr=False)
class MemberSetType(TypeDescriptor):
    members: tuple[tuple[str, TypeDescriptor], ...]  # sorted by name

    def display(self) -> str:
        inner = ", ".join(f"{n}: {t.display()}" for n, t in self.members)
        return "{" + inner + "}"

    def member_map(self) -> dict[str, TypeDescriptor]:
        return dict(self.members)


@dataclass(frozen=True, repr=False)
class GenericRef(TypeDescriptor):
    """Reference to an enclosing generic parameter, e.g. `Lines`."""

    name: str

    def display(self) -> str:
        return self.name


@dataclass(frozen=True, repr=False)
class InferType(TypeDescriptor):
    """`infer Name` marker inside a parameter type."""

    name: str

    def display(self) -> str:
        return f"infer {self.name}"


@dataclass(frozen=True, repr=False)
class PendingEnumType(TypeDescriptor):
    """Type of a `#member` reference before its enum is known."""

    member: str
    has_args: bool = False

    def display(self) -> str:
        return f"#{self.member}"


@dataclass(frozen=True, repr=False)
class NamespaceType(TypeDescriptor):
    """Type of an imported package/module namespace."""

    name: str

    def display(self) -> str:
        return f"namespace {self.name}"


# ---------------------------------------------------------------------------
# Declarations (classes, enums, traits)
# ---------------------------------------------------------------------------


@dataclass
class GenericParam:
    name: str
    param_kind: str  # "type" or a value-type name like "usize"
    bound: TypeDescriptor | None = None
    default: object = None  # TypeDescriptor or const value

    @property
    def is_type_param(self) -> bool:
        return self.param_kind == "type"


@dataclass
class FieldInfo:
    name: str
    type: TypeDescriptor
    modifiers: tuple[str, ...] = ()

    @property
    def is_private(self) -> bool:
        return "public" not in self.modifiers

    @property
    def is_static(self) -> bool:
        return "static" in self.modifiers


@dataclass
class PropertyInfo:
    name: str
    type: TypeDescriptor
    modifiers: tuple[str, ...] = ()
    getters: list = field(default_factory=list)  # callable infos
    setters: list = field(default_factory=list)

    @property
    def is_private(self) -> bool:
        return "public" not in self.modifiers


class Decl:
    """Common surface of class/enum/trait declarations."""

    name: str
    kind: str

    def supertype(self) -> NominalType | None:
        return None

    def trait_types(self) -> list[NominalType]:
        return []


@dataclass
class ClassInfo(Decl):
    name: str
    kind: str = "class"
    generic_params: list[GenericParam] = field(default_factory=list)
    superclass: NominalType | None = None
    traits: list[NominalType] = field(default_factory=list)
    fields: dict[str, FieldInfo] = field(default_factory=dict)
    properties: dict[str, PropertyInfo] = field(default_factory=dict)
    methods: dict[str, list] = field(default_factory=dict)  # instance methods
    functions: dict[str, list] = field(default_factory=dict)  # statics
    constructors: list = field(default_factory=list)
    destructor: object = None
    operators: list = field(default_factory=list)  # OperatorInfo-like
    statics: dict[str, object] = field(default_factory=dict)
    type_aliases: dict[str, object] = field(default_factory=dict)
    field_inits: dict[str, object] = field(default_factory=dict)
    is_builtin: bool = False

    def supertype(self) -> NominalType | None:
        return self.superclass

    def trait_types(self) -> list[NominalType]:
        return self.traits

    def instance(self, *args) -> NominalType:
        return NominalType(self, tuple(args))

    def implements(self, trait: "Decl") -> bool:
        info: ClassInfo | None = self
        while info is not None:
            for t in info.traits:
                if t.decl is trait:
                    return True
            sup = info.superclass
            info = sup.decl if sup is not None else None
        return False

    def mro(self) -> list["ClassInfo"]:
        chain: list[ClassInfo] = []
        info: ClassInfo | None = self
        while info is not None:
            chain.append(info)
            sup = info.superclass
            info = sup.decl if sup is not None else None
        return chain

    def member_types(self, args: tuple = ()) -> dict[str, TypeDescriptor]:
        """Field, property, and method names with substituted types."""
        mapping = self._arg_mapping(args)
        out: dict[str, TypeDescriptor] = {}
        for info in reversed(self.mro()):
            for f in info.fields.values():
                out[f.name] = substitute(f.type, mapping)
            for p in info.properties.values():
                out[p.name] = substitute(p.type, mapping)
            for name, overloads in info.methods.items():
                if overloads:
                    out[name] = substitute(overloads[0].function_type(), mapping)
        return out

    def _arg_mapping(self, args: tuple) -> dict[str, object]:
        mapping: dict[str, object] = {}
        for i, gp in enumerate(self.generic_params):
            if i < len(args):
                mapping[gp.name] = args[i]
            elif gp.default is not None:
                mapping[gp.name] = gp.default
        return mapping


@dataclass
class EnumMemberInfo:
    name: str
    payload: list[ParamSig] | None = None  # None = plain member


@dataclass
class EnumInfo(Decl):
    name: str
    kind: str = "enum"
    members: dict[str, EnumMemberInfo] = field(default_factory=dict)
    inline: bool = False
    methods: dict[str, list] = field(default_factory=dict)
    properties: dict[str, PropertyInfo] = field(default_factory=dict)
    generic_params: list[GenericParam] = field(default_factory=list)

    def member_types(self, args: tuple = ()) -> dict[str, TypeDescriptor]:
        return {p.name: p.type for p in self.properties.values()}

    def instance(self) -> NominalType:
        return NominalType(self, ())


@dataclass
class TraitInfo(Decl):
    name: str
    kind: str = "trait"
    required_statics: dict[str, TypeDescriptor] = field(default_factory=dict)
    required_methods: dict[str, list] = field(default_factory=dict)
    generic_params: list[GenericParam] = field(default_factory=list)

    def member_types(self, args: tuple = ()) -> dict[str, TypeDescriptor]:
        return dict(self.required_statics)


@dataclass
class TypeAliasInfo:
    name: str
    generic_params: list[GenericParam]
    target: TypeDescriptor  # may contain GenericRef to own params

    def expand(self, args: tuple) -> TypeDescriptor:
        mapping: dict[str, object] = {}
        for i, gp in enumerate(self.generic_params):
            if i < len(args):
                mapping[gp.name] = args[i]
            elif gp.default is not None:
                mapping[gp.name] = gp.default
        return substitute(self.target, mapping)


# ---------------------------------------------------------------------------
# Substitution & inference
# ---------------------------------------------------------------------------


def substitute(desc: TypeDescriptor, mapping: dict[str, object]) -> TypeDescriptor:
    if not mapping:
        return desc
    if isinstance(desc, (GenericRef, InferType)):
        bound = mapping.get(desc.name)
        if bound is None:
            return desc
        return bound if isinstance(bound, TypeDescriptor) else LiteralType(ANY, bound)
    if isinstance(desc, NominalType):
        if not desc.args:
            return desc
        new_args = tuple(_subst_arg(a, mapping) for a in desc.args)
        return NominalType(desc.decl, new_args)
    if isinstance(desc, UnionType):
        return normalize_union([substitute(t, mapping) for t in desc.alternatives])
    if isinstance(desc, FunctionType):
        params = tuple(
            ParamSig(p.name, substitute(p.type, mapping), p.variadic, p.optional, p.positional_only, p.keyword_only)
            for p in desc.params
        )
        return FunctionType(params, substitute(desc.ret, mapping))
    if isinstance(desc, MemberSetType):
        return MemberSetType(tuple((n, substitute(t, mapping)) for n, t in desc.members))
    if isinstance(desc, LiteralType):
        return desc
    return desc


def _subst_arg(arg: object, mapping: dict[str, object]) -> object:
    if isinstance(arg, (GenericRef, InferType)):
        if arg.name in mapping:
            return mapping[arg.name]
        return arg
    if isinstance(arg, TypeDescriptor):
        return substitute(arg, mapping)
    return arg


class InferenceError(Exception):
    pass


def infer_generics(param: TypeDescriptor, arg: object, bindings: dict[str, object] | None = None) -> dict[str, object]:
    """Structurally unify `infer` markers in a parameter type with an argument."""
    bindings = bindings if bindings is not None else {}
    _unify(param, arg, bindings)
    return bindings


def _bind(name: str, value: object, bindings: dict[str, object]) -> None:
    if name in bindings:
        old = bindings[name]
        same = types_equal(old, value) if isinstance(old, TypeDescriptor) and isinstance(value, TypeDescriptor) else old == value
        if not same:
            raise InferenceError(f"conflicting bindings for {name}: {old!r} vs {value!r}")
    else:
        bindings[name] = value


def _unify(param: object, arg: object, bindings: dict[str, object]) -> None:
    if isinstance(param, InferType):
        _bind(param.name, arg, bindings)
        return
    if isinstance(param, GenericRef):
        # Unbound generic in parameter position also infers from the argument.
        _bind(param.name, arg, bindings)
        return
    if isinstance(param, NominalType) and isinstance(arg, NominalType):
        if param.decl is not arg.decl:
            if isinstance(param.decl, TraitInfo) and isinstance(arg.decl, ClassInfo) and arg.decl.implements(param.decl):
                return
            if isinstance(arg.decl, ClassInfo) and isinstance(param.decl, ClassInfo) and not param.args:
                if any(info is param.decl for info in arg.decl.mro()):
                    return
            raise InferenceError(f"{arg.display()} does not match {param.display()}")
        if not param.args:
            return
        p_args = param.args
        a_args = arg.args
        if len(p_args) != len(a_args):
            raise InferenceError(f"generic arity mismatch: {param.display()} vs {arg.display()}")
        for p, a in zip(p_args, a_args):
            _unify(p, a, bindings)
        return
    if isinstance(param, TypeDescriptor) and isinstance(arg, TypeDescriptor):
        if not is_assignable(arg, param):
            raise InferenceError(f"{arg.display()} does not match {param.display()}")
        return
    # const generic values
    if isinstance(param, TypeDescriptor) or isinstance(arg, TypeDescriptor):
        raise InferenceError(f"kind mismatch: {param!r} vs {arg!r}")
    if param != arg:
        raise InferenceError(f"constant mismatch: {param!r} vs {arg!r}")


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------


def normalize_union(alternatives) -> TypeDescriptor:
    """Flatten + dedupe; singleton collapses; `true|false` collapses to bool."""
    flat: list[TypeDescriptor] = []

    def add(t: TypeDescriptor) -> None:
        if isinstance(t, UnionType):
            for alt in t.alternatives:
                add(alt)
        else:
            if not any(types_equal(t, seen) for seen in flat):
                flat.append(t)

    for t in alternatives:
        add(t)
    if not flat:
        raise ValueError("empty union")
    if any(isinstance(t, AnyType) for t in flat):
        return ANY
    # Literal true | Literal false == their common bool base
    bools = [t for t in flat if isinstance(t, LiteralType) and isinstance(t.value, bool)]
    if len(bools) == 2 and types_equal(bools[0].base, bools[1].base):
        flat = [t for t in flat if t not in bools]
        flat.append(bools[0].base)
    # literal absorbed by its base when the base is present
    absorbed = []
    for t in flat:
        if isinstance(t, LiteralType) and any(types_equal(t.base, u) for u in flat if u is not t):
            continue
        if any(types_equal(t, seen) for seen in absorbed):
            continue
        absorbed.append(t)
    flat = absorbed
    if len(flat) == 1:
        return flat[0]
    return UnionType(frozenset(flat))


def strip_nullish(t: TypeDescriptor) -> TypeDescriptor | None:
    """Remove null/undefined alternatives; None if nothing remains."""
    if isinstance(t, (NullType, UndefinedType)):
        return None
    if isinstance(t, UnionType):
        rest = [a for a in t.alternatives if not isinstance(a, (NullType, UndefinedType))]
        if not rest:
            return None
        return normalize_union(rest)
    return t


def is_nullish(t: TypeDescriptor) -> bool:
    if isinstance(t, (NullType, UndefinedType)):
        return True
    if isinstance(t, UnionType):
        return any(isinstance(a, (NullType, UndefinedType)) for a in t.alternatives)
    return False


def types_equal(a: object, b: object) -> bool:
    if isinstance(a, TypeDescriptor) != isinstance(b, TypeDescriptor):
        return False
    if not isinstance(a, TypeDescriptor):
        return a == b
    if type(a) is not type(b):
        return False
    if isinstance(a, NominalType):
        if a.decl is not b.decl or len(a.args) != len(b.args):
            return False
        return all(types_equal(x, y) for x, y in zip(a.args, b.args))
    if isinstance(a, UnionType):
        if len(a.alternatives) != len(b.alternatives):
            return False
        return all(any(types_equal(x, y) for y in b.alternatives) for x in a.alternatives)
    if isinstance(a, LiteralType):
        return types_equal(a.base, b.base) and a.value == b.value and type(a.value) is type(b.value)
    if isinstance(a, FunctionType):
        if len(a.params) != len(b.params):
            return False
        for p, q in zip(a.params, b.params):
            if (p.variadic, p.optional, p.keyword_only) != (q.variadic, q.optional, q.keyword_only):
                return False
            if not types_equal(p.type, q.type):
                return False
        return types_equal(a.ret, b.ret)
    if isinstance(a, MemberSetType):
        return a.members == b.members or (
            len(a.members) == len(b.members)
            and all(
                n1 == n2 and types_equal(t1, t2) for (n1, t1), (n2, t2) in zip(a.members, b.members)
            )
        )
    if isinstance(a, (GenericRef, InferType, NamespaceType)):
        return a.name == b.name
    if isinstance(a, PendingEnumType):
        return a.member == b.member
    return True  # void/null/undefined/any singletons


def _object_decl(t: TypeDescriptor) -> bool:
    return isinstance(t, NominalType) and getattr(t.decl, "name", "") == "object" and getattr(t.decl, "is_builtin", False)


def member_map_of(t: TypeDescriptor) -> dict[str, TypeDescriptor] | None:
    if isinstance(t, MemberSetType):
        return t.member_map()
    if isinstance(t, NominalType) and hasattr(t.decl, "member_types"):
        return t.decl.member_types(t.args)
    if isinstance(t, LiteralType):
        return member_map_of(t.base)
    return None


def is_assignable(src: TypeDescriptor, dst: TypeDescriptor) -> bool:
    if isinstance(src, AnyType) or isinstance(dst, AnyType):
        return True
    if isinstance(src, (GenericRef, InferType)) or isinstance(dst, (GenericRef, InferType)):
        return True  # unresolved generic: defer to inference/runtime
    if types_equal(src, dst):
        return True
    if isinstance(src, UnionType):
        return all(is_assignable(a, dst) for a in src.alternatives)
    if isinstance(dst, UnionType):
        return any(is_assignable(src, a) for a in dst.alternatives)
    if isinstance(src, LiteralType):
        if isinstance(dst, LiteralType):
            return types_equal(src, dst)
        return is_assignable(src.base, dst)
    if isinstance(src, (NullType, UndefinedType)):
        return False  # unions already handled; bare null never assignable
    if isinstance(dst, (NullType, UndefinedType, VoidType)):
        return False
    if isinstance(src, VoidType):
        return False
    if _object_decl(dst):
        return True
    if isinstance(dst, MemberSetType):
        src_members = member_map_of(src)
        if src_members is None:
            return False
        for name, t in dst.member_map().items():
            if name not in src_members or not is_assignable(src_members[name], t):
                return False
        return True
    if isinstance(src, FunctionType) and isinstance(dst, FunctionType):
        from .callables import callback_compatible

        return callback_compatible(src, dst)
    if isinstance(src, NominalType) and isinstance(dst, NominalType):
        if isinstance(dst.decl, TraitInfo):
            if isinstance(src.decl, ClassInfo):
                return src.decl.implements(dst.decl)
            return False
        if isinstance(src.decl, ClassInfo) and isinstance(dst.decl, ClassInfo):
            for info in src.decl.mro():
                if info is dst.decl:
                    if not dst.args:
                        return True
                    if info is src.decl:
                        if len(src.args) != len(dst.args):
                            return False
                        return all(_generic_arg_compatible(x, y) for x, y in zip(src.args, dst.args))
                    return True  # supertype reference without checked args
            return False
        return src.decl is dst.decl
    if isinstance(src, PendingEnumType):
        if isinstance(dst, NominalType) and isinstance(dst.decl, EnumInfo):
            return src.member in dst.decl.members
        return False
    return False


def mentions_refs(t: object) -> bool:
    if isinstance(t, (GenericRef, InferType)):
        return True
    if isinstance(t, NominalType):
        return any(mentions_refs(a) for a in t.args)
    if isinstance(t, UnionType):
        return any(mentions_refs(a) for a in t.alternatives)
    if isinstance(t, FunctionType):
        return any(mentions_refs(p.type) for p in t.params) or mentions_refs(t.ret)
    if isinstance(t, LiteralType):
        return mentions_refs(t.base)
    return False


def _generic_arg_compatible(src_arg: object, dst_arg: object) -> bool:
    if isinstance(dst_arg, (GenericRef, InferType)) or isinstance(src_arg, (GenericRef, InferType)):
        return True  # unresolved slot: bound later by inference
    if isinstance(src_arg, TypeDescriptor) and isinstance(dst_arg, TypeDescriptor):
        if types_equal(src_arg, dst_arg):
            return True
        if mentions_refs(src_arg) or mentions_refs(dst_arg):
            return is_assignable(src_arg, dst_arg)
        return False
    return types_equal(src_arg, dst_arg)


def subclass_distance(src: TypeDescriptor, dst: TypeDescriptor) -> int | None:
    """Hierarchy distance for overload ranking; None when unrelated."""
    if types_equal(src, dst):
        return 0
    if isinstance(src, NominalType) and isinstance(dst, NominalType) and isinstance(src.decl, ClassInfo):
        for i, info in enumerate(src.decl.mro()):
            if info is dst.decl:
                return i
    return None


def intersect(a: TypeDescriptor, b: TypeDescriptor) -> MemberSetType:
    """Type-level `&`: members present in both with mutually assignable types."""
    ma = member_map_of(a) or {}
    mb = member_map_of(b) or {}
    out = []
    for name in sorted(set(ma) & set(mb)):
        ta, tb = ma[name], mb[name]
        if is_assignable(ta, tb) and is_assignable(tb, ta):
            out.append((name, ta))
    return MemberSetType(tuple(out))


class TypeOperationError(Exception):
    pass


def add_members(a: TypeDescriptor, b: TypeDescriptor) -> MemberSetType:
    """Type-level `+`: union of both member maps."""
    ma = member_map_of(a) or {}
    mb = member_map_of(b) or {}
    out = dict(ma)
    for name, t in mb.items():
        if name in out and not (is_assignable(out[name], t) and is_assignable(t, out[name])):
            raise TypeOperationError(f"member {name!r} has conflicting types in '+'")
        out[name] = t
    return MemberSetType(tuple(sorted(out.items())))


def subtract_members(a: TypeDescriptor, b: TypeDescriptor) -> MemberSetType:
    """Type-level `-`: a's members minus b's member names."""
    ma = member_map_of(a) or {}
    mb = member_map_of(b) or {}
    out = {name: t for name, t in ma.items() if name not in mb}
    return MemberSetType(tuple(sorted(out.items())))


def returnof(callable_obj, arg_types: list[TypeDescriptor]) -> TypeDescriptor:
    """Return type of the overload selected for the given argument types.

    A union argument distributes: the result is the union of the per-
    alternative return types.
    """
    from .callables import select_return_type

    union_index = next((i for i, t in enumerate(arg_types) if isinstance(t, UnionType)), None)
    if union_index is not None:
        results = []
        base = list(arg_types)
        for alt in arg_types[union_index].alternatives:
            base[union_index] = alt
            results.append(returnof(callable_obj, list(base)))
        return normalize_union(results)
    return select_return_type(callable_obj, arg_types)
