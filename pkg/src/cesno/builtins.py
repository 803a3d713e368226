"""Builtin types, functions, and traits installed into every root scope.

One registry instance is built once and shared: the table is immutable
after installation. Per-run state (streams, RNG, module cache) lives on
the interpreter, which builtin implementations receive as `interp`.
"""

from __future__ import annotations

import math
import os as _os
from dataclasses import dataclass, field

from .callables import Parameter, Signature
from .runtime import (
    BuiltinCallable,
    CesnoDict,
    CesnoSet,
    CesnoThrow,
    EnumValueData,
    ExitSignal,
    InstanceData,
    Overloads,
    UNDEFINED_VALUE,
    VOID_VALUE,
    Value,
    values_equal,
)
from .types import (
    ANY,
    ClassInfo,
    EnumInfo,
    EnumMemberInfo,
    FieldInfo,
    FunctionType,
    GenericParam,
    LiteralType,
    NominalType,
    ParamSig,
    PropertyInfo,
    TraitInfo,
    TypeDescriptor,
    UNDEFINED,
    UnionType,
    normalize_union,
)

INT_WIDTHS = {"int": 32, "long": 64, "byte": 8, "usize": 64}


@dataclass
class RegexData:
    pattern: str
    flags: frozenset[str]
    compiled: object


@dataclass
class StringBufferData:
    chunks: list[str] = field(default_factory=list)
    position: str = "end"
    at_index: int = 0

    def text(self) -> str:
        return "".join(self.chunks)


@dataclass
class FileData:
    path: str
    mode: str
    handle: object = None
    is_open: bool = True


class Builtins:
    """The assembled builtin registry."""

    def __init__(self):
        self.classes: dict[str, ClassInfo] = {}
        self.traits: dict[str, TraitInfo] = {}
        self.functions: dict[str, object] = {}
        self.aliases: dict[str, str] = {}
        self.globals: dict[str, Value] = {}
        self.errors: dict[str, ClassInfo] = {}
        self.type_class: ClassInfo | None = None

    # -- descriptor shortcuts -------------------------------------------

    def t(self, name: str, *args) -> NominalType:
        return NominalType(self.classes[name], tuple(args))

    def value_of_int(self, n: int, cls: str = "int") -> Value:
        return Value(self.t(cls), n)

    def value_of_float(self, x: float, cls: str = "float") -> Value:
        return Value(self.t(cls), x)

    def value_of_bool(self, b: bool) -> Value:
        return Value(self.t("bool"), b)

    def value_of_string(self, s: str) -> Value:
        return Value(self.t("string"), s)

    def value_of_char(self, c: str) -> Value:
        return Value(self.t("char"), c)

    def array_value(self, items: list[Value], elem: TypeDescriptor | None = None) -> Value:
        if elem is None:
            elem = normalize_union([v.type for v in items]) if items else ANY
        return Value(self.t("array", elem), items)

    def class_value(self, info: ClassInfo) -> Value:
        return Value(self.t("type"), info)

    def is_instance_of(self, value: Value, class_name: str) -> bool:
        t = value.type
        return isinstance(t, NominalType) and t.decl is self.classes.get(class_name)

    def numeric_class_names(self) -> tuple[str, ...]:
        return ("int", "long", "byte", "usize", "bigint", "float", "floatsg")

    def is_numeric(self, value: Value) -> bool:
        return isinstance(value.type, NominalType) and value.type.decl.name in self.numeric_class_names()

    def is_integer_kind(self, value: Value) -> bool:
        return isinstance(value.type, NominalType) and value.type.decl.name in ("int", "long", "byte", "usize", "bigint")

    def make_error(self, name: str, message: str) -> CesnoThrow:
        info = self.errors[name]
        data = InstanceData(info, (), {"message": self.value_of_string(message)})
        return CesnoThrow(Value(NominalType(info), data))


def _param(name: str, type_=ANY, **kw) -> Parameter:
    return Parameter(name, type_, **kw)


def _fn(name: str, params: list[Parameter], ret: TypeDescriptor, impl, pure: bool = True) -> BuiltinCallable:
    return BuiltinCallable(name, Signature(tuple(params), ret), impl, pure=pure)


def build_builtins() -> Builtins:
    b = Builtins()

    # -- trait scaffolding ----------------------------------------------
    equal_trait = TraitInfo("Equal")
    addable_trait = TraitInfo("Addable")
    lengthwise_trait = TraitInfo("Lengthwise")
    hasfalsy_trait = TraitInfo("HasFalsy")
    b.traits = {
        "Equal": equal_trait,
        "Addable": addable_trait,
        "Lengthwise": lengthwise_trait,
        "HasFalsy": hasfalsy_trait,
    }

    def new_class(name: str, generic_params: list[GenericParam] | None = None, traits: list[TraitInfo] | None = None, superclass: NominalType | None = None) -> ClassInfo:
        info = ClassInfo(name, is_builtin=True, generic_params=generic_params or [])
        info.traits = [NominalType(t) for t in (traits or [])]
        info.superclass = superclass
        b.classes[name] = info
        return info

    obj = new_class("object")
    obj_t = NominalType(obj)

    value_traits = [equal_trait, addable_trait]
    for name in ("int", "long", "byte", "usize", "bigint", "float", "floatsg"):
        new_class(name, traits=value_traits, superclass=obj_t)
    new_class("bool", traits=[equal_trait], superclass=obj_t)
    new_class("logic", traits=[equal_trait], superclass=obj_t)
    new_class("char", traits=[equal_trait], superclass=obj_t)
    new_class("string", traits=[equal_trait, addable_trait, lengthwise_trait], superclass=obj_t)
    container_traits = [equal_trait, lengthwise_trait]
    new_class("tuple", traits=container_traits, superclass=obj_t)
    new_class("array", [GenericParam("ElementType", "type")], container_traits, obj_t)
    new_class("list", [GenericParam("ElementType", "type")], container_traits, obj_t)
    new_class("sequence", [GenericParam("EleType", "type"), GenericParam("SelfLength", "usize")], container_traits, obj_t)
    new_class("dictionary", [GenericParam("KeyType", "type"), GenericParam("ValueType", "type")], container_traits, obj_t)
    new_class("set", [GenericParam("EleType", "type")], container_traits, obj_t)
    new_class("regex", superclass=obj_t)
    new_class("StringBuffer", traits=[lengthwise_trait], superclass=obj_t)
    new_class("File", superclass=obj_t)
    new_class("Date", traits=[equal_trait], superclass=obj_t)
    new_class("WalkEntry", superclass=obj_t)
    new_class("StdInStream", superclass=obj_t)
    new_class("StdOutStream", superclass=obj_t)
    type_class = new_class("type", superclass=obj_t)
    b.type_class = type_class

    b.aliases = {
        "i32": "int",
        "i64": "long",
        "i8": "byte",
        "f64": "float",
        "f32": "floatsg",
        "seq": "sequence",
        "dict": "dictionary",
    }

    T_INT = b.t("int")
    T_FLOAT = b.t("float")
    T_BOOL = b.t("bool")
    T_CHAR = b.t("char")
    T_STRING = b.t("string")
    T_VOID_RET = b.t("object")  # placeholder where no better type exists

    from .types import VOID

    # -- error classes ----------------------------------------------------
    error_cls = new_class("Error")
    error_cls.fields["message"] = FieldInfo("message", T_STRING, ("public",))
    error_t = NominalType(error_cls)
    b.errors["Error"] = error_cls
    for name in (
        "TypeError",
        "ValueError",
        "OverflowError",
        "DivisionByZeroError",
        "MatchError",
        "ConstraintNotFulfilledError",
        "InputError",
        "FileError",
        "IndexError",
        "KeyError",
        "ParseError",
        "AssertionError",
        "UndefinedError",
        "ImportError",
    ):
        sub = new_class(name, superclass=error_t)
        sub.fields["message"] = FieldInfo("message", T_STRING, ("public",))
        b.errors[name] = sub

    def error_ctor_impl(info: ClassInfo):
        def impl(interp, self_value, bound):
            msg = bound.get("message", UNDEFINED_VALUE)
            text = msg.payload if isinstance(msg.payload, str) else info.name
            data = InstanceData(info, (), {"message": b.value_of_string(text)})
            return Value(NominalType(info), data)

        return impl

    for name, info in list(b.errors.items()):
        info.constructors = [
            _fn(name, [_param("message", T_STRING, optional=True)], NominalType(info), error_ctor_impl(info))
        ]

    # ----------------------------------------------------------------
    # numeric constructors & helpers
    # ----------------------------------------------------------------

    def parse_int_text(text: str, ratio: int) -> int:
        s = text.strip()
        sign = 1
        if s.startswith(("+", "-")):
            if s[0] == "-":
                sign = -1
            s = s[1:]
        prefix = {16: "0x", 8: "0o", 2: "0b"}.get(ratio)
        if prefix and s.lower().startswith(prefix):
            s = s[2:]
        if not s:
            raise b.make_error("ParseError", f"cannot parse {text!r} as an integer with ratio {ratio}")
        try:
            return sign * int(s, ratio)
        except ValueError:
            raise b.make_error("ParseError", f"cannot parse {text!r} as an integer with ratio {ratio}") from None

    def check_int_range(n: int, cls: str) -> int:
        width = INT_WIDTHS[cls]
        lo, hi = -(2 ** (width - 1)), 2 ** (width - 1) - 1
        if cls == "usize":
            lo, hi = 0, 2**width - 1
        if not lo <= n <= hi:
            raise b.make_error("OverflowError", f"value {n} does not fit {cls}")
        return n

    b.parse_int_text = parse_int_text
    b.check_int_range = check_int_range

    def int_ctor_for(cls_name: str):
        t_out = b.t(cls_name)

        def from_string(interp, self_value, bound):
            ratio_v = bound.get("ratio")
            ratio = ratio_v.payload if ratio_v is not None and ratio_v is not UNDEFINED_VALUE else 10
            n = parse_int_text(bound["value"].payload, ratio)
            if cls_name != "bigint":
                check_int_range(n, cls_name)
            return Value(t_out, n)

        def from_number(interp, self_value, bound):
            payload = bound["value"].payload
            n = int(payload)  # truncation toward zero
            if cls_name != "bigint":
                check_int_range(n, cls_name)
            return Value(t_out, n)

        numeric_t = normalize_union([b.t(n) for n in b.numeric_class_names()])
        return [
            _fn(cls_name, [_param("value", T_STRING), _param("ratio", T_INT, keyword_only=True, has_default=True, default_expr=Value(T_INT, 10))], t_out, from_string),
            _fn(cls_name, [_param("value", numeric_t)], t_out, from_number),
        ]

    for cls_name in ("int", "long", "byte", "usize", "bigint"):
        b.classes[cls_name].constructors = int_ctor_for(cls_name)

    def float_ctor_for(cls_name: str):
        t_out = b.t(cls_name)

        def from_any(interp, self_value, bound):
            payload = bound["value"].payload
            if isinstance(payload, str):
                try:
                    x = float(payload.strip())
                except ValueError:
                    raise b.make_error("ParseError", f"cannot parse {payload!r} as a float") from None
            else:
                x = float(payload)
            return Value(t_out, x)

        return [_fn(cls_name, [_param("value")], t_out, from_any)]

    b.classes["float"].constructors = float_ctor_for("float")
    b.classes["floatsg"].constructors = float_ctor_for("floatsg")

    def string_ctor(interp, self_value, bound):
        return b.value_of_string(interp.to_string(bound["value"]))

    b.classes["string"].constructors = [_fn("string", [_param("value")], T_STRING, string_ctor)]

    def bool_ctor(interp, self_value, bound):
        v = bound["value"]
        if isinstance(v.payload, bool):
            return b.value_of_bool(v.payload)
        raise b.make_error("TypeError", "bool() accepts only bool values; there is no implicit conversion")

    b.classes["bool"].constructors = [_fn("bool", [_param("value")], T_BOOL, bool_ctor)]

    def char_ctor(interp, self_value, bound):
        v = bound["value"]
        if isinstance(v.payload, str) and len(v.payload) == 1:
            return b.value_of_char(v.payload)
        raise b.make_error("ValueError", "char() requires a single-character string")

    b.classes["char"].constructors = [_fn("char", [_param("value", T_STRING)], T_CHAR, char_ctor)]

    # ----------------------------------------------------------------
    # string & char methods
    # ----------------------------------------------------------------

    string_cls = b.classes["string"]

    def add_method(info: ClassInfo, fn: BuiltinCallable, aliases: tuple[str, ...] = ()) -> None:
        for name in (fn.name, *aliases):
            named = fn if name == fn.name else BuiltinCallable(name, fn.signature, fn.impl, pure=fn.pure)
            info.methods.setdefault(name, []).append(named)

    def add_length_property(info: ClassInfo, getter) -> None:
        info.properties["length"] = PropertyInfo(
            "length", T_INT, ("public",), getters=[_fn("length", [], T_INT, getter)], setters=[]
        )

    def str_is_integer(interp, self_value, bound):
        ratio_v = bound.get("ratio")
        ratio = ratio_v.payload if ratio_v is not None and ratio_v is not UNDEFINED_VALUE else 10
        try:
            parse_int_text(self_value.payload, ratio)
            return b.value_of_bool(True)
        except CesnoThrow:
            return b.value_of_bool(False)

    add_method(
        string_cls,
        _fn("isInteger", [_param("ratio", T_INT, keyword_only=True, has_default=True, default_expr=Value(T_INT, 10))], T_BOOL, str_is_integer),
    )
    add_method(string_cls, _fn("trim", [], T_STRING, lambda i, s, a: b.value_of_string(s.payload.strip())))
    add_method(string_cls, _fn("toUpperCase", [], T_STRING, lambda i, s, a: b.value_of_string(s.payload.upper())))
    add_method(string_cls, _fn("toLowerCase", [], T_STRING, lambda i, s, a: b.value_of_string(s.payload.lower())))

    def str_split(interp, s, bound):
        sep = bound["separator"].payload
        parts = s.payload.split(sep) if sep else list(s.payload)
        return b.array_value([b.value_of_string(p) for p in parts], T_STRING)

    add_method(string_cls, _fn("split", [_param("separator", T_STRING)], b.t("array", T_STRING), str_split))

    def str_starts(interp, s, bound):
        prefixes = [v.payload for v in bound["prefixes"]]
        return b.value_of_bool(any(s.payload.startswith(p) for p in prefixes))

    def str_ends(interp, s, bound):
        suffixes = [v.payload for v in bound["suffixes"]]
        return b.value_of_bool(any(s.payload.endswith(p) for p in suffixes))

    add_method(string_cls, _fn("startsWith", [_param("prefixes", T_STRING, variadic=True)], T_BOOL, str_starts), aliases=("beginsWith",))
    add_method(string_cls, _fn("endsWith", [_param("suffixes", T_STRING, variadic=True)], T_BOOL, str_ends), aliases=("endWith",))
    add_length_property(string_cls, lambda i, s, a: b.value_of_int(len(s.payload)))

    char_cls = b.classes["char"]

    def char_after(interp, s, bound):
        offset = bound["offset"].payload
        return b.value_of_char(chr(ord(s.payload) + offset))

    add_method(char_cls, _fn("charAfter", [_param("offset", T_INT)], T_CHAR, char_after))

    # ----------------------------------------------------------------
    # containers
    # ----------------------------------------------------------------

    mapper_t = FunctionType(
        (
            ParamSig("element", ANY),
            ParamSig("index", T_INT, optional=True),
            ParamSig("this_arr", ANY, optional=True),
        ),
        ANY,
    )
    reducer_t = FunctionType((ParamSig("accumulated", ANY), ParamSig("element", ANY)), ANY)

    def linear_items(value: Value) -> list[Value]:
        return value.payload

    def arr_map(interp, self_value, bound):
        fn = bound["mapper"]
        items = linear_items(self_value)
        out = []
        for idx, item in enumerate(items):
            out.append(interp.call_callback(fn, [item, b.value_of_int(idx), self_value]))
        return b.array_value(out)

    def arr_foreach(interp, self_value, bound):
        fn = bound["action"]
        for idx, item in enumerate(linear_items(self_value)):
            interp.call_callback(fn, [item, b.value_of_int(idx), self_value])
        return VOID_VALUE

    def arr_reduce(interp, self_value, bound):
        return _reduce_impl(interp, self_value, bound, reverse=False)

    def arr_reduce_reverse(interp, self_value, bound):
        return _reduce_impl(interp, self_value, bound, reverse=True)

    def _reduce_impl(interp, self_value, bound, reverse: bool):
        fn = bound["reducer"]
        items = list(linear_items(self_value))
        if reverse:
            items.reverse()
        initial = bound.get("initial")
        if initial is None or initial is UNDEFINED_VALUE:
            if not items:
                raise b.make_error("ValueError", "reduce of an empty container with no initial value")
            acc = items[0]
            rest = items[1:]
        else:
            acc = initial
            rest = items
        for item in rest:
            acc = interp.call_callback(fn, [acc, item])
        return acc

    sort_algo_enum = EnumInfo(
        "algorithm",
        members={
            "quick": EnumMemberInfo("quick"),
            "merge": EnumMemberInfo("merge"),
            "insertion": EnumMemberInfo("insertion"),
        },
        inline=True,
    )
    merge_default = Value(NominalType(sort_algo_enum), EnumValueData(sort_algo_enum, "merge"))

    def cmp_lt(interp, x: Value, y: Value) -> bool:
        res = interp.binary_op("<", x, y)
        if not isinstance(res.payload, bool):
            raise b.make_error("TypeError", "sort comparison did not produce a bool")
        return res.payload

    def _quick_sort(interp, items: list[Value]) -> list[Value]:
        if len(items) <= 1:
            return items
        pivot = items[len(items) // 2]
        less, equal, greater = [], [], []
        for it in items:
            if cmp_lt(interp, it, pivot):
                less.append(it)
            elif cmp_lt(interp, pivot, it):
                greater.append(it)
            else:
                equal.append(it)
        return _quick_sort(interp, less) + equal + _quick_sort(interp, greater)

    def _merge_sort(interp, items: list[Value]) -> list[Value]:
        if len(items) <= 1:
            return items
        mid = len(items) // 2
        left = _merge_sort(interp, items[:mid])
        right = _merge_sort(interp, items[mid:])
        out = []
        i = j = 0
        while i < len(left) and j < len(right):
            if cmp_lt(interp, right[j], left[i]):
                out.append(right[j])
                j += 1
            else:
                out.append(left[i])
                i += 1
        out.extend(left[i:])
        out.extend(right[j:])
        return out

    def _insertion_sort(interp, items: list[Value]) -> list[Value]:
        out: list[Value] = []
        for item in items:
            pos = len(out)
            while pos > 0 and cmp_lt(interp, item, out[pos - 1]):
                pos -= 1
            out.insert(pos, item)
        return out

    def arr_sort(interp, self_value, bound):
        algo_v = bound.get("algorithm")
        algo = "merge"
        if algo_v is not None and algo_v is not UNDEFINED_VALUE and isinstance(algo_v.payload, EnumValueData):
            algo = algo_v.payload.member
        items = linear_items(self_value)
        sorter = {"quick": _quick_sort, "merge": _merge_sort, "insertion": _insertion_sort}[algo]
        items[:] = sorter(interp, list(items))
        return self_value  # sort changes the container itself and returns self

    def arr_push(interp, self_value, bound):
        linear_items(self_value).append(bound["element"])
        return self_value

    def arr_pop(interp, self_value, bound):
        items = linear_items(self_value)
        if not items:
            raise b.make_error("IndexError", "pop from an empty container")
        return items.pop()

    def arr_append_head(interp, self_value, bound):
        linear_items(self_value).insert(0, bound["element"])
        return self_value

    for cls_name in ("array", "list", "sequence"):
        info = b.classes[cls_name]
        self_t = NominalType(info)
        add_method(info, _fn("map", [_param("mapper", mapper_t)], b.t("array"), arr_map, pure=False))
        add_method(info, _fn("foreach", [_param("action", mapper_t)], VOID, arr_foreach, pure=False), aliases=("forEach",))
        add_method(
            info,
            _fn("reduce", [_param("reducer", reducer_t), _param("initial", ANY, optional=True)], ANY, arr_reduce, pure=False),
            aliases=("fold",),
        )
        add_method(
            info,
            _fn("reduceReverse", [_param("reducer", reducer_t), _param("initial", ANY, optional=True)], ANY, arr_reduce_reverse, pure=False),
            aliases=("foldr",),
        )
        add_length_property(info, lambda i, s, a: b.value_of_int(len(s.payload)))
        if cls_name != "sequence":
            add_method(
                info,
                _fn(
                    "sort",
                    [_param("algorithm", NominalType(sort_algo_enum), keyword_only=True, has_default=True, default_expr=merge_default)],
                    self_t,
                    arr_sort,
                    pure=False,
                ),
            )
            add_method(info, _fn("push", [_param("element")], self_t, arr_push, pure=False), aliases=("append",))
            add_method(info, _fn("pop", [], ANY, arr_pop, pure=False))
            add_method(info, _fn("appendHead", [_param("element")], self_t, arr_append_head, pure=False))

    tuple_cls = b.classes["tuple"]
    add_length_property(tuple_cls, lambda i, s, a: b.value_of_int(len(s.payload)))

    dict_cls = b.classes["dictionary"]

    def dict_has(interp, self_value, bound):
        return b.value_of_bool(self_value.payload.find(bound["key"]) >= 0)

    def dict_keys(interp, self_value, bound):
        return b.array_value(self_value.payload.keys())

    def dict_values(interp, self_value, bound):
        return b.array_value(self_value.payload.values())

    add_method(dict_cls, _fn("has", [_param("key")], T_BOOL, dict_has))
    add_method(dict_cls, _fn("keys", [], b.t("array"), dict_keys))
    add_method(dict_cls, _fn("values", [], b.t("array"), dict_values))
    add_length_property(dict_cls, lambda i, s, a: b.value_of_int(len(s.payload)))

    set_cls = b.classes["set"]
    add_method(set_cls, _fn("add", [_param("element")], NominalType(set_cls), lambda i, s, a: (s.payload.add(a["element"]), s)[1], pure=False))

    def set_remove(interp, self_value, bound):
        if not self_value.payload.remove(bound["element"]):
            raise b.make_error("KeyError", "element not in set")
        return self_value

    add_method(set_cls, _fn("remove", [_param("element")], NominalType(set_cls), set_remove, pure=False))
    add_length_property(set_cls, lambda i, s, a: b.value_of_int(len(s.payload)))

    # ----------------------------------------------------------------
    # regex
    # ----------------------------------------------------------------

    regex_cls = b.classes["regex"]

    def regex_test(interp, self_value, bound):
        data: RegexData = self_value.payload
        return b.value_of_bool(data.compiled.search(bound["text"].payload) is not None)

    add_method(regex_cls, _fn("test", [_param("text", T_STRING)], T_BOOL, regex_test))

    # ----------------------------------------------------------------
    # StringBuffer
    # ----------------------------------------------------------------

    sb_cls = b.classes["StringBuffer"]
    position_enum = EnumInfo(
        "position",
        members={
            "start": EnumMemberInfo("start"),
            "end": EnumMemberInfo("end"),
            "at": EnumMemberInfo("at", [ParamSig("index", T_INT)]),
        },
        inline=True,
    )
    end_default = Value(NominalType(position_enum), EnumValueData(position_enum, "end"))

    def sb_ctor(interp, self_value, bound):
        pos_v = bound.get("position")
        data = StringBufferData()
        if pos_v is not None and pos_v is not UNDEFINED_VALUE and isinstance(pos_v.payload, EnumValueData):
            data.position = pos_v.payload.member
            if data.position == "at" and pos_v.payload.payload:
                data.at_index = pos_v.payload.payload[0].payload
        return Value(NominalType(sb_cls), data)

    sb_cls.constructors = [
        _fn(
            "StringBuffer",
            [
                _param("init_size", T_INT, optional=True),
                _param("position", NominalType(position_enum), keyword_only=True, has_default=True, default_expr=end_default),
            ],
            NominalType(sb_cls),
            sb_ctor,
        )
    ]

    def sb_render(interp, value: Value) -> str:
        if isinstance(value.payload, str):
            return value.payload
        if isinstance(value.payload, bool):
            return "true" if value.payload else "false"
        if isinstance(value.payload, (int, float)):
            return interp.to_string(value)
        raise b.make_error("TypeError", "StringBuffer accepts char, int, or string pieces")

    appendable = normalize_union([T_CHAR, T_INT, T_STRING, T_FLOAT])

    def sb_append(interp, self_value, bound):
        data: StringBufferData = self_value.payload
        text = sb_render(interp, bound["piece"])
        if data.position == "start":
            data.chunks.insert(0, text)
        else:
            data.chunks.append(text)
        return self_value

    def sb_append_head(interp, self_value, bound):
        data: StringBufferData = self_value.payload
        data.chunks.insert(0, sb_render(interp, bound["piece"]))
        return self_value

    add_method(sb_cls, _fn("append", [_param("piece", appendable)], NominalType(sb_cls), sb_append, pure=False))
    add_method(sb_cls, _fn("appendHead", [_param("piece", appendable)], NominalType(sb_cls), sb_append_head, pure=False))
    add_method(sb_cls, _fn("toString", [], T_STRING, lambda i, s, a: b.value_of_string(s.payload.text())))
    add_length_property(sb_cls, lambda i, s, a: b.value_of_int(len(s.payload.text())))

    # ----------------------------------------------------------------
    # files
    # ----------------------------------------------------------------

    file_cls = b.classes["File"]
    mode_enum = EnumInfo(
        "mode",
        members={
            "read": EnumMemberInfo("read"),
            "write": EnumMemberInfo("write"),
            "append": EnumMemberInfo("append"),
            "read_append": EnumMemberInfo("read_append"),
        },
        inline=True,
    )
    read_default = Value(NominalType(mode_enum), EnumValueData(mode_enum, "read"))

    def file_require_open(data: FileData) -> None:
        if not data.is_open:
            raise b.make_error("FileError", f"file {data.path!r} is closed")

    def open_impl(interp, self_value, bound):
        path = _os.path.expanduser(bound["path"].payload)
        mode_v = bound.get("mode")
        mode = "read"
        if mode_v is not None and mode_v is not UNDEFINED_VALUE and isinstance(mode_v.payload, EnumValueData):
            mode = mode_v.payload.member
        py_mode = {"read": "r", "write": "w", "append": "a", "read_append": "a+"}[mode]
        try:
            handle = open(path, py_mode, encoding="utf-8")
        except OSError as exc:
            raise b.make_error("FileError", f"cannot open {path!r}: {exc}") from None
        data = InstanceData(file_cls, (), {})
        native = FileData(path, mode, handle)
        data.slots["__file"] = Value(ANY, native)
        return Value(NominalType(file_cls), data)

    def file_native(self_value: Value) -> FileData:
        return self_value.payload.slots["__file"].payload

    def file_lines_getter(interp, self_value, bound):
        data = file_native(self_value)
        file_require_open(data)
        data.handle.seek(0)
        lines = data.handle.read().splitlines()
        return b.array_value([b.value_of_string(line) for line in lines], T_STRING)

    file_cls.properties["lines"] = PropertyInfo(
        "lines", b.t("array", T_STRING), ("public",), getters=[_fn("lines", [], b.t("array", T_STRING), file_lines_getter)], setters=[]
    )

    def file_append(interp, self_value, bound):
        data = file_native(self_value)
        file_require_open(data)
        data.handle.seek(0, _os.SEEK_END)
        data.handle.write(bound["text"].payload)
        data.handle.flush()
        return VOID_VALUE

    def file_close(interp, self_value, bound):
        data = file_native(self_value)
        if data.is_open:
            data.handle.close()
            data.is_open = False
        return VOID_VALUE

    add_method(file_cls, _fn("append", [_param("text", T_STRING)], VOID, file_append, pure=False))
    add_method(file_cls, _fn("close", [], VOID, file_close, pure=False))
    file_cls.destructor = _fn("destructor", [], VOID, file_close, pure=False)

    # ----------------------------------------------------------------
    # Date stub: construction and equality only
    # ----------------------------------------------------------------

    date_cls = b.classes["Date"]

    def date_ctor(interp, self_value, bound):
        label = bound.get("label", UNDEFINED_VALUE)
        text = label.payload if isinstance(label.payload, str) else ""
        data = InstanceData(date_cls, (), {"label": b.value_of_string(text)})
        return Value(NominalType(date_cls), data)

    date_cls.constructors = [_fn("Date", [_param("label", T_STRING, optional=True)], NominalType(date_cls), date_ctor)]

    # ----------------------------------------------------------------
    # WalkEntry for os.walk
    # ----------------------------------------------------------------

    walk_cls = b.classes["WalkEntry"]
    walk_cls.fields["name"] = FieldInfo("name", T_STRING, ("public",))
    walk_cls.fields["path"] = FieldInfo("path", T_STRING, ("public",))
    walk_cls.fields["line_count"] = FieldInfo("line_count", T_INT, ("public",))

    # ----------------------------------------------------------------
    # global functions
    # ----------------------------------------------------------------

    def print_impl(interp, self_value, bound):
        pieces = [interp.to_string(v) for v in bound["values"]]
        out = []
        for i, piece in enumerate(pieces):
            if i > 0 and out and not out[-1][-1:].isspace() and not piece[:1].isspace():
                out.append(" ")
            out.append(piece)
        interp.stdout.write("".join(out) + "\n")
        return VOID_VALUE

    b.functions["print"] = _fn("print", [_param("values", ANY, variadic=True)], VOID, print_impl, pure=False)

    onfail_enum = EnumInfo(
        "on_fail",
        members={
            "redo": EnumMemberInfo("redo", [ParamSig("message", T_STRING)]),
            "throw": EnumMemberInfo("throw"),
            "return_undefined": EnumMemberInfo("return_undefined"),
        },
        inline=True,
    )

    def input_impl(interp, self_value, bound):
        fmt = bound.get("format")
        if fmt is not None and fmt is not UNDEFINED_VALUE:
            raise b.make_error(
                "TypeError",
                "E_UNSUPPORTED_FEATURE: the 'format=' structured-input mini-language is not implemented",
            )
        prompt = "".join(v.payload for v in bound["prompt"])
        check = bound.get("check")
        on_fail = bound.get("on_fail")
        while True:
            interp.stdout.write(prompt)
            interp.stdout.flush()
            line = interp.stdin.readline()
            if line == "":
                raise b.make_error("InputError", "end of input stream")
            line = line.rstrip("\n")
            if check is None or check is UNDEFINED_VALUE:
                return b.value_of_string(line)
            ok = _run_input_check(interp, check, line)
            if ok:
                return b.value_of_string(line)
            member = on_fail.payload.member if on_fail is not None and on_fail is not UNDEFINED_VALUE else "throw"
            if member == "redo":
                message = on_fail.payload.payload[0].payload if on_fail.payload.payload else ""
                interp.stdout.write(message)
                continue
            if member == "return_undefined":
                return UNDEFINED_VALUE
            raise b.make_error("InputError", f"input {line!r} did not pass the check")

    def _run_input_check(interp, check: Value, line: str) -> bool:
        if isinstance(check.payload, RegexData):
            return check.payload.compiled.search(line) is not None
        result = interp.call_callback(check, [b.value_of_string(line)])
        if not isinstance(result.payload, bool):
            raise b.make_error("TypeError", "input check must return a bool")
        return result.payload

    check_t = normalize_union([mapper_t, NominalType(regex_cls)])
    b.functions["input"] = _fn(
        "input",
        [
            _param("prompt", T_STRING, variadic=True),
            _param("check", check_t, keyword_only=True, optional=True),
            _param("on_fail", NominalType(onfail_enum), keyword_only=True, optional=True),
            _param("format", T_STRING, keyword_only=True, optional=True),
        ],
        T_STRING,
        input_impl,
        pure=False,
    )
    b.input_onfail_enum = onfail_enum

    b.functions["open"] = _fn(
        "open",
        [
            _param("path", T_STRING),
            _param("mode", NominalType(mode_enum), keyword_only=True, has_default=True, default_expr=read_default),
        ],
        NominalType(file_cls),
        open_impl,
        pure=False,
    )

    def sorted_impl(interp, self_value, bound):
        items = list(bound["data"].payload)
        return b.array_value(_merge_sort(interp, items))

    def reversed_impl(interp, self_value, bound):
        return b.array_value(list(reversed(bound["data"].payload)))

    linear_t = normalize_union([b.t("array"), b.t("list"), b.t("sequence"), b.t("tuple")])
    b.functions["sorted"] = _fn("sorted", [_param("data", linear_t)], b.t("array"), sorted_impl)
    b.functions["reversed"] = _fn("reversed", [_param("data", linear_t)], b.t("array"), reversed_impl)

    def random_impl(interp, self_value, bound):
        return b.value_of_float(interp.rng.random())

    def randint_impl(interp, self_value, bound):
        return b.value_of_int(interp.rng.randint(bound["low"].payload, bound["high"].payload))

    b.functions["random"] = _fn("random", [], T_FLOAT, random_impl, pure=False)
    b.functions["randint"] = _fn("randint", [_param("low", T_INT), _param("high", T_INT)], T_INT, randint_impl, pure=False)

    def exit_impl(interp, self_value, bound):
        code = bound.get("code")
        raise ExitSignal(code.payload if code is not None and code is not UNDEFINED_VALUE else 0)

    b.functions["exit"] = _fn("exit", [_param("code", T_INT, optional=True)], VOID, exit_impl, pure=False)

    def hex_impl(interp, self_value, bound):
        n = bound["value"].payload
        sign = "-" if n < 0 else ""
        return b.value_of_string(f"{sign}0x{abs(n):X}")

    b.functions["hex"] = _fn("hex", [_param("value", T_INT)], T_STRING, hex_impl)

    number_t = normalize_union([T_INT, T_FLOAT, b.t("long"), b.t("byte"), b.t("floatsg"), b.t("usize")])

    def log_impl(interp, self_value, bound):
        base = bound["base"].payload
        value = bound["value"].payload
        if value <= 0 or base <= 0 or base == 1:
            raise b.make_error("ValueError", "log requires a positive value and base != 1")
        return b.value_of_float(math.log(value, base))

    b.functions["log"] = _fn("log", [_param("base", number_t), _param("value", number_t)], T_FLOAT, log_impl)

    def abs_impl(interp, self_value, bound):
        v = bound["value"]
        return Value(v.type, abs(v.payload))

    b.functions["abs"] = _fn("abs", [_param("value", number_t)], number_t, abs_impl)

    # ----------------------------------------------------------------
    # stdin / stdout stream objects
    # ----------------------------------------------------------------

    stdin_cls = b.classes["StdInStream"]
    stdout_cls = b.classes["StdOutStream"]

    def stdin_read_line(interp, self_value, bound):
        line = interp.stdin.readline()
        if line == "":
            raise b.make_error("InputError", "end of input stream")
        return b.value_of_string(line.rstrip("\n"))

    def stdout_write(interp, self_value, bound):
        interp.stdout.write(bound["text"].payload)
        return VOID_VALUE

    add_method(stdin_cls, _fn("readLine", [], T_STRING, stdin_read_line, pure=False))
    add_method(stdout_cls, _fn("write", [_param("text", T_STRING)], VOID, stdout_write, pure=False))

    # ----------------------------------------------------------------
    # builtin module: os
    # ----------------------------------------------------------------

    def os_walk_impl(interp, self_value, bound):
        root = _os.path.expanduser(bound["path"].payload)
        if not _os.path.isdir(root):
            raise b.make_error("FileError", f"directory {root!r} does not exist")
        entries = []
        for dirpath, dirnames, filenames in _os.walk(root):
            dirnames.sort()
            for fname in sorted(filenames):
                fpath = _os.path.join(dirpath, fname)
                try:
                    with open(fpath, "r", encoding="utf-8", errors="replace") as fh:
                        count = sum(1 for _ in fh)
                except OSError:
                    count = 0
                data = InstanceData(
                    walk_cls,
                    (),
                    {
                        "name": b.value_of_string(fname),
                        "path": b.value_of_string(fpath),
                        "line_count": b.value_of_int(count),
                    },
                )
                entries.append(Value(NominalType(walk_cls), data))
        return b.array_value(entries, NominalType(walk_cls))

    b.modules = {
        "os": {
            "walk": _fn("walk", [_param("path", T_STRING)], b.t("array", NominalType(walk_cls)), os_walk_impl, pure=False),
        }
    }

    return b


_SHARED: Builtins | None = None


def shared_builtins() -> Builtins:
    global _SHARED
    if _SHARED is None:
        _SHARED = build_builtins()
    return _SHARED


def compile_regex(pattern: str, flags: frozenset[str]):
    import re

    py_flags = re.IGNORECASE if "i" in flags else 0
    source = pattern
    if "n" in flags:
        # non-capturing parentheses: `(` not already `(?` becomes `(?:`
        out = []
        i = 0
        while i < len(source):
            ch = source[i]
            if ch == "\\" and i + 1 < len(source):
                out.append(source[i : i + 2])
                i += 2
                continue
            if ch == "(" and not source.startswith("(?", i):
                out.append("(?:")
                i += 1
                continue
            out.append(ch)
            i += 1
        source = "".join(out)
    return re.compile(source, py_flags)


def make_regex_value(b: Builtins, pattern: str, flags: frozenset[str]) -> Value:
    compiled = compile_regex(pattern, flags)
    return Value(NominalType(b.classes["regex"]), RegexData(pattern, flags, compiled))
