"""Runtime representation: tagged values, environments, control signals.

Every value carries its TypeDescriptor next to the payload, which is what
makes dynamically typed (`any`) variables checkable at runtime. Scopes
destroy the class instances they own in reverse declaration order when
they exit, however they exit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .types import NULL, UNDEFINED, VOID, ClassInfo, EnumInfo, TypeDescriptor


@dataclass
class Value:
    type: TypeDescriptor
    payload: object

    def __repr__(self) -> str:
        return f"Value({self.type.display()}, {self.payload!r})"


NULL_VALUE = Value(NULL, None)
UNDEFINED_VALUE = Value(UNDEFINED, None)
VOID_VALUE = Value(VOID, "empty")


@dataclass
class InstanceData:
    class_info: ClassInfo
    generic_args: tuple
    slots: dict[str, Value] = field(default_factory=dict)
    destroyed: bool = False


@dataclass
class EnumValueData:
    enum_info: EnumInfo
    member: str
    payload: list[Value] = field(default_factory=list)


@dataclass
class BoundItem:
    """A name binding; `ref` declarations share the same BoundItem."""

    value: Value
    modifiers: tuple[str, ...] = ()
    declared_type: TypeDescriptor | None = None
    assigned: bool = False

    @property
    def is_const(self) -> bool:
        return "const" in self.modifiers or "readonly" in self.modifiers


class CesnoThrow(Exception):
    """A thrown Cesno error value, unwinding until a catch arm matches."""

    def __init__(self, value: Value):
        super().__init__(_describe_thrown(value))
        self.value = value


def _describe_thrown(value: Value) -> str:
    data = value.payload
    if isinstance(data, InstanceData):
        msg = data.slots.get("message")
        name = data.class_info.name
        if msg is not None and isinstance(msg.payload, str):
            return f"{name}: {msg.payload}"
        return name
    return repr(value)


class BreakSignal(Exception):
    def __init__(self, indicator: str | None, eval_value: Value | None):
        super().__init__("break")
        self.indicator = indicator
        self.eval_value = eval_value


class ContinueSignal(Exception):
    def __init__(self, indicator: str | None):
        super().__init__("continue")
        self.indicator = indicator


class ReturnSignal(Exception):
    def __init__(self, value: Value):
        super().__init__("return")
        self.value = value


class ExitSignal(Exception):
    def __init__(self, code: int):
        super().__init__(f"exit({code})")
        self.code = code


class EnvironmentError_(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class Environment:
    """Lexically scoped bindings with scope-exit destructor bookkeeping."""

    __slots__ = ("parent", "bindings", "owned", "operators", "label")

    def __init__(self, parent: "Environment | None" = None, label: str = ""):
        self.parent = parent
        self.bindings: dict[str, BoundItem] = {}
        # instances owned by this scope, in declaration order
        self.owned: list[Value] = []
        # operator definitions imported/defined in this scope
        self.operators: list = []
        self.label = label

    # -- declaration & lookup -----------------------------------------

    def declare(self, name: str, value: Value, modifiers: tuple[str, ...] = (), declared_type: TypeDescriptor | None = None, assigned: bool = True) -> BoundItem:
        if name in self.bindings:
            raise EnvironmentError_(f"{name!r} is already declared in this scope")
        item = BoundItem(value, modifiers, declared_type, assigned)
        self.bindings[name] = item
        return item

    def declare_ref(self, name: str, item: BoundItem) -> None:
        if name in self.bindings:
            raise EnvironmentError_(f"{name!r} is already declared in this scope")
        self.bindings[name] = item

    def lookup_item(self, name: str) -> BoundItem | None:
        env: Environment | None = self
        while env is not None:
            item = env.bindings.get(name)
            if item is not None:
                return item
            env = env.parent
        return None

    def lookup(self, name: str) -> Value | None:
        item = self.lookup_item(name)
        return item.value if item is not None else None

    def assign(self, name: str, value: Value) -> BoundItem:
        item = self.lookup_item(name)
        if item is None:
            raise EnvironmentError_(f"{name!r} is not declared")
        if item.is_const and item.assigned:
            raise EnvironmentError_(f"cannot reassign constant {name!r}")
        item.value = value
        item.assigned = True
        return item

    def delete(self, name: str) -> Value:
        env: Environment | None = self
        while env is not None:
            if name in env.bindings:
                item = env.bindings.pop(name)
                return item.value
            env = env.parent
        raise EnvironmentError_(f"{name!r} is not declared")

    def child(self, label: str = "") -> "Environment":
        return Environment(self, label)

    # -- destructor bookkeeping ----------------------------------------

    def own(self, value: Value) -> None:
        if isinstance(value.payload, InstanceData):
            self.owned.append(value)

    def scope_operators(self) -> list:
        """All operator definitions visible from this scope, inner first."""
        out = []
        env: Environment | None = self
        while env is not None:
            out.extend(env.operators)
            env = env.parent
        return out


@dataclass
class BuiltinCallable:
    """A natively implemented function or method."""

    name: str
    signature: object  # callables.Signature
    impl: object  # fn(interp, self_value, bound: dict[str, Value]) -> Value
    self_value: Value | None = None
    pure: bool = True

    def bind(self, self_value: Value) -> "BuiltinCallable":
        return BuiltinCallable(self.name, self.signature, self.impl, self_value, self.pure)

    def function_type(self):
        return self.signature.function_type()


@dataclass
class UserFunction:
    """A function/method defined in Cesno source, closing over its scope."""

    decl: object  # nodes.FunctionDef
    signature: object
    closure: Environment | None
    name: str
    kind: str = "function"
    owner: object = None  # ClassInfo for methods
    self_value: Value | None = None
    generic_params: list = field(default_factory=list)

    def bind(self, self_value: Value) -> "UserFunction":
        return UserFunction(
            self.decl, self.signature, self.closure, self.name, self.kind, self.owner, self_value, self.generic_params
        )

    def function_type(self):
        return self.signature.function_type()


@dataclass
class Overloads:
    name: str
    items: list = field(default_factory=list)

    @property
    def signature(self):
        return self.items[0].signature

    def bind(self, self_value: Value) -> "Overloads":
        return Overloads(self.name, [f.bind(self_value) for f in self.items])


@dataclass
class PartialFunction:
    """Result of `f with name=value`."""

    target: object  # callable payload
    overrides: dict[str, Value]
    signature: object

    @property
    def name(self) -> str:
        return getattr(self.target, "name", "<partial>")


@dataclass
class NamespaceValue:
    """An imported package directory or module."""

    name: str
    kind: str  # "package" | "module" | "builtin"
    path: object = None
    record: object = None  # ModuleRecord once loaded
    members: dict[str, Value] = field(default_factory=dict)


def callable_overloads(payload: object) -> list:
    if isinstance(payload, Overloads):
        return payload.items
    return [payload]


def values_equal(a: Value, b: Value) -> bool:
    """Structural `==` equality for builtin shapes; instances member-wise."""
    pa, pb = a.payload, b.payload
    if isinstance(pa, bool) != isinstance(pb, bool):
        return False
    if isinstance(pa, (int, float)) and isinstance(pb, (int, float)):
        return pa == pb
    if isinstance(pa, str) and isinstance(pb, str):
        return pa == pb
    if pa is None or pb is None:
        return pa is None and pb is None and type(a.type) is type(b.type)
    if isinstance(pa, list) and isinstance(pb, list):
        return len(pa) == len(pb) and all(values_equal(x, y) for x, y in zip(pa, pb))
    if isinstance(pa, InstanceData) and isinstance(pb, InstanceData):
        if pa.class_info is not pb.class_info:
            return False
        if set(pa.slots) != set(pb.slots):
            return False
        return all(values_equal(pa.slots[k], pb.slots[k]) for k in pa.slots)
    if isinstance(pa, EnumValueData) and isinstance(pb, EnumValueData):
        if pa.enum_info is not pb.enum_info or pa.member != pb.member:
            return False
        if len(pa.payload) != len(pb.payload):
            # bare member vs payload-carrying value compares discriminants
            return True
        return all(values_equal(x, y) for x, y in zip(pa.payload, pb.payload))
    if isinstance(pa, CesnoDict) and isinstance(pb, CesnoDict):
        if len(pa.pairs) != len(pb.pairs):
            return False
        for k, v in pa.pairs:
            other = pb.get(k)
            if other is None or not values_equal(v, other):
                return False
        return True
    return pa is pb


def values_identical(a: Value, b: Value) -> bool:
    """`===`: same storage identity; primitives behave like `==`."""
    pa, pb = a.payload, b.payload
    if isinstance(pa, (bool, int, float, str)) and isinstance(pb, (bool, int, float, str)):
        return type(pa) is type(pb) and pa == pb
    if pa is None and pb is None:
        return type(a.type) is type(b.type)
    return pa is pb


class CesnoDict:
    """Pair storage with `==`-based key lookup (keys are Cesno values)."""

    __slots__ = ("pairs",)

    def __init__(self):
        self.pairs: list[tuple[Value, Value]] = []

    def find(self, key: Value) -> int:
        for i, (k, _) in enumerate(self.pairs):
            if values_equal(k, key):
                return i
        return -1

    def get(self, key: Value) -> Value | None:
        i = self.find(key)
        return self.pairs[i][1] if i >= 0 else None

    def set(self, key: Value, value: Value) -> None:
        i = self.find(key)
        if i >= 0:
            self.pairs[i] = (key, value)
        else:
            self.pairs.append((key, value))

    def remove(self, key: Value) -> bool:
        i = self.find(key)
        if i >= 0:
            del self.pairs[i]
            return True
        return False

    def keys(self) -> list[Value]:
        return [k for k, _ in self.pairs]

    def values(self) -> list[Value]:
        return [v for _, v in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)


class CesnoSet:
    __slots__ = ("items",)

    def __init__(self):
        self.items: list[Value] = []

    def contains(self, value: Value) -> bool:
        return any(values_equal(v, value) for v in self.items)

    def add(self, value: Value) -> None:
        if not self.contains(value):
            self.items.append(value)

    def remove(self, value: Value) -> bool:
        for i, v in enumerate(self.items):
            if values_equal(v, value):
                del self.items[i]
                return True
        return False

    def __len__(self) -> int:
        return len(self.items)
