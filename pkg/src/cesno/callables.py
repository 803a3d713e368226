"""Callable signatures: argument binding, overload selection, partials.

Positional arguments fill parameters left to right; keyword arguments act
as separators, so positional arguments written before a keyword bind to
parameters before it. Runs of positional arguments shared by several
variadic parameters are split by enumerating the type-valid splits — more
than one valid split is an error at the call site.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .types import (
    ANY,
    EnumInfo,
    FunctionType,
    NominalType,
    ParamSig,
    PendingEnumType,
    TypeDescriptor,
    UnionType,
    is_assignable,
    subclass_distance,
    types_equal,
    LiteralType,
)


class BindError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass(frozen=True)
class Parameter:
    name: str
    type: TypeDescriptor = ANY
    variadic: bool = False
    optional: bool = False
    has_default: bool = False
    positional_only: bool = False
    keyword_only: bool = False
    constraint: object = None  # ConstraintNode, checked separately
    default_expr: object = None

    @property
    def omittable(self) -> bool:
        return self.optional or self.has_default or self.variadic

    def to_sig(self) -> ParamSig:
        return ParamSig(self.name, self.type, self.variadic, self.optional or self.has_default, self.positional_only, self.keyword_only)


@dataclass(frozen=True)
class Signature:
    params: tuple[Parameter, ...]
    return_type: TypeDescriptor = ANY
    is_method: bool = False

    def function_type(self) -> FunctionType:
        return FunctionType(tuple(p.to_sig() for p in self.params), self.return_type)

    def display(self) -> str:
        parts = []
        for p in self.params:
            text = p.type.display() if not types_equal(p.type, ANY) else ""
            text += "..." if p.variadic else ""
            text = (text + " " + p.name).strip()
            if p.optional:
                text += "?"
            parts.append(text)
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class Argument:
    """One call-site argument; `name` set when passed as key=value."""

    name: str | None
    type: TypeDescriptor
    value: object = None
    is_const: bool = False


# Sentinels for unfilled parameters.
USE_DEFAULT = object()
OMITTED = object()


@dataclass
class ArgumentBinding:
    # param name -> Argument | list[Argument] (variadic) | USE_DEFAULT | OMITTED
    slots: dict[str, object] = field(default_factory=dict)

    def bound_names(self) -> list[str]:
        return [n for n, v in self.slots.items() if v not in (USE_DEFAULT, OMITTED)]


def _builtin_named(t: TypeDescriptor, *names: str) -> bool:
    return isinstance(t, NominalType) and getattr(t.decl, "is_builtin", False) and t.decl.name in names


def _seq_coercible(src: TypeDescriptor, dst: TypeDescriptor) -> bool:
    """Array values coerce into sequence parameters; lengths check later."""
    if not _builtin_named(dst, "sequence"):
        return False
    if not _builtin_named(src, "array", "list", "sequence", "tuple"):
        return False
    if not dst.args or not src.args:
        return True
    src_elem = src.args[0]
    dst_elem = dst.args[0]
    if not isinstance(src_elem, TypeDescriptor) or not isinstance(dst_elem, TypeDescriptor):
        return True
    if isinstance(src_elem, UnionType):
        return all(_elem_matches(alt, dst_elem) for alt in src_elem.alternatives)
    return _elem_matches(src_elem, dst_elem)


def _elem_matches(src: TypeDescriptor, dst: TypeDescriptor) -> bool:
    return is_assignable(src, dst) or _seq_coercible(src, dst)


def _arg_matches(arg: Argument, param: Parameter) -> bool:
    if isinstance(arg.type, PendingEnumType):
        target = param.type
        if isinstance(target, NominalType) and isinstance(target.decl, EnumInfo):
            return arg.type.member in target.decl.members
        if isinstance(target, UnionType):
            return any(
                isinstance(alt, NominalType) and isinstance(alt.decl, EnumInfo) and arg.type.member in alt.decl.members
                for alt in target.alternatives
            )
        return types_equal(param.type, ANY)
    return is_assignable(arg.type, param.type) or _seq_coercible(arg.type, param.type)


def bind_arguments(signature: Signature, args: list[Argument]) -> ArgumentBinding:
    """Bind call arguments to parameters, or raise BindError."""
    params = list(signature.params)
    by_name = {p.name: p for p in params}
    binding = ArgumentBinding()

    # 1. keywords
    keyword_args: dict[str, Argument] = {}
    for a in args:
        if a.name is None:
            continue
        p = by_name.get(a.name)
        if p is None:
            raise BindError("E_UNKNOWN_KEYWORD", f"unknown keyword argument {a.name!r}")
        if p.positional_only:
            raise BindError(
                "E_POSONLY_BY_KEYWORD",
                f"cannot use 'key with value' to pass value to positional-only parameter {a.name!r}",
            )
        if a.name in keyword_args:
            raise BindError("E_UNKNOWN_KEYWORD", f"duplicate keyword argument {a.name!r}")
        if not _arg_matches(a, p):
            raise BindError("E_TYPE", f"argument for {a.name!r} has incompatible type {a.type.display()}")
        keyword_args[a.name] = a
        binding.slots[a.name] = a

    # 2. positional runs, delimited by the keyword arguments' positions
    param_index = {p.name: i for i, p in enumerate(params)}
    runs: list[tuple[list[Argument], int, int]] = []  # (args, param_lo, param_hi)
    lo = 0
    current: list[Argument] = []
    for a in args:
        if a.name is None:
            current.append(a)
        else:
            hi = param_index[a.name]
            if current or lo < hi:
                runs.append((current, lo, hi))
            current = []
            lo = hi + 1
    runs.append((current, lo, len(params)))

    for run_args, p_lo, p_hi in runs:
        segment = [p for p in params[p_lo:p_hi] if not p.keyword_only and p.name not in keyword_args]
        if run_args and not segment:
            remaining_kwonly = [p for p in params[p_lo:p_hi] if p.keyword_only and p.name not in keyword_args]
            if remaining_kwonly:
                raise BindError(
                    "E_KWONLY_POSITIONAL",
                    f"parameter {remaining_kwonly[0].name!r} is keyword-only and cannot take a positional argument",
                )
            raise BindError("E_TOO_MANY_ARGS", "too many positional arguments")
        if not run_args and not segment:
            continue
        splits = _enumerate_splits(segment, run_args)
        if not splits:
            kwonly_here = [p for p in params[p_lo:p_hi] if p.keyword_only and p.name not in keyword_args and not p.omittable]
            if kwonly_here and len(run_args) > sum(1 for p in segment if not p.variadic):
                raise BindError("E_KWONLY_POSITIONAL", f"parameter {kwonly_here[0].name!r} must be passed by keyword")
            missing = [p.name for p in segment if not p.omittable]
            if len(run_args) < sum(1 for p in segment if not p.omittable):
                raise BindError("E_MISSING_ARG", f"missing argument(s) for {', '.join(missing) or 'parameters'}")
            raise BindError("E_TYPE", "arguments do not fit the parameter types")
        if len(splits) > 1:
            raise BindError(
                "E_AMBIGUOUS_VARIADIC_SPLIT",
                "cannot decide how to separate arguments between variadic parameters; pass a keyword to disambiguate",
            )
        for p, taken in zip(segment, splits[0]):
            if p.variadic:
                binding.slots[p.name] = list(taken)
            elif taken:
                binding.slots[p.name] = taken[0]

    # 3. unfilled parameters
    for p in params:
        if p.name in binding.slots:
            continue
        if p.variadic:
            binding.slots[p.name] = []
        elif p.has_default:
            binding.slots[p.name] = USE_DEFAULT
        elif p.optional:
            binding.slots[p.name] = OMITTED
        else:
            raise BindError("E_MISSING_ARG", f"missing argument for parameter {p.name!r}")
    return binding


def _enumerate_splits(segment: list[Parameter], run: list[Argument]) -> list[list[list[Argument]]]:
    """All type-valid ways to distribute `run` over `segment` in order."""
    results: list[list[list[Argument]]] = []

    def go(pi: int, ai: int, acc: list[list[Argument]]) -> None:
        if pi == len(segment):
            if ai == len(run):
                results.append([list(x) for x in acc])
            return
        p = segment[pi]
        if p.variadic:
            # take k = 0.. as many as type-match
            k = 0
            while True:
                acc.append([run[ai + j] for j in range(k)])
                go(pi + 1, ai + k, acc)
                acc.pop()
                if ai + k >= len(run) or not _arg_matches(run[ai + k], p):
                    break
                k += 1
        else:
            if p.optional or p.has_default:
                acc.append([])
                go(pi + 1, ai, acc)
                acc.pop()
            if ai < len(run) and _arg_matches(run[ai], p):
                acc.append([run[ai]])
                go(pi + 1, ai + 1, acc)
                acc.pop()

    go(0, 0, [])
    # Deduplicate splits that assign identical slices (can happen when an
    # optional parameter overlaps a variadic of the same type).
    seen = set()
    unique = []
    for split in results:
        key = tuple(tuple(id(a) for a in group) for group in split)
        if key not in seen:
            seen.add(key)
            unique.append(split)
    return unique


def validate_variadic_separability(signature: Signature) -> None:
    """Reject signatures where no call could ever split the variadics."""
    params = list(signature.params)
    for i, vi in enumerate(params):
        if not vi.variadic:
            continue
        for j in range(i + 1, len(params)):
            vj = params[j]
            if not vj.variadic:
                continue
            if not (is_assignable(vi.type, vj.type) or is_assignable(vj.type, vi.type)):
                break  # a type barrier separates everything past it
            between = params[i + 1 : j]
            separable = any(
                not b.positional_only and not b.variadic for b in between
            ) or any(
                not (is_assignable(b.type, vi.type) or is_assignable(vi.type, b.type)) for b in between
            )
            if not separable:
                raise BindError(
                    "E_INSEPARABLE_SIGNATURE",
                    f"no way to tell how to separate arguments between {vi.name!r} and {vj.name!r}",
                )


def _call_shapes(signature: Signature, variadic_cap: int = 3) -> set:
    """Caller-visible shapes: (positional type tuple, frozen keyword set)."""
    params = list(signature.params)
    options: list[list[tuple[str, object]]] = []
    for p in params:
        modes: list[tuple[str, object]] = []
        if p.variadic:
            for k in range(variadic_cap + 1):
                modes.append(("pos", tuple([_type_key(p.type)] * k)))
        else:
            if not p.keyword_only:
                modes.append(("pos", (_type_key(p.type),)))
            if not p.positional_only:
                modes.append(("kw", (p.name, _type_key(p.type))))
            if p.omittable:
                modes.append(("omit", ()))
        options.append(modes)
    shapes = set()
    for combo in product(*options):
        pos: list[object] = []
        kws = []
        ok = True
        for mode, payload in combo:
            if mode == "pos":
                pos.extend(payload)
            elif mode == "kw":
                kws.append(payload)
        if ok:
            shapes.add((tuple(pos), frozenset(kws)))
    return shapes


_type_key_cache: dict[int, int] = {}


def _type_key(t: TypeDescriptor):
    return t.display()


def signatures_effectively_equal(a: Signature, b: Signature) -> bool:
    """True iff both admit exactly the same set of call shapes."""
    return _call_shapes(a) == _call_shapes(b)


def derive_partial_signature(signature: Signature, overrides: dict[str, object]) -> Signature:
    """Signature of `f with name=value`: overridden params become defaulted."""
    by_name = {p.name: p for p in signature.params}
    for name in overrides:
        p = by_name.get(name)
        if p is None:
            raise BindError("E_UNKNOWN_KEYWORD", f"'with' override names unknown parameter {name!r}")
        if p.positional_only:
            raise BindError("E_POSONLY_BY_KEYWORD", f"'with' cannot override positional-only parameter {name!r}")
    new_params = tuple(
        Parameter(
            p.name,
            p.type,
            p.variadic,
            p.optional,
            True if p.name in overrides else p.has_default,
            p.positional_only,
            p.keyword_only,
            p.constraint,
            p.default_expr,
        )
        for p in signature.params
    )
    return Signature(new_params, signature.return_type, signature.is_method)


def callback_compatible(provided: FunctionType, required: FunctionType) -> bool:
    """Can `provided` be passed where `required` is expected?

    Keyword-only parameters of `provided` are invisible to the match; the
    caller passes only as many positional arguments as `provided` accepts,
    so `required`'s optional parameters need not be consumed. Matched
    parameters are contravariant, the return type covariant.
    """
    prov_pos = [p for p in provided.params if not p.keyword_only]
    req_pos = [p for p in required.params if not p.keyword_only]
    prov_required = sum(1 for p in prov_pos if not p.optional and not p.variadic)
    if prov_required > len(req_pos):
        return False
    has_variadic = any(p.variadic for p in prov_pos)
    capacity = len(req_pos) if has_variadic else len(prov_pos)
    matched = min(capacity, len(req_pos))
    fixed = [p for p in prov_pos if not p.variadic]
    for i in range(matched):
        if i < len(fixed):
            pt = fixed[i].type
        else:
            pt = next(p.type for p in prov_pos if p.variadic)
        if not is_assignable(req_pos[i].type, pt):
            return False
    return is_assignable(provided.ret, required.ret) or types_equal(required.ret, ANY)


class OverloadError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def rank_overload(signature: Signature, args: list[Argument]) -> tuple | None:
    """Lower rank wins: exact match > subclass distance > literal > union."""
    try:
        binding = bind_arguments(signature, args)
    except BindError:
        return None
    score = 0
    by_name = {p.name: p for p in signature.params}
    for name, bound in binding.slots.items():
        p = by_name[name]
        items = bound if isinstance(bound, list) else [bound]
        for item in items:
            if item in (USE_DEFAULT, OMITTED) or not isinstance(item, Argument):
                continue
            score += _match_cost(item.type, p.type)
    return (score,)


def _match_cost(src: TypeDescriptor, dst: TypeDescriptor) -> int:
    if types_equal(src, dst):
        return 0
    d = subclass_distance(src, dst)
    if d is not None:
        return d
    if isinstance(src, LiteralType) and is_assignable(src.base, dst):
        return 10
    if isinstance(dst, UnionType):
        return 20 + min((_match_cost(src, alt) for alt in dst.alternatives if is_assignable(src, alt)), default=20)
    if types_equal(dst, ANY) or isinstance(src, PendingEnumType):
        return 5
    return 30


def select_overload(overloads: list, args: list[Argument]):
    """Pick the best overload (objects exposing .signature) for the args."""
    ranked = []
    for ov in overloads:
        r = rank_overload(ov.signature, args)
        if r is not None:
            ranked.append((r, ov))
    if not ranked:
        raise OverloadError("E_NO_OVERLOAD", "no overload accepts the given arguments")
    ranked.sort(key=lambda pair: pair[0])
    best = ranked[0][0]
    tied = [ov for r, ov in ranked if r == best]
    if len(tied) > 1:
        raise OverloadError("E_AMBIGUOUS_OVERLOAD", "ambiguous call: multiple overloads match equally well")
    return tied[0]


def select_return_type(callable_obj, arg_types: list[TypeDescriptor]) -> TypeDescriptor:
    """Return type of the overload accepting the given argument types."""
    overloads = getattr(callable_obj, "overloads", None)
    if overloads is None:
        overloads = [callable_obj]
    args = [Argument(None, t) for t in arg_types]
    chosen = select_overload(overloads, args)
    return chosen.signature.return_type
