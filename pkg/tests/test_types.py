from __future__ import annotations

import pytest

from cesno.builtins import shared_builtins
from cesno.types import (
    ANY,
    ClassInfo,
    FieldInfo,
    LiteralType,
    MemberSetType,
    NULL,
    NominalType,
    UNDEFINED,
    UnionType,
    add_members,
    infer_generics,
    intersect,
    InferType,
    InferenceError,
    is_assignable,
    normalize_union,
    returnof,
    subtract_members,
    types_equal,
    TypeOperationError,
)

B = shared_builtins()
INT = B.t("int")
STRING = B.t("string")
FLOAT = B.t("float")
BOOL = B.t("bool")


def make_class(name: str, members: dict[str, object], superclass=None) -> ClassInfo:
    info = ClassInfo(name)
    info.superclass = superclass
    for mname, mtype in members.items():
        info.fields[mname] = FieldInfo(mname, mtype, ("public",))
    return info


class TestNormalizeUnion:
    def test_dedupe(self):
        u = normalize_union([INT, STRING, INT])
        assert isinstance(u, UnionType)
        assert len(u.alternatives) == 2

    def test_singleton_collapse(self):
        assert types_equal(normalize_union([INT]), INT)

    def test_literal_and_undefined(self):
        off = LiteralType(STRING, "off")
        u = normalize_union([off, INT, UNDEFINED])
        assert isinstance(u, UnionType)
        assert len(u.alternatives) == 3
        assert any(isinstance(a, LiteralType) and a.value == "off" for a in u.alternatives)

    def test_true_false_collapses_to_bool(self):
        u = normalize_union([LiteralType(BOOL, True), LiteralType(BOOL, False)])
        assert types_equal(u, BOOL)

    def test_nested_unions_flatten(self):
        inner = normalize_union([INT, STRING])
        u = normalize_union([inner, FLOAT])
        assert isinstance(u, UnionType)
        assert len(u.alternatives) == 3

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            normalize_union([])


class TestIntersect:
    def test_idempotence_is_member_set(self):
        a = make_class("A", {"x": INT, "y": STRING})
        t = intersect(NominalType(a), NominalType(a))
        assert isinstance(t, MemberSetType)
        assert set(t.member_map()) == {"x", "y"}

    def test_common_members(self):
        a = make_class("A", {"x": INT, "y": STRING})
        b = make_class("B", {"x": INT, "z": BOOL})
        t = intersect(NominalType(a), NominalType(b))
        # Oracle: plain set intersection of the member maps.
        expected = {"x": INT}
        assert t.member_map().keys() == expected.keys()
        assert types_equal(t.member_map()["x"], INT)

    def test_disjoint(self):
        a = make_class("A", {"x": INT})
        b = make_class("B", {"y": STRING})
        t = intersect(NominalType(a), NominalType(b))
        assert t.member_map() == {}

    def test_subset_property(self):
        a = make_class("A", {"x": INT, "y": STRING, "z": BOOL})
        b = make_class("B", {"y": STRING, "z": BOOL, "w": INT})
        t = intersect(NominalType(a), NominalType(b))
        ma = set(a.member_types())
        mb = set(b.member_types())
        assert set(t.member_map()) <= ma
        assert set(t.member_map()) <= mb


class TestAddSubtract:
    def test_add_is_map_union(self):
        a = make_class("A", {"x": INT})
        b = make_class("B", {"y": STRING})
        t = add_members(NominalType(a), NominalType(b))
        # Oracle: dict union of both member maps.
        expected = dict(a.member_types())
        expected.update(b.member_types())
        assert t.member_map().keys() == expected.keys()

    def test_subtract_is_map_difference(self):
        a = make_class("A", {"x": INT, "y": STRING})
        b = make_class("B", {"y": STRING})
        t = subtract_members(NominalType(a), NominalType(b))
        assert set(t.member_map()) == {"x"}

    def test_self_subtract_empty(self):
        a = make_class("A", {"x": INT})
        t = subtract_members(NominalType(a), NominalType(a))
        assert t.member_map() == {}

    def test_add_conflict_rejected(self):
        a = make_class("A", {"x": INT})
        b = make_class("B", {"x": STRING})
        with pytest.raises(TypeOperationError):
            add_members(NominalType(a), NominalType(b))


class TestTypesEqual:
    def test_matrix_equal_pairs(self):
        m = ClassInfo("DemoMatrix")
        a = NominalType(m, (25, 15))
        b = NominalType(m, (25, 15))
        c = NominalType(m, (24, 16))
        assert types_equal(a, b)
        assert not types_equal(a, c)

    def test_int_equals_int(self):
        assert types_equal(INT, INT)

    def test_union_order_insensitive(self):
        assert types_equal(normalize_union([INT, STRING]), normalize_union([STRING, INT]))

    def test_equivalence_relation_on_generated(self):
        import random

        rng = random.Random(7)
        m = ClassInfo("M")
        pool = [NominalType(m, (i, j)) for i in range(3) for j in range(3)]
        pool += [INT, STRING, normalize_union([INT, STRING])]
        for _ in range(300):
            a, b, c = rng.choice(pool), rng.choice(pool), rng.choice(pool)
            assert types_equal(a, a)
            assert types_equal(a, b) == types_equal(b, a)
            if types_equal(a, b) and types_equal(b, c):
                assert types_equal(a, c)

    def test_brute_force_pairwise_comparator(self):
        # Oracle: same class object and identical arg tuples.
        m1 = ClassInfo("M")
        m2 = ClassInfo("M")  # same name, different declaration
        instances = [
            NominalType(m1, (1, 2)),
            NominalType(m1, (1, 2)),
            NominalType(m1, (2, 1)),
            NominalType(m2, (1, 2)),
        ]
        for a in instances:
            for b in instances:
                expected = a.decl is b.decl and a.args == b.args
                assert types_equal(a, b) == expected


class TestIsAssignable:
    def test_literal_to_base(self):
        assert is_assignable(LiteralType(STRING, "off"), STRING)

    def test_null_rules(self):
        assert not is_assignable(NULL, STRING)
        assert is_assignable(NULL, normalize_union([STRING, NULL]))

    def test_no_implicit_numeric_conversion(self):
        assert not is_assignable(INT, FLOAT)
        assert not is_assignable(FLOAT, INT)

    def test_subclass_to_superclass(self):
        base = make_class("Staff", {"name": STRING})
        derived = make_class("Teacher", {"courses": STRING}, NominalType(base))
        assert is_assignable(NominalType(derived), NominalType(base))
        assert not is_assignable(NominalType(base), NominalType(derived))

    def test_union_source_needs_every_alternative(self):
        u = normalize_union([INT, STRING])
        assert not is_assignable(u, INT)
        assert is_assignable(u, normalize_union([INT, STRING, FLOAT]))

    def test_union_destination_needs_some_alternative(self):
        assert is_assignable(INT, normalize_union([INT, STRING]))

    def test_any_both_ways(self):
        assert is_assignable(ANY, INT)
        assert is_assignable(INT, ANY)

    def test_object_accepts_everything_but_nullish(self):
        obj = B.t("object")
        assert is_assignable(INT, obj)
        assert is_assignable(STRING, obj)
        assert not is_assignable(NULL, obj)
        assert not is_assignable(UNDEFINED, obj)

    def test_member_set_structural(self):
        a = make_class("A", {"x": INT, "y": STRING})
        target = MemberSetType((("x", INT),))
        assert is_assignable(NominalType(a), target)
        b = make_class("B", {"y": STRING})
        assert not is_assignable(NominalType(b), target)


class _FakeOverload:
    def __init__(self, params, ret):
        from cesno.callables import Parameter, Signature

        self.signature = Signature(tuple(Parameter(f"p{i}", t) for i, t in enumerate(params)), ret)


class TestReturnof:
    def test_nullish_test_over_object_union(self):
        # `x??` on int|string is always true: both alternatives pick the
        # object overload returning literal true.
        true_t = LiteralType(BOOL, True)
        false_t = LiteralType(BOOL, False)
        overloads = [
            _FakeOverload([B.t("object")], true_t),
            _FakeOverload([NULL], false_t),
            _FakeOverload([UNDEFINED], false_t),
        ]

        class Op:
            pass

        op = Op()
        op.overloads = overloads
        result = returnof(op, [normalize_union([INT, STRING])])
        assert types_equal(result, true_t)

    def test_nullish_test_over_nullable_union_is_bool(self):
        true_t = LiteralType(BOOL, True)
        false_t = LiteralType(BOOL, False)

        class Op:
            overloads = [
                _FakeOverload([B.t("object")], true_t),
                _FakeOverload([NULL], false_t),
            ]

        result = returnof(Op(), [normalize_union([INT, NULL])])
        assert types_equal(result, BOOL)

    def test_identity_function(self):
        class Fn:
            overloads = [_FakeOverload([INT], INT)]

        assert types_equal(returnof(Fn(), [INT]), INT)

    def test_union_distribution_law(self):
        # returnof over a union == union of element-wise returnof, for all
        # unions of <= 3 alternatives over a 6-type universe.
        from itertools import combinations

        universe = [INT, STRING, FLOAT, BOOL, NULL, UNDEFINED]
        true_t = LiteralType(BOOL, True)
        false_t = LiteralType(BOOL, False)

        class Op:
            overloads = [
                _FakeOverload([B.t("object")], true_t),
                _FakeOverload([NULL], false_t),
                _FakeOverload([UNDEFINED], false_t),
            ]

        op = Op()
        for size in (2, 3):
            for combo in combinations(universe, size):
                u = normalize_union(list(combo))
                if not isinstance(u, UnionType):
                    continue
                via_union = returnof(op, [u])
                elementwise = normalize_union([returnof(op, [alt]) for alt in combo])
                assert types_equal(via_union, elementwise), combo


class TestInferGenerics:
    def test_matrix_column_inference(self):
        m = ClassInfo("DemoMatrix")
        param = NominalType(m, (15, InferType("C")))
        arg = NominalType(m, (15, 35))
        assert infer_generics(param, arg) == {"C": 35}

    def test_matrix_line_mismatch(self):
        m = ClassInfo("DemoMatrix")
        param = NominalType(m, (15, InferType("C")))
        arg = NominalType(m, (14, 35))
        with pytest.raises(InferenceError):
            infer_generics(param, arg)

    def test_nested_seq_inference(self):
        seq = B.classes["sequence"]
        param = NominalType(seq, (NominalType(seq, (FLOAT, InferType("Columns"))), InferType("Lines")))
        arg = NominalType(seq, (NominalType(seq, (FLOAT, 3)), 2))
        assert infer_generics(param, arg) == {"Columns": 3, "Lines": 2}

    def test_array_element_inference(self):
        arr = B.classes["array"]
        param = NominalType(arr, (InferType("T"),))
        arg = NominalType(arr, (INT,))
        bound = infer_generics(param, arg)
        assert types_equal(bound["T"], INT)

    def test_conflicting_bindings(self):
        seq = B.classes["sequence"]
        param = NominalType(seq, (NominalType(seq, (FLOAT, InferType("N"))), InferType("N")))
        arg = NominalType(seq, (NominalType(seq, (FLOAT, 3)), 2))
        with pytest.raises(InferenceError):
            infer_generics(param, arg)
