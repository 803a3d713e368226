from __future__ import annotations

import pytest

from cesno.builtins import shared_builtins
from cesno.callables import (
    Argument,
    ArgumentBinding,
    BindError,
    OMITTED,
    Parameter,
    Signature,
    USE_DEFAULT,
    bind_arguments,
    callback_compatible,
    derive_partial_signature,
    signatures_effectively_equal,
    validate_variadic_separability,
)
from cesno.types import ANY, FunctionType, ParamSig

B = shared_builtins()
INT = B.t("int")
STRING = B.t("string")
FLOAT = B.t("float")
OBJECT = B.t("object")


def sig(*params: Parameter) -> Signature:
    return Signature(tuple(params))


def pos(t, i=0) -> Argument:
    return Argument(None, t)


def kw(name, t) -> Argument:
    return Argument(name, t)


def names_of(binding: ArgumentBinding, name: str):
    slot = binding.slots[name]
    if isinstance(slot, list):
        return [a.type for a in slot]
    return slot


class TestBindArguments:
    def test_variadic_split_by_type(self):
        s = sig(
            Parameter("texts", STRING, variadic=True),
            Parameter("integers", INT, variadic=True),
            Parameter("str", STRING),
        )
        b = bind_arguments(s, [pos(STRING), pos(STRING), pos(INT), pos(INT), pos(STRING)])
        assert len(b.slots["texts"]) == 2
        assert len(b.slots["integers"]) == 2
        assert b.slots["str"].type is STRING or b.slots["str"].type == STRING

    def test_ambiguous_variadic_split(self):
        s = sig(
            Parameter("texts", STRING, variadic=True),
            Parameter("word", STRING),
            Parameter("strs", STRING, variadic=True),
        )
        with pytest.raises(BindError) as exc:
            bind_arguments(s, [pos(STRING), pos(STRING), pos(STRING)])
        assert exc.value.code == "E_AMBIGUOUS_VARIADIC_SPLIT"

    def test_keyword_separates_variadic_runs(self):
        s = sig(
            Parameter("texts", STRING, variadic=True),
            Parameter("word", STRING),
            Parameter("strs", STRING, variadic=True),
        )
        b = bind_arguments(s, [pos(STRING), kw("word", STRING), pos(STRING)])
        assert len(b.slots["texts"]) == 1
        assert b.slots["word"].name == "word"
        assert len(b.slots["strs"]) == 1

    def test_optional_omitted_is_undefined(self):
        s = sig(Parameter("a", INT), Parameter("b", INT, optional=True))
        b = bind_arguments(s, [pos(INT)])
        assert b.slots["b"] is OMITTED

    def test_default_used(self):
        s = sig(Parameter("a", INT), Parameter("b", INT, has_default=True))
        b = bind_arguments(s, [pos(INT)])
        assert b.slots["b"] is USE_DEFAULT

    def test_positional_only_rejects_keyword(self):
        s = sig(Parameter("a", INT, positional_only=True))
        with pytest.raises(BindError) as exc:
            bind_arguments(s, [kw("a", INT)])
        assert exc.value.code == "E_POSONLY_BY_KEYWORD"

    def test_keyword_only_rejects_positional(self):
        s = sig(Parameter("a", INT), Parameter("ratio", INT, keyword_only=True))
        with pytest.raises(BindError) as exc:
            bind_arguments(s, [pos(INT), pos(INT)])
        assert exc.value.code == "E_KWONLY_POSITIONAL"

    def test_missing_argument(self):
        s = sig(Parameter("a", INT))
        with pytest.raises(BindError) as exc:
            bind_arguments(s, [])
        assert exc.value.code == "E_MISSING_ARG"

    def test_unknown_keyword(self):
        s = sig(Parameter("a", INT))
        with pytest.raises(BindError) as exc:
            bind_arguments(s, [kw("zz", INT)])
        assert exc.value.code == "E_UNKNOWN_KEYWORD"

    def test_every_bound_keyword_is_not_positional_only(self):
        s = sig(
            Parameter("a", INT, positional_only=True),
            Parameter("b", INT),
            Parameter("c", INT, keyword_only=True),
        )
        b = bind_arguments(s, [pos(INT), kw("b", INT), kw("c", INT)])
        for name in b.bound_names():
            param = next(p for p in s.params if p.name == name)
            if isinstance(b.slots[name], Argument) and b.slots[name].name is not None:
                assert not param.positional_only


class TestSeparability:
    def test_type_separated_variadics_ok(self):
        s = sig(
            Parameter("texts", STRING, variadic=True),
            Parameter("integers", INT, variadic=True),
            Parameter("str", STRING),
        )
        validate_variadic_separability(s)  # no raise

    def test_positional_only_word_between_same_type_variadics(self):
        s = sig(
            Parameter("texts", STRING, variadic=True),
            Parameter("word", STRING, positional_only=True),
            Parameter("strs", STRING, variadic=True),
        )
        with pytest.raises(BindError) as exc:
            validate_variadic_separability(s)
        assert exc.value.code == "E_INSEPARABLE_SIGNATURE"

    def test_keyword_bindable_word_is_acceptable(self):
        s = sig(
            Parameter("texts", STRING, variadic=True),
            Parameter("word", STRING),
            Parameter("strs", STRING, variadic=True),
        )
        validate_variadic_separability(s)  # keyword can disambiguate

    def test_single_variadic_ok(self):
        validate_variadic_separability(sig(Parameter("xs", INT, variadic=True)))

    def test_adjacent_same_type_variadics_rejected(self):
        s = sig(Parameter("xs", INT, variadic=True), Parameter("ys", INT, variadic=True))
        with pytest.raises(BindError):
            validate_variadic_separability(s)


class TestEffectiveEquality:
    def test_default_vs_optional(self):
        a = sig(Parameter("a", INT), Parameter("b", INT, has_default=True))
        b = sig(Parameter("a", INT), Parameter("b", INT, optional=True))
        assert signatures_effectively_equal(a, b)

    def test_distinct_types(self):
        a = sig(Parameter("a", INT))
        b = sig(Parameter("a", FLOAT))
        assert not signatures_effectively_equal(a, b)

    def test_positional_only_differs(self):
        # Oracle: enumerate the call shapes of both; `(int a)` also admits
        # the keyword shape `a=int`, `(int a, /)` does not.
        a = sig(Parameter("a", INT, positional_only=True))
        b = sig(Parameter("a", INT))
        assert not signatures_effectively_equal(a, b)

    def test_symmetric_and_reflexive(self):
        import random

        rng = random.Random(3)
        pool = []
        for _ in range(12):
            params = []
            for i in range(rng.randint(0, 3)):
                params.append(
                    Parameter(
                        f"p{i}",
                        rng.choice([INT, STRING]),
                        optional=rng.random() < 0.3,
                        has_default=rng.random() < 0.3,
                        keyword_only=rng.random() < 0.2,
                    )
                )
            pool.append(sig(*params))
        for a in pool:
            assert signatures_effectively_equal(a, a)
            for b in pool:
                assert signatures_effectively_equal(a, b) == signatures_effectively_equal(b, a)


class TestPartial:
    def test_override_redefaults_parameter(self):
        s = sig(Parameter("value", ANY), Parameter("ratio", INT, keyword_only=True, has_default=True))
        derived = derive_partial_signature(s, {"ratio": None})
        ratio = next(p for p in derived.params if p.name == "ratio")
        assert ratio.has_default

    def test_unknown_override(self):
        s = sig(Parameter("a", INT))
        with pytest.raises(BindError):
            derive_partial_signature(s, {"zz": None})

    def test_positional_only_override_rejected(self):
        s = sig(Parameter("a", INT, positional_only=True))
        with pytest.raises(BindError):
            derive_partial_signature(s, {"a": None})

    def test_empty_override_identity(self):
        s = sig(Parameter("a", INT))
        assert derive_partial_signature(s, {}) == s


class TestCallbackCompatible:
    def required_mapper(self) -> FunctionType:
        return FunctionType(
            (
                ParamSig("element", ANY),
                ParamSig("index", INT, optional=True),
                ParamSig("this_arr", ANY, optional=True),
            ),
            ANY,
        )

    def test_keyword_only_params_excluded(self):
        provided = FunctionType(
            (ParamSig("value", ANY), ParamSig("ratio", INT, optional=True, keyword_only=True)),
            INT,
        )
        assert callback_compatible(provided, self.required_mapper())

    def test_excess_required_positional_incompatible(self):
        provided = FunctionType((ParamSig("a", INT), ParamSig("b", INT)), ANY)
        required = FunctionType((ParamSig("element", ANY),), ANY)
        assert not callback_compatible(provided, required)

    def test_contravariant_param_covariant_return(self):
        provided = FunctionType((ParamSig("x", OBJECT),), INT)
        required = FunctionType((ParamSig("x", INT),), OBJECT)
        assert callback_compatible(provided, required)

    def test_variance_truth_table(self):
        # Oracle: compatibility iff (required param assignable to provided
        # param) and (provided return assignable to required return).
        from cesno.types import is_assignable

        types = [INT, OBJECT, STRING]
        for p_in in types:
            for p_out in types:
                for r_in in types:
                    for r_out in types:
                        provided = FunctionType((ParamSig("x", p_in),), p_out)
                        required = FunctionType((ParamSig("x", r_in),), r_out)
                        expected = is_assignable(r_in, p_in) and is_assignable(p_out, r_out)
                        assert callback_compatible(provided, required) == expected, (p_in, p_out, r_in, r_out)
