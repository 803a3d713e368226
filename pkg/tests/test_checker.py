from __future__ import annotations

import pytest

from cesno.checker import check_source
from cesno.types import NominalType, types_equal


def diags(source: str, root=None):
    result = check_source(source, project_root=root)
    return result.diagnostics


def codes(source: str) -> list[str]:
    return diags(source).codes()


class TestConditionChecks:
    def test_if_ten_is_error(self):
        assert "E_COND_NOT_BOOL" in codes("if (10) { }")

    def test_while_non_bool(self):
        assert "E_COND_NOT_BOOL" in codes("while (1) { }")

    def test_bool_condition_clean(self):
        assert codes("if (true) { }") == []

    def test_ternary_condition(self):
        assert "E_COND_NOT_BOOL" in codes("let x = 1 ? 2 : 3")


class TestFloatEquality:
    def test_float_eq_warns(self):
        sink = diags("float a = 1.0\nlet ok = a == 2.0")
        assert [d.code for d in sink.warnings] == ["W_FLOAT_EQ"]
        assert not sink.has_errors()

    def test_int_eq_silent(self):
        assert codes("let ok = 1 == 2") == []

    def test_approx_op_silent(self):
        assert codes("let ok = 0.1 ~= 0.1") == []


class TestNullSafety:
    def test_null_to_non_nullable(self):
        assert "E_NULL_ASSIGN" in codes("string s = null")

    def test_union_accepts_null(self):
        assert codes("string|null s = null") == []

    def test_member_on_nullable_union_requires_narrowing(self):
        src = "string|null s = null\nlet n = s.length"
        assert "E_UNION_MEMBER" in codes(src)

    def test_coalescing_narrows(self):
        src = 'string|null s = null\nlet n = (s ??: "x").length'
        assert codes(src) == []

    def test_match_narrows(self):
        src = (
            "int|null v = null\n"
            "string s = match (v) {\n"
            '    int => "int" ;\n'
            '    null => "null" ;\n'
            "}\n"
        )
        assert codes(src) == []


class TestOverloadChecks:
    def test_effectively_equal_pair(self):
        src = "function f(int a, int b = 10) { }\nfunction f(int a, int b?) { }"
        assert "E_DUP_OVERLOAD" in codes(src)

    def test_distinct_overloads_ok(self):
        src = (
            "function addNumberBasedOnType(int integer_num) { return integer_num + 1 }\n"
            "function addNumberBasedOnType(float float_num) { return float_num + 5 }\n"
            "let a = addNumberBasedOnType(1)\n"
            "let b = addNumberBasedOnType(1.5)\n"
        )
        assert codes(src) == []

    def test_inseparable_signature(self):
        src = "function g(string... texts, string word, /, string... strs) { }"
        assert "E_INSEPARABLE_SIGNATURE" in codes(src)

    def test_class_method_duplicate_overloads(self):
        src = (
            "class C\n{\n"
            "    public method m(int a, int b = 10) { }\n"
            "    public method m(int a, int b?) { }\n"
            "}\n"
        )
        assert "E_DUP_OVERLOAD" in codes(src)


class TestNameResolution:
    def test_unresolved_identifier(self):
        assert "E_UNRESOLVED" in codes("print(nope)")

    def test_use_before_assignment(self):
        assert "E_UNDEFINED_USE" in codes("int a ;\nprint(a)")

    def test_assign_then_use_ok(self):
        assert codes("int a ;\na = 1\nprint(a)") == []

    def test_const_reassign(self):
        assert "E_CONST_REASSIGN" in codes("const k = 1\nk = 2")

    def test_keyword_in_context_method_name(self):
        assert codes("class C { public method for() { return 1 } }") == []


class TestCallChecks:
    def test_unknown_keyword(self):
        src = "function f(int a) { }\nf(b=1)"
        assert "E_UNKNOWN_KEYWORD" in codes(src)

    def test_positional_only_by_keyword(self):
        src = "function f(int a, /) { }\nf(a=1)"
        assert "E_POSONLY_BY_KEYWORD" in codes(src)

    def test_missing_argument(self):
        src = "function f(int a) { }\nf()"
        assert "E_MISSING_ARG" in codes(src)

    def test_static_const_constraint(self):
        src = (
            "function f(a: const) { }\n"
            "let v = 3\n"
            "f(v)\n"
        )
        assert "E_CONSTRAINT" in codes(src)

    def test_const_argument_passes(self):
        src = (
            "function f(a: const) { }\n"
            "const v = 3\n"
            "f(v)\nf(4)\n"
        )
        assert codes(src) == []

    def test_arity_type_error(self):
        src = "function f(int a) { }\nf(\"s\")"
        result = codes(src)
        assert result and all(c.startswith("E_") for c in result)


class TestGenericsStatic:
    def matrix(self, y_lines: int, call: str) -> str:
        rows25 = "[" + ", ".join("[" + ", ".join("0.0" for _ in range(15)) + "]" for _ in range(25)) + "]"
        rows_y = "[" + ", ".join("[" + ", ".join("0.0" for _ in range(35)) + "]" for _ in range(y_lines)) + "]"
        return (
            "class DemoMatrix <usize Lines, usize Columns>\n"
            "{\n"
            "    public seq<seq<float, Columns>, Lines> data\n"
            "    type MulOperandType<usize OperandColSize> =\n"
            "        DemoMatrix<SelfType.Columns, OperandColSize>\n"
            "    public constructor(seq<seq<float, infer Columns>, infer Lines> data)\n"
            "    { self.data = data }\n"
            "    public method multiply(MulOperandType<infer OperandColSize> by):\n"
            "        returns DemoMatrix<Lines, OperandColSize>;\n"
            "    public operator (*)(MulOperandType<infer OperandColSize> by)\n"
            "    { return self.multiply(by) }\n"
            "}\n"
            f"let x = DemoMatrix<Lines = 25, Columns = 15>({rows25})\n"
            f"let y = DemoMatrix<{y_lines}, 35>({rows_y})\n"
            f"let z = {call}\n"
        )

    def test_multiply_checks_and_yields(self):
        result = check_source(self.matrix(15, "x.multiply(y)"))
        assert not result.diagnostics.has_errors(), [d.render() for d in result.diagnostics.items]
        z = result.binding_types["z"]
        assert z.display() == "DemoMatrix<25, 35>"

    def test_wrong_operand_is_compile_error(self):
        result = check_source(self.matrix(14, "x.multiply(y)"))
        assert result.diagnostics.has_errors()

    def test_literal_shape_checked(self):
        src = (
            "class DemoMatrix <usize Lines, usize Columns>\n"
            "{\n"
            "    public seq<seq<float, Columns>, Lines> data\n"
            "    public constructor(seq<seq<float, infer Columns>, infer Lines> data)\n"
            "    { self.data = data }\n"
            "}\n"
            "let m = DemoMatrix<Lines = 2, Columns = 3>([[0.0, 0.0], [0.0, 0.0]])\n"
        )
        assert check_source(src).diagnostics.has_errors()


class TestCorpusPrograms:
    def test_dec_to_hex_clean(self):
        src = (
            'let num = int(\n'
            '  input(\n'
            '    "Please input an integer value in decimal: ",\n'
            "    check=s -> s.isInteger(),\n"
            '    on_fail=#redo(\n'
            '      "This is not a valid integer " +\n'
            '      "decimal number\\n"\n'
            "    )\n"
            "  )\n"
            ")\n"
            "let buf = StringBuffer(\n"
            "  init_size=int(log(16, num) + 3),\n"
            "  position=#end\n"
            ")\n"
            "let is_less_than_zero = num < 0\n"
            "while (num != 0)\n"
            "{\n"
            "  buf.appendHead(\n"
            "    (let digit = num % 16) > 9\n"
            "    ? 'A'.charAfter(digit - 10)\n"
            "    : digit\n"
            "  )\n"
            "  num /= 16\n"
            "}\n"
            'buf.appendHead("0x")\n'
            'is_less_than_zero ? buf.appendHead("-") : void\n'
            'print("The result is", buf)\n'
        )
        sink = diags(src)
        assert not sink.has_errors(), [d.render() for d in sink.items]

    def test_match_program_types(self):
        src = (
            'string s = match (int(input("Input a number: "))) {\n'
            '    4      => "it is four" ;\n'
            '    1, 3   => "it is one or three" ;\n'
            '    otherwise => "others" ;\n'
            "} ;\n"
            'print("Result: ", s)\n'
        )
        sink = diags(src)
        assert not sink.has_errors(), [d.render() for d in sink.items]

    def test_match_with_non_string_arm_rejected_for_string_target(self):
        src = (
            "string s = match (3) {\n"
            "    4 => 7 ;\n"
            '    otherwise => "x" ;\n'
            "}\n"
        )
        assert "E_TYPE_MISMATCH" in codes(src)

    def test_checker_import_scope_locality(self, tmp_path):
        util = tmp_path / "src" / "util"
        util.mkdir(parents=True)
        (util / "RegexUtil.ces").write_text(
            "export function validateKeanEmail(const string address) { return true }\n",
            encoding="utf-8",
        )
        src_ok = "{\n  import src.util.RegexUtil.validateKeanEmail ;\n}\n"
        assert not diags(src_ok, root=tmp_path).has_errors()
        src_after = src_ok + "let x = validateKeanEmail(\"a\")\n"
        assert "E_UNRESOLVED" in diags(src_after, root=tmp_path).codes()

    def test_checker_unexported_import(self, tmp_path):
        util = tmp_path / "src" / "util"
        util.mkdir(parents=True)
        (util / "RegexUtil.ces").write_text("const kean_email_checker = 1\n", encoding="utf-8")
        src = "import src.util.RegexUtil.kean_email_checker ;\n"
        assert "E_NOT_EXPORTED" in diags(src, root=tmp_path).codes()
