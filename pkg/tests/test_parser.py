from __future__ import annotations

import pytest

from cesno import nodes as N
from cesno.diagnostics import DiagnosticSink
from cesno.parser import parse_source


def parse(source: str) -> list[N.Node]:
    sink = DiagnosticSink()
    module = parse_source(source, diagnostics=sink)
    assert not sink.has_errors(), [d.render() for d in sink.items]
    return module.statements


def parse_one(source: str) -> N.Node:
    stmts = parse(source)
    assert len(stmts) == 1, stmts
    return stmts[0]


class TestDeclarations:
    def test_example_one(self):
        stmts = parse("int a ;\nint b = 10 ;\na = b += 20 ;")
        assert isinstance(stmts[0], N.Declaration)
        assert stmts[0].name == "a"
        assert isinstance(stmts[0].declared_type, N.TName)
        assert stmts[0].declared_type.name == "int"
        assert stmts[0].init is None
        assert isinstance(stmts[1], N.Declaration)
        assert stmts[1].init is not None
        assign = stmts[2]
        assert isinstance(assign, N.Assignment)
        assert isinstance(assign.value, N.Assignment)
        assert assign.value.op == "+="

    def test_rule_two_colon_form(self):
        decl = parse_one("b: int")
        assert isinstance(decl, N.Declaration)
        assert decl.name == "b"
        assert decl.declared_type.name == "int"

    def test_let_shorthand(self):
        decl = parse_one("let x = 0")
        assert decl.shorthand == "let"
        assert decl.init.lit_kind == "number"

    def test_const_with_regex_initializer(self):
        decl = parse_one(r"const kean_email_checker = /[A-Za-z]+\@kean\.edu/")
        assert decl.shorthand == "const" or "const" in decl.modifiers
        assert isinstance(decl.init, N.RegexExpr)

    def test_array_type_declaration(self):
        decl = parse_one("int[] a = [10, 20]")
        assert isinstance(decl.declared_type, N.TArray)
        assert isinstance(decl.init, N.ArrayExpr)

    def test_declaration_then_delete(self):
        stmts = parse("int[] a = [10, 20] ;\ndelete a ;")
        assert isinstance(stmts[1], N.Delete)
        assert stmts[1].name == "a"

    def test_empty_input(self):
        assert parse("") == []

    def test_match_as_rvalue(self):
        decl = parse_one(
            'string s = match (x) {\n'
            '    4      => "it is four" ;\n'
            '    1, 3   => "it is one or three" ;\n'
            '    otherwise => "others" ;\n'
            '}'
        )
        assert isinstance(decl, N.Declaration)
        assert isinstance(decl.init, N.Match)
        arms = decl.init.arms
        assert len(arms) == 3
        assert len(arms[1].patterns) == 2
        assert arms[2].is_otherwise


class TestStatementTermination:
    def test_trailing_operator_continues(self):
        stmts = parse("let x = 1 +\n2")
        assert len(stmts) == 1
        assert isinstance(stmts[0].init, N.Binary)

    def test_two_complete_calls(self):
        stmts = parse("print(1)\nprint(2)")
        assert len(stmts) == 2

    def test_leading_dot_continues(self):
        stmts = parse("a\n.b(c)")
        assert len(stmts) == 1
        call = stmts[0].expr
        assert isinstance(call, N.Call)
        assert isinstance(call.callee, N.Member)

    def test_leading_binary_op_continues(self):
        stmts = parse("let y = a\nor b")
        assert len(stmts) == 1
        assert isinstance(stmts[0].init, N.Binary)
        assert stmts[0].init.op == "or"

    def test_return_before_closing_brace_is_void(self):
        func = parse_one("function f() {\n    return\n}")
        ret = func.body.statements[0]
        assert isinstance(ret, N.Return)
        assert ret.value is None

    def test_return_expects_value_on_next_line(self):
        func = parse_one("function f(a) {\n    return\n        a.test(b) ;\n}")
        ret = func.body.statements[0]
        assert ret.value is not None

    def test_semicolon_equivalence(self):
        bare = parse("let x = 1\nlet y = 2\nprint(x)")
        seeded = parse("let x = 1;\nlet y = 2;\nprint(x);")
        assert [type(s) for s in bare] == [type(s) for s in seeded]


class TestExpressions:
    def test_precedence_mul_binds_tighter(self):
        expr = parse_one("let r = a + b * c").init
        assert expr.op == "+"
        assert isinstance(expr.right, N.Binary)
        assert expr.right.op == "*"

    def test_paper_ternary_with_decl_expr(self):
        stmt = parse_one("x = (let digit = num % 16) > 9 ? 'A'.charAfter(digit - 10) : digit")
        tern = stmt.value
        assert isinstance(tern, N.Ternary)
        assert isinstance(tern.condition, N.Binary)
        assert isinstance(tern.condition.left, N.DeclExpr)
        assert isinstance(tern.then_expr, N.Call)

    def test_arrow_function(self):
        stmt = parse_one("let f = s -> s.isInteger()")
        arrow = stmt.init
        assert isinstance(arrow, N.ArrowFunction)
        assert arrow.params[0].name == "s"

    def test_postfix_nullish_tests(self):
        stmt = parse_one("let ok = value??? == false")
        cmp = stmt.init
        assert cmp.op == "=="
        assert isinstance(cmp.left, N.Unary)
        assert cmp.left.op == "???"

    def test_object_literal(self):
        stmt = parse_one('let s = StringLike@{value: ""}')
        obj = stmt.init
        assert isinstance(obj, N.ObjectLiteral)
        assert obj.fields[0][0] == "value"

    def test_with_partial(self):
        stmt = parse_one("let p = addThenShow with b = 1")
        part = stmt.init
        assert isinstance(part, N.WithPartial)
        assert part.overrides[0][0] == "b"

    def test_map_with_partial_argument(self):
        stmt = parse_one('["0x1", "0xE"].map(int with ratio=16)')
        call = stmt.expr
        arg = call.args[0].value
        assert isinstance(arg, N.WithPartial)

    def test_generic_call(self):
        stmt = parse_one("let z = DemoMatrix<Lines = 25, Columns = 15>(data)")
        call = stmt.init
        assert isinstance(call, N.Call)
        assert call.generic_args[0].name == "Lines"
        assert call.generic_args[0].const_value == 25

    def test_generic_vs_comparison(self):
        stmt = parse_one("let t = a < b")
        assert isinstance(stmt.init, N.Binary)
        assert stmt.init.op == "<"

    def test_enum_member_ref(self):
        stmt = parse_one('f(on_fail=#redo("msg"))')
        arg = stmt.expr.args[0]
        assert arg.name == "on_fail"
        assert isinstance(arg.value, N.EnumMemberRef)
        assert arg.value.args is not None

    def test_trailing_comma_set_and_tuple(self):
        set_stmt = parse_one("let s = {0,}")
        assert isinstance(set_stmt.init, N.SetExpr)
        tup_stmt = parse_one("let t = (0,)")
        assert isinstance(tup_stmt.init, N.TupleExpr)

    def test_dict_literal(self):
        stmt = parse_one('let d = {0: "zero", 4: "four", 2: "zwei!"}')
        assert isinstance(stmt.init, N.DictExpr)
        assert len(stmt.init.pairs) == 3

    def test_template_expression(self):
        stmt = parse_one("print(`${x + 2}`)")
        tmpl = stmt.expr.args[0].value
        assert isinstance(tmpl, N.TemplateExpr)
        kind, expr = tmpl.parts[0]
        assert kind == "expr"
        assert isinstance(expr, N.Binary)

    def test_operator_ref(self):
        stmt = parse_one("xs.reduce(operator::or)")
        arg = stmt.expr.args[0].value
        assert isinstance(arg, N.OperatorRef)
        assert arg.name == "or"

    def test_not_binds_looser_than_comparison(self):
        stmt = parse_one("let b = not a == b")
        assert isinstance(stmt.init, N.Unary)
        assert stmt.init.op == "not"
        assert isinstance(stmt.init.operand, N.Binary)


class TestStructures:
    def test_class_book(self):
        cls = parse_one(
            "class Book\n"
            "{\n"
            "    readonly string title ;\n"
            "    readonly string[] author ;\n"
            "\n"
            "    constructor(string title, string[] author)\n"
            "}"
        )
        assert isinstance(cls, N.ClassDef)
        decls = [m for m in cls.members if isinstance(m, N.Declaration)]
        ctors = [m for m in cls.members if isinstance(m, N.FunctionDef) and m.kind == "constructor"]
        assert len(decls) == 2
        assert len(ctors) == 1
        assert ctors[0].body is None

    def test_enum_with_payload(self):
        enum = parse_one("enum position {start, end, at(int)}")
        assert isinstance(enum, N.EnumDef)
        assert [m.name for m in enum.members] == ["start", "end", "at"]
        assert enum.members[2].payload is not None

    def test_for_then_else(self):
        loop = parse_one(
            "for (let n in numbers)\n"
            "{\n"
            "    if (n > 10) { break }\n"
            "}\n"
            "then\n"
            "{\n"
            '    print("No value greater than 10.")\n'
            "}\n"
            "else\n"
            "{\n"
            '    print("First value greater than 10 is ", n)\n'
            "}"
        )
        assert isinstance(loop, N.ForLoop)
        assert loop.then_block is not None
        assert loop.else_block is not None
        ind = loop.indicators[0]
        assert isinstance(ind, N.InIndicator)
        assert ind.binding_name == "n"

    def test_c_style_indicator(self):
        loop = parse_one("for (int i = 0; i < 10; i++) { }")
        assert isinstance(loop.indicators[0], N.CStyleIndicator)

    def test_multi_indicator(self):
        loop = parse_one("for (let a in [1, 2], let b in [1]) { }")
        assert len(loop.indicators) == 2

    def test_keyword_as_method_name(self):
        cls = parse_one("class C { method for() { } }")
        method = cls.members[0]
        assert isinstance(method, N.FunctionDef)
        assert method.name == "for"

    def test_class_with_inherits_and_super(self):
        cls = parse_one(
            "class Teacher inherits Staff\n"
            "{\n"
            "    Course[] current_courses\n"
            "\n"
            "    public constructor(string name, string id, Course[] current_courses)\n"
            "    {\n"
            "        super(name, id)\n"
            "        self.current_courses = current_courses\n"
            "    }\n"
            "}"
        )
        assert cls.inherits.name == "Staff"

    def test_property_with_getter_setter_overloads(self):
        cls = parse_one(
            "class SimpleName\n"
            "{\n"
            "    private tuple<string, string> name\n"
            "\n"
            "    public string first_name\n"
            "    {\n"
            "        getter { return self.name[0] ; }\n"
            "        setter(string value) { self.name[0] = value ; }\n"
            "        setter(SomeText value) { setter(value.text) ; }\n"
            "    }\n"
            "}"
        )
        prop = cls.members[1]
        assert isinstance(prop, N.PropertyDecl)
        assert len(prop.getters) == 1
        assert len(prop.setters) == 2

    def test_trait_hasfalsy(self):
        trait = parse_one(
            "trait HasFalsy\n"
            "{\n"
            "    static const $zeros_value: ImplType[]\n"
            "    static const $zeros_validator: (ImplType -> bool)[]\n"
            "}"
        )
        assert isinstance(trait, N.TraitDef)
        names = [m.name for m in trait.members]
        assert names == ["$zeros_value", "$zeros_validator"]

    def test_class_implements_with_trait_statics(self):
        cls = parse_one(
            "class StringLike implements HasFalsy\n"
            "{\n"
            '    static const HasFalsy:$zeros_value = [StringLike@{value: ""}]\n'
            "    static const HasFalsy:$zeros_validator = [s -> s.trim().length == 0]\n"
            "}"
        )
        assert [t.name for t in cls.implements] == ["HasFalsy"]
        decls = [m for m in cls.members if isinstance(m, N.Declaration)]
        assert decls[0].qualified_trait == "HasFalsy"
        assert decls[0].name == "$zeros_value"

    def test_export_block(self):
        block = parse_one(
            "export\n{\nfunction somethingToExport1() { } ;\nconst something_to_export_2 = 0 ;\n}"
        )
        assert isinstance(block, N.ModifierBlock)
        assert block.modifiers == ["export"]
        assert len(block.statements) == 2

    def test_operator_definition_in_class(self):
        cls = parse_one(
            "class DemoMatrix <usize Lines, usize Columns>\n"
            "{\n"
            "    operator (*)(MulOperandType<infer OperandColSize> by)\n"
            "    {\n"
            "        return self.multiply(by)\n"
            "    }\n"
            "}"
        )
        op = cls.members[0]
        assert isinstance(op, N.OperatorDef)
        assert op.func.operator_symbol == "*"
        assert cls.generic_params[0].kind == "usize"

    def test_method_with_returns_constraint_and_no_body(self):
        cls = parse_one(
            "class DemoMatrix <usize Lines, usize Columns>\n"
            "{\n"
            "    type MulOperandType<usize OperandColSize> =\n"
            "        DemoMatrix<SelfType.Columns, OperandColSize>\n"
            "\n"
            "    method multiply(\n"
            "        MulOperandType<infer OperandColSize> by\n"
            "    ):\n"
            "        returns DemoMatrix<Lines, OperandColSize>;\n"
            "}"
        )
        alias = cls.members[0]
        assert isinstance(alias, N.TypeAliasDef)
        method = cls.members[1]
        assert method.body is None
        assert isinstance(method.constraints[0], N.ReturnsCheck)

    def test_implement_block(self):
        impl = parse_one(
            "implement dict<type KeyType,\n"
            "  type ValueType: Equal>\n"
            "{\n"
            "  method checkEqual(\n"
            "    KeyType key,\n"
            "    ValueType check\n"
            "  )\n"
            "  {\n"
            "    return\n"
            "    self.has(key) and self[key] == check\n"
            "  }\n"
            "}"
        )
        assert isinstance(impl, N.ImplementBlock)
        target = impl.target
        assert isinstance(target, N.TName)
        assert target.generic_args[0].declares_name == "KeyType"
        assert target.generic_args[1].declares_bound.name == "Equal"

    def test_enum_type_alias_with_payload(self):
        enum = parse_one(
            "type FanState =\n"
            "  enum\n"
            "  {\n"
            "    on,\n"
            "    off,\n"
            "    maintaining(\n"
            "      Date from_date,\n"
            "      Date until_date\n"
            "    )\n"
            "  }"
        )
        assert isinstance(enum, N.EnumDef)
        assert enum.name == "FanState"
        assert enum.members[2].payload[0].name == "from_date"

    def test_try_catch(self):
        stmt = parse_one(
            "try { risky() } catch (ConstraintNotFulfilledError e) { handle(e) }"
        )
        assert isinstance(stmt, N.Try)
        assert stmt.catches[0].name == "e"

    def test_anonymous_function_with_returns_constraint(self):
        stmt = parse_one("let f = function(a):\n    returns int,\n    a: int\n{ return a + 1 }")
        func = stmt.init.func
        assert func.name is None
        assert any(isinstance(c, N.ReturnsCheck) for c in func.constraints)
        assert any(isinstance(c, N.ParamConstraint) for c in func.constraints)

    def test_import_forms(self):
        stmts = parse(
            "{\n  import src.util ;\n  util.RegexUtil.validateKeanEmail(\"a@kean.edu\") ;\n}\n"
            "{\n  from src.util.RegexUtil\n    import validateKeanEmail as validate,\n          validateWenzhouKeanEmail\n          as validate2 ;\n}"
        )
        first_block, second_block = stmts
        imp = first_block.statements[0]
        assert isinstance(imp, N.Import)
        assert imp.segments == ["src", "util"]
        frm = second_block.statements[0]
        assert isinstance(frm, N.FromImport)
        assert frm.names == [("validateKeanEmail", "validate"), ("validateWenzhouKeanEmail", "validate2")]

    def test_break_with_indicator_and_eval(self):
        loop = parse_one("for (let i in xs) { break i eval 42 }")
        brk = loop.body.statements[0]
        assert brk.indicator == "i"
        assert brk.eval_expr is not None


class TestParameters:
    def params(self, src: str):
        func = parse_one(f"function f{src} {{ }}")
        return func.params

    def test_multiple_variadics(self):
        ps = self.params("(string... texts, int... integers, string str)")
        assert [p.variadic for p in ps] == [True, True, False]

    def test_constraint_parameter(self):
        ps = self.params("(Container a: const & Lengthwise & (a.length > 2))")
        assert len(ps) == 1
        c = ps[0].constraint
        assert isinstance(c, N.ConstraintJoin)
        assert len(c.items) == 3
        assert isinstance(c.items[0], N.ModifierCheck)
        assert isinstance(c.items[1], N.TypeCheck)
        assert isinstance(c.items[2], N.BoolCheck)

    def test_default_value(self):
        ps = self.params("(int a, int b = 10)")
        assert ps[1].optional
        assert ps[1].default is not None

    def test_optional_marker(self):
        ps = self.params("(int a, int b?)")
        assert ps[1].optional

    def test_positional_and_keyword_markers(self):
        ps = self.params("(int a, /, int b, *, int c)")
        assert ps[0].positional_only
        assert not ps[1].positional_only
        assert ps[2].keyword_only

    def test_typed_and_colon_forms_agree(self):
        a = self.params("(int a)")[0]
        b = self.params("(a: int)")[0]
        assert a.name == b.name == "a"
        assert a.declared_type.name == "int"
        assert isinstance(b.constraint, N.TypeCheck)

    def test_inline_enum_parameter(self):
        ps = self.params("(position: enum {start, end, at(int)} = #end)")
        c = ps[0].constraint
        assert isinstance(c, N.TypeCheck)
        assert isinstance(c.type_expr, N.TEnumInline)
        assert isinstance(ps[0].default, N.EnumMemberRef)

    def test_function_type_parameter(self):
        ps = self.params("(mapper: (element: ElementType, index?: int, this_arr?: ElementType[]) -> MappedType)")
        c = ps[0].constraint
        assert isinstance(c, N.TypeCheck)
        assert isinstance(c.type_expr, N.TFunc)
        assert c.type_expr.params[1].optional


class TestSpanInvariants:
    def test_child_spans_inside_parent(self):
        module = parse_source("let x = 1 + 2\nprint(x)")

        def walk(node: N.Node):
            for name, value in vars(node).items():
                if name == "span":
                    continue
                children = []
                if isinstance(value, N.Node):
                    children = [value]
                elif isinstance(value, list):
                    children = [v for v in value if isinstance(v, N.Node)]
                for child in children:
                    assert child.span.start_byte >= node.span.start_byte
                    assert child.span.end_byte <= node.span.end_byte
                    walk(child)

        for stmt in module.statements:
            walk(stmt)

    def test_determinism(self):
        src = "let x = a + b * c\nif (x > 1) { print(x) }"
        import dataclasses

        def strip(node):
            return N.dump(node)

        a = [strip(s) for s in parse_source(src).statements]
        b = [strip(s) for s in parse_source(src).statements]
        assert a == b


class TestDecToHexProgram:
    SOURCE = '''// Get the number
let num = int(
  input(
    // Input prompt, show user what to do
    "Please input an integer value in decimal: ",
    // Check if the input matches the
    // check condition.
    // By default, isInteger ratio set to dec, 10
    check=s -> s.isInteger(),
    // If not number, print redo prompt,
    // then re-run
    on_fail=#redo(
      "This is not a valid integer " +
      "decimal number\\n"
    )
  )
)

// Build the number
// Init the size, and put the add position to end
let buf = StringBuffer(
  init_size=int(log(16, num) + 3),
  position=#end
)
let is_less_than_zero = num < 0

while (num != 0)
{
  buf.appendHead(
    // The result for this if-else statement
    // will be char|int
    (let digit = num % 16) > 9
    ? 'A'.charAfter(digit - 10) // char type
    : digit // int type
  )
  num /= 16
}
buf.appendHead("0x")

// Add minus sign if needed
is_less_than_zero ? buf.appendHead("-") : void

// Print the result
print("The result is", buf)
'''

    def test_parses_clean(self):
        stmts = parse(self.SOURCE)
        assert len(stmts) == 7
        assert isinstance(stmts[3], N.WhileLoop)
