from __future__ import annotations

import io
import random

import pytest

from cesno.builtins import shared_builtins
from cesno.interpreter import Interpreter
from conftest import run_program


class TestBuiltinInstall:
    def test_alias_identity(self):
        interp = Interpreter(stdin=io.StringIO(), stdout=io.StringIO())
        env = interp.make_root_env()
        pairs = [
            ("int", "i32"),
            ("long", "i64"),
            ("byte", "i8"),
            ("float", "f64"),
            ("floatsg", "f32"),
            ("sequence", "seq"),
            ("dictionary", "dict"),
        ]
        for canonical, alias in pairs:
            assert env.lookup(canonical).payload is env.lookup(alias).payload

    def test_table_names_present(self):
        interp = Interpreter(stdin=io.StringIO(), stdout=io.StringIO())
        env = interp.make_root_env()
        for name in (
            "input",
            "print",
            "open",
            "sorted",
            "reversed",
            "random",
            "randint",
            "exit",
            "int",
            "long",
            "byte",
            "float",
            "floatsg",
            "bool",
            "char",
            "string",
            "object",
            "tuple",
            "array",
            "list",
            "sequence",
            "dictionary",
            "set",
            "stdin",
            "stdout",
            "hex",
            "usize",
            "bigint",
            "logic",
        ):
            assert env.lookup(name) is not None, name

    def test_absent_name(self):
        interp = Interpreter(stdin=io.StringIO(), stdout=io.StringIO())
        env = interp.make_root_env()
        assert env.lookup("undefined_builtin") is None

    def test_method_alias_identity(self):
        b = shared_builtins()
        arr = b.classes["array"]
        assert arr.methods["reduce"][0].impl is arr.methods["fold"][0].impl
        assert arr.methods["reduceReverse"][0].impl is arr.methods["foldr"][0].impl
        s = b.classes["string"]
        assert s.methods["startsWith"][0].impl is s.methods["beginsWith"][0].impl
        assert s.methods["endsWith"][0].impl is s.methods["endWith"][0].impl
        assert arr.methods["foreach"][0].impl is arr.methods["forEach"][0].impl


class TestInput:
    def test_redo_until_pass(self):
        src = (
            'let v = input("n: ", check=s -> s.isInteger(), on_fail=#redo("bad\\n"))\n'
            "print(v)"
        )
        r = run_program(src, stdin="abc\n42\n")
        assert r.stdout == "n: bad\nn: 42\n"

    def test_plain_input(self):
        r = run_program('print(input())', stdin="hi\n")
        assert r.stdout == "hi\n"

    def test_regex_check(self):
        src = 'print(input("d: ", check=/\\d+/))'
        r = run_program(src, stdin="77\n")
        assert r.stdout == "d: 77\n"

    def test_eof_throws_input_error(self):
        r = run_program("let x = input()")
        assert r.error is not None and "InputError" in str(r.error)

    def test_redo_message_count(self):
        src = 'let v = input("p", check=s -> s.isInteger(), on_fail=#redo("R"))\nprint(v)'
        r = run_program(src, stdin="a\nb\nc\n9\n")
        assert r.stdout.count("R") == 3
        assert r.stdout.endswith("9\n")

    def test_return_undefined_on_fail(self):
        src = 'let v = input("p: ", check=s -> s.isInteger(), on_fail=#return_undefined)\nprint(v??)'
        r = run_program(src, stdin="abc\n")
        assert r.stdout == "p: false\n"

    def test_format_argument_rejected_as_unsupported(self):
        src = 'let v = input("p", format="{array; i32; x}")'
        r = run_program(src, stdin="1\n")
        assert r.error is not None and "E_UNSUPPORTED_FEATURE" in str(r.error)


class TestPrint:
    def test_paper_result_line(self):
        assert run_program('print("Result: ", "others")').stdout == "Result: others\n"

    def test_empty_line(self):
        assert run_program("print()").stdout == "\n"

    def test_concatenation_without_forced_space(self):
        assert run_program('print("a", 1, true)').stdout == "a 1 true\n"

    def test_space_inserted_between_words(self):
        assert run_program('print("The result is", "0xFF")').stdout == "The result is 0xFF\n"

    def test_no_double_space_after_trailing_space(self):
        assert run_program('print("First value greater than 10 is ", 20)').stdout == "First value greater than 10 is 20\n"


class TestFiles:
    def test_lines_and_append(self, tmp_path):
        target = tmp_path / "data.txt"
        target.write_text("one\ntwo\n", encoding="utf-8")
        src = (
            f'let file = open("{target}", mode=#read_append)\n'
            "file.lines.foreach(print)\n"
            'file.append("Newly append line.\\n")\n'
        )
        r = run_program(src)
        assert r.stdout == "one\ntwo\n"
        assert target.read_text(encoding="utf-8").splitlines()[-1] == "Newly append line."

    def test_destructor_closes(self, tmp_path):
        target = tmp_path / "data.txt"
        target.write_text("x\n", encoding="utf-8")
        src = (
            "let probe = []\n"
            "{\n"
            f'    let file = open("{target}")\n'
            "    probe.push(file)\n"
            "}\n"
            'try { let again = probe[0].lines } catch (FileError e) { print("closed") }'
        )
        r = run_program(src)
        assert r.stdout == "closed\n"

    def test_missing_file_read(self, tmp_path):
        r = run_program(f'let f = open("{tmp_path}/absent.txt")')
        assert r.error is not None and "FileError" in str(r.error)


class TestContainersAndStrings:
    def test_map_with_ratio(self):
        assert run_program('print(["0x1", "0xE"].map(int with ratio=16))').stdout == "[1, 14]\n"

    def test_trim(self):
        assert run_program('print("  a ".trim())').stdout == "a\n"

    def test_sort_algorithms_match_reference(self):
        rng = random.Random(11)
        for algo in ("quick", "merge", "insertion"):
            values = [rng.randint(-50, 50) for _ in range(20)]
            src = f"let xs = {values}\nprint(xs.sort(algorithm=#{algo}))"
            expected = "[" + ", ".join(str(v) for v in sorted(values)) + "]\n"
            assert run_program(src).stdout == expected, algo

    def test_sort_returns_self_and_mutates(self):
        src = "let xs = [3, 1, 2]\nlet ys = xs.sort(algorithm=#quick)\nprint(xs === ys, \" \", xs)"
        assert run_program(src).stdout == "true [1, 2, 3]\n"

    def test_hex(self):
        assert run_program("print(hex(255), \" \", hex(-26))").stdout == "0xFF -0x1A\n"

    def test_log_and_abs(self):
        r = run_program("print(log(2, 8), \" \", abs(-4), \" \", abs(-1.5))")
        assert r.stdout == "3.0 4 1.5\n"

    def test_char_after(self):
        assert run_program("print('A'.charAfter(5))").stdout == "F\n"

    def test_ends_with_variadic(self):
        src = 'print("main.ces".endsWith(".ces", ".cesno"), " ", "main.txt".endsWith(".ces", ".cesno"))'
        assert run_program(src).stdout == "true false\n"

    def test_case_methods_and_split(self):
        src = 'print("aB".toUpperCase(), " ", "aB".toLowerCase(), " ", "a,b".split(","))'
        assert run_program(src).stdout == 'AB ab ["a", "b"]\n'

    def test_push_pop_append_head(self):
        src = "let xs = [2]\nxs.push(3)\nxs.appendHead(1)\nlet last = xs.pop()\nprint(xs, \" \", last)"
        assert run_program(src).stdout == "[1, 2] 3\n"

    def test_reduce_and_foldr(self):
        src = (
            "let xs = [1, 2, 3]\n"
            "print(xs.reduce((a, b) -> a + b), \" \", xs.fold((a, b) -> a + b, 10))\n"
            'print(["a", "b"].reduceReverse((a, b) -> a + b))'
        )
        assert run_program(src).stdout == "6 16\nba\n"

    def test_reduce_with_operator_ref(self):
        src = "print([false, true, false].reduce(operator::or))"
        assert run_program(src).stdout == "true\n"

    def test_dict_methods(self):
        src = (
            'let d = {1: "a", 2: "b"}\n'
            "print(d.has(1), \" \", d.has(9), \" \", d.keys(), \" \", d.values(), \" \", d.length)\n"
            'd[3] = "c"\n'
            "print(d[3])"
        )
        assert run_program(src).stdout == 'true false [1, 2] ["a", "b"] 2\nc\n'

    def test_dict_duplicate_keys_rejected(self):
        r = run_program('let d = {1: "a", 1: "b"}')
        assert r.error is not None

    def test_set_operations(self):
        src = "let s = {1, 4}\ns.add(2)\ns.remove(4)\nprint(1 in s, \" \", 4 in s, \" \", s.length)"
        assert run_program(src).stdout == "true false 2\n"

    def test_string_buffer_positions(self):
        src = (
            "let buf = StringBuffer(position=#end)\n"
            'buf.append("b")\n'
            'buf.appendHead("a")\n'
            'buf.append("c")\n'
            "print(buf, \" \", buf.length)"
        )
        assert run_program(src).stdout == "abc 3\n"

    def test_sorted_and_reversed(self):
        src = "let xs = [3, 1, 2]\nprint(sorted(xs), \" \", reversed(xs), \" \", xs)"
        assert run_program(src).stdout == "[1, 2, 3] [2, 1, 3] [3, 1, 2]\n"

    def test_tuple_and_seq_indexing(self):
        src = 'let t = (0, 0, "str")\nprint(t[2], " ", t.length)'
        assert run_program(src).stdout == "str 3\n"

    def test_index_out_of_range(self):
        r = run_program("let xs = [1]\nlet y = xs[5]")
        assert r.error is not None and "IndexError" in str(r.error)


class TestRandomSeeding:
    def test_seeded_runs_identical(self):
        src = "print(randint(0, 100), \" \", randint(0, 100), \" \", random())"
        a = run_program(src, seed=42).stdout
        b = run_program(src, seed=42).stdout
        c = run_program(src, seed=43).stdout
        assert a == b
        assert a != c


class TestOsWalk:
    def test_walk_counts_lines(self, tmp_path):
        (tmp_path / "a.ces").write_text("1\n2\n3\n", encoding="utf-8")
        (tmp_path / "b.txt").write_text("1\n2\n3\n4\n5\n", encoding="utf-8")
        sub = tmp_path / "nested"
        sub.mkdir()
        (sub / "c.cesno").write_text("1\n", encoding="utf-8")
        src = (
            "import os\n"
            "let total_lines = 0n\n"
            f'for (const file in os.walk("{tmp_path}"))\n'
            "{\n"
            '  if (file.name.endsWith(".ces", ".cesno"))\n'
            "  {\n"
            "    total_lines += file.line_count\n"
            "  }\n"
            "}\n"
            "print(`total ${total_lines}`)"
        )
        r = run_program(src)
        assert r.stdout == "total 4\n"

    def test_empty_dir(self, tmp_path):
        src = (
            "import os\n"
            "let n = 0\n"
            f'for (const f in os.walk("{tmp_path}")) {{ n += 1 }}\n'
            "print(n)"
        )
        assert run_program(src).stdout == "0\n"

    def test_missing_dir(self, tmp_path):
        r = run_program(f'import os\nlet e = os.walk("{tmp_path}/nope")')
        assert r.error is not None

    def test_deterministic_order(self, tmp_path):
        for name in ("z.ces", "a.ces", "m.ces"):
            (tmp_path / name).write_text("x\n", encoding="utf-8")
        src = (
            "import os\n"
            f'for (const f in os.walk("{tmp_path}")) {{ print(f.name) }}'
        )
        assert run_program(src).stdout == "a.ces\nm.ces\nz.ces\n"


class TestCoreTraits:
    def test_addable_generic_function(self):
        src = (
            "function <type OperandType: Addable>\n"
            "add(OperandType a, OperandType b)\n"
            "{ return a + b ; }\n"
            "print(add<int>(1, 2), \" \", add(\"x\", \"y\"))"
        )
        assert run_program(src).stdout == "3 xy\n"

    def test_addable_violation(self):
        src = (
            "function <type OperandType: Addable> add(OperandType a, OperandType b) { return a + b }\n"
            "class Opaque { public constructor() { } }\n"
            "let r = add(Opaque(), Opaque())"
        )
        r = run_program(src)
        assert r.error is not None

    def test_builtin_trait_registration(self):
        b = shared_builtins()
        for name in ("int", "string", "float"):
            cls = b.classes[name]
            assert cls.implements(b.traits["Equal"])
            assert cls.implements(b.traits["Addable"])
        for name in ("array", "list", "dictionary", "set", "string"):
            assert b.classes[name].implements(b.traits["Lengthwise"])

    def test_lengthwise_constraint(self):
        src = (
            "function f(Container a: Lengthwise) { return a.length }\n"
            "print(f([1, 2, 3]), \" \", f(\"abcd\"))"
        )
        r = run_program(src.replace("Container ", ""))
        assert r.stdout == "3 4\n"


class TestDateStub:
    def test_construction_and_equality(self):
        src = 'print(Date("a") == Date("a"), " ", Date("a") == Date("b"))'
        assert run_program(src).stdout == "true false\n"
