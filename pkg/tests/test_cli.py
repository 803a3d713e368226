from __future__ import annotations

import io
from pathlib import Path

import pytest

from cesno.cli import main

MATCH_PROGRAM = (
    'string s = match (int(input("Input a number: "))) {\n'
    '    4      => "it is four" ;\n'
    '    1, 3   => "it is one or three" ;\n'
    '    otherwise => "others" ;\n'
    "} ;\n"
    "\n"
    'print("Result: ", s)\n'
)


def invoke(argv, stdin_text=""):
    stdin = io.StringIO(stdin_text)
    stdout = io.StringIO()
    stderr = io.StringIO()
    code = main(argv, stdin=stdin, stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


@pytest.fixture
def match_file(tmp_path: Path) -> Path:
    path = tmp_path / "match.ces"
    path.write_text(MATCH_PROGRAM, encoding="utf-8")
    return path


class TestRun:
    def test_match_program_three(self, match_file):
        code, out, err = invoke(["run", str(match_file)], "3\n")
        assert code == 0, err
        assert out == "Input a number: Result: it is one or three\n"

    def test_match_program_ten(self, match_file):
        code, out, err = invoke(["run", str(match_file)], "10\n")
        assert code == 0
        assert out == "Input a number: Result: others\n"

    def test_compile_error_exits_2(self, tmp_path):
        bad = tmp_path / "bad.ces"
        bad.write_text("if (10) { }\n", encoding="utf-8")
        code, out, err = invoke(["run", str(bad)])
        assert code == 2
        assert "E_COND_NOT_BOOL" in err

    def test_exit_builtin_code(self, tmp_path):
        prog = tmp_path / "e.ces"
        prog.write_text("exit(7)\n", encoding="utf-8")
        code, _, _ = invoke(["run", str(prog)])
        assert code == 7

    def test_uncaught_throw_exits_1(self, tmp_path):
        prog = tmp_path / "t.ces"
        prog.write_text("let x = 1 / 0\n", encoding="utf-8")
        code, out, err = invoke(["run", str(prog)])
        assert code == 1
        assert "uncaught" in err

    def test_unrecognized_extension(self, tmp_path):
        prog = tmp_path / "x.txt"
        prog.write_text("print(1)\n", encoding="utf-8")
        code, _, err = invoke(["run", str(prog)])
        assert code == 2

    def test_missing_file(self, tmp_path):
        code, _, err = invoke(["run", str(tmp_path / "absent.ces")])
        assert code == 2

    def test_seed_reproducible(self, tmp_path):
        prog = tmp_path / "r.ces"
        prog.write_text("print(randint(0, 1000000), \" \", random())\n", encoding="utf-8")
        _, a, _ = invoke(["run", str(prog), "--seed", "5"])
        _, b, _ = invoke(["run", str(prog), "--seed", "5"])
        _, c, _ = invoke(["run", str(prog), "--seed", "6"])
        assert a == b
        assert a != c

    def test_cesno_root_env(self, tmp_path, monkeypatch):
        lib = tmp_path / "lib"
        lib.mkdir()
        (lib / "m.ces").write_text("export const k = 5\n", encoding="utf-8")
        nested = tmp_path / "apps"
        nested.mkdir()
        entry = nested / "main.ces"
        entry.write_text("import lib.m.k ;\nprint(k)\n", encoding="utf-8")
        monkeypatch.setenv("CESNO_ROOT", str(tmp_path))
        code, out, _ = invoke(["run", str(entry)])
        assert code == 0
        assert out == "5\n"


class TestCheck:
    def test_warning_only_exits_0(self, tmp_path):
        prog = tmp_path / "w.ces"
        prog.write_text("float a = 1.0\nlet ok = a == 2.0\n", encoding="utf-8")
        code, out, err = invoke(["check", str(prog)])
        assert code == 0
        assert "W_FLOAT_EQ" in err

    def test_effectively_equal_overloads_exit_2(self, tmp_path):
        prog = tmp_path / "d.ces"
        prog.write_text(
            "function f(int a, int b = 10) { }\nfunction f(int a, int b?) { }\n", encoding="utf-8"
        )
        code, _, err = invoke(["check", str(prog)])
        assert code == 2
        assert "E_DUP_OVERLOAD" in err

    def test_clean_program_silent(self, tmp_path):
        prog = tmp_path / "c.ces"
        prog.write_text("print(1)\n", encoding="utf-8")
        code, out, err = invoke(["check", str(prog)])
        assert code == 0
        assert err == ""

    def test_diagnostic_format(self, tmp_path):
        prog = tmp_path / "bad.ces"
        prog.write_text("if (10) { }\n", encoding="utf-8")
        _, _, err = invoke(["check", str(prog)])
        line = err.strip().splitlines()[0]
        assert line.startswith(f"{prog}:1:5: error E_COND_NOT_BOOL:")


class TestDump:
    def test_tokens(self, tmp_path):
        prog = tmp_path / "t.ces"
        prog.write_text("let x = 0\n", encoding="utf-8")
        code, out, _ = invoke(["dump", str(prog), "--dump", "tokens"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines == [
            'word "let" 1:1',
            'word "x" 1:5',
            'op "=" 1:7',
            'number "0" 1:9',
        ]

    def test_ast_shows_match_arms(self, match_file):
        code, out, _ = invoke(["dump", str(match_file), "--dump", "ast"])
        assert code == 0
        assert out.count("MatchArm") == 3
        assert "Match @" in out

    def test_lex_error_exits_2(self, tmp_path):
        prog = tmp_path / "bad.ces"
        prog.write_text('let s = "\\q"\n', encoding="utf-8")
        code, _, err = invoke(["dump", str(prog), "--dump", "tokens"])
        assert code == 2
        assert "unknown escape" in err
