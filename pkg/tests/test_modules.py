from __future__ import annotations

from pathlib import Path

import pytest

from conftest import run_entry

REGEX_UTIL = r"""// At ~project/src/util/
const kean_email_checker =
  /[A-Za-z]+\@kean\.edu/ ;
const wenzhou_kean_email_checker =
  /\d{7}\@wku\.edu\.cn/ ;

export inline function
validateKeanEmail(const string address)
{
  return
    kean_email_checker
    .test(address) ;
}

export inline function
validateWenzhouKeanEmail(const string address)
{
  return
    wenzhou_kean_email_checker
    .test(address) ;
}
"""


@pytest.fixture
def project(tmp_path: Path) -> Path:
    util = tmp_path / "src" / "util"
    util.mkdir(parents=True)
    (util / "RegexUtil.ces").write_text(REGEX_UTIL, encoding="utf-8")
    return tmp_path


def write_main(project: Path, body: str) -> None:
    (project / "main.ces").write_text(body, encoding="utf-8")


class TestImportForms:
    def test_all_five_forms(self, project):
        write_main(
            project,
            "{\n"
            "  import src.util ;\n"
            '  assert util.RegexUtil.validateKeanEmail("someaddr@kean.edu") ;\n'
            "}\n"
            "{\n"
            "  import src.util.RegexUtil ;\n"
            '  assert RegexUtil.validateKeanEmail("someaddr@kean.edu") ;\n'
            "}\n"
            "{\n"
            "  import src.util.RegexUtil.validateKeanEmail ;\n"
            '  assert validateKeanEmail("someaddr@kean.edu") ;\n'
            "}\n"
            "{\n"
            "  from src.util.RegexUtil\n"
            "    import validateKeanEmail,\n"
            "          validateWenzhouKeanEmail ;\n"
            '  assert validateKeanEmail("someaddr@kean.edu") ;\n'
            '  assert validateWenzhouKeanEmail("1234567@wku.edu.cn") ;\n'
            "}\n"
            "{\n"
            "  from src.util.RegexUtil\n"
            "    import validateKeanEmail as validate,\n"
            "          validateWenzhouKeanEmail\n"
            "          as validate2 ;\n"
            '  assert validate("someaddr@kean.edu") ;\n'
            '  assert validate2("1234567@wku.edu.cn") ;\n'
            "}\n"
            'print("all forms ok")\n',
        )
        r = run_entry(project, "main.ces")
        assert r.ok, r.error
        assert r.stdout == "all forms ok\n"

    def test_scope_locality(self, project):
        write_main(
            project,
            "{\n  import src.util.RegexUtil.validateKeanEmail ;\n}\n"
            'let x = validateKeanEmail("someaddr@kean.edu")\n',
        )
        r = run_entry(project, "main.ces")
        assert r.error is not None
        assert "validateKeanEmail" in str(r.error)

    def test_unexported_constant_rejected(self, project):
        write_main(project, "import src.util.RegexUtil.kean_email_checker ;\n")
        r = run_entry(project, "main.ces")
        assert r.error is not None and "not exported" in str(r.error)

    def test_unknown_path(self, project):
        write_main(project, "import src.nothing ;\n")
        r = run_entry(project, "main.ces")
        assert r.error is not None and "ImportError" in str(r.error)

    def test_alias_works_like_ref(self, project):
        write_main(
            project,
            "from src.util.RegexUtil import validateKeanEmail as validate ;\n"
            'print(validate("a@kean.edu"))\n',
        )
        r = run_entry(project, "main.ces")
        assert r.ok and r.stdout == "true\n"


class TestModuleEvaluation:
    def test_module_evaluates_once(self, tmp_path):
        (tmp_path / "counter.ces").write_text(
            'print("loaded")\nexport function touch() { return 1 }\n', encoding="utf-8"
        )
        (tmp_path / "main.ces").write_text(
            "{\n  import counter.touch ;\n  touch()\n}\n"
            "{\n  import counter.touch ;\n  touch()\n}\n",
            encoding="utf-8",
        )
        r = run_entry(tmp_path, "main.ces")
        assert r.ok, r.error
        assert r.stdout == "loaded\n"

    def test_circular_import_detected(self, tmp_path):
        (tmp_path / "a.ces").write_text("import b ;\nexport const x = 1\n", encoding="utf-8")
        (tmp_path / "b.ces").write_text("import a ;\nexport const y = 2\n", encoding="utf-8")
        (tmp_path / "main.ces").write_text("import a ;\n", encoding="utf-8")
        r = run_entry(tmp_path, "main.ces")
        assert r.error is not None and "circular" in str(r.error)

    def test_ces_preferred_over_cesno(self, tmp_path):
        (tmp_path / "mod.ces").write_text("export const which = \"ces\"\n", encoding="utf-8")
        (tmp_path / "mod.cesno").write_text("export const which = \"cesno\"\n", encoding="utf-8")
        (tmp_path / "main.ces").write_text("import mod.which ;\nprint(which)\n", encoding="utf-8")
        r = run_entry(tmp_path, "main.ces")
        assert r.stdout == "ces\n"


class TestExportScopes:
    def test_inpackage_visible_inside_subtree(self, tmp_path):
        pkg = tmp_path / "pkg"
        pkg.mkdir()
        (pkg / "secret.ces").write_text("inpackage export const token = 42\n", encoding="utf-8")
        (pkg / "user.ces").write_text("import pkg.secret.token ;\nexport function get() { return token }\n", encoding="utf-8")
        (tmp_path / "main.ces").write_text("import pkg.user.get ;\nprint(get())\n", encoding="utf-8")
        r = run_entry(tmp_path, "main.ces")
        assert r.ok, r.error
        assert r.stdout == "42\n"

    def test_inpackage_invisible_outside(self, tmp_path):
        pkg = tmp_path / "pkg"
        pkg.mkdir()
        (pkg / "secret.ces").write_text("inpackage export const token = 42\n", encoding="utf-8")
        (tmp_path / "main.ces").write_text("import pkg.secret.token ;\n", encoding="utf-8")
        r = run_entry(tmp_path, "main.ces")
        assert r.error is not None and "only exported inside" in str(r.error)


class TestPrelude:
    def test_prelude_auto_import(self, tmp_path):
        (tmp_path / "prelude.ces").write_text("export const shared = 7\n", encoding="utf-8")
        sub = tmp_path / "deep"
        sub.mkdir()
        (sub / "main.ces").write_text("print(shared)\n", encoding="utf-8")
        r = run_entry(tmp_path, "deep/main.ces")
        assert r.ok, r.error
        assert r.stdout == "7\n"

    def test_prelude_implement_block(self, tmp_path):
        (tmp_path / "prelude.ces").write_text(
            "implement dict<type KeyType, type ValueType: Equal>\n"
            "{\n"
            "  method checkEqual(KeyType key, ValueType check)\n"
            "  {\n"
            "    return self.has(key) and self[key] == check\n"
            "  }\n"
            "}\n",
            encoding="utf-8",
        )
        (tmp_path / "main.ces").write_text(
            'let d = {1: "a"}\nprint(d.checkEqual(1, "a"), " ", d.checkEqual(2, "a"))\n',
            encoding="utf-8",
        )
        r = run_entry(tmp_path, "main.ces")
        assert r.ok, r.error
        assert r.stdout == "true false\n"


class TestScopeOperators:
    def test_exported_operator_active_in_importing_scope(self, tmp_path):
        (tmp_path / "ops.ces").write_text(
            "export operator (+)(string left, int right)\n"
            "{ return left + string(right) }\n"
            "export const marker = 1\n",
            encoding="utf-8",
        )
        (tmp_path / "main.ces").write_text(
            "{\n"
            "  import ops.marker ;\n"
            '  print("n=" + 5)\n'
            "}\n"
            'try { print("n=" + 5) } catch (TypeError e) { print("outside") }\n',
            encoding="utf-8",
        )
        r = run_entry(tmp_path, "main.ces")
        assert r.ok, r.error
        assert r.stdout == "n=5\noutside\n"
