from __future__ import annotations

import random
from fractions import Fraction

import pytest

from cesno.lexer import (
    LexError,
    Token,
    reconstruct,
    scan_number,
    scan_regex,
    scan_text,
    tokenize,
)


def kinds(tokens: list[Token]) -> list[str]:
    return [t.kind for t in tokens if t.kind != "eof"]


def significant(source: str) -> list[Token]:
    return [t for t in tokenize(source) if t.kind not in ("newline", "comment", "eof")]


class TestTokenize:
    def test_smallest_declaration(self):
        toks = significant("let x = 0")
        assert [(t.kind, t.text) for t in toks] == [
            ("word", "let"),
            ("word", "x"),
            ("op", "="),
            ("number", "0"),
        ]

    def test_template_with_expression_part(self):
        toks = significant("print(`${x + 2}`)")
        assert [t.kind for t in toks] == ["word", "punct", "template", "punct"]
        tmpl = toks[2].value
        assert len(tmpl.parts) == 1
        part_kind, sub = tmpl.parts[0]
        assert part_kind == "expr"
        assert [t.text for t in sub] == ["x", "+", "2"]

    def test_unknown_escape_is_error(self):
        with pytest.raises(LexError, match="unknown escape"):
            tokenize(r'"\q"')

    def test_newlines_are_tokens(self):
        toks = tokenize("print(1)\nprint(2)")
        assert "newline" in kinds(toks)

    def test_comments_are_trivia_tokens(self):
        toks = tokenize("let x = 0 // note\n/* block */ let y = 1")
        comments = [t for t in toks if t.kind == "comment"]
        assert [c.text for c in comments] == ["// note", "/* block */"]

    def test_doc_block_comment(self):
        toks = tokenize("/** If one return true, consider falsy */")
        assert toks[0].kind == "comment"

    def test_unterminated_block_comment(self):
        with pytest.raises(LexError, match="unterminated"):
            tokenize("/* never closed")

    def test_unterminated_string(self):
        with pytest.raises(LexError, match="unterminated"):
            tokenize('"no closing quote')

    def test_spans_are_monotonic_and_nonoverlapping(self):
        toks = tokenize('let s = "hi" + `a${b}c` // done\n')
        prev_end = 0
        for t in toks:
            assert t.span.start_byte >= prev_end
            assert t.span.start_byte <= t.span.end_byte
            prev_end = t.span.end_byte

    def test_multibyte_spans_use_byte_offsets(self):
        toks = tokenize("'😊'x")
        assert toks[0].span.end_byte - toks[0].span.start_byte == 2 + 4

    def test_dollar_identifiers(self):
        toks = significant("$zeros_value")
        assert toks[0].kind == "word"
        assert toks[0].text == "$zeros_value"


class TestRoundTrip:
    CASES = [
        "let x = 0",
        "int a ;\nint b = 10 ;\na = b += 20 ;",
        'print("Result: ", s)',
        "x = a bitand 0xFF // mask\n",
        "const r = /reg(ular\\s)?exp?s?/gn",
        'let t = `In "~", there is ${n} lines`',
        "a\n.b(c)\n",
        "{0: \"zero\", 4: \"four\"}",
    ]

    @pytest.mark.parametrize("source", CASES)
    def test_round_trip(self, source):
        assert reconstruct(source, tokenize(source)) == source


class TestScanNumber:
    def test_decimal(self):
        lit = scan_number("120")
        assert (lit.radix, lit.integer_digits, lit.type_suffix) == (10, "120", None)
        assert lit.value == 120

    def test_octal(self):
        assert scan_number("0o12").value == 10

    def test_heximal_float(self):
        lit = scan_number("0x1a.d")
        assert lit.value == 26.8125
        assert lit.is_float

    def test_hex_fraction_with_suffix(self):
        lit = scan_number("0x1ab.cd_ef__f32")
        assert lit.radix == 16
        assert lit.fraction_digits == "cdef"
        assert lit.type_suffix == "f32"
        # Oracle: positional expansion, digit * 16**position.
        expected = Fraction(0)
        for i, d in enumerate("1ab"):
            expected += int(d, 16) * Fraction(16) ** (2 - i)
        for i, d in enumerate("cdef"):
            expected += int(d, 16) * Fraction(16) ** (-(i + 1))
        assert lit.value == pytest.approx(float(expected), rel=1e-6)

    def test_bigint(self):
        lit = scan_number("12n")
        assert lit.type_suffix == "n"
        assert lit.value == 12

    def test_underscore_transparency(self):
        assert scan_number("1_000").value == scan_number("1000").value

    def test_suffixes(self):
        assert scan_number("7i8").type_suffix == "i8"
        assert scan_number("7__i64").type_suffix == "i64"
        assert scan_number("1.5f32").type_suffix == "f32"

    def test_exponent(self):
        assert scan_number("2e3").value == 2000.0
        assert scan_number("1.5e-2").value == 0.015

    @pytest.mark.parametrize(
        "bad",
        ["0o18", "0b2", "12x", "1_", "0x_1", "12.5n", "2e3n", "300__i8", "1__q32"],
    )
    def test_rejects(self, bad):
        with pytest.raises(LexError):
            scan_number(bad)


class TestScanText:
    def test_char_emoji(self):
        lit = scan_text("'😊'")
        assert lit.is_char
        assert lit.decoded == "\U0001F60A"

    def test_escape_sequences(self):
        lit = scan_text(r'"\tNo file loaded.\n"')
        assert lit.decoded == "\tNo file loaded.\n"

    def test_raw_text_keeps_backslashes(self):
        lit = scan_text(r'r"D:\Windows Style\Folder\Path\"')
        assert lit.is_raw
        assert lit.decoded == "D:\\Windows Style\\Folder\\Path\\"

    def test_unicode_escape(self):
        assert scan_text(r'"\u{1F60A}"').decoded == "😊"

    def test_char_must_be_single(self):
        with pytest.raises(LexError):
            scan_text("'ab'")

    def test_every_unknown_single_escape_rejected(self):
        recognized = set("ntr0\\\"'`$u")
        for code in range(0x21, 0x7F):
            ch = chr(code)
            if ch in recognized or ch == '"':
                continue
            with pytest.raises(LexError):
                scan_text(f'"\\{ch}"')


class TestScanRegex:
    def test_case_insensitive_flag(self):
        lit = scan_regex("/world/i")
        assert lit.pattern == "world"
        assert lit.flags == {"i"}

    def test_global_noncapture_flags(self):
        lit = scan_regex(r"/reg(ular\s)?exp?(resion)?s?/gn")
        assert lit.flags == {"g", "n"}

    def test_empty_pattern_rejected(self):
        with pytest.raises(LexError, match="empty"):
            scan_regex("//")

    def test_unknown_flag(self):
        with pytest.raises(LexError):
            scan_regex("/a/z")

    def test_duplicate_flag(self):
        with pytest.raises(LexError):
            scan_regex("/a/ii")

    def test_division_position(self):
        toks = significant("a / b")
        assert [t.kind for t in toks] == ["word", "op", "word"]

    def test_regex_after_assignment(self):
        toks = significant("x = /ab/")
        assert toks[-1].kind == "regex"


class TestNumberOracle:
    """Literal values must match an independent positional-expansion oracle."""

    def test_randomized_literals(self):
        rng = random.Random(20240)
        digit_sets = {2: "01", 8: "01234567", 10: "0123456789", 16: "0123456789abcdef"}
        prefixes = {2: "0b", 8: "0o", 10: "", 16: "0x"}
        # Keep unsuffixed integer literals inside the default i32 range.
        max_int_digits = {2: 30, 8: 10, 10: 9, 16: 7}
        for _ in range(1000):
            radix = rng.choice([2, 8, 10, 16])
            n_int = rng.randint(1, max_int_digits[radix])
            int_digits = "".join(rng.choice(digit_sets[radix]) for _ in range(n_int))
            frac_digits = ""
            if radix in (10, 16) and rng.random() < 0.5:
                frac_digits = "".join(rng.choice(digit_sets[radix]) for _ in range(rng.randint(1, 8)))
            exponent = None
            if radix == 10 and not frac_digits and rng.random() < 0.25:
                exponent = rng.randint(-6, 6)
            text = prefixes[radix] + int_digits
            if frac_digits:
                text += "." + frac_digits
            if exponent is not None:
                text += f"e{exponent}"
            lit = scan_number(text)

            oracle = Fraction(0)
            for i, d in enumerate(reversed(int_digits)):
                oracle += int(d, radix) * Fraction(radix) ** i
            for i, d in enumerate(frac_digits):
                oracle += int(d, radix) * Fraction(radix) ** (-(i + 1))
            if exponent is not None:
                oracle *= Fraction(10) ** exponent
            if frac_digits or exponent is not None:
                assert lit.value == float(oracle), text
            else:
                assert lit.value == int(oracle), text
