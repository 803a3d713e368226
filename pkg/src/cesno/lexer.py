"""Lexer: turns UTF-8 source text into a token stream.

Every byte of the input is covered either by a token or by whitespace
trivia, so concatenating token texts plus the gaps between their spans
reproduces the source exactly. Words are never classified as keywords
here; that happens in the parser, in context.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import struct

from .diagnostics import DiagnosticSink

# Token kinds
WORD = "word"
NUMBER = "number"
TEXT = "text"
REGEX = "regex"
TEMPLATE = "template"
PUNCT = "punct"
OP = "op"
NEWLINE = "newline"
COMMENT = "comment"
EOF = "eof"

# Longest-match first.
OPERATOR_SYMBOLS = [
    "===", "??:", "???", "...", "::",
    "==", "!=", "~=", "<=", ">=", "->", "=>", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "??",
    "=", "+", "-", "*", "/", "%", "<", ">", "|", "&",
    "?", ":", ".", "@", "#",
]
PUNCT_CHARS = "()[]{},;"

NUMBER_SUFFIXES = {"n", "i8", "i32", "i64", "f32", "f64"}
REGEX_FLAGS = "ign"

SIMPLE_ESCAPES = {
    "n": "\n",
    "t": "\t",
    "r": "\r",
    "0": "\0",
    "\\": "\\",
    '"': '"',
    "'": "'",
    "`": "`",
    "$": "$",
}

# Words after which a `/` starts a regex rather than a division.
_REGEX_AFTER_WORDS = {"return", "eval", "in", "and", "or", "not", "xor", "if", "elif", "while", "match", "assert"}

INT_RANGES = {
    "i8": (-(2**7), 2**7 - 1),
    "i32": (-(2**31), 2**31 - 1),
    "i64": (-(2**63), 2**63 - 1),
}


@dataclass(frozen=True)
class SourceSpan:
    file_id: str
    start_byte: int
    end_byte: int
    line: int
    column: int


@dataclass(frozen=True)
class NumberLiteral:
    radix: int
    integer_digits: str
    fraction_digits: str
    exponent: int | None
    type_suffix: str | None
    value: object  # int for integer kinds, float otherwise

    @property
    def is_float(self) -> bool:
        return isinstance(self.value, float)


@dataclass(frozen=True)
class TextLiteral:
    decoded: str
    is_raw: bool
    is_char: bool


@dataclass(frozen=True)
class RegexLiteral:
    pattern: str
    flags: frozenset[str]


@dataclass(frozen=True)
class TemplateString:
    # parts: ("text", decoded_chunk) | ("expr", tuple_of_tokens)
    parts: tuple[tuple[str, object], ...]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan
    value: object = None

    def __repr__(self) -> str:  # compact for test failures
        return f"Token({self.kind}, {self.text!r})"


class LexError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


@dataclass
class _Cursor:
    source: str
    file_id: str
    pos: int = 0
    byte: int = 0
    line: int = 1
    column: int = 1
    # (byte, line, column) checkpoints for span starts
    _marks: list[tuple[int, int, int, int]] = field(default_factory=list)

    def at_end(self) -> bool:
        return self.pos >= len(self.source)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.source[i] if i < len(self.source) else ""

    def advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        self.byte += len(ch.encode("utf-8"))
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def mark(self) -> None:
        self._marks.append((self.pos, self.byte, self.line, self.column))

    def span_from_mark(self) -> tuple[str, SourceSpan]:
        pos, byte, line, column = self._marks.pop()
        return self.source[pos : self.pos], SourceSpan(self.file_id, byte, self.byte, line, column)


def _is_word_start(ch: str) -> bool:
    return bool(ch) and (ch.isalpha() or ch in "_$")


def _is_word_char(ch: str) -> bool:
    return bool(ch) and (ch.isalnum() or ch in "_$")


def _digit_value(ch: str) -> int:
    if ch.isdigit():
        return ord(ch) - ord("0")
    return ord(ch.lower()) - ord("a") + 10


def _is_radix_digit(ch: str, radix: int) -> bool:
    if not ch:
        return False
    if ch.isdigit():
        return _digit_value(ch) < radix
    if radix == 16 and ch.lower() in "abcdef":
        return True
    return False


def _to_f32(value: float) -> float:
    return struct.unpack("f", struct.pack("f", value))[0]


class Lexer:
    def __init__(self, source: str, file_id: str = "<input>", diagnostics: DiagnosticSink | None = None):
        self.cur = _Cursor(source, file_id)
        self.diagnostics = diagnostics if diagnostics is not None else DiagnosticSink()
        self.tokens: list[Token] = []

    # -- helpers ------------------------------------------------------

    def _emit(self, kind: str, value: object = None) -> Token:
        text, span = self.cur.span_from_mark()
        tok = Token(kind, text, span, value)
        self.tokens.append(tok)
        return tok

    def _error(self, message: str) -> LexError:
        text, span = self.cur.span_from_mark()
        self.diagnostics.error("E_LEX", message, span.file_id, span.line, span.column)
        return LexError(message, span)

    def _prev_significant(self) -> Token | None:
        for tok in reversed(self.tokens):
            if tok.kind not in (NEWLINE, COMMENT):
                return tok
        return None

    def _regex_position(self) -> bool:
        prev = self._prev_significant()
        if prev is None:
            return True
        if prev.kind in (NUMBER, TEXT, REGEX, TEMPLATE):
            return False
        if prev.kind == PUNCT and prev.text in ")]}":
            return False
        if prev.kind == WORD:
            return prev.text in _REGEX_AFTER_WORDS
        return True  # after operators, commas, open brackets

    # -- main loop ----------------------------------------------------

    def run(self) -> list[Token]:
        cur = self.cur
        while not cur.at_end():
            ch = cur.peek()
            if ch == "\n":
                cur.mark()
                cur.advance()
                self._emit(NEWLINE)
                continue
            if ch in " \t\r":
                cur.advance()
                continue
            if ch == "/" and cur.peek(1) == "/":
                self._scan_line_comment()
                continue
            if ch == "/" and cur.peek(1) == "*":
                self._scan_block_comment()
                continue
            if ch == "/" and self._regex_position() and cur.peek(1) not in (",", ")", "", "="):
                # `/,` and `/)` are the positional-only parameter marker.
                self._scan_regex()
                continue
            if ch.isdigit():
                self._scan_number()
                continue
            if ch in "'\"":
                self._scan_text(raw=False)
                continue
            if ch == "r" and cur.peek(1) in ("'", '"'):
                self._scan_text(raw=True)
                continue
            if ch == "`":
                self._scan_template()
                continue
            if _is_word_start(ch):
                self._scan_word()
                continue
            if ch in PUNCT_CHARS:
                cur.mark()
                cur.advance()
                self._emit(PUNCT)
                continue
            matched = self._scan_operator()
            if matched:
                continue
            cur.mark()
            cur.advance()
            raise self._error(f"unexpected character {ch!r}")
        cur.mark()
        self._emit(EOF)
        return self.tokens

    def _scan_operator(self) -> bool:
        cur = self.cur
        for sym in OPERATOR_SYMBOLS:
            if cur.source.startswith(sym, cur.pos):
                cur.mark()
                for _ in sym:
                    cur.advance()
                self._emit(OP)
                return True
        return False

    def _scan_word(self) -> None:
        cur = self.cur
        cur.mark()
        while not cur.at_end() and _is_word_char(cur.peek()):
            cur.advance()
        self._emit(WORD)

    def _scan_line_comment(self) -> None:
        cur = self.cur
        cur.mark()
        while not cur.at_end() and cur.peek() != "\n":
            cur.advance()
        self._emit(COMMENT)

    def _scan_block_comment(self) -> None:
        cur = self.cur
        cur.mark()
        cur.advance()  # /
        cur.advance()  # *
        while True:
            if cur.at_end():
                raise self._error("unterminated block comment")
            if cur.peek() == "*" and cur.peek(1) == "/":
                cur.advance()
                cur.advance()
                break
            if cur.peek() == "/" and cur.peek(1) == "*":
                raise self._error("nested block comments are not allowed")
            cur.advance()
        self._emit(COMMENT)

    # -- numbers ------------------------------------------------------

    def _scan_number(self) -> None:
        cur = self.cur
        cur.mark()
        radix = 10
        if cur.peek() == "0" and cur.peek(1) in ("x", "o", "b"):
            cur.advance()
            prefix_ch = cur.advance()
            radix = {"x": 16, "o": 8, "b": 2}[prefix_ch]
            if cur.peek() == "_":
                raise self._error("underscore may not follow a radix prefix")
            if not _is_radix_digit(cur.peek(), radix):
                raise self._error(f"expected digit after radix prefix 0{prefix_ch}")
        integer_digits = self._scan_digits(radix)
        fraction_digits = ""
        if cur.peek() == "." and _is_radix_digit(cur.peek(1), radix):
            if radix in (2, 8):
                raise self._error("fractional part is only allowed in decimal or heximal numbers")
            cur.advance()
            fraction_digits = self._scan_digits(radix)
        exponent: int | None = None
        if radix == 10 and cur.peek() in ("e", "E"):
            nxt = cur.peek(1)
            if nxt.isdigit() or (nxt in ("+", "-") and cur.peek(2).isdigit()):
                cur.advance()
                sign = 1
                if cur.peek() in ("+", "-"):
                    sign = -1 if cur.advance() == "-" else 1
                exponent = sign * int(self._scan_digits(10))
        suffix = self._scan_suffix(radix)
        if suffix == "n" and (fraction_digits or exponent is not None):
            raise self._error("bigint suffix 'n' does not allow a fraction or exponent")
        if _is_word_char(cur.peek()):
            raise self._error(f"unexpected character {cur.peek()!r} in number")
        value = _number_value(radix, integer_digits, fraction_digits, exponent, suffix)
        if isinstance(value, int) and suffix != "n":
            width = suffix or "i32"
            lo, hi = INT_RANGES[width]
            if not lo <= value <= hi:
                raise self._error(f"integer literal does not fit {width}")
        lit = NumberLiteral(radix, integer_digits, fraction_digits, exponent, suffix, value)
        self._emit(NUMBER, lit)

    def _scan_digits(self, radix: int) -> str:
        cur = self.cur
        digits = []
        while True:
            ch = cur.peek()
            if _is_radix_digit(ch, radix):
                digits.append(cur.advance())
            elif ch == "_":
                if cur.peek(1) == "_":
                    break  # suffix separator
                if not _is_radix_digit(cur.peek(1), radix):
                    cur.advance()
                    raise self._error("trailing underscore in number")
                cur.advance()
            else:
                break
        if ch := cur.peek():
            if ch.isdigit() and not _is_radix_digit(ch, radix):
                raise self._error(f"digit {ch!r} is out of range for radix {radix}")
        return "".join(digits)

    def _scan_suffix(self, radix: int) -> str | None:
        cur = self.cur
        if cur.peek() == "_" and cur.peek(1) == "_":
            cur.advance()
            cur.advance()
            start = cur.pos
            while _is_word_char(cur.peek()):
                cur.advance()
            suffix = cur.source[start : cur.pos]
            if suffix not in NUMBER_SUFFIXES:
                raise self._error(f"unknown number suffix {suffix!r}")
            return suffix
        # Direct suffix: only possible when its first letter cannot be a digit.
        for suffix in ("i8", "i32", "i64", "f32", "f64", "n"):
            if _is_radix_digit(suffix[0], radix):
                continue
            rest = cur.source[cur.pos : cur.pos + len(suffix) + 1]
            if rest.startswith(suffix):
                after = rest[len(suffix) :]
                if after and _is_word_char(after):
                    continue
                for _ in suffix:
                    cur.advance()
                return suffix
        return None

    # -- text ---------------------------------------------------------

    def _scan_text(self, raw: bool) -> None:
        cur = self.cur
        cur.mark()
        if raw:
            cur.advance()  # r
        quote = cur.advance()
        chars: list[str] = []
        while True:
            if cur.at_end() or cur.peek() == "\n":
                raise self._error("unterminated text literal")
            ch = cur.advance()
            if ch == quote:
                break
            if ch == "\\" and not raw:
                chars.append(self._scan_escape())
            else:
                chars.append(ch)
        decoded = "".join(chars)
        is_char = quote == "'" and not raw
        if is_char and len(decoded) != 1:
            raise self._error("character literal must contain exactly one character")
        self._emit(TEXT, TextLiteral(decoded, raw, is_char))

    def _scan_escape(self) -> str:
        cur = self.cur
        if cur.at_end():
            raise self._error("unterminated escape sequence")
        ch = cur.advance()
        if ch in SIMPLE_ESCAPES:
            return SIMPLE_ESCAPES[ch]
        if ch == "u":
            if cur.peek() != "{":
                raise self._error("\\u escape requires braces, e.g. \\u{1F60A}")
            cur.advance()
            digits = []
            while cur.peek() != "}":
                if cur.at_end() or not _is_radix_digit(cur.peek(), 16):
                    raise self._error("invalid \\u escape")
                digits.append(cur.advance())
            cur.advance()
            if not digits:
                raise self._error("empty \\u escape")
            code = int("".join(digits), 16)
            if code > 0x10FFFF:
                raise self._error("\\u escape out of Unicode range")
            return chr(code)
        raise self._error(f"unknown escape \\{ch}")

    # -- regex --------------------------------------------------------

    def _scan_regex(self) -> None:
        cur = self.cur
        cur.mark()
        cur.advance()  # opening /
        chars: list[str] = []
        while True:
            if cur.at_end() or cur.peek() == "\n":
                raise self._error("unterminated regular expression")
            ch = cur.advance()
            if ch == "\\":
                if cur.at_end():
                    raise self._error("unterminated regular expression")
                chars.append(ch)
                chars.append(cur.advance())
                continue
            if ch == "/":
                break
            chars.append(ch)
        pattern = "".join(chars)
        if not pattern:
            raise self._error("regular expression pattern cannot be empty")
        flags: list[str] = []
        while _is_word_char(cur.peek()):
            flag = cur.advance()
            if flag not in REGEX_FLAGS:
                raise self._error(f"unknown regex flag {flag!r}")
            if flag in flags:
                raise self._error(f"duplicate regex flag {flag!r}")
            flags.append(flag)
        self._emit(REGEX, RegexLiteral(pattern, frozenset(flags)))

    # -- templates ----------------------------------------------------

    def _scan_template(self) -> None:
        cur = self.cur
        cur.mark()
        cur.advance()  # opening backtick
        parts: list[tuple[str, object]] = []
        chunk: list[str] = []
        while True:
            if cur.at_end():
                raise self._error("unterminated template string")
            if cur.peek() == "`":
                cur.advance()
                break
            if cur.peek() == "\\":
                cur.advance()
                chunk.append(self._scan_escape())
                continue
            if cur.peek() == "$" and cur.peek(1) == "{":
                if chunk:
                    parts.append(("text", "".join(chunk)))
                    chunk = []
                parts.append(("expr", self._scan_template_expr()))
                continue
            chunk.append(cur.advance())
        if chunk:
            parts.append(("text", "".join(chunk)))
        self._emit(TEMPLATE, TemplateString(tuple(parts)))

    def _scan_template_expr(self) -> tuple[Token, ...]:
        cur = self.cur
        cur.advance()  # $
        cur.advance()  # {
        start = cur.pos
        depth = 1
        while True:
            if cur.at_end():
                raise self._error("unterminated ${...} in template string")
            ch = cur.peek()
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    break
            elif ch in "'\"":
                self._skip_nested_text()
                continue
            cur.advance()
        text = cur.source[start : cur.pos]
        cur.advance()  # }
        sub = Lexer(text, self.cur.file_id, self.diagnostics)
        toks = sub.run()
        return tuple(t for t in toks if t.kind != EOF)

    def _skip_nested_text(self) -> None:
        cur = self.cur
        quote = cur.advance()
        while not cur.at_end() and cur.peek() != quote:
            if cur.peek() == "\\":
                cur.advance()
            if not cur.at_end():
                cur.advance()
        if not cur.at_end():
            cur.advance()


def _number_value(
    radix: int,
    integer_digits: str,
    fraction_digits: str,
    exponent: int | None,
    suffix: str | None,
) -> object:
    int_part = int(integer_digits, radix) if integer_digits else 0
    if not fraction_digits and exponent is None and suffix not in ("f32", "f64"):
        return int_part
    value = Fraction(int_part)
    if fraction_digits:
        value += Fraction(int(fraction_digits, radix), radix ** len(fraction_digits))
    if exponent is not None:
        value *= Fraction(10) ** exponent
    result = float(value)
    if suffix == "f32":
        result = _to_f32(result)
    return result


def tokenize(source: str, file_id: str = "<input>", diagnostics: DiagnosticSink | None = None) -> list[Token]:
    """Tokenize a whole source file. Raises LexError on the first bad token."""
    return Lexer(source, file_id, diagnostics).run()


def scan_number(raw: str) -> NumberLiteral:
    """Scan a single numeric literal; the text must contain nothing else."""
    toks = tokenize(raw)
    if len(toks) != 2 or toks[0].kind != NUMBER:
        raise LexError("not a single numeric literal", toks[0].span)
    return toks[0].value


def scan_text(raw: str) -> TextLiteral:
    toks = tokenize(raw)
    if len(toks) != 2 or toks[0].kind != TEXT:
        raise LexError("not a single text literal", toks[0].span)
    return toks[0].value


def scan_regex(raw: str) -> RegexLiteral:
    if raw == "//":
        # At token level `//` opens a comment; as a lone regex it is the
        # empty pattern, which is rejected.
        raise LexError("regular expression pattern cannot be empty", SourceSpan("<input>", 0, 2, 1, 1))
    toks = tokenize(raw)
    if len(toks) != 2 or toks[0].kind != REGEX:
        raise LexError("not a single regular expression", toks[0].span)
    return toks[0].value


def reconstruct(source: str, tokens: list[Token]) -> str:
    """Rebuild the source from token spans plus the gaps between them."""
    out = []
    prev_end = 0
    data = source.encode("utf-8")
    for tok in tokens:
        out.append(data[prev_end : tok.span.start_byte].decode("utf-8"))
        out.append(tok.text)
        prev_end = tok.span.end_byte
    out.append(data[prev_end:].decode("utf-8"))
    return "".join(out)
