"""Parser: token stream -> AST.

Statement termination follows the expectation model: a semicolon always
ends a statement, while a newline ends one only when nothing is still
expected — no open bracket, no dangling operator, and the next line does
not begin with a continuation token (binary operator, dot, `?`).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import nodes as N
from .diagnostics import DiagnosticSink
from .lexer import (
    COMMENT,
    EOF,
    NEWLINE,
    NUMBER,
    OP,
    PUNCT,
    REGEX,
    TEMPLATE,
    TEXT,
    WORD,
    SourceSpan,
    Token,
    tokenize,
)

MODIFIER_WORDS = {
    "public",
    "private",
    "static",
    "const",
    "readonly",
    "inline",
    "export",
    "inpackage",
    "ref",
}

DEFINITION_WORDS = {
    "function",
    "class",
    "enum",
    "trait",
    "type",
    "operator",
    "implement",
    "constructor",
    "method",
    "getter",
    "setter",
    "destructor",
}

FLOW_WORDS = {"if", "match", "for", "while", "do", "try"}

LITERAL_WORDS = {"true", "false", "null", "undefined", "void", "paradox"}

WORD_BINARY_OPS = {
    "or",
    "xor",
    "and",
    "in",
    "bitand",
    "bitor",
    "bitxor",
    "bitshl",
    "bitshr",
    "bitushl",
    "bitushr",
}

ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%="}

# Binding powers, loosest to tightest. Right-associative entries parse
# their right side with (lbp - 1).
_BP_ASSIGN = 10
_BP_ARROW = 14
_BP_TERNARY = 16
_BP_COALESCE = 20  # ??:
_BP_OR = 24  # or, xor
_BP_AND = 28
_BP_NOT = 30  # prefix `not`
_BP_CMP = 34  # == != === ~= < > <= >= in
_BP_BITOR = 38
_BP_BITXOR = 42
_BP_BITAND = 46
_BP_SHIFT = 50
_BP_ADD = 54
_BP_MUL = 58
_BP_PREFIX = 62  # - + ++ -- bitnot
_BP_POSTFIX = 66  # call, index, member, ++ -- ?? ??? with

_BINARY_BP = {
    "??:": _BP_COALESCE,
    "or": _BP_OR,
    "xor": _BP_OR,
    "and": _BP_AND,
    "==": _BP_CMP,
    "!=": _BP_CMP,
    "===": _BP_CMP,
    "~=": _BP_CMP,
    "<": _BP_CMP,
    ">": _BP_CMP,
    "<=": _BP_CMP,
    ">=": _BP_CMP,
    "in": _BP_CMP,
    "bitor": _BP_BITOR,
    "bitxor": _BP_BITXOR,
    "bitand": _BP_BITAND,
    "bitshl": _BP_SHIFT,
    "bitshr": _BP_SHIFT,
    "bitushl": _BP_SHIFT,
    "bitushr": _BP_SHIFT,
    "+": _BP_ADD,
    "-": _BP_ADD,
    "*": _BP_MUL,
    "/": _BP_MUL,
    "%": _BP_MUL,
}

# Tokens that continue a statement when they begin the next line.
_CONTINUATION_TEXTS = set(_BINARY_BP) | ASSIGN_OPS | {".", "?", "->", "??:"}


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


@dataclass
class _State:
    pos: int


class Parser:
    def __init__(self, tokens: list[Token], file_id: str = "<input>", diagnostics: DiagnosticSink | None = None):
        self.tokens = [t for t in tokens if t.kind != COMMENT]
        self.file_id = file_id
        self.diagnostics = diagnostics if diagnostics is not None else DiagnosticSink()
        self.pos = 0
        self.bracket_depth = 0

    # ------------------------------------------------------------------
    # cursor utilities
    # ------------------------------------------------------------------

    def _tok(self, i: int) -> Token:
        if i >= len(self.tokens):
            return self.tokens[-1]
        return self.tokens[i]

    def peek(self, ahead: int = 0) -> Token:
        # Inside brackets, newlines are transparent.
        i = self.pos
        seen = 0
        while True:
            tok = self._tok(i)
            if self.bracket_depth > 0 and tok.kind == NEWLINE:
                i += 1
                continue
            if seen == ahead:
                return tok
            seen += 1
            i += 1

    def peek_significant(self, ahead: int = 0) -> Token:
        i = self.pos
        seen = 0
        while True:
            tok = self._tok(i)
            if tok.kind == NEWLINE:
                i += 1
                continue
            if seen == ahead:
                return tok
            seen += 1
            i += 1

    def advance(self) -> Token:
        if self.bracket_depth > 0:
            while self._tok(self.pos).kind == NEWLINE:
                self.pos += 1
        tok = self._tok(self.pos)
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def prev_token(self) -> Token:
        i = self.pos - 1
        while i >= 0 and self.tokens[i].kind == NEWLINE:
            i -= 1
        return self.tokens[max(i, 0)]

    def at(self, text: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind in (OP, PUNCT, WORD) and tok.text == text

    def at_word(self, text: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind == WORD and tok.text == text

    def eat(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str, what: str = "") -> Token:
        if self.at(text):
            return self.advance()
        tok = self.peek()
        label = what or f"'{text}'"
        raise self._err(f"expected {label}, found {tok.text!r}" if tok.kind != EOF else f"expected {label}, found end of input", tok)

    def skip_newlines(self) -> None:
        while self._tok(self.pos).kind == NEWLINE:
            self.pos += 1

    def save(self) -> _State:
        return _State(self.pos)

    def restore(self, st: _State) -> None:
        self.pos = st.pos

    def _err(self, message: str, tok: Token | None = None) -> ParseError:
        # Not recorded here: speculative parses backtrack through these.
        # parse_module records the errors that survive recovery.
        tok = tok or self.peek()
        return ParseError(message, tok.span)

    def _span(self, start: Token) -> SourceSpan:
        end = self.prev_token().span
        return SourceSpan(self.file_id, start.span.start_byte, max(end.end_byte, start.span.end_byte), start.span.line, start.span.column)

    # ------------------------------------------------------------------
    # module / statements
    # ------------------------------------------------------------------

    def parse_module(self) -> N.Module:
        start = self.peek()
        stmts: list[N.Node] = []
        while True:
            self.skip_newlines()
            while self.eat(";"):
                self.skip_newlines()
            if self.peek().kind == EOF:
                break
            try:
                stmts.append(self.parse_statement())
                self._end_statement()
            except ParseError as exc:
                self.diagnostics.error("E_PARSE", exc.message, self.file_id, exc.span.line, exc.span.column)
                self._recover()
        return N.Module(self._span(start), stmts, self.file_id)

    def _recover(self) -> None:
        if self._tok(self.pos).kind != EOF:
            self.pos += 1  # always make progress
        depth = 0
        while True:
            tok = self._tok(self.pos)
            if tok.kind == EOF:
                return
            if depth == 0 and (tok.kind == NEWLINE or (tok.kind == PUNCT and tok.text == ";")):
                return
            if tok.kind == PUNCT and tok.text in "([{":
                depth += 1
            elif tok.kind == PUNCT and tok.text in ")]}":
                depth = max(0, depth - 1)
            self.pos += 1

    def _end_statement(self) -> None:
        if self.eat(";"):
            return
        tok = self._tok(self.pos)
        if tok.kind == NEWLINE:
            self.skip_newlines()
            return
        if tok.kind == EOF:
            return
        if tok.kind == PUNCT and tok.text == "}":
            return
        raise self._err(f"expected end of statement, found {tok.text!r}")

    def parse_block(self) -> N.Block:
        start = self.expect("{", "a block")
        stmts: list[N.Node] = []
        while True:
            self.skip_newlines()
            while self.eat(";"):
                self.skip_newlines()
            if self.at("}"):
                break
            if self.peek().kind == EOF:
                raise self._err("unexpected end of input inside block")
            stmts.append(self.parse_statement())
            self._end_statement()
        self.expect("}")
        return N.Block(self._span(start), stmts)

    def parse_statement(self) -> N.Node:
        tok = self.peek()
        if tok.kind == PUNCT and tok.text == "{":
            return self.parse_block()
        if tok.kind == WORD:
            w = tok.text
            if w in FLOW_WORDS and self._flow_follows(w):
                return self.parse_flow(w)
            if w == "break":
                return self._parse_break()
            if w == "continue":
                return self._parse_continue()
            if w == "return":
                return self._parse_return()
            if w == "delete":
                return self._parse_delete()
            if w == "assert":
                return self._parse_assert()
            if w == "eval":
                return self._parse_eval()
            if w == "import" and self.peek_significant(1).kind == WORD:
                return self._parse_import()
            if w == "from" and self.peek_significant(1).kind == WORD:
                return self._parse_from_import()
            decl = self._try_declaration_or_definition()
            if decl is not None:
                return decl
        expr = self.parse_expression()
        if isinstance(expr, N.Assignment):
            return expr
        return N.ExpressionStmt(expr.span, expr)

    def _flow_follows(self, word: str) -> bool:
        nxt = self.peek_significant(1)
        if word in ("if", "match", "for", "while"):
            return nxt.kind == PUNCT and nxt.text == "("
        if word in ("do", "try"):
            return nxt.kind == PUNCT and nxt.text == "{"
        return False

    # ------------------------------------------------------------------
    # declarations & definitions
    # ------------------------------------------------------------------

    def _collect_modifiers(self) -> list[str]:
        mods: list[str] = []
        while True:
            tok = self.peek()
            if tok.kind != WORD or tok.text not in MODIFIER_WORDS:
                break
            # `const x = 1` shorthand: const directly followed by NAME `=`.
            if tok.text in ("const", "ref"):
                nxt = self.peek_significant(1)
                nxt2 = self.peek_significant(2)
                if nxt.kind == WORD and nxt.text not in MODIFIER_WORDS and nxt2.kind == OP and nxt2.text in ASSIGN_OPS | {":"}:
                    mods.append(self.advance().text)
                    continue
                if nxt.kind == WORD:
                    mods.append(self.advance().text)
                    continue
                break
            mods.append(self.advance().text)
            self.skip_newlines()
        return mods

    def _try_declaration_or_definition(self) -> N.Node | None:
        start = self.peek()
        st = self.save()
        mods = self._collect_modifiers()
        tok = self.peek()

        if tok.kind == PUNCT and tok.text == "{" and mods:
            block = self.parse_block()
            return N.ModifierBlock(self._span(start), mods, block.statements)

        if tok.kind == WORD and tok.text in ("let", "auto"):
            return self._parse_shorthand_decl(start, mods)
        if tok.kind == WORD and self._is_statement_definition(tok.text):
            return self.parse_definition(tok.text, mods, start)

        # const/ref shorthand without type: `const name = expr`
        if mods and tok.kind == WORD:
            nxt = self.peek_significant(1)
            if nxt.kind == OP and nxt.text in ASSIGN_OPS:
                name = self.advance().text
                op = self.advance().text
                self.skip_newlines()
                init = self.parse_expression()
                return N.Declaration(self._span(start), name, mods, None, init, op, "const" if "const" in mods else None)
            if nxt.kind == OP and nxt.text == ":" and self.peek_significant(2).kind == WORD and self.peek_significant(2).text.startswith("$"):
                # qualified trait static: `static const HasFalsy:$zeros_value = ...`
                trait = self.advance().text
                self.advance()  # :
                name = self.advance().text
                self.skip_newlines()
                op = "="
                init = None
                if self.at("=") or (self.peek().kind == OP and self.peek().text in ASSIGN_OPS):
                    op = self.advance().text
                    self.skip_newlines()
                    init = self.parse_expression()
                return N.Declaration(self._span(start), name, mods, None, init, op, None, qualified_trait=trait)

        # rule 2: IDENTIFIER : MODIFIER TYPE
        if tok.kind == WORD and self.peek_significant(1).kind == OP and self.peek_significant(1).text == ":":
            after = self.peek_significant(2)
            if not (after.kind == WORD and after.text.startswith("$")):
                try:
                    name = self.advance().text
                    self.advance()  # :
                    self.skip_newlines()
                    inner_mods = self._collect_modifiers()
                    dtype = self.parse_type_expr()
                    init = None
                    op = "="
                    if self.peek().kind == OP and self.peek().text in ASSIGN_OPS:
                        op = self.advance().text
                        self.skip_newlines()
                        init = self.parse_expression()
                    return N.Declaration(self._span(start), name, mods + inner_mods, dtype, init, op)
                except ParseError:
                    self.restore(st)
                    return None

        # rules 1/3/4/5: MOD TYPE NAME ...
        try:
            dtype = self.parse_type_expr()
        except ParseError:
            self.restore(st)
            return None
        name_tok = self.peek()
        if name_tok.kind != WORD or (name_tok.text in MODIFIER_WORDS | DEFINITION_WORDS | FLOW_WORDS | LITERAL_WORDS | WORD_BINARY_OPS):
            self.restore(st)
            return None
        name = self.advance().text
        if self.at("{"):
            # rule 5: property with getter/setter body
            return self._parse_property(start, mods, dtype, name)
        op = "="
        init = None
        if self.peek().kind == OP and self.peek().text in ASSIGN_OPS:
            op = self.advance().text
            self.skip_newlines()
            init = self.parse_expression()
        elif not self._at_boundary():
            self.restore(st)
            return None
        return N.Declaration(self._span(start), name, mods, dtype, init, op)

    def _at_boundary(self) -> bool:
        tok = self._tok(self.pos)
        return tok.kind in (NEWLINE, EOF) or (tok.kind == PUNCT and tok.text in ";}")

    def _is_statement_definition(self, word: str) -> bool:
        # method/constructor/getter/setter/destructor only define inside
        # class bodies; in statements those words are plain names.
        if word in ("function", "class", "enum", "trait", "implement"):
            return True
        if word == "operator":
            nxt = self.peek_significant(1)
            return (nxt.kind == PUNCT and nxt.text == "(") or (nxt.kind == WORD and nxt.text == "right")
        if word == "type":
            return self._alias_follows()
        return False

    def _parse_shorthand_decl(self, start: Token, mods: list[str]) -> N.Node:
        kind = self.advance().text  # let | auto
        is_ref = bool(self.at_word("ref") and self.advance())
        name_tok = self.peek()
        if name_tok.kind != WORD:
            raise self._err("expected identifier after declaration keyword")
        name = self.advance().text
        init = None
        op = "="
        if self.peek().kind == OP and self.peek().text in ASSIGN_OPS:
            op = self.advance().text
            self.skip_newlines()
            init = self.parse_expression()
        return N.Declaration(self._span(start), name, mods, None, init, op, kind, is_ref)

    def _parse_property(self, start: Token, mods: list[str], dtype: N.TypeExpr | None, name: str) -> N.PropertyDecl:
        self.expect("{")
        getters: list[N.FunctionDef] = []
        setters: list[N.FunctionDef] = []
        while True:
            self.skip_newlines()
            while self.eat(";"):
                self.skip_newlines()
            if self.at("}"):
                break
            item_start = self.peek()
            ret_type = None
            if not (self.at_word("getter") or self.at_word("setter")):
                ret_type = self.parse_type_expr()
                self.skip_newlines()
            if self.at_word("getter"):
                self.advance()
                self.skip_newlines()
                body = self.parse_block()
                getters.append(
                    N.FunctionDef(self._span(item_start), name, "getter", [], [], [], ret_type or dtype, [], body)
                )
            elif self.at_word("setter"):
                self.advance()
                params = self.parse_parameters()
                self.skip_newlines()
                body = self.parse_block()
                setters.append(
                    N.FunctionDef(self._span(item_start), name, "setter", [], [], params, None, [], body)
                )
            else:
                raise self._err("expected 'getter' or 'setter' in property body")
        self.expect("}")
        return N.PropertyDecl(self._span(start), name, mods, dtype, getters, setters)

    # ------------------------------------------------------------------
    # definitions
    # ------------------------------------------------------------------

    def parse_definition(self, word: str, mods: list[str], start: Token | None = None) -> N.Node:
        start = start or self.peek()
        if word == "function":
            return self._parse_function("function", mods, start)
        if word in ("method", "constructor", "getter", "setter", "destructor"):
            return self._parse_function(word, mods, start)
        if word == "operator":
            return self._parse_operator_def(mods, start)
        if word == "class":
            return self._parse_class(mods, start)
        if word == "enum":
            return self._parse_enum(mods, start)
        if word == "trait":
            return self._parse_trait(mods, start)
        if word == "type":
            return self._parse_type_alias(mods, start)
        if word == "implement":
            return self._parse_implement(start)
        raise self._err(f"unsupported definition word {word!r}")

    def _parse_function(self, kind: str, mods: list[str], start: Token) -> N.FunctionDef:
        self.advance()  # definition word
        self.skip_newlines()
        generic_params = self._parse_generic_param_decls() if self.at("<") else []
        self.skip_newlines()
        name: str | None = None
        ret_type: N.TypeExpr | None = None
        if kind in ("function", "method"):
            st = self.save()
            try:
                t = self.parse_type_expr()
                nxt = self.peek()
                if nxt.kind == WORD:
                    ret_type = t
                    name = self.advance().text
                elif isinstance(t, N.TName) and t.generic_args is None and self.at("("):
                    name = t.name
                else:
                    self.restore(st)
            except ParseError:
                self.restore(st)
        params = self.parse_parameters()
        constraints = self._parse_trailing_constraints()
        body = self._parse_optional_body()
        return N.FunctionDef(self._span(start), name, kind, mods, generic_params, params, ret_type, constraints, body)

    def _parse_operator_def(self, mods: list[str], start: Token) -> N.OperatorDef:
        self.advance()  # operator
        self.skip_newlines()
        right_form = bool(self.at_word("right") and self.advance())
        self.expect("(", "operator symbol")
        sym_parts = []
        while not self.at(")"):
            if self.peek().kind == EOF:
                raise self._err("unterminated operator symbol")
            sym_parts.append(self.advance().text)
        self.expect(")")
        symbol = "".join(sym_parts)
        if not symbol or symbol in (".", ",", ";"):
            raise self._err(f"invalid operator symbol {symbol!r}")
        params = self.parse_parameters()
        constraints = self._parse_trailing_constraints()
        body = self._parse_optional_body()
        func = N.FunctionDef(
            self._span(start), None, "operator", mods, [], params, None, constraints, body, operator_symbol=symbol, operator_right=right_form
        )
        return N.OperatorDef(self._span(start), func)

    def _parse_trailing_constraints(self) -> list[N.ConstraintNode]:
        if not self.at(":"):
            return []
        self.advance()
        self.skip_newlines()
        constraints: list[N.ConstraintNode] = []
        while True:
            c_start = self.peek()
            if self.at_word("returns"):
                self.advance()
                self.skip_newlines()
                t = self.parse_type_expr()
                constraints.append(N.ReturnsCheck(self._span(c_start), t))
            else:
                name_tok = self.peek()
                if name_tok.kind != WORD:
                    raise self._err("expected constraint")
                pname = self.advance().text
                self.expect(":")
                self.skip_newlines()
                expr = self._parse_constraint_expr()
                constraints.append(N.ParamConstraint(self._span(c_start), pname, expr))
            self.skip_newlines()
            if not self.eat(","):
                break
            self.skip_newlines()
        return constraints

    def _parse_optional_body(self) -> N.Block | None:
        self.skip_newlines()
        if self.at("{"):
            return self.parse_block()
        self.eat(";")
        return None

    def _parse_class(self, mods: list[str], start: Token) -> N.ClassDef:
        self.advance()  # class
        self.skip_newlines()
        name = self._expect_name("class name")
        self.skip_newlines()
        generic_params = self._parse_generic_param_decls() if self.at("<") else []
        self.skip_newlines()
        inherits = None
        implements: list[N.TypeExpr] = []
        while True:
            if self.at_word("inherits"):
                self.advance()
                self.skip_newlines()
                inherits = self.parse_type_expr()
                self.skip_newlines()
            elif self.at_word("implements"):
                self.advance()
                self.skip_newlines()
                implements.append(self.parse_type_expr())
                while self.eat(","):
                    self.skip_newlines()
                    implements.append(self.parse_type_expr())
                self.skip_newlines()
            else:
                break
        members: list[N.Node] = []
        if self.at("{"):
            members = self._parse_class_body()
        else:
            self.eat(";")
        trailing = self._parse_trailing_instances()
        return N.ClassDef(self._span(start), name, mods, generic_params, inherits, implements, members, trailing)

    def _parse_trailing_instances(self) -> list[str]:
        names: list[str] = []
        if self._tok(self.pos).kind != NEWLINE and self.peek().kind == WORD and self.peek().text not in MODIFIER_WORDS:
            names.append(self.advance().text)
            while self.eat(","):
                self.skip_newlines()
                names.append(self._expect_name("instance name"))
        return names

    def _parse_class_body(self) -> list[N.Node]:
        self.expect("{")
        members: list[N.Node] = []
        while True:
            self.skip_newlines()
            while self.eat(";"):
                self.skip_newlines()
            if self.at("}"):
                break
            if self.peek().kind == EOF:
                raise self._err("unexpected end of input in class body")
            members.append(self._parse_class_member())
        self.expect("}")
        return members

    def _parse_class_member(self) -> N.Node:
        start = self.peek()
        mods = self._collect_modifiers()
        tok = self.peek()
        if tok.kind == PUNCT and tok.text == "{" and mods:
            stmts = self._parse_member_group()
            return N.ModifierBlock(self._span(start), mods, stmts)
        if tok.kind == WORD and tok.text in DEFINITION_WORDS and not (
            tok.text == "type" and not self._alias_follows()
        ):
            return self.parse_definition(tok.text, mods, start)
        # qualified static: `static const Trait:$name = ...`
        if tok.kind == WORD and self.peek_significant(1).kind == OP and self.peek_significant(1).text == ":":
            after = self.peek_significant(2)
            if after.kind == WORD and after.text.startswith("$"):
                trait = self.advance().text
                self.advance()
                name = self.advance().text
                self.skip_newlines()
                init = None
                op = "="
                if self.peek().kind == OP and self.peek().text in ASSIGN_OPS:
                    op = self.advance().text
                    self.skip_newlines()
                    init = self.parse_expression()
                return N.Declaration(self._span(start), name, mods, None, init, op, None, qualified_trait=trait)
        # rule 2 member: NAME : MODIFIER TYPE
        if tok.kind == WORD and self.peek_significant(1).kind == OP and self.peek_significant(1).text == ":":
            name = self.advance().text
            self.advance()  # :
            self.skip_newlines()
            inner = self._collect_modifiers()
            dtype = self.parse_type_expr()
            init = None
            op = "="
            if self.peek().kind == OP and self.peek().text in ASSIGN_OPS:
                op = self.advance().text
                self.skip_newlines()
                init = self.parse_expression()
            return N.Declaration(self._span(start), name, mods + inner, dtype, init, op)
        # field / property: TYPE NAME [...]
        dtype = self.parse_type_expr()
        if self.peek().kind != WORD:
            raise self._err("expected member name")
        name = self.advance().text
        nxt = self.peek_significant()
        if nxt.kind == PUNCT and nxt.text == "{":
            self.skip_newlines()
            return self._parse_property(start, mods, dtype, name)
        init = None
        op = "="
        if self.peek().kind == OP and self.peek().text in ASSIGN_OPS:
            op = self.advance().text
            self.skip_newlines()
            init = self.parse_expression()
        return N.Declaration(self._span(start), name, mods, dtype, init, op)

    def _parse_member_group(self) -> list[N.Node]:
        """Class/implement members wrapped in a shared-modifier block."""
        self.expect("{")
        members: list[N.Node] = []
        while True:
            self.skip_newlines()
            while self.eat(";"):
                self.skip_newlines()
            if self.at("}"):
                break
            if self.peek().kind == EOF:
                raise self._err("unexpected end of input in member block")
            members.append(self._parse_class_member())
        self.expect("}")
        return members

    def _alias_follows(self) -> bool:
        # `type Name<...>? =` begins a type alias; anything else treats
        # `type` as a plain name (the builtin `type` type).
        if self.peek_significant(1).kind != WORD:
            return False
        i = 2
        if self.peek_significant(i).kind == OP and self.peek_significant(i).text == "<":
            depth = 0
            while True:
                tok = self.peek_significant(i)
                if tok.kind == EOF:
                    return False
                if tok.kind == OP and tok.text == "<":
                    depth += 1
                elif tok.kind == OP and tok.text == ">":
                    depth -= 1
                    if depth == 0:
                        i += 1
                        break
                i += 1
        tok = self.peek_significant(i)
        return tok.kind == OP and tok.text == "="

    def _parse_enum(self, mods: list[str], start: Token) -> N.EnumDef:
        self.advance()  # enum
        self.skip_newlines()
        name = self._expect_name("enum name")
        self.skip_newlines()
        members = self._parse_enum_members()
        return N.EnumDef(self._span(start), name, mods, members)

    def _parse_enum_members(self) -> list[N.EnumMemberNode]:
        self.expect("{")
        self.bracket_depth += 1
        members: list[N.EnumMemberNode] = []
        try:
            while not self.at("}"):
                m_start = self.peek()
                mname = self._expect_name("enum member name")
                payload = None
                if self.at("("):
                    payload = self.parse_parameters()
                members.append(N.EnumMemberNode(self._span(m_start), mname, payload))
                if not self.eat(","):
                    break
            self.expect("}")
        finally:
            self.bracket_depth -= 1
        return members

    def _parse_trait(self, mods: list[str], start: Token) -> N.TraitDef:
        self.advance()  # trait
        self.skip_newlines()
        name = self._expect_name("trait name")
        self.skip_newlines()
        self.expect("{")
        members: list[N.Node] = []
        while True:
            self.skip_newlines()
            while self.eat(";"):
                self.skip_newlines()
            if self.at("}"):
                break
            members.append(self._parse_trait_member())
        self.expect("}")
        return N.TraitDef(self._span(start), name, mods, members)

    def _parse_trait_member(self) -> N.Node:
        start = self.peek()
        mods = self._collect_modifiers()
        tok = self.peek()
        if tok.kind == WORD and tok.text in DEFINITION_WORDS:
            return self.parse_definition(tok.text, mods, start)
        # `static const $zeros_value: ImplType[]`
        name = self._expect_name("trait member name")
        self.expect(":")
        self.skip_newlines()
        dtype = self.parse_type_expr()
        init = None
        if self.eat("="):
            self.skip_newlines()
            init = self.parse_expression()
        return N.Declaration(self._span(start), name, mods, dtype, init, "=")

    def _parse_type_alias(self, mods: list[str], start: Token) -> N.Node:
        self.advance()  # type
        name = self._expect_name("type alias name")
        generic_params = self._parse_generic_param_decls() if self.at("<") else []
        self.expect("=")
        self.skip_newlines()
        if self.at_word("enum"):
            self.advance()
            self.skip_newlines()
            members = self._parse_enum_members()
            return N.EnumDef(self._span(start), name, mods, members)
        target = self.parse_type_expr()
        return N.TypeAliasDef(self._span(start), name, mods, generic_params, target)

    def _parse_implement(self, start: Token) -> N.ImplementBlock:
        self.advance()  # implement
        self.skip_newlines()
        target = self.parse_type_expr(allow_generic_decls=True)
        self.skip_newlines()
        members = self._parse_class_body()
        return N.ImplementBlock(self._span(start), target, members)

    def _parse_generic_param_decls(self) -> list[N.GenericParamNode]:
        self.expect("<")
        self.bracket_depth += 1
        params: list[N.GenericParamNode] = []
        try:
            while not self.at(">"):
                p_start = self.peek()
                kind = self._expect_name("generic parameter kind")
                name = self._expect_name("generic parameter name")
                bound = None
                default: N.Node | N.TypeExpr | None = None
                if self.eat(":"):
                    bound = self.parse_type_expr()
                if self.eat("="):
                    default = self._parse_generic_arg_value()
                params.append(N.GenericParamNode(self._span(p_start), kind, name, bound, default))
                if not self.eat(","):
                    break
            self.expect(">")
        finally:
            self.bracket_depth -= 1
        return params

    def _parse_generic_arg_value(self) -> N.Node | N.TypeExpr:
        tok = self.peek()
        if tok.kind == NUMBER or tok.kind == TEXT or (tok.kind == WORD and tok.text in ("true", "false")):
            return self._parse_primary()
        return self.parse_type_expr()

    def _expect_name(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != WORD:
            raise self._err(f"expected {what}, found {tok.text!r}")
        return self.advance().text

    # ------------------------------------------------------------------
    # parameters
    # ------------------------------------------------------------------

    def parse_parameters(self) -> list[N.ParameterNode]:
        self.expect("(", "parameter list")
        self.bracket_depth += 1
        params: list[N.ParameterNode] = []
        seen_slash = False
        seen_star = False
        try:
            while not self.at(")"):
                p_start = self.peek()
                if self.at("/"):
                    self.advance()
                    if seen_star:
                        raise self._err("'/' may not follow '*' in a parameter list")
                    seen_slash = True
                    for p in params:
                        p.positional_only = True
                elif self.at("*"):
                    self.advance()
                    seen_star = True
                else:
                    params.append(self._parse_parameter(p_start, seen_star))
                if not self.eat(","):
                    break
            self.expect(")")
        finally:
            self.bracket_depth -= 1
        return params

    def _parse_parameter(self, start: Token, keyword_only: bool) -> N.ParameterNode:
        mods: list[str] = []
        while self.peek().kind == WORD and self.peek().text in ("const", "readonly", "ref") and self.peek_significant(1).kind == WORD:
            mods.append(self.advance().text)
        declared_type: N.TypeExpr | None = None
        variadic = False
        name: str | None = None
        st = self.save()
        try:
            t = self.parse_type_expr()
            if self.at("..."):
                self.advance()
                variadic = True
            if self.peek().kind == WORD:
                declared_type = t
                name = self.advance().text
            elif isinstance(t, N.TName) and t.generic_args is None and not variadic:
                name = t.name
            else:
                raise ParseError("not a parameter", start.span)
        except ParseError:
            self.restore(st)
            name = self._expect_name("parameter name")
        optional = bool(self.at("?") and self.advance())
        constraint: N.ConstraintNode | None = None
        if self.at(":"):
            self.advance()
            self.skip_newlines()
            constraint = self._parse_constraint_expr()
        if self.at("?") and not optional:
            self.advance()
            optional = True
        default = None
        if self.eat("="):
            self.skip_newlines()
            default = self.parse_expression()
            optional = True
        if variadic and default is not None:
            raise self._err("a variadic parameter may not have a default value")
        return N.ParameterNode(
            self._span(start),
            name,
            declared_type,
            constraint,
            mods,
            variadic,
            optional,
            default,
            positional_only=False,
            keyword_only=keyword_only,
        )

    def _parse_constraint_expr(self) -> N.ConstraintNode:
        left = self._parse_constraint_term()
        items = [left]
        op = None
        while self.at("&") or self.at("|"):
            this_op = "and" if self.at("&") else "or"
            if op is None:
                op = this_op
            elif op != this_op:
                raise self._err("mixed '&' and '|' in a constraint need parentheses")
            self.advance()
            self.skip_newlines()
            items.append(self._parse_constraint_term())
        if len(items) == 1:
            return left
        return N.ConstraintJoin(self._span_of(items), op or "and", items)

    def _span_of(self, items: list[N.Node]) -> SourceSpan:
        return items[0].span

    def _parse_constraint_term(self) -> N.ConstraintNode:
        start = self.peek()
        if start.kind == WORD and start.text in MODIFIER_WORDS:
            self.advance()
            return N.ModifierCheck(self._span(start), start.text)
        if start.kind == WORD and start.text == "returns":
            self.advance()
            self.skip_newlines()
            return N.ReturnsCheck(self._span(start), self.parse_type_expr())
        if start.kind == WORD and start.text == "enum":
            self.advance()
            self.skip_newlines()
            members = self._parse_enum_members()
            return N.TypeCheck(self._span(start), N.TEnumInline(self._span(start), members))
        if self.at("("):
            st = self.save()
            try:
                # `&`/`|` at this level join constraints, not types.
                t = self._parse_type_addsub()
                if isinstance(t, (N.TFunc, N.TTuple)):
                    return N.TypeCheck(self._span(start), t)
                raise ParseError("not a type", start.span)
            except ParseError:
                self.restore(st)
            self.expect("(")
            self.bracket_depth += 1
            try:
                expr = self.parse_expression()
                self.expect(")")
            finally:
                self.bracket_depth -= 1
            return N.BoolCheck(self._span(start), expr)
        t = self._parse_type_addsub()
        return N.TypeCheck(self._span(start), t)

    # ------------------------------------------------------------------
    # type expressions
    # ------------------------------------------------------------------

    def parse_type_expr(self, allow_generic_decls: bool = False) -> N.TypeExpr:
        return self._parse_type_union(allow_generic_decls)

    def _parse_type_union(self, decls: bool = False) -> N.TypeExpr:
        start = self.peek()
        first = self._parse_type_intersect(decls)
        if not self.at("|"):
            return first
        items = [first]
        while self.eat("|"):
            self.skip_newlines()
            items.append(self._parse_type_intersect(decls))
        return N.TUnion(self._span(start), items)

    def _parse_type_intersect(self, decls: bool = False) -> N.TypeExpr:
        start = self.peek()
        first = self._parse_type_addsub(decls)
        if not self.at("&"):
            return first
        items = [first]
        while self.eat("&"):
            self.skip_newlines()
            items.append(self._parse_type_addsub(decls))
        return N.TIntersect(self._span(start), items)

    def _parse_type_addsub(self, decls: bool = False) -> N.TypeExpr:
        start = self.peek()
        left = self._parse_type_postfix(decls)
        while (self.at("+") or self.at("-")) and self.peek_significant(1).kind in (WORD,):
            op = self.advance().text
            self.skip_newlines()
            right = self._parse_type_postfix(decls)
            node = N.TAdd(self._span(start), left, right) if op == "+" else N.TSub(self._span(start), left, right)
            left = node
        return left

    def _parse_type_postfix(self, decls: bool = False) -> N.TypeExpr:
        start = self.peek()
        base = self._parse_type_primary(decls)
        while self.at("["):
            self.advance()
            if self.at("]"):
                self.advance()
                base = N.TArray(self._span(start), base)
            else:
                length = self._parse_generic_arg()
                self.expect("]")
                base = N.TSeq(self._span(start), base, length)
        return base

    def _parse_type_primary(self, decls: bool = False) -> N.TypeExpr:
        tok = self.peek()
        if tok.kind == NUMBER:
            self.advance()
            return N.TLiteral(self._span(tok), tok.value.value)
        if tok.kind == TEXT:
            self.advance()
            return N.TLiteral(self._span(tok), tok.value.decoded)
        if tok.kind == WORD and tok.text in ("true", "false"):
            self.advance()
            return N.TLiteral(self._span(tok), tok.text == "true")
        if tok.kind == WORD and tok.text == "infer":
            self.advance()
            name = self._expect_name("infer name")
            return N.TInfer(self._span(tok), name)
        if tok.kind == WORD and tok.text == "enum" and self.peek_significant(1).text == "{":
            self.advance()
            self.skip_newlines()
            members = self._parse_enum_members()
            return N.TEnumInline(self._span(tok), members)
        if self.at("("):
            return self._parse_type_group(tok)
        if tok.kind != WORD or tok.text in LITERAL_WORDS - {"null", "undefined", "void"} or tok.text in WORD_BINARY_OPS:
            raise self._err(f"expected a type, found {tok.text!r}")
        name = self.advance().text
        generic_args = None
        if self.at("<"):
            generic_args = self._parse_generic_args(decls)
        node: N.TypeExpr = N.TName(self._span(tok), name, generic_args)
        while self.at(".") and self.peek_significant(1).kind == WORD:
            self.advance()
            member = self.advance().text
            node = N.TMember(self._span(tok), node, member)
        return node

    def _parse_type_group(self, start: Token) -> N.TypeExpr:
        # (T -> R), (a: T, b?: U) -> R, or a tuple type (T1, T2).
        self.expect("(")
        self.bracket_depth += 1
        try:
            params: list[N.ParameterNode] = []
            items: list[N.TypeExpr] = []
            is_func = False
            while not self.at(")"):
                p_start = self.peek()
                if (
                    p_start.kind == WORD
                    and self.peek_significant(1).kind == OP
                    and self.peek_significant(1).text in (":", "?")
                ):
                    pname = self.advance().text
                    optional = bool(self.at("?") and self.advance())
                    ptype = None
                    if self.eat(":"):
                        self.skip_newlines()
                        ptype = self.parse_type_expr()
                    params.append(N.ParameterNode(self._span(p_start), pname, ptype, None, [], False, optional, None))
                    is_func = True
                else:
                    t = self.parse_type_expr()
                    if self.at("->"):
                        self.advance()
                        self.skip_newlines()
                        ret = self.parse_type_expr()
                        t = N.TFunc(self._span(p_start), [N.ParameterNode(p_start.span, "value", t, None, [], False, False, None)], ret)
                    items.append(t)
                    params.append(N.ParameterNode(self._span(p_start), f"arg{len(params)}", t, None, [], False, False, None))
                if not self.eat(","):
                    break
                self.skip_newlines()
        finally:
            self.bracket_depth -= 1
        self.expect(")")
        if self.at("->"):
            self.advance()
            self.skip_newlines()
            ret = self.parse_type_expr()
            return N.TFunc(self._span(start), params, ret)
        if is_func:
            raise self._err("expected '->' after function type parameters")
        if len(items) == 1:
            return items[0]
        return N.TTuple(self._span(start), items)

    def _parse_generic_args(self, decls: bool = False) -> list[N.GenericArgNode]:
        self.expect("<")
        self.bracket_depth += 1
        args: list[N.GenericArgNode] = []
        try:
            while not self.at(">"):
                args.append(self._parse_generic_arg(decls))
                if not self.eat(","):
                    break
            self.expect(">")
        finally:
            self.bracket_depth -= 1
        return args

    def _parse_generic_arg(self, decls: bool = False) -> N.GenericArgNode:
        start = self.peek()
        if decls and start.kind == WORD and start.text in ("type", "usize", "int", "bigint", "bool", "string") and self.peek_significant(1).kind == WORD:
            kind = self.advance().text
            name = self.advance().text
            bound = None
            if self.eat(":"):
                self.skip_newlines()
                bound = self.parse_type_expr()
            return N.GenericArgNode(self._span(start), None, declares_kind=kind, declares_name=name, declares_bound=bound)
        name = None
        if start.kind == WORD and self.peek_significant(1).kind == OP and self.peek_significant(1).text == "=":
            name = self.advance().text
            self.advance()  # =
            self.skip_newlines()
            start = self.peek()
        tok = self.peek()
        if tok.kind == NUMBER:
            self.advance()
            return N.GenericArgNode(self._span(start), name, const_value=tok.value.value, is_const=True)
        if tok.kind == TEXT:
            self.advance()
            return N.GenericArgNode(self._span(start), name, const_value=tok.value.decoded, is_const=True)
        if tok.kind == WORD and tok.text in ("true", "false"):
            self.advance()
            return N.GenericArgNode(self._span(start), name, const_value=tok.text == "true", is_const=True)
        if self.at("-") and self.peek_significant(1).kind == NUMBER:
            self.advance()
            num = self.advance()
            return N.GenericArgNode(self._span(start), name, const_value=-num.value.value, is_const=True)
        t = self.parse_type_expr()
        return N.GenericArgNode(self._span(start), name, type_expr=t)

    # ------------------------------------------------------------------
    # flow control structures
    # ------------------------------------------------------------------

    def parse_flow(self, word: str) -> N.Node:
        if word == "if":
            return self._parse_if()
        if word == "match":
            return self._parse_match()
        if word == "for":
            return self._parse_for()
        if word == "while":
            return self._parse_while()
        if word == "do":
            return self._parse_do()
        if word == "try":
            return self._parse_try()
        raise self._err(f"unsupported structure {word!r}")

    def _parse_paren_expr(self) -> N.Node:
        self.expect("(")
        self.bracket_depth += 1
        try:
            expr = self.parse_expression()
            self.expect(")")
        finally:
            self.bracket_depth -= 1
        return expr

    def _parse_if(self) -> N.If:
        start = self.advance()  # if
        cond = self._parse_paren_expr()
        self.skip_newlines()
        body = self.parse_block()
        branches = [(cond, body)]
        else_block = None
        while True:
            st = self.save()
            self.skip_newlines()
            if self.at_word("elif"):
                self.advance()
                cond = self._parse_paren_expr()
                self.skip_newlines()
                branches.append((cond, self.parse_block()))
                continue
            if self.at_word("else"):
                self.advance()
                self.skip_newlines()
                else_block = self.parse_block()
                break
            self.restore(st)
            break
        return N.If(self._span(start), branches, else_block)

    def _parse_match(self) -> N.Match:
        start = self.advance()  # match
        subject = self._parse_paren_expr()
        self.skip_newlines()
        self.expect("{")
        arms: list[N.MatchArm] = []
        while True:
            self.skip_newlines()
            while self.eat(";"):
                self.skip_newlines()
            if self.at("}"):
                break
            a_start = self.peek()
            if self.at_word("otherwise"):
                self.advance()
                patterns: list[N.Node] = []
                is_otherwise = True
            else:
                patterns = [self.parse_expression(_BP_ASSIGN + 1)]
                while self.eat(","):
                    self.skip_newlines()
                    patterns.append(self.parse_expression(_BP_ASSIGN + 1))
                is_otherwise = False
            self.expect("=>", "'=>' after match patterns")
            self.skip_newlines()
            if self.at("{"):
                body: N.Node = self.parse_block()
            else:
                body = self.parse_expression()
            arms.append(N.MatchArm(self._span(a_start), patterns, is_otherwise, body))
        self.expect("}")
        return N.Match(self._span(start), subject, arms)

    def _parse_for(self) -> N.ForLoop:
        start = self.advance()  # for
        self.expect("(")
        self.bracket_depth += 1
        try:
            indicators = self._parse_indicators()
        finally:
            self.bracket_depth -= 1
        self.expect(")")
        self.skip_newlines()
        body = self.parse_block()
        then_block, else_block = self._parse_then_else()
        return N.ForLoop(self._span(start), indicators, body, then_block, else_block)

    def _parse_indicators(self) -> list[N.Node]:
        start = self.peek()
        st = self.save()
        # C-style triple: DECL ; COND ; STEP
        try:
            init = self._try_declaration_or_definition()
            if init is None:
                init = self.parse_statement()
            if self.at(";"):
                self.advance()
                cond = None if self.at(";") else self.parse_expression()
                self.expect(";")
                step = None if self.at(")") else self.parse_statement()
                return [N.CStyleIndicator(self._span(start), init, cond, step)]
            raise ParseError("not c-style", start.span)
        except ParseError:
            self.restore(st)
        indicators: list[N.Node] = []
        while True:
            indicators.append(self._parse_in_indicator())
            if not self.eat(","):
                break
            self.skip_newlines()
        return indicators

    def _parse_in_indicator(self) -> N.InIndicator:
        start = self.peek()
        binding_kind = None
        declared_type = None
        if self.peek().kind == WORD and self.peek().text in ("let", "const", "auto"):
            binding_kind = self.advance().text
        else:
            st = self.save()
            try:
                t = self.parse_type_expr()
                if self.peek().kind == WORD and self.peek_significant(1).text == "in":
                    declared_type = t
                else:
                    self.restore(st)
            except ParseError:
                self.restore(st)
        name = self._expect_name("loop variable")
        if not (self.peek().kind == WORD and self.peek().text == "in"):
            raise self._err("expected 'in' in iteration indicator")
        self.advance()
        self.skip_newlines()
        iterable = self.parse_expression(_BP_ASSIGN + 1)
        return N.InIndicator(self._span(start), name, binding_kind, declared_type, iterable)

    def _parse_while(self) -> N.WhileLoop:
        start = self.advance()  # while
        cond = self._parse_paren_expr()
        self.skip_newlines()
        body = self.parse_block()
        then_block, else_block = self._parse_then_else()
        return N.WhileLoop(self._span(start), cond, body, then_block, else_block)

    def _parse_do(self) -> N.DoLoop:
        start = self.advance()  # do
        self.skip_newlines()
        body = self.parse_block()
        self.skip_newlines()
        if not self.at_word("while"):
            raise self._err("expected 'while' after do-loop body")
        self.advance()
        cond = self._parse_paren_expr()
        then_block, else_block = self._parse_then_else()
        return N.DoLoop(self._span(start), body, cond, then_block, else_block)

    def _parse_then_else(self) -> tuple[N.Block | None, N.Block | None]:
        then_block = None
        else_block = None
        st = self.save()
        self.skip_newlines()
        if self.at_word("then"):
            self.advance()
            self.skip_newlines()
            then_block = self.parse_block()
            st = self.save()
            self.skip_newlines()
        if self.at_word("else"):
            self.advance()
            self.skip_newlines()
            else_block = self.parse_block()
        else:
            self.restore(st)
        return then_block, else_block

    def _parse_try(self) -> N.Try:
        start = self.advance()  # try
        self.skip_newlines()
        body = self.parse_block()
        catches: list[N.CatchArm] = []
        while True:
            st = self.save()
            self.skip_newlines()
            if not self.at_word("catch"):
                self.restore(st)
                break
            c_start = self.advance()
            self.expect("(")
            self.bracket_depth += 1
            try:
                t = self.parse_type_expr()
                name = self._expect_name("catch variable")
                self.expect(")")
            finally:
                self.bracket_depth -= 1
            self.skip_newlines()
            catches.append(N.CatchArm(self._span(c_start), t, name, self.parse_block()))
        if not catches:
            raise self._err("try requires at least one catch arm")
        return N.Try(self._span(start), body, catches)

    def _parse_break(self) -> N.Break:
        start = self.advance()
        indicator = None
        eval_expr = None
        if self.peek().kind == WORD and self.peek().text != "eval" and not self._at_boundary():
            indicator = self.advance().text
        if self.at_word("eval"):
            self.advance()
            self.skip_newlines()
            eval_expr = self.parse_expression()
        return N.Break(self._span(start), indicator, eval_expr)

    def _parse_continue(self) -> N.Continue:
        start = self.advance()
        indicator = None
        if self.peek().kind == WORD and not self._at_boundary():
            indicator = self.advance().text
        return N.Continue(self._span(start), indicator)

    def _parse_return(self) -> N.Return:
        start = self.advance()
        nxt = self.peek_significant()
        if nxt.kind == EOF or (nxt.kind == PUNCT and nxt.text in ("}", ";", ")")):
            return N.Return(self._span(start), None)
        self.skip_newlines()
        value = self.parse_expression()
        return N.Return(self._span(start), value)

    def _parse_delete(self) -> N.Delete:
        start = self.advance()
        name = self._expect_name("identifier to delete")
        return N.Delete(self._span(start), name)

    def _parse_assert(self) -> N.Assert:
        start = self.advance()
        self.skip_newlines()
        expr = self.parse_expression()
        return N.Assert(self._span(start), expr)

    def _parse_eval(self) -> N.EvalStmt:
        start = self.advance()
        self.skip_newlines()
        expr = self.parse_expression()
        return N.EvalStmt(self._span(start), expr)

    def _parse_import(self) -> N.Import:
        start = self.advance()
        segments = [self._expect_name("import path")]
        while self.at("."):
            self.advance()
            segments.append(self._expect_name("import path segment"))
        return N.Import(self._span(start), segments)

    def _parse_from_import(self) -> N.FromImport:
        start = self.advance()
        segments = [self._expect_name("import path")]
        while self.at("."):
            self.advance()
            segments.append(self._expect_name("import path segment"))
        self.skip_newlines()
        if not self.at_word("import"):
            raise self._err("expected 'import' in from-import")
        self.advance()
        self.skip_newlines()
        names: list[tuple[str, str | None]] = []
        while True:
            name = self._expect_name("imported name")
            alias = None
            self.skip_newlines()
            if self.at_word("as"):
                self.advance()
                self.skip_newlines()
                alias = self._expect_name("import alias")
            names.append((name, alias))
            self.skip_newlines()
            if not self.eat(","):
                break
            self.skip_newlines()
        return N.FromImport(self._span(start), segments, names)

    # ------------------------------------------------------------------
    # expressions
    # ------------------------------------------------------------------

    def parse_expression(self, min_bp: int = 0) -> N.Node:
        left = self._parse_prefix()
        while True:
            left, advanced = self._parse_postfix_step(left, min_bp)
            if not advanced:
                break
        return left

    def _continues_on_next_line(self) -> bool:
        tok = self.peek_significant()
        if tok.kind == OP and tok.text in _CONTINUATION_TEXTS:
            return True
        if tok.kind == WORD and tok.text in _CONTINUATION_TEXTS:
            return True
        return False

    def _parse_postfix_step(self, left: N.Node, min_bp: int) -> tuple[N.Node, bool]:
        tok = self.peek()
        if tok.kind == NEWLINE:
            if self.bracket_depth == 0:
                if not self._continues_on_next_line():
                    return left, False
                self.skip_newlines()
                tok = self.peek()
            else:  # pragma: no cover - peek() already skips
                tok = self.peek()
        text = tok.text

        # assignment (expression form)
        if tok.kind == OP and text in ASSIGN_OPS and min_bp <= _BP_ASSIGN:
            if not isinstance(left, (N.Identifier, N.Member, N.Index, N.DeclExpr)):
                return left, False
            self.advance()
            self.skip_newlines()
            value = self.parse_expression(_BP_ASSIGN - 1)
            return N.Assignment(self._span_for(left), left, text, value), True

        # arrow function
        if tok.kind == OP and text == "->" and min_bp <= _BP_ARROW:
            params = self._params_from_expr(left)
            if params is None:
                return left, False
            self.advance()
            self.skip_newlines()
            if self.at("{"):
                body: N.Node = self.parse_block()
            else:
                body = self.parse_expression(_BP_ARROW - 1)
            return N.ArrowFunction(self._span_for(left), params, body), True

        # ternary
        if tok.kind == OP and text == "?" and min_bp <= _BP_TERNARY:
            self.advance()
            self.skip_newlines()
            then_expr = self.parse_expression(_BP_TERNARY - 1)
            self.skip_newlines()
            self.expect(":", "':' in conditional expression")
            self.skip_newlines()
            else_expr = self.parse_expression(_BP_TERNARY - 1)
            return N.Ternary(self._span_for(left), left, then_expr, else_expr), True

        # postfix operators
        if min_bp <= _BP_POSTFIX:
            if tok.kind == PUNCT and text == "(":
                args = self._parse_call_args()
                return N.Call(self._span_for(left), left, args), True
            if tok.kind == PUNCT and text == "[":
                self.advance()
                self.bracket_depth += 1
                try:
                    index = self.parse_expression()
                    self.expect("]")
                finally:
                    self.bracket_depth -= 1
                return N.Index(self._span_for(left), left, index), True
            if tok.kind == OP and text == ".":
                self.advance()
                self.skip_newlines()
                name = self._expect_name("member name")
                if self.at(":") and self.peek_significant(1).kind == WORD and self.peek_significant(1).text.startswith("$"):
                    self.advance()
                    name = f"{name}:{self.advance().text}"
                return N.Member(self._span_for(left), left, name), True
            if tok.kind == OP and text == "<" and isinstance(left, (N.Identifier, N.Member)):
                applied = self._try_generic_application(left)
                if applied is not None:
                    return applied, True
            if tok.kind == OP and text == "@" and self.peek(1).text == "{":
                self.advance()
                fields = self._parse_object_fields()
                return N.ObjectLiteral(self._span_for(left), left, None, fields), True
            if tok.kind == OP and text in ("++", "--"):
                self.advance()
                return N.Unary(self._span_for(left), text, left, prefix=False), True
            if tok.kind == OP and text in ("??", "???"):
                self.advance()
                return N.Unary(self._span_for(left), text, left, prefix=False), True
            if tok.kind == WORD and text == "with":
                self.advance()
                self.skip_newlines()
                oname = self._expect_name("override name")
                self.expect("=")
                self.skip_newlines()
                ovalue = self.parse_expression(_BP_POSTFIX)
                return N.WithPartial(self._span_for(left), left, [(oname, ovalue)]), True

        # binary operators
        bp = None
        if tok.kind == OP and text in _BINARY_BP:
            bp = _BINARY_BP[text]
        elif tok.kind == WORD and text in _BINARY_BP:
            bp = _BINARY_BP[text]
        elif tok.kind == OP and text == "??:":
            bp = _BP_COALESCE
        if bp is not None and min_bp <= bp:
            self.advance()
            self.skip_newlines()
            right = self.parse_expression(bp + 1)
            return N.Binary(self._span_for(left), text, left, right), True

        return left, False

    def _span_for(self, left: N.Node) -> SourceSpan:
        end = self.prev_token().span
        return SourceSpan(self.file_id, left.span.start_byte, max(end.end_byte, left.span.end_byte), left.span.line, left.span.column)

    def _params_from_expr(self, expr: N.Node) -> list[N.ParameterNode] | None:
        if isinstance(expr, N.Identifier):
            return [N.ParameterNode(expr.span, expr.name)]
        if isinstance(expr, N.TupleExpr) and all(isinstance(e, N.Identifier) for e in expr.items):
            return [N.ParameterNode(e.span, e.name) for e in expr.items]
        return None

    def _try_generic_application(self, left: N.Node) -> N.Node | None:
        st = self.save()
        try:
            args = self._parse_generic_args()
        except ParseError:
            self.restore(st)
            return None
        if self.at("("):
            call_args = self._parse_call_args()
            return N.Call(self._span_for(left), left, call_args, generic_args=args)
        if self.at("@") and self.peek(1).text == "{":
            self.advance()
            fields = self._parse_object_fields()
            return N.ObjectLiteral(self._span_for(left), left, args, fields)
        self.restore(st)
        return None

    def _parse_call_args(self) -> list[N.Argument]:
        self.expect("(")
        self.bracket_depth += 1
        args: list[N.Argument] = []
        try:
            while not self.at(")"):
                a_start = self.peek()
                name = None
                if (
                    a_start.kind == WORD
                    and self.peek(1).kind == OP
                    and self.peek(1).text == "="
                ):
                    name = self.advance().text
                    self.advance()  # =
                    self.skip_newlines()
                value = self.parse_expression(_BP_ASSIGN + 1)
                args.append(N.Argument(self._span(a_start), name, value))
                if not self.eat(","):
                    break
                self.skip_newlines()
            self.expect(")")
        finally:
            self.bracket_depth -= 1
        return args

    def _parse_object_fields(self) -> list[tuple[str, N.Node]]:
        self.expect("{")
        self.bracket_depth += 1
        fields: list[tuple[str, N.Node]] = []
        try:
            while not self.at("}"):
                name = self._expect_name("member name")
                self.expect(":")
                self.skip_newlines()
                value = self.parse_expression(_BP_ASSIGN + 1)
                fields.append((name, value))
                if not self.eat(","):
                    break
                self.skip_newlines()
            self.expect("}")
        finally:
            self.bracket_depth -= 1
        return fields

    def _parse_prefix(self) -> N.Node:
        tok = self.peek()
        if tok.kind == OP and tok.text in ("-", "+", "++", "--"):
            self.advance()
            operand = self.parse_expression(_BP_PREFIX + 1)
            return N.Unary(self._span(tok), tok.text, operand, prefix=True)
        if tok.kind == WORD and tok.text in ("not", "bitnot"):
            self.advance()
            self.skip_newlines()
            bp = _BP_NOT if tok.text == "not" else _BP_PREFIX
            operand = self.parse_expression(bp + 1)
            return N.Unary(self._span(tok), tok.text, operand, prefix=True)
        return self._parse_primary()

    def _parse_primary(self) -> N.Node:
        tok = self.peek()
        if tok.kind == NUMBER:
            self.advance()
            return N.Literal(self._span(tok), tok.value, "number")
        if tok.kind == TEXT:
            self.advance()
            return N.Literal(self._span(tok), tok.value, "text")
        if tok.kind == REGEX:
            self.advance()
            return N.RegexExpr(self._span(tok), tok.value)
        if tok.kind == TEMPLATE:
            self.advance()
            return self._build_template(tok)
        if tok.kind == PUNCT and tok.text == "(":
            return self._parse_paren_primary(tok)
        if tok.kind == PUNCT and tok.text == "[":
            return self._parse_array_literal(tok)
        if tok.kind == PUNCT and tok.text == "{":
            return self._parse_dict_or_set(tok)
        if tok.kind == OP and tok.text == "#":
            return self._parse_enum_member_ref(tok)
        if tok.kind == WORD:
            w = tok.text
            if w in ("true", "false"):
                self.advance()
                return N.Literal(self._span(tok), w == "true", "bool")
            if w in ("null", "undefined", "void", "paradox"):
                self.advance()
                return N.Literal(self._span(tok), None, w)
            if w in FLOW_WORDS and self._flow_follows(w):
                return self.parse_flow(w)
            if w in ("let", "const", "auto") and self.peek_significant(1).kind == WORD:
                start = self.peek()
                decl = self._parse_shorthand_decl(start, [])
                return N.DeclExpr(decl.span, decl)
            if w == "function":
                func = self._parse_function("function", [], tok)
                return N.FunctionExpr(func.span, func)
            if w == "operator" and self.peek(1).kind == OP and self.peek(1).text == "::":
                self.advance()
                self.advance()
                name_tok = self.peek()
                if name_tok.kind == WORD:
                    name = self.advance().text
                elif name_tok.kind == OP:
                    name = self.advance().text
                else:
                    raise self._err("expected operator name after 'operator::'")
                return N.OperatorRef(self._span(tok), name)
            self.advance()
            return N.Identifier(self._span(tok), w)
        raise self._err(f"unexpected token {tok.text!r}" if tok.kind != EOF else "unexpected end of input")

    def _build_template(self, tok: Token) -> N.TemplateExpr:
        parts: list[tuple[str, object]] = []
        for part_kind, payload in tok.value.parts:
            if part_kind == "text":
                parts.append(("text", payload))
            else:
                sub = Parser(list(payload) + [Token(EOF, "", tok.span)], self.file_id, self.diagnostics)
                sub.bracket_depth = 1
                expr = sub.parse_expression()
                parts.append(("expr", expr))
        return N.TemplateExpr(self._span(tok), tok.value, parts)

    def _parse_paren_primary(self, start: Token) -> N.Node:
        # Could be: parenthesized expression, tuple, or arrow parameters.
        if self._arrow_params_ahead():
            params = self.parse_parameters()
            self.skip_newlines()
            self.expect("->", "'->' after arrow parameters")
            self.skip_newlines()
            if self.at("{"):
                body: N.Node = self.parse_block()
            else:
                body = self.parse_expression(_BP_ARROW - 1)
            return N.ArrowFunction(self._span(start), params, body)
        self.expect("(")
        self.bracket_depth += 1
        try:
            if self.at(")"):
                self.advance()
                return N.TupleExpr(self._span(start), [])
            first = self.parse_expression(_BP_ASSIGN)
            if self.at(","):
                items = [first]
                while self.eat(","):
                    self.skip_newlines()
                    if self.at(")"):
                        break
                    items.append(self.parse_expression(_BP_ASSIGN + 1))
                self.expect(")")
                return N.TupleExpr(self._span(start), items)
            self.expect(")")
            return first
        finally:
            self.bracket_depth -= 1

    def _arrow_params_ahead(self) -> bool:
        # Scan to the matching ')' and check for '->'.
        i = self.pos
        depth = 0
        while True:
            tok = self._tok(i)
            if tok.kind == EOF:
                return False
            if tok.kind == PUNCT and tok.text in "([{":
                depth += 1
            elif tok.kind == PUNCT and tok.text in ")]}":
                depth -= 1
                if depth == 0:
                    break
            i += 1
        i += 1
        while self._tok(i).kind == NEWLINE:
            i += 1
        tok = self._tok(i)
        return tok.kind == OP and tok.text == "->"

    def _parse_array_literal(self, start: Token) -> N.ArrayExpr:
        self.expect("[")
        self.bracket_depth += 1
        items: list[N.Node] = []
        try:
            while not self.at("]"):
                items.append(self.parse_expression(_BP_ASSIGN + 1))
                if not self.eat(","):
                    break
                self.skip_newlines()
            self.expect("]")
        finally:
            self.bracket_depth -= 1
        return N.ArrayExpr(self._span(start), items)

    def _parse_dict_or_set(self, start: Token) -> N.Node:
        self.expect("{")
        self.bracket_depth += 1
        try:
            if self.at("}"):
                self.advance()
                return N.DictExpr(self._span(start), [])
            first = self.parse_expression(_BP_ASSIGN + 1)
            if self.at(":"):
                self.advance()
                self.skip_newlines()
                value = self.parse_expression(_BP_ASSIGN + 1)
                pairs = [(first, value)]
                while self.eat(","):
                    self.skip_newlines()
                    if self.at("}"):
                        break
                    key = self.parse_expression(_BP_ASSIGN + 1)
                    self.expect(":")
                    self.skip_newlines()
                    pairs.append((key, self.parse_expression(_BP_ASSIGN + 1)))
                self.expect("}")
                return N.DictExpr(self._span(start), pairs)
            items = [first]
            while self.eat(","):
                self.skip_newlines()
                if self.at("}"):
                    break
                items.append(self.parse_expression(_BP_ASSIGN + 1))
            self.expect("}")
            return N.SetExpr(self._span(start), items)
        finally:
            self.bracket_depth -= 1

    def _parse_enum_member_ref(self, start: Token) -> N.EnumMemberRef:
        self.advance()  # #
        name = self._expect_name("enum member name")
        args = None
        if self.at("("):
            args = self._parse_call_args()
        return N.EnumMemberRef(self._span(start), name, args)


def parse_module(tokens: list[Token], file_id: str = "<input>", diagnostics: DiagnosticSink | None = None) -> N.Module:
    return Parser(tokens, file_id, diagnostics).parse_module()


def parse_source(source: str, file_id: str = "<input>", diagnostics: DiagnosticSink | None = None) -> N.Module:
    sink = diagnostics if diagnostics is not None else DiagnosticSink()
    toks = tokenize(source, file_id, sink)
    return parse_module(toks, file_id, sink)
