"""AST node definitions produced by the parser.

Statements and expressions share one Node base so that flow-control
structures can appear in expression position (their evaluated value is
the expression's value).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import NumberLiteral, RegexLiteral, SourceSpan, TemplateString, TextLiteral


@dataclass
class Node:
    span: SourceSpan = field(repr=False)

    def node_kind(self) -> str:
        return type(self).__name__


# ---------------------------------------------------------------------------
# Type expressions
# ---------------------------------------------------------------------------


@dataclass
class TypeExpr(Node):
    pass


@dataclass
class TName(TypeExpr):
    name: str
    generic_args: list["GenericArgNode"] | None = None


@dataclass
class TMember(TypeExpr):
    base: TypeExpr
    name: str


@dataclass
class TUnion(TypeExpr):
    items: list[TypeExpr]


@dataclass
class TIntersect(TypeExpr):
    items: list[TypeExpr]


@dataclass
class TAdd(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass
class TSub(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass
class TArray(TypeExpr):
    element: TypeExpr


@dataclass
class TSeq(TypeExpr):
    element: TypeExpr
    length: "GenericArgNode"


@dataclass
class TFunc(TypeExpr):
    params: list["ParameterNode"]
    ret: TypeExpr | None


@dataclass
class TTuple(TypeExpr):
    items: list[TypeExpr]


@dataclass
class TLiteral(TypeExpr):
    value: object  # constant payload: str, int, bool


@dataclass
class TInfer(TypeExpr):
    name: str


@dataclass
class TEnumInline(TypeExpr):
    members: list["EnumMemberNode"]


@dataclass
class GenericArgNode(Node):
    name: str | None  # keyword form <Lines = 25>
    # exactly one of the following is set
    type_expr: TypeExpr | None = None
    const_value: object = None
    is_const: bool = False
    # declaration form used in implement headers: <type KeyType: Equal>
    declares_kind: str | None = None
    declares_name: str | None = None
    declares_bound: TypeExpr | None = None


# ---------------------------------------------------------------------------
# Parameters and signatures (syntax level)
# ---------------------------------------------------------------------------


@dataclass
class ConstraintNode(Node):
    pass


@dataclass
class ModifierCheck(ConstraintNode):
    modifier: str


@dataclass
class TypeCheck(ConstraintNode):
    type_expr: TypeExpr


@dataclass
class BoolCheck(ConstraintNode):
    expr: "Node"


@dataclass
class ReturnsCheck(ConstraintNode):
    type_expr: TypeExpr


@dataclass
class ConstraintJoin(ConstraintNode):
    op: str  # "and" | "or"
    items: list[ConstraintNode]


@dataclass
class ParamConstraint(ConstraintNode):
    """`name: CONSTRAINT` item in a trailing constraint list."""

    param_name: str
    constraint: ConstraintNode


@dataclass
class ParameterNode(Node):
    name: str
    declared_type: TypeExpr | None = None
    constraint: ConstraintNode | None = None
    modifiers: list[str] = field(default_factory=list)
    variadic: bool = False
    optional: bool = False
    default: Node | None = None
    positional_only: bool = False
    keyword_only: bool = False


@dataclass
class GenericParamNode(Node):
    kind: str  # "type" or a value type name such as "usize"
    name: str
    bound: TypeExpr | None = None
    default: Node | TypeExpr | None = None


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass
class Module(Node):
    statements: list[Node]
    file_id: str = "<input>"


@dataclass
class Block(Node):
    statements: list[Node]


@dataclass
class Declaration(Node):
    name: str
    modifiers: list[str]
    declared_type: TypeExpr | None
    init: Node | None
    init_op: str = "="
    shorthand: str | None = None  # let | const | auto
    is_ref: bool = False
    qualified_trait: str | None = None  # static const HasFalsy:$zeros_value


@dataclass
class PropertyDecl(Node):
    name: str
    modifiers: list[str]
    declared_type: TypeExpr | None
    getters: list["FunctionDef"]
    setters: list["FunctionDef"]


@dataclass
class Assignment(Node):
    target: Node
    op: str  # = += -= *= /= %=
    value: Node


@dataclass
class ExpressionStmt(Node):
    expr: Node


@dataclass
class FunctionDef(Node):
    name: str | None
    kind: str  # function | method | constructor | getter | setter | destructor | operator
    modifiers: list[str]
    generic_params: list[GenericParamNode]
    params: list[ParameterNode]
    return_type: TypeExpr | None
    constraints: list[ConstraintNode]
    body: Block | None
    operator_symbol: str | None = None
    operator_right: bool = False


@dataclass
class ClassDef(Node):
    name: str
    modifiers: list[str]
    generic_params: list[GenericParamNode]
    inherits: TypeExpr | None
    implements: list[TypeExpr]
    members: list[Node]
    trailing_instances: list[str] = field(default_factory=list)


@dataclass
class EnumMemberNode(Node):
    name: str
    payload: list[ParameterNode] | None = None


@dataclass
class EnumDef(Node):
    name: str
    modifiers: list[str]
    members: list[EnumMemberNode]


@dataclass
class TraitDef(Node):
    name: str
    modifiers: list[str]
    members: list[Node]


@dataclass
class TypeAliasDef(Node):
    name: str
    modifiers: list[str]
    generic_params: list[GenericParamNode]
    target: TypeExpr | EnumDef


@dataclass
class ImplementBlock(Node):
    target: TypeExpr
    members: list[Node]


@dataclass
class If(Node):
    branches: list[tuple[Node, Block]]
    else_block: Block | None


@dataclass
class MatchArm(Node):
    patterns: list[Node]  # empty for otherwise
    is_otherwise: bool
    body: Node  # expression or Block


@dataclass
class Match(Node):
    subject: Node
    arms: list[MatchArm]


@dataclass
class InIndicator(Node):
    binding_name: str
    binding_kind: str | None  # let | const | auto | None (typed)
    declared_type: TypeExpr | None
    iterable: Node


@dataclass
class CStyleIndicator(Node):
    init: Node | None
    condition: Node | None
    step: Node | None


@dataclass
class ForLoop(Node):
    indicators: list[Node]
    body: Block
    then_block: Block | None
    else_block: Block | None


@dataclass
class WhileLoop(Node):
    condition: Node
    body: Block
    then_block: Block | None
    else_block: Block | None


@dataclass
class DoLoop(Node):
    body: Block
    condition: Node
    then_block: Block | None
    else_block: Block | None


@dataclass
class CatchArm(Node):
    type_expr: TypeExpr
    name: str
    body: Block


@dataclass
class Try(Node):
    body: Block
    catches: list[CatchArm]


@dataclass
class Break(Node):
    indicator: str | None
    eval_expr: Node | None


@dataclass
class Continue(Node):
    indicator: str | None


@dataclass
class Return(Node):
    value: Node | None


@dataclass
class Delete(Node):
    name: str


@dataclass
class Assert(Node):
    expr: Node


@dataclass
class EvalStmt(Node):
    expr: Node


@dataclass
class Import(Node):
    segments: list[str]


@dataclass
class FromImport(Node):
    segments: list[str]
    names: list[tuple[str, str | None]]  # (name, alias)


@dataclass
class ModifierBlock(Node):
    modifiers: list[str]
    statements: list[Node]


@dataclass
class OperatorDef(Node):
    func: FunctionDef


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass
class Literal(Node):
    value: object  # NumberLiteral | TextLiteral | bool | None-markers handled via lit_kind
    lit_kind: str  # number | text | bool | null | undefined | void | paradox


@dataclass
class RegexExpr(Node):
    literal: RegexLiteral


@dataclass
class TemplateExpr(Node):
    template: TemplateString
    parts: list[tuple[str, object]]  # ("text", str) | ("expr", Node)


@dataclass
class Identifier(Node):
    name: str


@dataclass
class Binary(Node):
    op: str
    left: Node
    right: Node


@dataclass
class Unary(Node):
    op: str
    operand: Node
    prefix: bool = True


@dataclass
class Ternary(Node):
    condition: Node
    then_expr: Node
    else_expr: Node


@dataclass
class Argument(Node):
    name: str | None
    value: Node


@dataclass
class Call(Node):
    callee: Node
    args: list[Argument]
    generic_args: list[GenericArgNode] | None = None


@dataclass
class Index(Node):
    obj: Node
    index: Node


@dataclass
class Member(Node):
    obj: Node
    name: str


@dataclass
class ArrowFunction(Node):
    params: list[ParameterNode]
    body: Node  # expression or Block


@dataclass
class WithPartial(Node):
    target: Node
    overrides: list[tuple[str, Node]]


@dataclass
class ObjectLiteral(Node):
    class_expr: Node
    generic_args: list[GenericArgNode] | None
    fields: list[tuple[str, Node]]


@dataclass
class EnumMemberRef(Node):
    name: str
    args: list[Argument] | None = None


@dataclass
class TupleExpr(Node):
    items: list[Node]


@dataclass
class ArrayExpr(Node):
    items: list[Node]


@dataclass
class DictExpr(Node):
    pairs: list[tuple[Node, Node]]


@dataclass
class SetExpr(Node):
    items: list[Node]


@dataclass
class DeclExpr(Node):
    decl: Declaration


@dataclass
class OperatorRef(Node):
    name: str


@dataclass
class FunctionExpr(Node):
    func: FunctionDef


NUMBER_LITERAL = NumberLiteral
TEXT_LITERAL = TextLiteral


def dump(node: Node, indent: int = 0) -> str:
    """Indented tree dump used by the CLI's --dump ast mode."""
    pad = "  " * indent
    span = node.span
    head = f"{pad}{node.node_kind()} @{span.line}:{span.column}"
    lines = [head]
    for name, value in vars(node).items():
        if name == "span":
            continue
        lines.extend(_dump_value(name, value, indent + 1))
    return "\n".join(lines)


def _dump_value(name: str, value: object, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(value, Node):
        return [f"{pad}{name}:", dump(value, indent + 1)]
    if isinstance(value, list) and value and any(isinstance(v, Node) for v in value):
        lines = [f"{pad}{name}:"]
        for v in value:
            if isinstance(v, Node):
                lines.append(dump(v, indent + 1))
            elif isinstance(v, tuple):
                for item in v:
                    if isinstance(item, Node):
                        lines.append(dump(item, indent + 1))
                    else:
                        lines.append(f"{pad}  {item!r}")
            else:
                lines.append(f"{pad}  {v!r}")
        return lines
    if isinstance(value, list) and value and all(isinstance(v, tuple) for v in value):
        lines = [f"{pad}{name}:"]
        for v in value:
            for item in v:
                if isinstance(item, Node):
                    lines.append(dump(item, indent + 1))
                else:
                    lines.append(f"{pad}  {item!r}")
        return lines
    if value in (None, [], ()):  # skip empty fields
        return []
    return [f"{pad}{name}: {value!r}"]
