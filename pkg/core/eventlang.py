"""
事件表达式语言
解析、渲染与求值命题事件表达式；原子即正规原子（或模型中的结局/具名事件）
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, FrozenSet, Mapping, Sequence

from arpeggio import EOF, NoMatch, ParserPython, PTNodeVisitor, ZeroOrMore, visit_parse_tree
from arpeggio import Optional as Maybe
from arpeggio import RegExMatch as _

from core.exceptions import EventSyntaxError, UnboundAtom


class EventExpr:
    """事件表达式语法树基类"""

    precedence = 100

    def render(self) -> str:
        return render(self)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(EventExpr):
    label: str


@dataclass(frozen=True)
class Top(EventExpr):
    pass


@dataclass(frozen=True)
class Bottom(EventExpr):
    pass


@dataclass(frozen=True)
class Not(EventExpr):
    operand: EventExpr
    precedence = 50


@dataclass(frozen=True)
class And(EventExpr):
    left: EventExpr
    right: EventExpr
    precedence = 40
    symbol = "&"


@dataclass(frozen=True)
class Or(EventExpr):
    left: EventExpr
    right: EventExpr
    precedence = 30
    symbol = "|"


@dataclass(frozen=True)
class Implies(EventExpr):
    left: EventExpr
    right: EventExpr
    precedence = 20
    symbol = "->"


@dataclass(frozen=True)
class Iff(EventExpr):
    left: EventExpr
    right: EventExpr
    precedence = 10
    symbol = "<->"


TOP = Top()
BOTTOM = Bottom()

_BINARY = (And, Or, Implies, Iff)


# -- 文法 ----------------------------------------------------------------
# 优先级 ! > & > | > -> > <->；-> 右结合，其余左结合

def ev_constant():    return _(r"[TF](?![A-Za-z0-9_])")
def ev_atom():        return _(r"[A-Za-z_][A-Za-z0-9_]*")
def ev_group():       return "(", ev_iff, ")"
def ev_primary():     return [ev_constant, ev_atom, ev_group]
def ev_negated():     return "!", ev_negation
def ev_negation():    return [ev_negated, ev_primary]
def ev_conjunction(): return ev_negation, ZeroOrMore("&", ev_negation)
def ev_disjunction(): return ev_conjunction, ZeroOrMore("|", ev_conjunction)
def ev_implication(): return ev_disjunction, Maybe("->", ev_implication)
def ev_iff():         return ev_implication, ZeroOrMore("<->", ev_implication)
def ev_event():       return ev_iff, EOF


_TOKEN_NAMES = {
    "ev_constant": "T/F",
    "ev_atom": "identifier",
    "EOF": "end of input",
}


def _exprs(children) -> list:
    return [c for c in children if isinstance(c, EventExpr)]


def _fold_left(cls) -> Callable:
    def visit(self, node, children):
        operands = _exprs(children)
        acc = operands[0]
        for operand in operands[1:]:
            acc = cls(acc, operand)
        return acc
    return visit


class _EventVisitor(PTNodeVisitor):
    def visit_ev_constant(self, node, children):
        return TOP if node.value == "T" else BOTTOM

    def visit_ev_atom(self, node, children):
        return Atom(node.value)

    def visit_ev_group(self, node, children):
        return _exprs(children)[0]

    visit_ev_primary = visit_ev_group
    visit_ev_negation = visit_ev_group
    visit_ev_event = visit_ev_group

    def visit_ev_negated(self, node, children):
        return Not(_exprs(children)[0])

    visit_ev_conjunction = _fold_left(And)
    visit_ev_disjunction = _fold_left(Or)
    visit_ev_iff = _fold_left(Iff)

    def visit_ev_implication(self, node, children):
        operands = _exprs(children)
        if len(operands) == 1:
            return operands[0]
        return Implies(operands[0], operands[1])


_PARSER = None
_PARSER_LOCK = threading.Lock()


def _get_parser() -> ParserPython:
    global _PARSER
    with _PARSER_LOCK:
        if _PARSER is None:
            _PARSER = ParserPython(ev_event)
    return _PARSER


def _expected_tokens(error: NoMatch) -> list:
    tokens = []
    for rule in getattr(error, "rules", None) or ():
        name = getattr(rule, "rule_name", "") or ""
        if name in _TOKEN_NAMES:
            tokens.append(_TOKEN_NAMES[name])
        else:
            tokens.append(str(getattr(rule, "to_match", name) or name))
    return tokens


def parse(text: str) -> EventExpr:
    """解析事件表达式

    Args:
        text: 例如 "a & !b | c"、"a -> b -> c"

    Returns:
        语法树

    Raises:
        EventSyntaxError: 带出错位置与期望记号集合
    """
    parser = _get_parser()
    try:
        with _PARSER_LOCK:
            tree = parser.parse(text)
    except NoMatch as e:
        raise EventSyntaxError(f"Invalid event expression {text!r}", e.position, _expected_tokens(e)) from e
    return visit_parse_tree(tree, _EventVisitor())


def render(e: EventExpr) -> str:
    """按最少括号渲染；parse(render(e)) == e"""
    if isinstance(e, Atom):
        return e.label
    if isinstance(e, Top):
        return "T"
    if isinstance(e, Bottom):
        return "F"
    if isinstance(e, Not):
        inner = render(e.operand)
        if isinstance(e.operand, _BINARY):
            inner = f"({inner})"
        return f"!{inner}"
    left, right = render(e.left), render(e.right)
    right_assoc = isinstance(e, Implies)
    if e.left.precedence < e.precedence or (right_assoc and e.left.precedence == e.precedence):
        left = f"({left})"
    if e.right.precedence < e.precedence or (not right_assoc and e.right.precedence == e.precedence):
        right = f"({right})"
    return f"{left} {e.symbol} {right}"


def fold(e: EventExpr, lookup: Callable[[str], int], universe: int) -> int:
    """在以位掩码表示的集合代数中求值"""
    if isinstance(e, Atom):
        return lookup(e.label)
    if isinstance(e, Top):
        return universe
    if isinstance(e, Bottom):
        return 0
    if isinstance(e, Not):
        return universe & ~fold(e.operand, lookup, universe)
    left = fold(e.left, lookup, universe)
    right = fold(e.right, lookup, universe)
    if isinstance(e, And):
        return left & right
    if isinstance(e, Or):
        return left | right
    if isinstance(e, Implies):
        return (universe & ~left) | right
    return universe & ~(left ^ right)


def evaluate(e: EventExpr, binding: Mapping, space) -> "Event":
    """集合语义求值：NOT 为补集，AND 为交，OR 为并，T 为 Ω，F 为空集

    Args:
        e: 语法树
        binding: 标签到 Event 的映射
        space: 样本空间

    Raises:
        UnboundAtom: 存在未绑定的标签
    """
    from core.events import Event

    outcomes = list(space.outcomes)
    index = {label: i for i, label in enumerate(outcomes)}
    universe = (1 << len(outcomes)) - 1

    def lookup(label: str) -> int:
        if label not in binding:
            raise UnboundAtom(label)
        mask = 0
        for member in binding[label].members:
            if member not in index:
                raise UnboundAtom(member)
            mask |= 1 << index[member]
        return mask

    mask = fold(e, lookup, universe)
    return Event(frozenset(outcomes[i] for i in range(len(outcomes)) if mask >> i & 1))


def mask_of(e: EventExpr, atoms: Sequence[str], named: Mapping[str, int] = None) -> int:
    """以正规原子为字母表求值，返回原子下标的位掩码

    named 提供额外的具名事件（已求好的掩码）。
    """
    index = {label: i for i, label in enumerate(atoms)}
    named = named or {}

    def lookup(label: str) -> int:
        if label in named:
            return named[label]
        if label not in index:
            raise UnboundAtom(label)
        return 1 << index[label]

    return fold(e, lookup, (1 << len(atoms)) - 1)


def normal_form(e: EventExpr, atoms: Sequence[str]) -> FrozenSet[int]:
    """与 e 等价的正规原子集合（下标从 0 开始）

    原子两两互斥且穷尽，所以命题结构直接按成员关系求值。
    """
    mask = mask_of(e, atoms)
    return frozenset(i for i in range(len(atoms)) if mask >> i & 1)


def resolve_named(definitions: Mapping[str, str], atoms: Sequence[str]) -> dict:
    """按声明顺序求值具名事件，后面的定义可以引用前面的"""
    named: dict = {}
    for name, text in definitions.items():
        named[name] = mask_of(parse(text), atoms, named)
    return named


def parse_mask(text: str, atoms: Sequence[str], named: Mapping[str, int] = None) -> int:
    return mask_of(parse(text), atoms, named)
