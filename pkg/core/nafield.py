"""
ℚ(ε) 有序非阿基米德域
以单个正无穷小 ε 为变量的有理函数：精确运算、全序比较、标准部分，以及文本格式
"""

from __future__ import annotations

import enum
import math
import threading
from fractions import Fraction
from typing import Iterable, Optional, Tuple, Union

from arpeggio import EOF, NoMatch, ParserPython, PTNodeVisitor, ZeroOrMore, visit_parse_tree
from arpeggio import Optional as Maybe
from arpeggio import RegExMatch as _

from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_inner_gcd

from core.exceptions import DivisionByZero, FieldValueSyntaxError, InfiniteValue

Rational = Fraction
Number = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Ordering(enum.IntEnum):
    """三值比较结果"""
    LESS = -1
    EQUAL = 0
    GREATER = 1

    @classmethod
    def of_sign(cls, s: int) -> "Ordering":
        return cls((s > 0) - (s < 0))


def _frac(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class EpsPoly:
    """ε 的多项式

    系数按升幂存放（下标 i 对应 ε^i），最高次系数非零；零多项式为空元组。
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self._coeffs: Tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def _trimmed(cls, cs: list) -> "EpsPoly":
        while cs and not cs[-1]:
            cs.pop()
        poly = object.__new__(cls)
        poly._coeffs = tuple(cs)
        return poly

    @classmethod
    def monomial(cls, coefficient: Number, power: int) -> "EpsPoly":
        if power < 0:
            raise ValueError("EpsPoly exponents must be nonnegative")
        return cls([_ZERO] * power + [_frac(coefficient)])

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self._coeffs

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    def valuation(self) -> Optional[int]:
        """最低非零项的次数，零多项式返回 None"""
        for i, c in enumerate(self._coeffs):
            if c:
                return i
        return None

    def lowest(self) -> Fraction:
        v = self.valuation()
        return _ZERO if v is None else self._coeffs[v]

    def __getitem__(self, i: int) -> Fraction:
        return self._coeffs[i] if 0 <= i < len(self._coeffs) else _ZERO

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, EpsPoly) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"EpsPoly({[str(c) for c in self._coeffs]})"

    def __neg__(self) -> "EpsPoly":
        return EpsPoly._trimmed([-c for c in self._coeffs])

    def __add__(self, other: "EpsPoly") -> "EpsPoly":
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return EpsPoly._trimmed(out)

    def __sub__(self, other: "EpsPoly") -> "EpsPoly":
        return self + (-other)

    def __mul__(self, other: "EpsPoly") -> "EpsPoly":
        a, b = self._coeffs, other._coeffs
        if not a or not b:
            return ZERO_POLY
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
        return EpsPoly._trimmed(out)

    def scale(self, q: Number) -> "EpsPoly":
        q = _frac(q)
        if not q:
            return ZERO_POLY
        return EpsPoly._trimmed([c * q for c in self._coeffs])

    def shift(self, k: int) -> "EpsPoly":
        """乘以 ε^k；k 为负时要求被除掉的低次项全为零"""
        if self.is_zero or k == 0:
            return self
        if k > 0:
            return EpsPoly._trimmed([_ZERO] * k + list(self._coeffs))
        if any(self._coeffs[:-k]):
            raise ValueError(f"cannot divide {self!r} by e^{-k} exactly")
        return EpsPoly._trimmed(list(self._coeffs[-k:]))


def _integral(polys: Tuple[EpsPoly, ...]) -> list:
    """同乘系数分母的最小公倍数，返回 ZZ 上的降幂系数表（sympy dup 表示）"""
    scale = math.lcm(*(c.denominator for p in polys for c in p.coeffs))
    return [[ZZ(int(c * scale)) for c in reversed(p.coeffs)] for p in polys]


def _from_dup(f: list) -> EpsPoly:
    return EpsPoly._trimmed([Fraction(int(c)) for c in reversed(f)])


ZERO_POLY = EpsPoly()
ONE_POLY = EpsPoly((1,))


def _as_poly(x) -> EpsPoly:
    if isinstance(x, EpsPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return EpsPoly((x,))
    return EpsPoly(x)


def _canonical(num: EpsPoly, den: EpsPoly) -> Tuple[EpsPoly, EpsPoly]:
    if den.is_zero:
        raise DivisionByZero("denominator is the zero polynomial")
    if num.is_zero:
        return ZERO_POLY, ONE_POLY
    if num.degree > 0 and den.degree > 0:
        # 余因子 f/h、g/h 与 num/den 只差同一个常数因子，下面按 den 最低项归一
        _, cff, cfg = dup_inner_gcd(*_integral((num, den)), ZZ)
        num, den = _from_dup(cff), _from_dup(cfg)
    lowest = den.lowest()
    if lowest != 1:
        num = num.scale(1 / lowest)
        den = den.scale(1 / lowest)
    return num, den


class FieldValue:
    """ℚ(ε) 中的元素，始终保持规范形式

    规范形式：num 与 den 互素，den 的最低非零系数为 1，零表示为 0/1。
    因此结构相等即语义相等，可直接用于哈希。
    """

    __slots__ = ("_num", "_den")

    def __init__(self, num=0, den=1):
        self._num, self._den = _canonical(_as_poly(num), _as_poly(den))

    @classmethod
    def _make(cls, num: EpsPoly, den: EpsPoly) -> "FieldValue":
        value = object.__new__(cls)
        value._num = num
        value._den = den
        return value

    @classmethod
    def eps_power(cls, k: int) -> "FieldValue":
        """ε^k，k 可以为负"""
        if k >= 0:
            return cls._make(EpsPoly.monomial(1, k), ONE_POLY)
        return cls._make(ONE_POLY, EpsPoly.monomial(1, -k))

    @classmethod
    def from_laurent(cls, coefficients: Iterable[Number], start: int) -> "FieldValue":
        """Σ coefficients[i]·ε^(start+i)"""
        poly = EpsPoly(coefficients)
        if start >= 0:
            return cls._make(poly.shift(start), ONE_POLY) if not poly.is_zero else ZERO
        return cls(poly, EpsPoly.monomial(1, -start))

    @property
    def num(self) -> EpsPoly:
        return self._num

    @property
    def den(self) -> EpsPoly:
        return self._den

    @property
    def is_zero(self) -> bool:
        return self._num.is_zero

    def order(self) -> Optional[int]:
        """ε-adic 阶：val(num) − val(den)；零返回 None"""
        if self._num.is_zero:
            return None
        return self._num.valuation() - self._den.valuation()

    def sign(self) -> int:
        # den 的最低非零系数恒为 1，符号由 num 的最低项决定
        low = self._num.lowest()
        return (low > 0) - (low < 0)

    def is_rational(self) -> bool:
        return self._den == ONE_POLY and self._num.degree <= 0

    # -- 运算 ------------------------------------------------------------

    def __neg__(self) -> "FieldValue":
        return FieldValue._make(-self._num, self._den)

    def __pos__(self) -> "FieldValue":
        return self

    def __abs__(self) -> "FieldValue":
        return -self if self.sign() < 0 else self

    def __add__(self, other) -> "FieldValue":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self._den == other._den:
            return FieldValue(self._num + other._num, self._den)
        return FieldValue(
            self._num * other._den + other._num * self._den,
            self._den * other._den,
        )

    __radd__ = __add__

    def __sub__(self, other) -> "FieldValue":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "FieldValue":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "FieldValue":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return ZERO
        return FieldValue(self._num * other._num, self._den * other._den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "FieldValue":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZero(f"division of {self} by zero")
        if self.is_zero:
            return ZERO
        return FieldValue(self._num * other._den, self._den * other._num)

    def __rtruediv__(self, other) -> "FieldValue":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def inverse(self) -> "FieldValue":
        return ONE / self

    def __pow__(self, k: int) -> "FieldValue":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- 比较 ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self._num[0])
        return hash((self._num, self._den))

    def __lt__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) is Ordering.LESS

    def __le__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) is not Ordering.GREATER

    def __gt__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) is Ordering.GREATER

    def __ge__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) is not Ordering.LESS

    def __bool__(self) -> bool:
        return not self.is_zero

    def __repr__(self) -> str:
        return f"FieldValue('{render_value(self)}')"

    def __str__(self) -> str:
        return render_value(self)


def _coerce(x):
    if isinstance(x, FieldValue):
        return x
    if isinstance(x, (int, Fraction)):
        return FieldValue._make(EpsPoly((x,)), ONE_POLY)
    return NotImplemented


ZERO = FieldValue()
ONE = FieldValue(1)
EPS = FieldValue.eps_power(1)


# -- 规格中的运算 --------------------------------------------------------

def add(a: FieldValue, b: FieldValue) -> FieldValue:
    return a + b


def sub(a: FieldValue, b: FieldValue) -> FieldValue:
    return a - b


def mul(a: FieldValue, b: FieldValue) -> FieldValue:
    return a * b


def div(a: FieldValue, b: FieldValue) -> FieldValue:
    """精确除法

    Raises:
        DivisionByZero: b 为零
    """
    return a / b


def compare(a: FieldValue, b: FieldValue) -> Ordering:
    """全序比较：a−b 的符号即其分子最低非零系数的符号"""
    if a == b:
        return Ordering.EQUAL
    return Ordering.of_sign((a - b).sign())


def sign(a: FieldValue) -> int:
    return a.sign()


def is_infinitesimal(a: FieldValue) -> bool:
    return not a.is_zero and a.order() > 0


def is_finite(a: FieldValue) -> bool:
    return a.is_zero or a.order() >= 0


def standard_part(a: FieldValue) -> Fraction:
    """与 a 无限接近的唯一有理数

    Raises:
        InfiniteValue: a 的 ε-adic 阶为负
    """
    if a.is_zero:
        return _ZERO
    k = a.order()
    if k < 0:
        raise InfiniteValue(f"{a} is infinite (order {k}); it has no standard part")
    if k > 0:
        return _ZERO
    return a.num.lowest() / a.den.lowest()


# -- 文本格式 ------------------------------------------------------------

def _render_term(magnitude: Fraction, power: int) -> str:
    if power == 0:
        return str(magnitude)
    unit = "e" if power == 1 else f"e^{power}"
    if magnitude == 1:
        return unit
    if magnitude.denominator == 1:
        return f"{magnitude}{unit}"
    return f"{magnitude}*{unit}"


def render_poly(p: EpsPoly) -> str:
    if p.is_zero:
        return "0"
    parts = []
    for power, c in enumerate(p.coeffs):
        if not c:
            continue
        body = _render_term(abs(c), power)
        if not parts:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(parts)


def _count_terms(p: EpsPoly) -> int:
    return sum(1 for c in p.coeffs if c)


def render_value(a: FieldValue) -> str:
    """渲染为 "e" 的多项式语法，例如 "(1 + 2e)/(1 + 1/2*e^2)"；可被 parse_value 还原"""
    num = render_poly(a.num)
    if a.den == ONE_POLY:
        return num
    den = render_poly(a.den)
    if _count_terms(a.num) > 1:
        num = f"({num})"
    if _count_terms(a.den) > 1:
        den = f"({den})"
    return f"{num}/{den}"


# 文法：加减 < 乘除 < 一元符号 < 幂；"2e^3" 这样的系数并置绑定最紧
def fv_number():      return _(r"\d+")
def fv_eps():         return _(r"[eε](?![A-Za-z0-9_])")
def fv_exponent():    return _(r"\^\s*-?\d+")
def fv_addop():       return _(r"[+\-−]")
def fv_mulop():       return _(r"[*/·]")
def fv_sign():        return _(r"[+\-−]")
def fv_eps_power():   return fv_eps, Maybe(fv_exponent)
def fv_scaled():      return fv_number, fv_eps_power
def fv_group():       return "(", fv_sum, ")"
def fv_atom():        return [fv_scaled, fv_number, fv_eps_power, fv_group]
def fv_power():       return fv_atom, Maybe(fv_exponent)
def fv_unary():       return ZeroOrMore(fv_sign), fv_power
def fv_product():     return fv_unary, ZeroOrMore(fv_mulop, fv_unary)
def fv_sum():         return fv_product, ZeroOrMore(fv_addop, fv_product)
def fv_value():       return fv_sum, EOF


def _values(children) -> list:
    return [c for c in children if isinstance(c, FieldValue)]


class _FieldValueVisitor(PTNodeVisitor):
    def visit_fv_number(self, node, children):
        return FieldValue(int(node.value))

    def visit_fv_eps(self, node, children):
        return EPS

    def visit_fv_exponent(self, node, children):
        return int(node.value.lstrip("^").strip())

    def visit_fv_addop(self, node, children):
        return "-" if node.value in ("-", "−") else "+"

    visit_fv_sign = visit_fv_addop

    def visit_fv_mulop(self, node, children):
        return "/" if node.value == "/" else "*"

    def _raise(self, node, children):
        base = _values(children)[0]
        exponents = [c for c in children if isinstance(c, int) and not isinstance(c, bool)]
        for k in exponents:
            base = base ** k
        return base

    visit_fv_eps_power = _raise
    visit_fv_power = _raise

    def visit_fv_scaled(self, node, children):
        coefficient, unit = _values(children)
        return coefficient * unit

    def visit_fv_group(self, node, children):
        return _values(children)[0]

    visit_fv_atom = visit_fv_group

    def visit_fv_unary(self, node, children):
        negate = sum(1 for c in children if c == "-") % 2 == 1
        value = _values(children)[0]
        return -value if negate else value

    def _fold(self, node, children):
        items = [c for c in children if isinstance(c, (FieldValue, str))]
        acc = items[0]
        for op, operand in zip(items[1::2], items[2::2]):
            if op == "+":
                acc = acc + operand
            elif op == "-":
                acc = acc - operand
            elif op == "*":
                acc = acc * operand
            else:
                acc = acc / operand
        return acc

    visit_fv_product = _fold
    visit_fv_sum = _fold

    def visit_fv_value(self, node, children):
        return _values(children)[0]


_PARSER = None
_PARSER_LOCK = threading.Lock()


def _get_parser() -> ParserPython:
    global _PARSER
    with _PARSER_LOCK:
        if _PARSER is None:
            _PARSER = ParserPython(fv_value)
    return _PARSER


def parse_value(text: str) -> FieldValue:
    """解析域元素文本，例如 "(1 + 2e)/(2 + e^2)"、"1/2"、"e^-1"

    Raises:
        FieldValueSyntaxError: 文本不符合文法
        DivisionByZero: 文本中出现除以零
    """
    parser = _get_parser()
    try:
        with _PARSER_LOCK:
            tree = parser.parse(text)
    except NoMatch as e:
        raise FieldValueSyntaxError(f"Cannot parse field value {text!r} at position {e.position}", e.position) from e
    return visit_parse_tree(tree, _FieldValueVisitor())
