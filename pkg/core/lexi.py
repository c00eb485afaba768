"""
秩、赋值与字典序分解

把 ℚ(ε) 中的值展开为按秩递增的项 Σ A_k·ε^k：秩单位固定为 ε^k，
近似与余项按逐级剥离最低秩分量的方式定义，字典序比较与域上的序一致。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from itertools import count
from typing import Iterator, List, Optional, Tuple

from core.nafield import ZERO, EpsPoly, FieldValue, Ordering

_ZERO = Fraction(0)


@total_ordering
@dataclass(frozen=True)
class Rank:
    """值的秩：整数 ε-adic 阶，或零所在的最大秩 Top（order 为 None）"""
    order: Optional[int] = None

    @classmethod
    def of(cls, k: int) -> "Rank":
        return cls(k)

    @property
    def is_top(self) -> bool:
        return self.order is None

    def __lt__(self, other: "Rank") -> bool:
        if not isinstance(other, Rank):
            return NotImplemented
        if self.is_top:
            return False
        if other.is_top:
            return True
        return self.order < other.order

    def __add__(self, other: "Rank") -> "Rank":
        if self.is_top or other.is_top:
            return TOP
        return Rank(self.order + other.order)

    def __str__(self) -> str:
        return "Top" if self.is_top else f"Int({self.order})"


TOP = Rank()


@dataclass(frozen=True)
class ClosureDepth:
    """展开终止所需的项数；terms 为 None 表示不终止"""
    terms: Optional[int] = None

    @property
    def is_finite(self) -> bool:
        return self.terms is not None

    def __str__(self) -> str:
        return f"Finite({self.terms})" if self.is_finite else "NonTerminating"


NON_TERMINATING = ClosureDepth()


@dataclass(frozen=True)
class LexSeries:
    """字典序展开

    coefficients[i] 对应秩单位 ε^(valuation+i)；中间可能出现零系数，
    coefficients[0] 非零，除非表示零（valuation 为 Top，系数为空）。
    级数只计非零项，所以 len(coefficients) 可以大于 depth：
    expand(1 + ε^5, 2) 的系数是 (1, 0, 0, 0, 0, 1)。
    """
    valuation: Rank
    coefficients: Tuple[Fraction, ...] = field(default_factory=tuple)
    exact: bool = True

    @property
    def terms(self) -> List[Tuple[int, Fraction]]:
        """非零项列表 [(指数, 系数)]"""
        if self.valuation.is_top:
            return []
        base = self.valuation.order
        return [(base + i, c) for i, c in enumerate(self.coefficients) if c]

    def reconstitute(self) -> FieldValue:
        if self.valuation.is_top:
            return ZERO
        return FieldValue.from_laurent(self.coefficients, self.valuation.order)

    def __str__(self) -> str:
        return render_series(self)


def valuation(a: FieldValue) -> Rank:
    """ε-adic 赋值：val(num) − val(den)，零为 Top"""
    k = a.order()
    return TOP if k is None else Rank(k)


def _unit_parts(a: FieldValue) -> Tuple[int, EpsPoly, EpsPoly]:
    """a = ε^k · N/D，其中 N(0)、D(0) 均非零"""
    vn = a.num.valuation()
    vd = a.den.valuation()
    return vn - vd, a.num.shift(-vn), a.den.shift(-vd)


def _series(a: FieldValue) -> Iterator[Fraction]:
    """从 ε^valuation(a) 起逐项产生 Laurent 系数（低次优先的长除法）"""
    _, n, d = _unit_parts(a)
    d0 = d[0]
    dcs = d.coeffs
    produced: List[Fraction] = []
    for i in count():
        acc = n[i]
        for j in range(1, min(i, len(dcs) - 1) + 1):
            acc -= dcs[j] * produced[i - j]
        c = acc / d0
        produced.append(c)
        yield c


def coefficient_at(a: FieldValue, k: int) -> Fraction:
    """a 在 ε=0 处 Laurent 展开中 ε^k 的系数"""
    if a.is_zero:
        return _ZERO
    v = a.order()
    if k < v:
        return _ZERO
    for i, c in enumerate(_series(a)):
        if i == k - v:
            return c


def _leading(a: FieldValue) -> Tuple[int, Fraction]:
    v = a.order()
    return v, a.num.lowest() / a.den.lowest()


def _stages(a: FieldValue) -> Iterator[Tuple[int, Fraction, FieldValue]]:
    """逐级近似：产生 (秩, 系数, 剥离后的余项)

    每一级取当前余项的最低秩分量 A·ε^k 并减去，余项的秩严格上升。
    """
    rest = a
    while not rest.is_zero:
        k, c = _leading(rest)
        rest = rest - FieldValue.from_laurent((c,), k)
        yield k, c, rest


def remainder(a: FieldValue, depth: int) -> FieldValue:
    """a 减去其前 depth 级近似项之和；remainder(a, 0) = a"""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth == 0:
        return a
    rest = a
    for n, (_, _, rest) in enumerate(_stages(a), start=1):
        if n == depth:
            break
    return rest


def expand(a: FieldValue, depth: int) -> LexSeries:
    """截断到 depth 级的字典序展开；exact 当且仅当 remainder(a, depth) = 0"""
    if depth < 1:
        raise ValueError("depth must be positive")
    if a.is_zero:
        return LexSeries(TOP, (), True)
    base = a.order()
    by_power = {}
    rest = a
    for n, (k, c, rest) in enumerate(_stages(a), start=1):
        by_power[k] = c
        if n == depth:
            break
    top = max(by_power)
    coefficients = tuple(by_power.get(base + i, _ZERO) for i in range(top - base + 1))
    return LexSeries(Rank(base), coefficients, rest.is_zero)


def closure_depth(a: FieldValue) -> ClosureDepth:
    """展开终止所需的最少级数

    终止当且仅当规范形式的分母是 ε 的单项式（即常数乘 ε 幂）。
    """
    if a.is_zero:
        return ClosureDepth(0)
    if sum(1 for c in a.den.coeffs if c) != 1:
        return NON_TERMINATING
    return ClosureDepth(sum(1 for c in a.num.coeffs if c))


def first_divergence(a: FieldValue, b: FieldValue) -> Optional[Tuple[Rank, Fraction, Fraction]]:
    """逐项并行比较两个展开，返回首个不同的秩及两边系数；相等时返回 None"""
    if a == b:
        return None
    streams = []
    for x in (a, b):
        if x.is_zero:
            streams.append((None, None))
        else:
            streams.append((x.order(), _series(x)))
    starts = [v for v, _ in streams if v is not None]
    for k in count(min(starts)):
        pair = []
        for v, gen in streams:
            pair.append(_ZERO if v is None or k < v else next(gen))
        if pair[0] != pair[1]:
            return Rank(k), pair[0], pair[1]


def compare_lex(a: FieldValue, b: FieldValue) -> Ordering:
    """字典序比较：在首个分歧秩上比较两边系数"""
    divergence = first_divergence(a, b)
    if divergence is None:
        return Ordering.EQUAL
    _, ca, cb = divergence
    return Ordering.LESS if ca < cb else Ordering.GREATER


def _render_coefficient_term(magnitude: Fraction, power: int) -> str:
    if power == 0:
        return str(magnitude)
    unit = "e" if power == 1 else f"e^{power}"
    return unit if magnitude == 1 else f"{magnitude}·{unit}"


def render_series(s: LexSeries) -> str:
    """例如 "1/2 + 1/4·e − 1/8·e^2 + O(e^3)"；exact 时不带 O 项"""
    terms = s.terms
    if not terms:
        return "0"
    parts = []
    for power, c in terms:
        body = _render_coefficient_term(abs(c), power)
        if not parts:
            parts.append(f"−{body}" if c < 0 else body)
        else:
            parts.append(f" − {body}" if c < 0 else f" + {body}")
    if not s.exact:
        nxt = terms[-1][0] + 1
        unit = "1" if nxt == 0 else ("e" if nxt == 1 else f"e^{nxt}")
        parts.append(f" + O({unit})")
    return "".join(parts)
