"""
有限样本空间上的非阿基米德概率模型
每个结局带正权重与非负秩，质量为 w·ε^rank；提供概率、条件概率、快照序列求值与层级分析
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from core.exceptions import EmptyCondition, InvalidPartition, UnboundAtom
from core.lexi import ClosureDepth, NON_TERMINATING, Rank, closure_depth, valuation
from core.nafield import ZERO, EpsPoly, FieldValue, Ordering, ZERO_POLY

logger = logging.getLogger(__name__)


def to_fraction(value: Any) -> Fraction:
    """把 int / "p/q" 字符串 / Fraction 转成 Fraction；分母为零时报 ValueError"""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ZeroDivisionError as e:
            raise ValueError(f"zero denominator in {value!r}") from e
    raise ValueError(f"not a rational: {value!r}")


class SampleSpace(BaseModel):
    """有限样本空间：有序、互不相同的结局标签"""
    model_config = ConfigDict(frozen=True)

    outcomes: Tuple[str, ...]

    @field_validator("outcomes")
    @classmethod
    def validate_outcomes(cls, v):
        if not v:
            raise ValueError("sample space must be nonempty")
        if len(set(v)) != len(v):
            raise ValueError("outcome labels must be unique")
        return v

    def __len__(self) -> int:
        return len(self.outcomes)

    def __contains__(self, label: str) -> bool:
        return label in self.outcomes


@dataclass(frozen=True)
class Event:
    """事件：样本空间结局标签的子集"""
    members: frozenset

    def __or__(self, other: "Event") -> "Event":
        return Event(self.members | other.members)

    def __and__(self, other: "Event") -> "Event":
        return Event(self.members & other.members)

    def __sub__(self, other: "Event") -> "Event":
        return Event(self.members - other.members)

    def __le__(self, other: "Event") -> bool:
        return self.members <= other.members

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    def complement(self, space: SampleSpace) -> "Event":
        return Event(frozenset(space.outcomes) - self.members)

    def isdisjoint(self, other: "Event") -> bool:
        return self.members.isdisjoint(other.members)

    def sorted_labels(self, space: SampleSpace) -> List[str]:
        return [label for label in space.outcomes if label in self.members]


EMPTY = Event(frozenset())


class NapModel(BaseModel):
    """带权重与秩的 NAP 模型

    最小秩不为 0 时整体平移到 0（概率是比值，平移不可见）。
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: SampleSpace
    weight: Dict[str, Fraction]
    rank: Dict[str, int]

    @field_validator("weight", mode="before")
    @classmethod
    def coerce_weights(cls, v):
        return {label: to_fraction(w) for label, w in dict(v).items()}

    @model_validator(mode="before")
    @classmethod
    def normalize_ranks(cls, data):
        if not isinstance(data, dict) or not data.get("rank"):
            return data
        ranks = dict(data["rank"])
        lowest = min(ranks.values())
        if lowest > 0:
            logger.warning(f"No rank-0 outcome; shifting all ranks down by {lowest}")
            data = {**data, "rank": {label: r - lowest for label, r in ranks.items()}}
        return data

    @model_validator(mode="after")
    def validate_coverage(self):
        labels = set(self.space.outcomes)
        if set(self.weight) != labels:
            raise ValueError("weights must be given for exactly the outcomes of the space")
        if set(self.rank) != labels:
            raise ValueError("ranks must be given for exactly the outcomes of the space")
        for label, w in self.weight.items():
            if w <= 0:
                raise ValueError(f"weight of '{label}' must be positive, got {w}")
        for label, r in self.rank.items():
            if r < 0:
                raise ValueError(f"rank of '{label}' must be nonnegative, got {r}")
        return self

    @classmethod
    def from_outcomes(cls, rows: Iterable[Tuple[str, Any, int]]) -> "NapModel":
        """由 (标签, 权重, 秩) 三元组构造"""
        rows = list(rows)
        return cls(
            space=SampleSpace(outcomes=tuple(label for label, _, _ in rows)),
            weight={label: w for label, w, _ in rows},
            rank={label: r for label, _, r in rows},
        )

    @classmethod
    def uniform(cls, labels: Sequence[str]) -> "NapModel":
        return cls.from_outcomes((label, 1, 0) for label in labels)

    @property
    def outcomes(self) -> Tuple[str, ...]:
        return self.space.outcomes

    @property
    def omega(self) -> Event:
        return Event(frozenset(self.space.outcomes))

    @property
    def max_rank(self) -> int:
        return max(self.rank.values())

    def event(self, *labels: str) -> Event:
        """按标签构造事件；未知标签报 UnboundAtom"""
        for label in labels:
            if label not in self.weight:
                raise UnboundAtom(label)
        return Event(frozenset(labels))

    def check_event(self, a: Event) -> Event:
        for label in a.members:
            if label not in self.weight:
                raise UnboundAtom(label)
        return a

    def all_events(self) -> Iterable[Event]:
        """按大小枚举全部 2^|Ω| 个事件"""
        for size in range(len(self.outcomes) + 1):
            for combo in combinations(self.outcomes, size):
                yield Event(frozenset(combo))


@dataclass(frozen=True)
class SnapshotProfile:
    """快照计数方案：秩为 k 的结局在第 n 阶段复制 n^(3^(max_rank−k)) 份"""
    max_rank: int

    def __post_init__(self):
        if self.max_rank < 0:
            raise ValueError("max_rank must be nonnegative")

    def count_of(self, k: int, n: int) -> int:
        if not 0 <= k <= self.max_rank:
            raise ValueError(f"rank {k} outside 0..{self.max_rank}")
        return n ** (3 ** (self.max_rank - k))


def mass_poly(model: NapModel, a: Event) -> EpsPoly:
    """事件质量 Σ w(x)·ε^rank(x)（ε 的多项式）"""
    model.check_event(a)
    total = ZERO_POLY
    for label in a.members:
        total = total + EpsPoly.monomial(model.weight[label], model.rank[label])
    return total


def prob(model: NapModel, a: Event) -> FieldValue:
    """P(A) = mass(A) / mass(Ω)，规范形式"""
    num = mass_poly(model, a)
    if num.is_zero:
        return ZERO
    return FieldValue(num, mass_poly(model, model.omega))


def cond(model: NapModel, a: Event, b: Event) -> FieldValue:
    """P(A|B) = P(A∩B) / P(B)

    Raises:
        EmptyCondition: B 为空
    """
    model.check_event(a)
    if not model.check_event(b):
        raise EmptyCondition("conditioning event is empty")
    num = mass_poly(model, a & b)
    if num.is_zero:
        return ZERO
    return FieldValue(num, mass_poly(model, b))


def cond_standard_part(model: NapModel, a: Event, b: Event) -> Fraction:
    """st(P(A|B))，只比较两个质量多项式的最低项"""
    model.check_event(a)
    if not model.check_event(b):
        raise EmptyCondition("conditioning event is empty")
    num = mass_poly(model, a & b)
    if num.is_zero:
        return Fraction(0)
    den = mass_poly(model, b)
    if num.valuation() > den.valuation():
        return Fraction(0)
    return num.lowest() / den.lowest()


def default_profile(model: NapModel) -> SnapshotProfile:
    return SnapshotProfile(model.max_rank)


def snapshot_cond(model: NapModel, a: Event, b: Event, profile: Optional[SnapshotProfile] = None,
                  n: int = 2) -> Fraction:
    """第 n 阶段快照上的经典条件概率

    每个结局 x 复制 count_of(rank(x), n) 份，每份权重 w(x)。
    """
    if n < 2:
        raise ValueError(f"stage must be at least 2, got {n}")
    model.check_event(a)
    if not model.check_event(b):
        raise EmptyCondition("conditioning event is empty")
    profile = profile or default_profile(model)

    def weighted_count(e: Event) -> Fraction:
        return sum(model.weight[x] * profile.count_of(model.rank[x], n) for x in e.members)

    return Fraction(weighted_count(a & b)) / weighted_count(b)


def partition_sum_check(model: NapModel, a: Event, parts: Sequence[Event]) -> bool:
    """验证 P(A) = Σ P(parts_i)（精确）

    Raises:
        InvalidPartition: parts 不两两不交或并集不是 A
    """
    seen: frozenset = frozenset()
    for part in parts:
        model.check_event(part)
        if not seen.isdisjoint(part.members):
            raise InvalidPartition("parts are not pairwise disjoint")
        seen = seen | part.members
    if seen != a.members:
        raise InvalidPartition("union of parts differs from the partitioned event")
    total = ZERO
    for part in parts:
        total = total + prob(model, part)
    return prob(model, a) == total


def event_rank(model: NapModel, a: Event) -> Rank:
    """事件的秩 = valuation(P(A))；空事件为 Top"""
    return valuation(prob(model, a))


def stratum_profile(model: NapModel, a: Event) -> Tuple[Fraction, ...]:
    """按秩分层的经典值 ⟨r_0, …, r_R⟩：各秩上的权重和除以 Ω 的秩 0 权重和"""
    model.check_event(a)
    base = sum(model.weight[x] for x in model.outcomes if model.rank[x] == 0)
    totals = [Fraction(0)] * (model.max_rank + 1)
    for x in a.members:
        totals[model.rank[x]] += model.weight[x]
    return tuple(t / base for t in totals)


def compare_strata(model: NapModel, a: Event, b: Event) -> Ordering:
    """在分层值序列上做字典序比较；结果与 compare(P(A), P(B)) 一致"""
    pa, pb = stratum_profile(model, a), stratum_profile(model, b)
    if pa == pb:
        return Ordering.EQUAL
    return Ordering.LESS if pa < pb else Ordering.GREATER


@dataclass
class ClosureSpectrum:
    """模型中每个事件概率的闭包深度"""
    depths: List[Tuple[Event, ClosureDepth]]

    @property
    def model_depth(self) -> ClosureDepth:
        """所有事件中的最大闭包深度；任一不终止则不终止"""
        deepest = 0
        for _, depth in self.depths:
            if not depth.is_finite:
                return NON_TERMINATING
            deepest = max(deepest, depth.terms)
        return ClosureDepth(deepest)

    def histogram(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for _, depth in self.depths:
            counts[str(depth)] = counts.get(str(depth), 0) + 1
        return counts


def closure_spectrum(model: NapModel, max_outcomes: int = 12) -> ClosureSpectrum:
    """枚举全部事件求闭包深度，结局数超过 max_outcomes 时拒绝"""
    if len(model.outcomes) > max_outcomes:
        raise ValueError(f"{len(model.outcomes)} outcomes exceed the enumeration limit {max_outcomes}")
    depths = [(a, closure_depth(prob(model, a))) for a in model.all_events()]
    logger.debug(f"Computed closure depths for {len(depths)} events")
    return ClosureSpectrum(depths)
