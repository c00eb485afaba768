"""
Popper 函数与 NAP 模型之间的双向转换
包括标准部分一致性的穷举验证、往返验证，以及按计数方案逐阶段逼近的快照检验
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from core.events import (
    Event,
    NapModel,
    SnapshotProfile,
    cond,
    cond_standard_part,
    default_profile,
    snapshot_cond,
)
from core.nafield import standard_part
from core.popper import (
    DEFAULT_MAX_ATOMS,
    PopperTable,
    bits,
    van_fraassen_ranks,
)

logger = logging.getLogger(__name__)

_ZERO = Fraction(0)


@dataclass
class BridgeReport:
    """验证报告：witnesses 为空当且仅当 max_discrepancy 为 0"""
    pairs_checked: int = 0
    max_discrepancy: Fraction = _ZERO
    witnesses: List[Tuple[List[str], List[str]]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def record(self, a: List[str], b: List[str], expected: Fraction, actual: Fraction) -> None:
        self.pairs_checked += 1
        gap = abs(expected - actual)
        if gap:
            self.witnesses.append((a, b))
            self.max_discrepancy = max(self.max_discrepancy, gap)

    def to_dict(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "max_discrepancy": str(self.max_discrepancy),
            "witnesses": [{"event": a, "given": b} for a, b in self.witnesses],
        }


def event_of(t: PopperTable, mask: int) -> Event:
    return Event(frozenset(t.atoms[i] for i in bits(mask)))


def event_pairs(m: int) -> Iterable[Tuple[int, int]]:
    """全部 (a, b) 掩码对，b 非空"""
    for b in range(1, 1 << m):
        for a in range(1 << m):
            yield a, b


def popper_to_nap(t: PopperTable, check: bool = True, max_atoms: int = DEFAULT_MAX_ATOMS,
                  allow_large: bool = False) -> NapModel:
    """每个正规原子一个结局：weight(b_i) = C(b_i, a_rk(b_i))，rank(b_i) = rk(b_i)

    Raises:
        NotAPopperFunction: 表不满足公理或不正则
    """
    ranks = van_fraassen_ranks(t, check, max_atoms, allow_large)
    rows = []
    for i, label in enumerate(t.atoms):
        k = ranks.atom_ranks[i]
        rows.append((label, t.value(i, ranks.chain[k]), k))
    logger.debug(f"Built NAP model with {len(rows)} outcomes and {ranks.rank + 1} ranks")
    return NapModel.from_outcomes(rows)


def nap_to_popper(model: NapModel) -> PopperTable:
    """C(a, S) = st(P(a | S))；C(·, ∅) = 1 按约定"""
    atoms = model.outcomes

    def value(i: int, s: int) -> Fraction:
        given = Event(frozenset(atoms[j] for j in bits(s)))
        return cond_standard_part(model, Event(frozenset((atoms[i],))), given)

    return PopperTable.from_function(atoms, value)


def verify_agreement(t: PopperTable, check: bool = True, max_atoms: int = DEFAULT_MAX_ATOMS,
                     allow_large: bool = False) -> BridgeReport:
    """对全部事件对验证 st(P(a | b)) = C(a, b)，P 由 popper_to_nap 构造"""
    model = popper_to_nap(t, check, max_atoms, allow_large)
    report = BridgeReport()
    for a, b in event_pairs(t.m):
        actual = standard_part(cond(model, event_of(t, a), event_of(t, b)))
        report.record(t.labels_of(a), t.labels_of(b), t.C(a, b), actual)
    logger.debug(f"Agreement check: {report.pairs_checked} pairs, {len(report.witnesses)} mismatches")
    return report


def verify_round_trip(t: PopperTable, check: bool = True, max_atoms: int = DEFAULT_MAX_ATOMS,
                      allow_large: bool = False) -> BridgeReport:
    """nap_to_popper(popper_to_nap(t)) 与 t 在全部事件对上逐一比较"""
    back = nap_to_popper(popper_to_nap(t, check, max_atoms, allow_large))
    report = BridgeReport()
    for a, b in event_pairs(t.m):
        report.record(t.labels_of(a), t.labels_of(b), t.C(a, b), back.C(a, b))
    return report


def canonical_model(model: NapModel) -> NapModel:
    """同一 Popper 影子下的规范模型：各层权重归一化、秩压缩为连续整数"""
    return popper_to_nap(nap_to_popper(model), check=False)


def shadow_pair() -> Tuple[NapModel, NapModel]:
    """两个不同的 NAP 模型，却有相同的 Popper 影子（相差无穷小）"""
    near = NapModel.from_outcomes([("a", 1, 0), ("b", 1, 1)])
    far = NapModel.from_outcomes([("a", 1, 0), ("b", 1, 2)])
    return near, far


def snapshot_bound(model: NapModel) -> Fraction:
    """K = Σw / min w：任一事件对在阶段 n 的快照偏差不超过 K/n²"""
    weights = list(model.weight.values())
    return sum(weights, _ZERO) / min(weights)


@dataclass(frozen=True)
class SnapshotRow:
    event: Tuple[str, ...]
    given: Tuple[str, ...]
    stage: int
    value: Fraction
    target: Fraction

    @property
    def deviation(self) -> Fraction:
        return abs(self.value - self.target)


@dataclass
class SnapshotStudy:
    """各阶段快照值与标准部分的偏差"""
    rows: List[SnapshotRow]
    bound: Fraction
    stages: Tuple[int, ...]

    def deviations(self, event: Sequence[str], given: Sequence[str]) -> List[Fraction]:
        key = (tuple(event), tuple(given))
        return [r.deviation for r in self.rows if (r.event, r.given) == key]

    def within_bound(self) -> bool:
        return all(r.deviation <= self.bound / (r.stage * r.stage) for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "bound": str(self.bound),
            "stages": list(self.stages),
            "rows": [
                {
                    "event": list(r.event),
                    "given": list(r.given),
                    "stage": r.stage,
                    "value": str(r.value),
                    "standard_part": str(r.target),
                    "deviation": str(r.deviation),
                }
                for r in self.rows
            ],
        }


def _validate_stages(stages: Sequence[int]) -> Tuple[int, ...]:
    stages = tuple(int(n) for n in stages)
    if not stages:
        raise ValueError("at least one stage is required")
    for n in stages:
        if n < 2:
            raise ValueError(f"stage must be at least 2, got {n}")
    return stages


def snapshot_study(model: NapModel, stages: Sequence[int], pairs: Sequence[Tuple[Event, Event]],
                   profile: Optional[SnapshotProfile] = None) -> SnapshotStudy:
    """在给定事件对上逐阶段求快照条件概率"""
    stages = _validate_stages(stages)
    profile = profile or default_profile(model)
    rows = []
    for a, b in pairs:
        target = cond_standard_part(model, a, b)
        event, given = tuple(a.sorted_labels(model.space)), tuple(b.sorted_labels(model.space))
        for n in stages:
            rows.append(SnapshotRow(event, given, n, snapshot_cond(model, a, b, profile, n), target))
    return SnapshotStudy(rows, snapshot_bound(model), stages)


def snapshot_oracle(t: PopperTable, stages: Sequence[int], pairs: Optional[Sequence[Tuple[int, int]]] = None,
                    check: bool = True) -> SnapshotStudy:
    """在 popper_to_nap(t) 的权重与秩上做快照检验

    pairs 为 (事件掩码, 条件掩码)；缺省时取每个原子对每个非空条件。
    """
    model = popper_to_nap(t, check)
    if pairs is None:
        pairs = [(1 << i, s) for s in range(1, t.full + 1) for i in range(t.m)]
    events = [(event_of(t, a), event_of(t, b)) for a, b in pairs]
    return snapshot_study(model, stages, events)
