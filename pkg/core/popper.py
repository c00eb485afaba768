"""
Popper 条件概率表
在有限布尔代数上以 (正规原子, 条件事件) 为键存储 C 的值，复合第一参数按可加性求和得到；
提供公理检查器、分层测度构造以及 van Fraassen 秩链
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from core.events import to_fraction
from core.exceptions import ExhaustiveLimitExceeded, NotAPopperFunction, UnboundAtom

logger = logging.getLogger(__name__)

_ZERO = Fraction(0)
_ONE = Fraction(1)

DEFAULT_MAX_ATOMS = 10


def bits(mask: int) -> Iterable[int]:
    """掩码中置位的下标（升序）"""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass(frozen=True, eq=False)
class PopperTable:
    """Popper 函数表

    values[(i, S)] = C(b_i, S)，S 为原子下标的非空位掩码；缺省项按 0 补齐。
    declared 保存稠密输入中显式给出的复合第一参数项 (事件掩码, 条件掩码)，
    只供检查器对照，不参与求值。
    """
    atoms: Tuple[str, ...]
    values: Dict[Tuple[int, int], Fraction]
    declared: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a Popper table needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atom labels must be unique")
        full = (1 << len(self.atoms)) - 1
        complete: Dict[Tuple[int, int], Fraction] = {}
        for (i, s), v in self.values.items():
            if not 0 <= i < len(self.atoms) or not 0 < s <= full:
                raise ValueError(f"entry ({i}, {s}) outside the table")
            complete[(i, s)] = Fraction(v)
        for s in range(1, full + 1):
            for i in range(len(self.atoms)):
                complete.setdefault((i, s), _ZERO)
        object.__setattr__(self, "values", complete)

    @classmethod
    def from_function(cls, atoms: Sequence[str], fn: Callable[[int, int], Any]) -> "PopperTable":
        """对每个原子 i 与非空条件 S 调用 fn(i, S) 生成表"""
        full = (1 << len(atoms)) - 1
        values = {(i, s): Fraction(fn(i, s)) for s in range(1, full + 1) for i in range(len(atoms))}
        return cls(tuple(atoms), values)

    @property
    def m(self) -> int:
        return len(self.atoms)

    @property
    def full(self) -> int:
        return (1 << len(self.atoms)) - 1

    def value(self, i: int, s: int) -> Fraction:
        if s == 0:
            return _ONE
        return self.values[(i, s)]

    def C(self, a: int, s: int) -> Fraction:
        """C(a, S)；C(·, ∅) 恒为 1"""
        if s == 0:
            return _ONE
        return sum((self.values[(i, s)] for i in bits(a)), _ZERO)

    def mask_of(self, labels: Iterable[str]) -> int:
        index = {label: i for i, label in enumerate(self.atoms)}
        mask = 0
        for label in labels:
            if label not in index:
                raise UnboundAtom(label)
            mask |= 1 << index[label]
        return mask

    def labels_of(self, mask: int) -> List[str]:
        return [self.atoms[i] for i in bits(mask)]

    def column(self, s: int) -> Tuple[Fraction, ...]:
        return tuple(self.value(i, s) for i in range(self.m))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PopperTable):
            return NotImplemented
        return self.atoms == other.atoms and self.values == other.values

    __hash__ = None


@dataclass
class AxiomCheck:
    """单条公理的检查结果"""
    name: str
    status: str  # "pass", "fail"
    message: str
    witness: Optional[Tuple[int, ...]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class AxiomReport:
    """公理检查报告：axiom1..axiom4 以及正则性"""
    atoms: Tuple[str, ...]
    checks: List[AxiomCheck]

    def get(self, name: str) -> AxiomCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        """四条公理全部通过（正则性单独报告）"""
        return all(c.passed for c in self.checks if c.name.startswith("axiom"))

    @property
    def regular(self) -> bool:
        return self.get("regularity").passed

    @property
    def failures(self) -> List[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def witness_labels(self, check: AxiomCheck) -> List[List[str]]:
        if check.witness is None:
            return []
        return [[self.atoms[i] for i in bits(mask)] for mask in check.witness]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "atoms": list(self.atoms),
            "passed": self.passed,
            "regular": self.regular,
            "checks": [
                {
                    "name": c.name,
                    "status": c.status,
                    "message": c.message,
                    "witness": self.witness_labels(c),
                    "details": c.details,
                }
                for c in self.checks
            ],
        }


def _ensure_within_limit(t: PopperTable, max_atoms: int, allow_large: bool) -> None:
    if t.m > max_atoms and not allow_large:
        raise ExhaustiveLimitExceeded(
            f"{t.m} atoms exceed the exhaustive-check limit of {max_atoms}; "
            f"pass allow_large to override"
        )


def _subset_sums(t: PopperTable, d: int) -> List[Fraction]:
    """sums[a] = C(a, d)，对全部 2^m 个 a"""
    sums = [_ZERO] * (t.full + 1)
    for a in range(1, t.full + 1):
        low = a & -a
        sums[a] = sums[a ^ low] + t.values[(low.bit_length() - 1, d)]
    return sums


def _pass(name: str, message: str, **details) -> AxiomCheck:
    return AxiomCheck(name, "pass", message, None, details)


def _fail(name: str, message: str, witness: Tuple[int, ...], **details) -> AxiomCheck:
    return AxiomCheck(name, "fail", message, witness, details)


def check_axioms(t: PopperTable, max_atoms: int = DEFAULT_MAX_ATOMS, allow_large: bool = False) -> AxiomReport:
    """穷举检查公理 1–4 与正则性

    公理 3 与 4 利用可加性化归到单原子：复杂度 O(m·4^m)。

    Args:
        t: Popper 表
        max_atoms: 原子数上限
        allow_large: 为 True 时忽略上限

    Raises:
        ExhaustiveLimitExceeded: 原子数超过上限
    """
    _ensure_within_limit(t, max_atoms, allow_large)
    full = t.full
    m = t.m
    sums_by_condition: Dict[int, List[Fraction]] = {d: _subset_sums(t, d) for d in range(1, full + 1)}

    def C(a: int, d: int) -> Fraction:
        return _ONE if d == 0 else sums_by_condition[d][a]

    # 公理 1：C(a, a) = 1
    axiom1 = _pass("axiom1", "C(a, a) = 1 for every event a")
    for a in range(1, full + 1):
        if C(a, a) != 1:
            axiom1 = _fail("axiom1", f"C(a, a) = {C(a, a)} instead of 1", (a, a), value=str(C(a, a)))
            break

    # 公理 2：除非 C(¬a, a) = 1，C(·, a) 是概率函数
    axiom2 = None
    for s in range(1, full + 1):
        column = t.column(s)
        out_of_range = [i for i, v in enumerate(column) if not 0 <= v <= 1]
        if out_of_range:
            v = column[out_of_range[0]]
            axiom2 = _fail("axiom2", f"C(b, S) = {v} lies outside [0, 1]", (1 << out_of_range[0], s), value=str(v))
            break
        if C(full ^ s, s) == 1:
            continue
        total = sum(column, _ZERO)
        if total != 1:
            axiom2 = _fail("axiom2", f"C(·, S) sums to {total} instead of 1", (full, s), total=str(total))
            break
    if axiom2 is None:
        for (a, s), declared in sorted(t.declared.items()):
            derived = C(a, s)
            if derived != declared:
                axiom2 = _fail(
                    "axiom2",
                    f"declared C(a, S) = {declared} but the atoms sum to {derived}",
                    (a, s), declared=str(declared), derived=str(derived),
                )
                break
    axiom2 = axiom2 or _pass("axiom2", "C(·, a) is a probability function for every normal a")

    # 公理 3：C(a∧b, d) = C(a, d)·C(b, a∧d)，对 b 可加，只需单原子 b
    axiom3 = None
    for d in range(1, full + 1):
        sums = sums_by_condition[d]
        leaking = [i for i in bits(full ^ d) if t.values[(i, d)] != 0]
        if leaking:
            axiom3 = _fail("axiom3", "C(b, d) must vanish for b disjoint from d", (1 << leaking[0], 0, d))
            break
        for a in range(1, full + 1):
            e = a & d
            if e == 0:
                continue
            c = sums[a]
            for j in range(m):
                left = t.values[(j, d)] if a >> j & 1 else _ZERO
                right = c * t.values[(j, e)]
                if left != right:
                    axiom3 = _fail(
                        "axiom3",
                        f"C(a∧b, d) = {left} but C(a, d)·C(b, a∧d) = {right}",
                        (a, 1 << j, d), left=str(left), right=str(right),
                    )
                    break
            if axiom3:
                break
        if axiom3:
            break
    axiom3 = axiom3 or _pass("axiom3", "C(a∧b, d) = C(a, d)·C(b, a∧d) on all triples")

    # 公理 4：C(a, b) = C(b, a) = 1 时 C(·, a) = C(·, b)
    certain = {b: {a for a in range(1, full + 1) if sums_by_condition[b][a] == 1} for b in range(1, full + 1)}
    axiom4 = None
    for b in range(1, full + 1):
        for a in certain[b]:
            if a < b and b in certain[a] and t.column(a) != t.column(b):
                axiom4 = _fail("axiom4", "mutually certain events give different conditionals", (a, b))
                break
        if axiom4:
            break
    axiom4 = axiom4 or _pass("axiom4", "mutually certain events give equal conditionals")

    # 正则性：只有矛盾事件 x 满足 C(¬x, x) = 1
    regularity = _pass("regularity", "only the contradiction makes C(·, x) constantly 1")
    for x in range(1, full + 1):
        if C(full ^ x, x) == 1:
            regularity = _fail("regularity", "non-contradiction x with C(¬x, x) = 1", (x,))
            break

    logger.debug(f"Checked Popper axioms over {full + 1} events for {m} atoms")
    return AxiomReport(t.atoms, [axiom1, axiom2, axiom3, axiom4, regularity])


class StratifiedMeasure(BaseModel):
    """按秩分层的测度：第 k 层是秩 k 原子上的正权重，和为 1；各层支撑不交且覆盖全部原子"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    atoms: Tuple[str, ...]
    strata: Tuple[Dict[int, Fraction], ...]

    @field_validator("strata", mode="before")
    @classmethod
    def coerce_strata(cls, v):
        return tuple({int(i): to_fraction(w) for i, w in dict(stratum).items()} for stratum in v)

    @model_validator(mode="after")
    def validate_strata(self):
        if not self.strata:
            raise ValueError("at least one stratum is required")
        seen = set()
        for k, stratum in enumerate(self.strata):
            if not stratum:
                raise ValueError(f"stratum {k} is empty")
            for i, w in stratum.items():
                if not 0 <= i < len(self.atoms):
                    raise ValueError(f"stratum {k} refers to atom index {i} outside the table")
                if i in seen:
                    raise ValueError(f"atom '{self.atoms[i]}' appears in more than one stratum")
                if w <= 0:
                    raise ValueError(f"weight of '{self.atoms[i]}' in stratum {k} must be positive")
                seen.add(i)
            total = sum(stratum.values(), _ZERO)
            if total != 1:
                raise ValueError(f"stratum {k} sums to {total} instead of 1")
        if len(seen) != len(self.atoms):
            missing = [self.atoms[i] for i in range(len(self.atoms)) if i not in seen]
            raise ValueError(f"atoms without a stratum: {', '.join(missing)}")
        return self

    @classmethod
    def from_labels(cls, atoms: Sequence[str], strata: Sequence[Mapping[str, Any]]) -> "StratifiedMeasure":
        """以标签给出各层：[{atom: weight}, ...]，下标即秩"""
        index = {label: i for i, label in enumerate(atoms)}
        converted = []
        for stratum in strata:
            layer = {}
            for label, w in stratum.items():
                if label not in index:
                    raise UnboundAtom(label)
                layer[index[label]] = w
            converted.append(layer)
        return cls(atoms=tuple(atoms), strata=tuple(converted))

    @property
    def max_rank(self) -> int:
        return len(self.strata) - 1

    def rank_of(self) -> Dict[int, int]:
        return {i: k for k, stratum in enumerate(self.strata) for i in stratum}

    def labelled(self) -> List[Dict[str, Fraction]]:
        return [{self.atoms[i]: w for i, w in sorted(stratum.items())} for stratum in self.strata]


def from_stratified(s: StratifiedMeasure) -> PopperTable:
    """C(a, S) = μ_d(a∩S) / μ_d(S)，d 为与 S 相交的最小秩"""
    rank_of = s.rank_of()
    m = len(s.atoms)
    values: Dict[Tuple[int, int], Fraction] = {}
    for mask in range(1, 1 << m):
        members = list(bits(mask))
        d = min(rank_of[i] for i in members)
        stratum = s.strata[d]
        mass = sum((stratum[i] for i in members if i in stratum), _ZERO)
        for i in members:
            if i in stratum:
                values[(i, mask)] = stratum[i] / mass
    return PopperTable(s.atoms, values)


@dataclass(frozen=True)
class RankChain:
    """van Fraassen 秩链

    chain[k] 为 a_k 的原子掩码，严格递减；atom_ranks[i] 为 rk(b_i)；rank 为 rk(C)。
    """
    chain: Tuple[int, ...]
    atom_ranks: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.chain) - 1

    def atoms_of_rank(self, k: int) -> List[int]:
        return [i for i, r in enumerate(self.atom_ranks) if r == k]

    def event_rank(self, mask: int) -> Optional[int]:
        """事件的秩：所含原子的最小秩；空事件为 None"""
        ranks = [self.atom_ranks[i] for i in bits(mask)]
        return min(ranks) if ranks else None


def van_fraassen_ranks(t: PopperTable, check: bool = True, max_atoms: int = DEFAULT_MAX_ATOMS,
                       allow_large: bool = False) -> RankChain:
    """a_0 = ⊤；a_{k+1} 为 a_k 中满足 C(b_i, a_k) = 0 的原子之析取

    Args:
        t: Popper 表
        check: 先穷举检查公理与正则性
        max_atoms: 检查时的原子数上限
        allow_large: 忽略上限

    Raises:
        NotAPopperFunction: 表不满足公理，或存在 C(·, x) 恒为 1 的非矛盾事件
            （按约定这类事件应解释为空事件，这里直接拒绝）
    """
    if check:
        report = check_axioms(t, max_atoms, allow_large)
        if not report.passed:
            failure = report.failures[0]
            raise NotAPopperFunction(f"table violates {failure.name}: {failure.message}")
        if not report.regular:
            logger.warning("Rejecting non-regular Popper table")
            raise NotAPopperFunction(
                "table is not regular: a non-contradiction x has C(·, x) constantly 1; "
                "by convention such x is interpreted as the empty event, rebuild the table without it"
            )
    chain = [t.full]
    while True:
        current = chain[-1]
        null = 0
        for i in bits(current):
            if t.value(i, current) == 0:
                null |= 1 << i
        if null == 0:
            break
        if null == current:
            raise NotAPopperFunction(f"C(·, a_{len(chain) - 1}) vanishes on every atom of a_{len(chain) - 1}")
        chain.append(null)

    atom_ranks = []
    for i in range(t.m):
        for k, a_k in enumerate(chain):
            if t.value(i, a_k) > 0:
                atom_ranks.append(k)
                break
        else:
            raise NotAPopperFunction(f"atom '{t.atoms[i]}' has no positive conditional along the chain")
    logger.debug(f"Rank chain of length {len(chain)} for {t.m} atoms")
    return RankChain(tuple(chain), tuple(atom_ranks))


def to_stratified(t: PopperTable, check: bool = True, max_atoms: int = DEFAULT_MAX_ATOMS,
                  allow_large: bool = False) -> StratifiedMeasure:
    """第 k 层为秩 k 的原子，权重 C(b_i, a_k)"""
    ranks = van_fraassen_ranks(t, check, max_atoms, allow_large)
    strata = []
    for k, a_k in enumerate(ranks.chain):
        strata.append({i: t.value(i, a_k) for i in ranks.atoms_of_rank(k)})
    try:
        return StratifiedMeasure(atoms=t.atoms, strata=tuple(strata))
    except ValueError as e:
        raise NotAPopperFunction(f"recovered strata are not a stratified measure: {e}") from e


def check_rank_markers(t: PopperTable, ranks: Optional[RankChain] = None) -> List[AxiomCheck]:
    """验证秩链的三条标记性质

    1. 秩为 k 的原子 b：C(b, a_k) > 0
    2. 秩大于 k 的原子 b：C(b, a_k) = 0
    3. 秩小于 k 的事件 b：C(a_k, b) = 0
    """
    ranks = ranks or van_fraassen_ranks(t, check=False)
    positive = _pass("marker_positive", "atoms of rank k are positive given a_k")
    null = _pass("marker_null", "atoms of rank above k are null given a_k")
    dominated = _pass("marker_dominated", "a_k is null given any event of lower rank")
    for k, a_k in enumerate(ranks.chain):
        for i, r in enumerate(ranks.atom_ranks):
            v = t.value(i, a_k)
            if r == k and not v > 0 and positive.passed:
                positive = _fail("marker_positive", f"C(b, a_{k}) = {v} for an atom of rank {k}", (1 << i, a_k))
            if r > k and v != 0 and null.passed:
                null = _fail("marker_null", f"C(b, a_{k}) = {v} for an atom of rank {r}", (1 << i, a_k))
        if k == 0 or not dominated.passed:
            continue
        for b in range(1, t.full + 1):
            rank_b = ranks.event_rank(b)
            if rank_b < k and t.C(a_k, b) != 0:
                dominated = _fail("marker_dominated", f"C(a_{k}, b) = {t.C(a_k, b)} for b of rank {rank_b}", (a_k, b))
                break
    return [positive, null, dominated]
