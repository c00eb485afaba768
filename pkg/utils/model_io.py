"""
模型文件读写
JSON 格式，kind 为 "nap"（结局 + 权重 + 秩）或 "popper"（原子 + 分层块或稠密块）；
所有数值均为精确有理数字符串 "p/q"，具名事件用事件表达式语言书写
"""

import json
import logging
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator

from core.eventlang import evaluate, parse, parse_mask, resolve_named
from core.events import Event, NapModel, to_fraction
from core.exceptions import EventError, ModelFileError
from core.popper import PopperTable, StratifiedMeasure, from_stratified, to_stratified

logger = logging.getLogger(__name__)

Rational = Union[int, str]

_LABEL = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _check_label(v: str) -> str:
    # 标签必须能在事件表达式里直接引用
    if not _LABEL.fullmatch(v) or v in ("T", "F"):
        raise ValueError(f"'{v}' is not a valid label (identifier other than T/F)")
    return v


Label = Annotated[str, AfterValidator(_check_label)]


class OutcomeEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: Label
    weight: Rational
    rank: int = Field(default=0, ge=0)

    @field_validator("weight")
    @classmethod
    def validate_weight(cls, v):
        to_fraction(v)
        return v


class DenseEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    event: str = Field(description="事件表达式，单个原子或复合事件")
    given: str = Field(description="条件事件表达式，必须非空")
    value: Rational

    @field_validator("value")
    @classmethod
    def validate_value(cls, v):
        to_fraction(v)
        return v


class NapFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["nap"]
    outcomes: List[OutcomeEntry]
    events: Dict[Label, str] = Field(default_factory=dict)


class PopperFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["popper"]
    atoms: List[Label]
    stratified: Optional[Dict[int, Dict[str, Rational]]] = None
    dense: Optional[List[DenseEntry]] = None
    events: Dict[Label, str] = Field(default_factory=dict)

    @field_validator("stratified")
    @classmethod
    def validate_stratified(cls, v):
        if v is None:
            return v
        for stratum in v.values():
            for w in stratum.values():
                to_fraction(w)
        if sorted(v) != list(range(len(v))):
            raise ValueError("stratified ranks must be consecutive integers starting at 0")
        return v


ModelFile = Annotated[Union[NapFile, PopperFile], Field(discriminator="kind")]
_MODEL_FILE = TypeAdapter(ModelFile)


@dataclass
class LoadedModel:
    """解析后的模型文件"""
    kind: str
    path: str = ""
    nap: Optional[NapModel] = None
    table: Optional[PopperTable] = None
    stratified: Optional[StratifiedMeasure] = None
    events: Dict[str, str] = field(default_factory=dict)

    @property
    def labels(self) -> tuple:
        return self.nap.outcomes if self.kind == "nap" else self.table.atoms

    def nap_event(self, text: str) -> Event:
        """在 NAP 模型上求值事件表达式（可引用具名事件）"""
        binding = {label: Event(frozenset((label,))) for label in self.nap.outcomes}
        for name, definition in self.events.items():
            binding[name] = evaluate(parse(definition), binding, self.nap.space)
        return evaluate(parse(text), binding, self.nap.space)

    def popper_mask(self, text: str) -> int:
        """在正规原子上求值事件表达式，返回原子掩码"""
        named = resolve_named(self.events, self.table.atoms)
        return parse_mask(text, self.table.atoms, named)


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ModelFileError(f"Model file not found: {path}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise ModelFileError(f"Cannot read model file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ModelFileError(f"Invalid JSON in {path} at line {e.lineno}: {e.msg}") from e


def _build_nap(parsed: NapFile) -> NapModel:
    return NapModel.from_outcomes((o.label, o.weight, o.rank) for o in parsed.outcomes)


def _build_popper(parsed: PopperFile) -> tuple:
    if (parsed.stratified is None) == (parsed.dense is None):
        raise ModelFileError("A popper file needs exactly one of 'stratified' or 'dense'")
    if parsed.stratified is not None:
        strata = [parsed.stratified[k] for k in range(len(parsed.stratified))]
        measure = StratifiedMeasure.from_labels(parsed.atoms, strata)
        return from_stratified(measure), measure

    atoms = tuple(parsed.atoms)
    values: Dict[tuple, Fraction] = {}
    declared: Dict[tuple, Fraction] = {}
    for entry in parsed.dense:
        a = parse_mask(entry.event, atoms)
        s = parse_mask(entry.given, atoms)
        if s == 0:
            raise ModelFileError(f"Condition '{entry.given}' is empty; C(·, ∅) is fixed at 1")
        value = to_fraction(entry.value)
        if a and a & (a - 1) == 0:
            target, key = values, (a.bit_length() - 1, s)
        else:
            target, key = declared, (a, s)
        if key in target:
            raise ModelFileError(f"Duplicate dense entry for C({entry.event}, {entry.given})")
        target[key] = value
    return PopperTable(atoms, values, declared), None


def parse_model(data: dict, path: str = "") -> LoadedModel:
    """校验并构造模型

    Raises:
        ModelFileError: 模式不符、有理数非法、事件表达式错误等
    """
    try:
        parsed = _MODEL_FILE.validate_python(data)
    except ValidationError as e:
        raise ModelFileError(f"Schema error in {path or 'model'}: {e}") from e

    try:
        if isinstance(parsed, NapFile):
            loaded = LoadedModel("nap", path, nap=_build_nap(parsed), events=dict(parsed.events))
        else:
            table, measure = _build_popper(parsed)
            loaded = LoadedModel("popper", path, table=table, stratified=measure, events=dict(parsed.events))
        clash = set(loaded.events) & set(loaded.labels)
        if clash:
            raise ModelFileError(f"Event names shadow labels: {', '.join(sorted(clash))}")
        if loaded.kind == "nap":
            for name in loaded.events:
                loaded.nap_event(name)
        else:
            resolve_named(loaded.events, loaded.table.atoms)
    except (ValidationError, ValueError, EventError) as e:
        raise ModelFileError(f"Invalid model in {path or 'model'}: {e}") from e

    logger.info(f"Loaded {loaded.kind} model with {len(loaded.labels)} labels from {path or 'data'}")
    return loaded


def load_model(path: str) -> LoadedModel:
    return parse_model(_read_json(path), path)


def dump_nap(model: NapModel, events: Optional[Dict[str, str]] = None) -> dict:
    return {
        "kind": "nap",
        "outcomes": [
            {"label": label, "weight": str(model.weight[label]), "rank": model.rank[label]}
            for label in model.outcomes
        ],
        "events": dict(events or {}),
    }


def dump_popper(table: PopperTable, events: Optional[Dict[str, str]] = None, dense: bool = False) -> dict:
    """写出 Popper 表：默认用分层块（需要表有效），dense=True 时写出全部原子项"""
    data = {"kind": "popper", "atoms": list(table.atoms)}
    if dense:
        data["dense"] = [
            {"event": table.atoms[i], "given": " | ".join(table.labels_of(s)), "value": str(v)}
            for (i, s), v in sorted(table.values.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ]
    else:
        measure = to_stratified(table, check=False)
        data["stratified"] = {
            str(k): {label: str(w) for label, w in stratum.items()}
            for k, stratum in enumerate(measure.labelled())
        }
    data["events"] = dict(events or {})
    return data


def write_json(data: dict, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
    logger.info(f"Wrote {data.get('kind', 'model')} file to {path}")
    return path
