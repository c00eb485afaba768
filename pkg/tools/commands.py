import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from tools.registry import command_registry
from core.bridge import (
    canonical_model,
    nap_to_popper,
    popper_to_nap,
    snapshot_oracle,
    snapshot_study,
    verify_round_trip,
)
from core.events import Event, NapModel, closure_spectrum, compare_strata, cond, event_rank, prob
from core.exceptions import UsageError
from core.lexi import closure_depth, expand, first_divergence, compare_lex, remainder, render_series, valuation
from core.nafield import FieldValue, compare, render_value, standard_part
from core.popper import DEFAULT_MAX_ATOMS, check_axioms
from utils.convergence_plot import ConvergencePlotter
from utils.model_io import LoadedModel, dump_nap, dump_popper, load_model, write_json
from utils.report_renderer import approx as approx_decimal
from utils.report_renderer import render


@dataclass
class CommandOutcome:
    """命令结果：退出码 + JSON 负载"""
    command: str
    exit_code: int
    payload: Dict[str, Any] = field(default_factory=dict)

    def render(self, fmt: str = "text") -> str:
        return render(self.command, self.payload, fmt)


@dataclass
class QueryResult:
    """同一个值的四种视图"""
    exact: str
    standard_part: str
    series: str
    valuation: str


def _nap_view(loaded: LoadedModel, max_atoms: int, allow_large: bool) -> Tuple[NapModel, Any]:
    """返回 NAP 模型与事件求值函数；Popper 文件经 popper_to_nap 转换"""
    if loaded.kind == "nap":
        return loaded.nap, loaded.nap_event
    model = popper_to_nap(loaded.table, True, max_atoms, allow_large)

    def resolve(text: str) -> Event:
        return Event(frozenset(loaded.table.labels_of(loaded.popper_mask(text))))

    return model, resolve


def _value(model: NapModel, a: Event, b: Optional[Event]) -> FieldValue:
    return prob(model, a) if b is None else cond(model, a, b)


def query_result(value: FieldValue, depth: int) -> QueryResult:
    return QueryResult(
        exact=render_value(value),
        standard_part=str(standard_part(value)),
        series=render_series(expand(value, depth)),
        valuation=str(valuation(value)),
    )


@command_registry.register
def cmd_check(path: str, max_atoms: int = DEFAULT_MAX_ATOMS, allow_large: bool = False) -> CommandOutcome:
    """检查模型文件：Popper 表穷举检查公理 1–4，NAP 模型检查其 Popper 影子

    Returns:
        退出码 0 表示通过，1 表示公理失败（附反例）
    """
    loaded = load_model(path)
    notes: List[str] = []
    if loaded.kind == "popper":
        report = check_axioms(loaded.table, max_atoms, allow_large)
    else:
        model = loaded.nap
        if len(model.outcomes) > max_atoms and not allow_large:
            notes.append(f"shadow axiom check skipped: {len(model.outcomes)} outcomes exceed {max_atoms}")
            return CommandOutcome("check", 0, {"kind": "nap", "verdict": "pass", "notes": notes})
        report = check_axioms(nap_to_popper(model), max_atoms, allow_large)
        notes.append("checks apply to the Popper shadow C(a, b) = st(P(a | b))")
    if not report.regular:
        notes.append("table is not regular; conversion to a NAP model will be refused")
    verdict = "pass" if report.passed else "fail"
    payload = {"kind": loaded.kind, "verdict": verdict, **report.to_dict(), "notes": notes}
    return CommandOutcome("check", 0 if report.passed else 1, payload)


@command_registry.register
def cmd_query(path: str, event: str, given: Optional[str] = None, depth: int = 2, approx: bool = False,
              max_atoms: int = DEFAULT_MAX_ATOMS, allow_large: bool = False) -> CommandOutcome:
    """查询 P(event) 或 P(event | given)：精确值、标准部分、赋值与展开"""
    if depth < 1:
        raise UsageError(f"--depth must be positive, got {depth}")
    model, resolve = _nap_view(load_model(path), max_atoms, allow_large)
    a = resolve(event)
    b = resolve(given) if given is not None else None
    value = _value(model, a, b)
    result = query_result(value, depth)
    payload = {
        "event": event,
        "given": given,
        "exact": result.exact,
        "standard_part": result.standard_part,
        "valuation": result.valuation,
        "series": result.series,
        "depth": depth,
        "closure_depth": str(closure_depth(value)),
    }
    if approx:
        payload["approx"] = approx_decimal(standard_part(value))
    return CommandOutcome("query", 0, payload)


@command_registry.register
def cmd_decompose(path: str, event: str, depth: int = 2, max_atoms: int = DEFAULT_MAX_ATOMS,
                  allow_large: bool = False) -> CommandOutcome:
    """把 P(event) 分解为按秩递增的项与余项"""
    if depth < 1:
        raise UsageError(f"--depth must be positive, got {depth}")
    model, resolve = _nap_view(load_model(path), max_atoms, allow_large)
    value = prob(model, resolve(event))
    series = expand(value, depth)
    payload = {
        "event": event,
        "exact": render_value(value),
        "depth": depth,
        "terms": [{"rank": f"Int({k})", "coefficient": str(c)} for k, c in series.terms],
        "series": render_series(series),
        "remainder": render_value(remainder(value, depth)),
        "closure_depth": str(closure_depth(value)),
    }
    return CommandOutcome("decompose", 0, payload)


@command_registry.register
def cmd_compare(path: str, left: str, right: str, given: Optional[str] = None,
                max_atoms: int = DEFAULT_MAX_ATOMS, allow_large: bool = False) -> CommandOutcome:
    """比较两个事件的概率：域上的序与字典序两种判定必须一致"""
    model, resolve = _nap_view(load_model(path), max_atoms, allow_large)
    a, b = resolve(left), resolve(right)
    condition = resolve(given) if given is not None else None
    pa, pb = _value(model, a, condition), _value(model, b, condition)
    field_verdict = compare(pa, pb)
    lex_verdict = compare_lex(pa, pb)
    verdicts = {field_verdict, lex_verdict}
    payload = {
        "left": left,
        "right": right,
        "given": given,
        "left_value": render_value(pa),
        "right_value": render_value(pb),
        "field": field_verdict.name,
        "lexicographic": lex_verdict.name,
    }
    if condition is None:
        strata_verdict = compare_strata(model, a, b)
        payload["strata"] = strata_verdict.name
        verdicts.add(strata_verdict)
    divergence = first_divergence(pa, pb)
    if divergence is not None:
        rank, ca, cb = divergence
        payload["divergence"] = {"rank": str(rank), "left": str(ca), "right": str(cb)}
    payload["agree"] = len(verdicts) == 1
    return CommandOutcome("compare", 0 if payload["agree"] else 1, payload)


@command_registry.register
def cmd_convert(path: str, to: str, out: Optional[str] = None, output_dir: str = "output",
                max_atoms: int = DEFAULT_MAX_ATOMS, allow_large: bool = False) -> CommandOutcome:
    """在 NAP 模型与 Popper 表之间转换并写出新的模型文件"""
    if to not in ("nap", "popper"):
        raise UsageError(f"--to must be 'nap' or 'popper', got {to!r}")
    loaded = load_model(path)
    payload: Dict[str, Any] = {"source": loaded.kind, "target": to}

    if loaded.kind == "popper":
        model = popper_to_nap(loaded.table, True, max_atoms, allow_large)
        if loaded.table.m <= max_atoms or allow_large:
            payload["round_trip"] = verify_round_trip(loaded.table, check=False).to_dict()
        data = dump_nap(model, loaded.events) if to == "nap" else dump_popper(loaded.table, loaded.events)
    else:
        model = loaded.nap
        data = dump_popper(nap_to_popper(model), loaded.events) if to == "popper" else dump_nap(
            canonical_model(model), loaded.events
        )

    if not out:
        stem = os.path.splitext(os.path.basename(path))[0]
        out = os.path.join(output_dir, f"{stem}.{to}.json")
    payload["path"] = write_json(data, out)
    return CommandOutcome("convert", 0, payload)


def _snapshot_pairs(model: NapModel, resolve, event: Optional[str], given: Optional[str],
                    limit: int) -> List[Tuple[Event, Event]]:
    if event is not None:
        condition = resolve(given) if given is not None else model.omega
        return [(resolve(event), condition)]
    if given is not None:
        raise UsageError("--given requires --event")
    if len(model.outcomes) > limit:
        raise UsageError(f"{len(model.outcomes)} outcomes exceed {limit}; pass --event to pick a pair")
    return [
        (model.event(x), b)
        for b in model.all_events() if b
        for x in model.outcomes
    ]


@command_registry.register
def cmd_snapshot(path: str, stages: Sequence[int] = (2, 4, 8, 16), event: Optional[str] = None,
                 given: Optional[str] = None, plot: Optional[str] = None, approx: bool = False,
                 output_dir: str = "output", max_atoms: int = DEFAULT_MAX_ATOMS,
                 allow_large: bool = False) -> CommandOutcome:
    """逐阶段计算快照条件概率及其与标准部分的偏差"""
    stages = list(stages)
    if not stages or any(n < 2 for n in stages):
        raise UsageError(f"every stage must be at least 2, got {stages}")
    loaded = load_model(path)
    if loaded.kind == "popper" and event is None:
        study = snapshot_oracle(loaded.table, stages, check=loaded.table.m <= max_atoms or allow_large)
    else:
        model, resolve = _nap_view(loaded, max_atoms, allow_large)
        study = snapshot_study(model, stages, _snapshot_pairs(model, resolve, event, given, max_atoms))

    payload = study.to_dict()
    if approx:
        for row, raw in zip(payload["rows"], study.rows):
            row["approx"] = approx_decimal(raw.deviation)
    if plot:
        plotter = ConvergencePlotter(output_dir)
        payload["plot"] = plotter.plot(study, plot if plot != "auto" else None)
    return CommandOutcome("snapshot", 0, payload)


@command_registry.register
def cmd_spectrum(path: str, max_outcomes: int = 12, max_atoms: int = DEFAULT_MAX_ATOMS,
                 allow_large: bool = False) -> CommandOutcome:
    """列出每个事件的秩与闭包深度，以及模型的闭包深度"""
    model, _ = _nap_view(load_model(path), max_atoms, allow_large)
    try:
        spectrum = closure_spectrum(model, max_outcomes)
    except ValueError as e:
        raise UsageError(str(e)) from e
    payload = {
        "events": [
            {
                "event": a.sorted_labels(model.space),
                "rank": str(event_rank(model, a)),
                "closure_depth": str(depth),
            }
            for a, depth in spectrum.depths
        ],
        "model_depth": str(spectrum.model_depth),
        "histogram": spectrum.histogram(),
    }
    return CommandOutcome("spectrum", 0, payload)
