"""
报告渲染
把命令的 JSON 负载渲染为纯文本表格；数值一律是精确有理数字符串
"""

import json
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Dict, List, Sequence


def approx(q: Fraction, digits: int = 12) -> str:
    """有理数的十进制近似（digits 位有效数字）"""
    with localcontext() as ctx:
        ctx.prec = digits
        value = Decimal(q.numerator) / Decimal(q.denominator)
    return format(value, "f") if value == value.to_integral_value() else str(value)


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False)


def render_table(headers: Sequence[str], rows: List[Sequence[Any]]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for n, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _event(labels: Sequence[str]) -> str:
    return "{" + ", ".join(labels) + "}"


def render_check(payload: Dict[str, Any]) -> str:
    lines = [f"{payload['kind']} model: {payload['verdict']}"]
    if "checks" in payload:
        rows = []
        for check in payload["checks"]:
            witness = " ; ".join(_event(w) for w in check["witness"]) if check["witness"] else ""
            rows.append((check["name"], check["status"], check["message"], witness))
        lines.append(render_table(("check", "status", "message", "witness"), rows))
    for note in payload.get("notes", []):
        lines.append(note)
    return "\n".join(lines)


def render_query(payload: Dict[str, Any]) -> str:
    rows = [
        ("exact", payload["exact"]),
        ("standard part", payload["standard_part"]),
        ("valuation", payload["valuation"]),
        (f"series (depth {payload['depth']})", payload["series"]),
    ]
    if "approx" in payload:
        rows.append(("approx", payload["approx"]))
    if "closure_depth" in payload:
        rows.append(("closure depth", payload["closure_depth"]))
    header = f"P({payload['event']})" if payload.get("given") is None else f"P({payload['event']} | {payload['given']})"
    return header + "\n" + render_table(("view", "value"), rows)


def render_decompose(payload: Dict[str, Any]) -> str:
    rows = [(t["rank"], t["coefficient"]) for t in payload["terms"]]
    lines = [
        f"P({payload['event']}) = {payload['exact']}",
        render_table(("rank", "coefficient"), rows),
        f"remainder after depth {payload['depth']}: {payload['remainder']}",
        f"closure depth: {payload['closure_depth']}",
    ]
    return "\n".join(lines)


def render_compare(payload: Dict[str, Any]) -> str:
    rows = [
        ("field", payload["field"]),
        ("lexicographic", payload["lexicographic"]),
    ]
    if "strata" in payload:
        rows.append(("strata", payload["strata"]))
    lines = [
        f"P({payload['left']}) = {payload['left_value']}",
        f"P({payload['right']}) = {payload['right_value']}",
        render_table(("order", "verdict"), rows),
    ]
    if payload.get("divergence"):
        d = payload["divergence"]
        lines.append(f"first divergence at {d['rank']}: {d['left']} vs {d['right']}")
    lines.append("verdicts agree" if payload["agree"] else "VERDICTS DISAGREE")
    return "\n".join(lines)


def render_convert(payload: Dict[str, Any]) -> str:
    lines = [f"converted {payload['source']} -> {payload['target']}: {payload['path']}"]
    if "round_trip" in payload:
        rt = payload["round_trip"]
        lines.append(
            f"round trip: {rt['pairs_checked']} pairs, max discrepancy {rt['max_discrepancy']}"
        )
    return "\n".join(lines)


def render_snapshot(payload: Dict[str, Any]) -> str:
    headers = ["event", "given", "stage", "value", "standard part", "deviation"]
    with_approx = any("approx" in r for r in payload["rows"])
    if with_approx:
        headers.append("approx deviation")
    rows = []
    for r in payload["rows"]:
        row = [_event(r["event"]), _event(r["given"]), r["stage"], r["value"], r["standard_part"], r["deviation"]]
        if with_approx:
            row.append(r.get("approx", ""))
        rows.append(row)
    lines = [render_table(headers, rows), f"bound: deviation <= K/n^2 with K = {payload['bound']}"]
    if payload.get("plot"):
        lines.append(f"plot: {payload['plot']}")
    return "\n".join(lines)


def render_spectrum(payload: Dict[str, Any]) -> str:
    rows = [(_event(e["event"]), e["rank"], e["closure_depth"]) for e in payload["events"]]
    lines = [
        render_table(("event", "rank", "closure depth"), rows),
        f"model closure depth: {payload['model_depth']}",
    ]
    return "\n".join(lines)


RENDERERS = {
    "check": render_check,
    "query": render_query,
    "decompose": render_decompose,
    "compare": render_compare,
    "convert": render_convert,
    "snapshot": render_snapshot,
    "spectrum": render_spectrum,
}


def render(command: str, payload: Dict[str, Any], fmt: str = "text") -> str:
    if fmt == "json":
        return render_json(payload)
    return RENDERERS[command](payload)
