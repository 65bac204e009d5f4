"""Report assembly and deterministic JSON/text emission."""
from __future__ import annotations

import json

SCHEMA = "leviflat/1"


def make_report(op: str, status: str, source: dict | None = None, **fields) -> dict:
    report = {"schema": SCHEMA, "op": op, "status": status}
    if source is not None:
        report["input"] = source
    report.update(fields)
    return report


def emit_report(report: dict, fmt: str = "json") -> bytes:
    """Byte-stable rendering: sorted keys, fixed indentation, trailing newline."""
    if fmt == "json":
        return (json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt == "text":
        lines: list = []
        _text(report, 0, lines)
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _text(value, indent: int, lines: list, key: str | None = None):
    pad = "  " * indent
    label = f"{key}: " if key is not None else ""
    if isinstance(value, dict):
        if key is not None:
            lines.append(f"{pad}{key}:")
            indent += 1
        for k in sorted(value):
            if k.endswith("_record") or k == "schema":
                continue
            _text(value[k], indent, lines, k)
    elif isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            lines.append(f"{pad}{label}[{', '.join(_scalar(v) for v in value)}]")
        else:
            lines.append(f"{pad}{key}:" if key is not None else f"{pad}-")
            for i, v in enumerate(value):
                _text(v, indent + 1, lines, f"[{i}]")
    else:
        lines.append(f"{pad}{label}{_scalar(value)}")
