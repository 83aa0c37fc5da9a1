"""Rendering of a finished run as a table, JSON, or CSV.

Rows are ordered by score, highest first; countries without a score sink
to the bottom; ties break on country id.  The table is for terminals
(three decimals, no timestamps, so equal runs print equal bytes), JSON
carries everything including run metadata at full float precision, and
CSV keeps a fixed column set for spreadsheet import.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .clustering import ClusterResult
from .errors import ConfigError

SCHEMA_VERSION = 1

CSV_COLUMNS = ("country", "p", "n", "t", "contrast", "weight", "r", "status", "flags", "band")


@dataclass(frozen=True)
class ReportRow:
    """One country's line in the report; None marks values never computed."""

    country_id: str
    p: int | None
    n: int | None
    t: int | None
    contrast: float | None
    weight: float | None
    r: float | None
    status: str
    flags: tuple[str, ...] = ()
    band: str | None = None
    note: str | None = None


@dataclass(frozen=True)
class RunResult:
    rows: tuple[ReportRow, ...]
    clustering: ClusterResult | None
    warnings: tuple[str, ...]
    meta: Mapping[str, object] = field(default_factory=dict)


def sort_rows(rows: Sequence[ReportRow]) -> tuple[ReportRow, ...]:
    def key(row: ReportRow):
        scored = row.status == "ok" and row.r is not None
        return (0 if scored else 1, -(row.r or 0.0), row.country_id)

    return tuple(sorted(rows, key=key))


def _fmt3(value: float | None) -> str:
    return "" if value is None else f"{value:.3f}"


def _fmt_int(value: int | None) -> str:
    return "" if value is None else str(value)


def to_table(result: RunResult) -> str:
    headers = ["country", "p", "n", "t", "contrast", "weight", "r", "band", "status", "flags"]
    with_notes = any(row.note for row in result.rows)
    if with_notes:
        headers.append("note")
    numeric = {"p", "n", "t", "contrast", "weight", "r"}

    lines_data = []
    for row in result.rows:
        cells = {
            "country": row.country_id,
            "p": _fmt_int(row.p),
            "n": _fmt_int(row.n),
            "t": _fmt_int(row.t),
            "contrast": _fmt3(row.contrast),
            "weight": _fmt3(row.weight),
            "r": _fmt3(row.r),
            "band": row.band or "",
            "status": row.status,
            "flags": ",".join(row.flags),
            "note": row.note or "",
        }
        lines_data.append([cells[h] for h in headers])

    widths = [
        max(len(headers[i]), *(len(line[i]) for line in lines_data)) if lines_data else len(headers[i])
        for i in range(len(headers))
    ]

    def render_line(cells: Sequence[str]) -> str:
        parts = []
        for i, cell in enumerate(cells):
            if headers[i] in numeric:
                parts.append(cell.rjust(widths[i]))
            else:
                parts.append(cell.ljust(widths[i]))
        return "  ".join(parts).rstrip()

    out = [render_line(headers), render_line(["-" * w for w in widths])]
    out.extend(render_line(line) for line in lines_data)

    meta = result.meta
    scored = sum(1 for row in result.rows if row.status == "ok")
    summary = (
        f"{scored}/{len(result.rows)} countries scored, "
        f"{meta.get('queries_total', 0)} queries "
        f"({meta.get('queries_from_cache', 0)} cached), "
        f"backend={meta.get('backend', '?')}, strategy={meta.get('strategy', '?')}"
    )
    out.append("")
    out.append(summary)
    if result.clustering is not None:
        centroids = ", ".join(f"{c:.3f}" for c in result.clustering.centroids)
        out.append(f"band centroids: {centroids}")
    for warning in result.warnings:
        out.append(f"warning: {warning}")
    return "\n".join(out) + "\n"


def to_json(result: RunResult) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "metadata": {**result.meta, "warnings": list(result.warnings)},
        "clustering": None
        if result.clustering is None
        else {
            "k": result.clustering.k,
            "centroids": list(result.clustering.centroids),
            "wcss": result.clustering.wcss,
            "iterations": result.clustering.iterations,
            "converged": result.clustering.converged,
        },
        "results": [
            {
                "country": row.country_id,
                "p": row.p,
                "n": row.n,
                "t": row.t,
                "contrast": row.contrast,
                "weight": row.weight,
                "r": row.r,
                "status": row.status,
                "flags": list(row.flags),
                "band": row.band,
                "note": row.note,
            }
            for row in result.rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def to_csv(result: RunResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result.rows:
        writer.writerow(
            [
                row.country_id,
                _fmt_int(row.p),
                _fmt_int(row.n),
                _fmt_int(row.t),
                "" if row.contrast is None else f"{row.contrast:.6f}",
                "" if row.weight is None else f"{row.weight:.6f}",
                "" if row.r is None else f"{row.r:.6f}",
                row.status,
                ";".join(row.flags),
                row.band or "",
            ]
        )
    return buf.getvalue()


def render(result: RunResult, output_format: str) -> str:
    if output_format == "table":
        return to_table(result)
    if output_format == "json":
        return to_json(result)
    if output_format == "csv":
        return to_csv(result)
    raise ConfigError(f"unknown output format: {output_format!r}")
