"""Table and distribution reporting over score reports and run records.

Three shapes are produced: per-level PM/FM comparison rows with optional
baseline deltas, a per-target FM table with a macro-averaged final column,
and the distribution of self-generated length tokens. All rendering is
pure, two-decimal fixed point, and available as aligned text, CSV, and
markdown.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    DistributionUndefinedError,
    EmptyEvaluationError,
    ReportMismatchError,
)
from .lengths import ALL_TARGETS, Level, MetaLengthToken, TargetLength
from .metrics import ScoreReport, score
from .orchestrator import GenerationRecord

__all__ = [
    "ComparisonCell",
    "ComparisonRow",
    "tabulate_levels",
    "render_levels",
    "TargetTable",
    "tabulate_targets",
    "render_targets",
    "MltDistribution",
    "mlt_distribution",
    "render_distribution",
]

FORMATS = ("text", "csv", "md")
ABSENT = "—"  # placeholder for a column with no records


@dataclass(frozen=True)
class ComparisonCell:
    pm: float
    fm: float
    pm_delta: float | None = None
    fm_delta: float | None = None


@dataclass(frozen=True)
class ComparisonRow:
    model_label: str
    per_level: dict[Level, ComparisonCell]
    all_level: ComparisonCell


def _delta(treated: float, baseline: float) -> float:
    return round(treated - baseline, 2)


def tabulate_levels(
    report: ScoreReport,
    baseline: ScoreReport | None = None,
    label: str = "model",
) -> ComparisonRow:
    """One comparison row; deltas are treated minus baseline, cell-wise.

    When a baseline is given both reports must cover the same targets,
    otherwise the deltas would compare different populations.
    """
    if baseline is not None and set(report.per_target) != set(baseline.per_target):
        raise ReportMismatchError(
            "treated and baseline reports cover different targets"
        )

    per_level: dict[Level, ComparisonCell] = {}
    for level in Level:
        cell = report.per_level.get(level)
        if cell is None:
            continue
        base = baseline.per_level.get(level) if baseline else None
        per_level[level] = ComparisonCell(
            pm=cell.pm,
            fm=cell.fm,
            pm_delta=_delta(cell.pm, base.pm) if base else None,
            fm_delta=_delta(cell.fm, base.fm) if base else None,
        )
    base_all = baseline.all_level if baseline else None
    all_level = ComparisonCell(
        pm=report.all_level.pm,
        fm=report.all_level.fm,
        pm_delta=_delta(report.all_level.pm, base_all.pm) if base_all else None,
        fm_delta=_delta(report.all_level.fm, base_all.fm) if base_all else None,
    )
    return ComparisonRow(model_label=label, per_level=per_level, all_level=all_level)


def _score_text(value: float, delta: float | None) -> str:
    text = f"{value:.2f}"
    if delta is not None:
        text += f" ({delta:+.2f})"
    return text


def _level_cells(row: ComparisonRow) -> list[str]:
    cells: list[str] = []
    for level in Level:
        cell = row.per_level.get(level)
        if cell is None:
            cells += [ABSENT, ABSENT]
        else:
            cells += [_score_text(cell.pm, cell.pm_delta), _score_text(cell.fm, cell.fm_delta)]
    cells += [
        _score_text(row.all_level.pm, row.all_level.pm_delta),
        _score_text(row.all_level.fm, row.all_level.fm_delta),
    ]
    return cells


_LEVEL_HEADER = [
    "model",
    "level0_pm",
    "level0_fm",
    "level1_pm",
    "level1_fm",
    "level2_pm",
    "level2_fm",
    "all_pm",
    "all_fm",
]


def render_levels(rows: Sequence[ComparisonRow], fmt: str = "text") -> str:
    table = [[row.model_label, *_level_cells(row)] for row in rows]
    return _render_table(_LEVEL_HEADER, table, fmt)


@dataclass(frozen=True)
class TargetTable:
    """Per-target FM columns in canonical order plus their macro-average.

    Targets with no records carry None and do not contribute to the
    average.
    """

    fm_by_target: dict[TargetLength, float | None]
    avg_fm: float


def tabulate_targets(records: Iterable[GenerationRecord]) -> TargetTable:
    items = [
        (r.target, r.length) for r in records if r.error is None and r.target is not None
    ]
    if not items:
        raise EmptyEvaluationError("no scoreable records")
    per_target = score(items).per_target
    fm_by_target: dict[TargetLength, float | None] = {
        target: (per_target[target].fm if target in per_target else None)
        for target in ALL_TARGETS
    }
    present = [fm for fm in fm_by_target.values() if fm is not None]
    avg_fm = round(sum(present) / len(present), 2)
    return TargetTable(fm_by_target=fm_by_target, avg_fm=avg_fm)


def render_targets(
    rows: Sequence[tuple[str, TargetTable]], fmt: str = "text"
) -> str:
    header = ["model", *(t.label for t in ALL_TARGETS), "avg_fm"]
    table = []
    for label, target_table in rows:
        cells = [label]
        for target in ALL_TARGETS:
            fm = target_table.fm_by_target[target]
            cells.append(ABSENT if fm is None else f"{fm:.2f}")
        cells.append(f"{target_table.avg_fm:.2f}")
        table.append(cells)
    return _render_table(header, table, fmt)


@dataclass(frozen=True)
class MltDistribution:
    """Share of each self-generated token among parsed records.

    Proportions sum to 1 over parsed records; the unparsed share is the
    fraction of all (non-errored) records that carried no leading token.
    The average word count runs over every non-errored record.
    """

    proportions: dict[MetaLengthToken, float]
    unparsed_share: float
    avg_word_count: float
    parsed_n: int
    total_n: int


def mlt_distribution(records: Iterable[GenerationRecord]) -> MltDistribution:
    valid = [r for r in records if r.error is None]
    parsed = [r for r in valid if r.parsed_mlt is not None]
    if not parsed:
        raise DistributionUndefinedError("no records with a parsed token")
    counts: dict[MetaLengthToken, int] = {}
    for record in parsed:
        assert record.parsed_mlt is not None
        counts[record.parsed_mlt] = counts.get(record.parsed_mlt, 0) + 1
    return MltDistribution(
        proportions={token: n / len(parsed) for token, n in counts.items()},
        unparsed_share=(len(valid) - len(parsed)) / len(valid),
        avg_word_count=round(sum(r.length for r in valid) / len(valid), 2),
        parsed_n=len(parsed),
        total_n=len(valid),
    )


def render_distribution(dist: MltDistribution, fmt: str = "csv") -> str:
    header = ["mlt", "proportion"]
    rows = []
    for token in sorted(dist.proportions, key=lambda t: ALL_TARGETS.index(t.center)):
        rows.append([token.surface, f"{dist.proportions[token]:.4f}"])
    rows.append(["unparsed_share", f"{dist.unparsed_share:.4f}"])
    rows.append(["avg_word_count", f"{dist.avg_word_count:.2f}"])
    rows.append(["parsed_n", str(dist.parsed_n)])
    rows.append(["total_n", str(dist.total_n)])
    return _render_table(header, rows, fmt)


def _render_table(header: list[str], rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "md":
        lines = [
            "| " + " | ".join(header) + " |",
            "| " + " | ".join("---" for _ in header) + " |",
        ]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "text":
        widths = [
            max(len(header[i]), *(len(row[i]) for row in rows)) if rows else len(header[i])
            for i in range(len(header))
        ]
        def line(cells: list[str]) -> str:
            return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()
        lines = [line(header), line(["-" * w for w in widths])]
        lines += [line(row) for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
