"""Word counting and precise/flexible match scoring.

A response scores a precise match (PM) when its word count falls in the
tight per-target interval, and a flexible match (FM) for the broader one.
Scores are reported as percentages with two decimals; aggregation is a
micro-average over items (N is the total response count).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable

from .errors import DatasetFormatError, EmptyEvaluationError
from .lengths import ALL_TARGETS, Level, TargetLength, fm_range, level_of, pm_range

__all__ = [
    "word_count",
    "match_precise",
    "match_flexible",
    "ScoredItem",
    "ScoreCell",
    "ScoreReport",
    "score",
]


def word_count(text: str) -> int:
    """Number of maximal non-empty segments separated by Unicode whitespace."""
    return len(text.split())


def match_precise(target: TargetLength, length: int) -> bool:
    return pm_range(target).contains(length)


def match_flexible(target: TargetLength, length: int) -> bool:
    return fm_range(target).contains(length)


@dataclass(frozen=True)
class ScoredItem:
    target: TargetLength
    length: int
    pm_hit: bool
    fm_hit: bool

    @classmethod
    def evaluate(cls, target: TargetLength, length: int) -> "ScoredItem":
        return cls(
            target=target,
            length=length,
            pm_hit=match_precise(target, length),
            fm_hit=match_flexible(target, length),
        )


@dataclass(frozen=True)
class ScoreCell:
    """PM/FM percentages over n contributing items."""

    pm: float
    fm: float
    n: int


@dataclass(frozen=True)
class ScoreReport:
    per_target: dict[TargetLength, ScoreCell]
    per_level: dict[Level, ScoreCell]
    all_level: ScoreCell

    def targets(self) -> tuple[TargetLength, ...]:
        """Covered targets in canonical table order."""
        return tuple(t for t in ALL_TARGETS if t in self.per_target)

    def to_json_dict(self) -> dict:
        return {
            "per_target": {
                t.label: _cell_dict(self.per_target[t]) for t in self.targets()
            },
            "per_level": {
                lv.label: _cell_dict(self.per_level[lv])
                for lv in Level
                if lv in self.per_level
            },
            "all_level": _cell_dict(self.all_level),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ScoreReport":
        try:
            per_target = {
                TargetLength.from_label(k): _cell_from(v)
                for k, v in data["per_target"].items()
            }
            per_level = {
                Level(int(k)): _cell_from(v) for k, v in data["per_level"].items()
            }
            all_level = _cell_from(data["all_level"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetFormatError(f"not a score report: {exc}") from exc
        return cls(per_target=per_target, per_level=per_level, all_level=all_level)

    def to_csv(self) -> str:
        """Flat per-target CSV with fixed column order target,level,n,pm,fm."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["target", "level", "n", "pm", "fm"])
        for target in self.targets():
            cell = self.per_target[target]
            writer.writerow(
                [
                    target.label,
                    level_of(target).label,
                    cell.n,
                    f"{cell.pm:.2f}",
                    f"{cell.fm:.2f}",
                ]
            )
        return buf.getvalue()

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=False)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "ScoreReport":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def _cell_dict(cell: ScoreCell) -> dict:
    return {"pm": cell.pm, "fm": cell.fm, "n": cell.n}


def _cell_from(data: dict) -> ScoreCell:
    return ScoreCell(pm=float(data["pm"]), fm=float(data["fm"]), n=int(data["n"]))


def _percentage(hits: int, n: int) -> float:
    return round(100.0 * hits / n, 2)


def _aggregate(items: list[ScoredItem]) -> ScoreCell:
    n = len(items)
    pm_hits = sum(1 for item in items if item.pm_hit)
    fm_hits = sum(1 for item in items if item.fm_hit)
    return ScoreCell(pm=_percentage(pm_hits, n), fm=_percentage(fm_hits, n), n=n)


def score(items: Iterable[tuple[TargetLength, int]]) -> ScoreReport:
    """Score (target, word count) pairs per target, per level, and overall.

    Raises EmptyEvaluationError for an empty input; percentages are
    undefined at N = 0.
    """
    scored = [ScoredItem.evaluate(target, length) for target, length in items]
    if not scored:
        raise EmptyEvaluationError("no items to score")

    by_target: dict[TargetLength, list[ScoredItem]] = {}
    by_level: dict[Level, list[ScoredItem]] = {}
    for item in scored:
        by_target.setdefault(item.target, []).append(item)
        by_level.setdefault(level_of(item.target), []).append(item)

    return ScoreReport(
        per_target={t: _aggregate(group) for t, group in by_target.items()},
        per_level={lv: _aggregate(group) for lv, group in by_level.items()},
        all_level=_aggregate(scored),
    )
