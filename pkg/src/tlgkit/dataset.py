"""Benchmark dataset construction, serialization, and prompt augmentation.

Datasets are stored as UTF-8 JSON lines with the interchange field names
"id", "Instruction", and "TargetLength" (target serialized as its decimal
label, or ">800").
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import (
    DatasetFormatError,
    EmptyRequestError,
    InsufficientSourceError,
    InvalidTargetError,
)
from .lengths import ALL_TARGETS, TargetLength

__all__ = [
    "TlgEntry",
    "build_tlg",
    "augment_instruction",
    "load_tlg",
    "save_tlg",
    "load_questions",
]

CONSTRAINT_TEMPLATE = "The response should have a word count of {} words."
OPEN_ENDED_PHRASE = "more than 800"


@dataclass(frozen=True)
class TlgEntry:
    id: str
    instruction: str
    target_length: TargetLength

    def __post_init__(self) -> None:
        if not self.instruction:
            raise ValueError("instruction must be non-empty")


def build_tlg(questions: Sequence[str], n: int, seed: int) -> list[TlgEntry]:
    """Sample n questions without replacement and assign uniform targets.

    Deterministic for a fixed (questions, n, seed); ids are "0".."n-1" in
    output order. Each entry's target is drawn i.i.d. uniformly over the
    nine values, so per-target counts are approximately n/9.
    """
    if n <= 0:
        raise EmptyRequestError("requested dataset size must be > 0")
    if n > len(questions):
        raise InsufficientSourceError(
            f"requested {n} entries from {len(questions)} questions"
        )
    rng = random.Random(seed)
    sampled = rng.sample(list(questions), n)
    return [
        TlgEntry(id=str(i), instruction=q, target_length=rng.choice(ALL_TARGETS))
        for i, q in enumerate(sampled)
    ]


def augment_instruction(instruction: str, target: TargetLength) -> str:
    """Append the length-constraint sentence to a bare question.

    The caller must not pass an already-augmented instruction; this is not
    detected.
    """
    if not instruction:
        raise ValueError("instruction must be non-empty")
    phrase = OPEN_ENDED_PHRASE if target is TargetLength.OVER_800 else target.label
    return f"{instruction} {CONSTRAINT_TEMPLATE.format(phrase)}"


def save_tlg(entries: Sequence[TlgEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            record = {
                "id": entry.id,
                "Instruction": entry.instruction,
                "TargetLength": entry.target_length.label,
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def load_tlg(path: str | Path) -> list[TlgEntry]:
    """Load a dataset file, validating every record.

    Raises DatasetFormatError with the offending line number on malformed
    records and InvalidTargetError for target strings outside the nine
    values.
    """
    entries: list[TlgEntry] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(f"invalid JSON: {exc.msg}", lineno) from exc
            if not isinstance(record, dict):
                raise DatasetFormatError("record is not an object", lineno)
            try:
                entry_id = record["id"]
                instruction = record["Instruction"]
                target_label = record["TargetLength"]
            except KeyError as exc:
                raise DatasetFormatError(f"missing field {exc.args[0]!r}", lineno) from exc
            if not isinstance(instruction, str) or not instruction:
                raise DatasetFormatError("Instruction must be a non-empty string", lineno)
            try:
                target = TargetLength.from_label(str(target_label))
            except InvalidTargetError:
                raise InvalidTargetError(
                    f"line {lineno}: not a valid target length: {target_label!r}"
                ) from None
            entry_id = str(entry_id)
            if entry_id in seen_ids:
                raise DatasetFormatError(f"duplicate id {entry_id!r}", lineno)
            seen_ids.add(entry_id)
            entries.append(
                TlgEntry(id=entry_id, instruction=instruction, target_length=target)
            )
    return entries


def load_questions(path: str | Path) -> list[str]:
    """Read a question-source file: one question per line, de-duplicated.

    Duplicates keep their first occurrence so sampling is over distinct
    questions.
    """
    seen: set[str] = set()
    questions: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            question = line.rstrip("\n")
            if not question.strip() or question in seen:
                continue
            seen.add(question)
            questions.append(question)
    return questions
