"""Drives a generation backend over benchmark datasets.

Three protocols are supported: the length constraint expressed in the
prompt text (PROMPT_TLG), the target converted to a length token and
forced as an assistant prefix (FORCED_MLT), and bare questions where the
model emits its own token first (NON_TLG). A fourth runner crosses a
question list with all nine targets using forced semantics.

Requests run with bounded parallelism; output records always follow input
order, and a failed request marks its own record instead of aborting the
run.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .client import BackendConfig, GenerationClient, RequestFailed
from .dataset import TlgEntry, augment_instruction
from .errors import DatasetFormatError, PrefillUnsupportedError
from .lengths import (
    ALL_TARGETS,
    MetaLengthToken,
    TargetLength,
    mlt_for_target,
    parse_leading_mlt,
    token_for_surface,
)
from .metrics import word_count
from .templates import ChatTemplate, render, strip_eos

__all__ = [
    "GenerationMode",
    "GenerationRecord",
    "BACKEND_FAILURE",
    "run_prompt_tlg",
    "run_forced_mlt",
    "run_non_tlg",
    "run_multi_mlt",
    "records_to_items",
    "save_records",
    "load_records",
]

BACKEND_FAILURE = "BACKEND_FAILURE"


class GenerationMode(str, Enum):
    PROMPT_TLG = "PROMPT_TLG"
    FORCED_MLT = "FORCED_MLT"
    NON_TLG = "NON_TLG"


@dataclass(frozen=True)
class GenerationRecord:
    entry_id: str
    target: TargetLength | None
    mode: GenerationMode
    raw_text: str
    parsed_mlt: MetaLengthToken | None
    response_text: str
    length: int
    error: str | None = None


@dataclass(frozen=True)
class _Job:
    entry_id: str
    target: TargetLength | None
    user_content: str
    assistant_prefix: str | None = None


def _strip_leading_mlts(text: str) -> tuple[MetaLengthToken | None, str]:
    """Strip every leading token surface; return the first one seen."""
    first = None
    while True:
        token, rest = parse_leading_mlt(text)
        if token is None:
            return first, text
        if first is None:
            first = token
        text = rest


def _finish(
    job: _Job,
    mode: GenerationMode,
    template: ChatTemplate,
    raw: str | None,
    error: str | None,
) -> GenerationRecord:
    if error is not None or raw is None:
        return GenerationRecord(
            entry_id=job.entry_id,
            target=job.target,
            mode=mode,
            raw_text="",
            parsed_mlt=None,
            response_text="",
            length=0,
            error=error or BACKEND_FAILURE,
        )
    text = strip_eos(template, raw)
    emitted, text = _strip_leading_mlts(text)
    if mode is GenerationMode.FORCED_MLT:
        assert job.assistant_prefix is not None
        parsed = token_for_surface(job.assistant_prefix)
    else:
        parsed = emitted
    target = job.target
    if mode is GenerationMode.NON_TLG:
        target = parsed.center if parsed else None
    return GenerationRecord(
        entry_id=job.entry_id,
        target=target,
        mode=mode,
        raw_text=raw,
        parsed_mlt=parsed,
        response_text=text,
        length=word_count(text),
    )


def _execute(
    jobs: Sequence[_Job],
    backend: BackendConfig,
    template: ChatTemplate,
    mode: GenerationMode,
) -> list[GenerationRecord]:
    client = GenerationClient(backend)

    def one(job: _Job) -> GenerationRecord:
        if backend.api_style == "completion":
            content = render(template, job.user_content, job.assistant_prefix or "")
            prefix = None
        else:
            content = job.user_content
            prefix = job.assistant_prefix
        try:
            raw = client.generate(content, prefix)
        except RequestFailed:
            return _finish(job, mode, template, None, BACKEND_FAILURE)
        return _finish(job, mode, template, raw, None)

    # executor.map preserves input order regardless of completion order
    with ThreadPoolExecutor(max_workers=backend.max_parallel) as pool:
        return list(pool.map(one, jobs))


def run_prompt_tlg(
    entries: Sequence[TlgEntry], backend: BackendConfig, template: ChatTemplate
) -> list[GenerationRecord]:
    """Baseline protocol: the constraint sentence is appended to the prompt."""
    jobs = [
        _Job(
            entry_id=e.id,
            target=e.target_length,
            user_content=augment_instruction(e.instruction, e.target_length),
        )
        for e in entries
    ]
    return _execute(jobs, backend, template, GenerationMode.PROMPT_TLG)


def run_forced_mlt(
    entries: Sequence[TlgEntry], backend: BackendConfig, template: ChatTemplate
) -> list[GenerationRecord]:
    """Forced-token protocol: the bare question is rendered and the target's
    token is appended at the assistant-generation point."""
    if backend.api_style == "chat" and not backend.supports_prefill:
        raise PrefillUnsupportedError(
            "forced-prefix generation needs a completion backend or a chat "
            "backend with supports_prefill"
        )
    jobs = [
        _Job(
            entry_id=e.id,
            target=e.target_length,
            user_content=e.instruction,
            assistant_prefix=mlt_for_target(e.target_length).surface,
        )
        for e in entries
    ]
    return _execute(jobs, backend, template, GenerationMode.FORCED_MLT)


def run_non_tlg(
    questions: Sequence[str], backend: BackendConfig, template: ChatTemplate
) -> list[GenerationRecord]:
    """Open protocol: bare questions; the model's own leading token (if any)
    determines the record's target."""
    jobs = [_Job(entry_id=str(i), target=None, user_content=q) for i, q in enumerate(questions)]
    return _execute(jobs, backend, template, GenerationMode.NON_TLG)


def run_multi_mlt(
    questions: Sequence[str], backend: BackendConfig, template: ChatTemplate
) -> list[GenerationRecord]:
    """Cross every question with all nine targets under forced semantics."""
    entries = [
        TlgEntry(id=f"{i}:{target.label}", instruction=q, target_length=target)
        for i, q in enumerate(questions)
        for target in ALL_TARGETS
    ]
    return run_forced_mlt(entries, backend, template)


def records_to_items(
    records: Iterable[GenerationRecord],
) -> list[tuple[TargetLength, int]]:
    """Scoreable (target, length) pairs: errored and target-less records
    are filtered out."""
    return [
        (r.target, r.length) for r in records if r.error is None and r.target is not None
    ]


def save_records(records: Iterable[GenerationRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "entry_id": r.entry_id,
                        "mode": r.mode.value,
                        "target": r.target.label if r.target else None,
                        "raw_text": r.raw_text,
                        "parsed_mlt": r.parsed_mlt.surface if r.parsed_mlt else None,
                        "response_text": r.response_text,
                        "length": r.length,
                        "error": r.error,
                    },
                    ensure_ascii=False,
                )
            )
            fh.write("\n")


def load_records(path: str | Path) -> list[GenerationRecord]:
    records: list[GenerationRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
                records.append(
                    GenerationRecord(
                        entry_id=data["entry_id"],
                        target=(
                            TargetLength.from_label(data["target"])
                            if data.get("target")
                            else None
                        ),
                        mode=GenerationMode(data["mode"]),
                        raw_text=data["raw_text"],
                        parsed_mlt=(
                            token_for_surface(data["parsed_mlt"])
                            if data.get("parsed_mlt")
                            else None
                        ),
                        response_text=data["response_text"],
                        length=data["length"],
                        error=data.get("error"),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DatasetFormatError(f"bad generation record: {exc}", lineno) from exc
    return records
