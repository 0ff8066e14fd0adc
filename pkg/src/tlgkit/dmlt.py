"""Construction of the length-token fine-tuning corpus.

Raw (input, output) pairs are matched to a length token by the word count
of the output; matched pairs are reformatted as (x, mlt, y) triples, with a
per-token cap keeping the corpus balanced. Pairs that match no token or
arrive after their token's cap is full are dropped, which is not an error.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import DatasetFormatError, NoAnswersError
from .lengths import MLT_TOKENS, MetaLengthToken, mlt_for_length, token_for_surface
from .metrics import word_count
from .templates import ChatTemplate, render

__all__ = [
    "RawPair",
    "MltTriple",
    "DEFAULT_CAP",
    "build_dmlt",
    "select_longest_answer",
    "mlt_histogram",
    "format_training_example",
    "load_raw_pairs",
    "save_triples",
    "load_triples",
    "save_histogram",
]

DEFAULT_CAP = 20_000


@dataclass(frozen=True)
class RawPair:
    x: str
    y: str
    source: str = ""

    def __post_init__(self) -> None:
        if not self.x or not self.y:
            raise ValueError("raw pair fields must be non-empty")


@dataclass(frozen=True)
class MltTriple:
    x: str
    mlt: MetaLengthToken
    y: str


def select_longest_answer(answers: Sequence[str]) -> str:
    """The answer with the highest word count; ties keep the first."""
    if not answers:
        raise NoAnswersError("no answers to select from")
    return max(answers, key=word_count)


def build_dmlt(
    pairs: Iterable[RawPair],
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    shuffle: bool = False,
) -> tuple[list[MltTriple], dict[MetaLengthToken, int]]:
    """Match pairs to length tokens and cap each token's count.

    Pairs are consumed in arrival order (first-come kept); with
    ``shuffle=True`` the input is materialized and shuffled with ``seed``
    before capping. Returns the emitted triples and the full nine-token
    histogram.
    """
    if cap <= 0:
        raise ValueError(f"cap must be > 0, got {cap}")
    if shuffle:
        materialized = list(pairs)
        random.Random(seed).shuffle(materialized)
        pairs = materialized

    histogram: dict[MetaLengthToken, int] = {token: 0 for token in MLT_TOKENS}
    triples: list[MltTriple] = []
    for pair in pairs:
        token = mlt_for_length(word_count(pair.y))
        if token is None or histogram[token] >= cap:
            continue
        histogram[token] += 1
        triples.append(MltTriple(x=pair.x, mlt=token, y=pair.y))
    return triples, histogram


def mlt_histogram(triples: Iterable[MltTriple]) -> dict[MetaLengthToken, int]:
    """Per-token counts over all nine tokens (zeros included)."""
    histogram: dict[MetaLengthToken, int] = {token: 0 for token in MLT_TOKENS}
    for triple in triples:
        histogram[triple.mlt] += 1
    return histogram


def format_training_example(triple: MltTriple, template: ChatTemplate) -> str:
    """Render one training sequence: prompt, then token glued directly to
    the response, then the template's EOS token."""
    prompt = render(template, triple.x)
    return f"{prompt}{triple.mlt.surface}{triple.y}{template.eos}"


def load_raw_pairs(paths: Sequence[str | Path]) -> Iterator[RawPair]:
    """Stream raw pairs from JSON-lines files, in the given file order.

    Each record carries "input" plus either "output" (string) or "outputs"
    (list of strings, reduced with select_longest_answer), and an optional
    "source" (defaulted from the file stem). Records with an empty input or
    output are skipped. Malformed lines raise with their line number.
    """
    for path in paths:
        path = Path(path)
        default_source = path.stem
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DatasetFormatError(
                        f"{path}: invalid JSON: {exc.msg}", lineno
                    ) from exc
                if not isinstance(record, dict) or "input" not in record:
                    raise DatasetFormatError(f"{path}: record needs an 'input'", lineno)
                if "outputs" in record:
                    answers = [a for a in record["outputs"] if a]
                    output = select_longest_answer(answers) if answers else ""
                elif "output" in record:
                    output = record["output"]
                else:
                    raise DatasetFormatError(
                        f"{path}: record needs 'output' or 'outputs'", lineno
                    )
                x = record["input"]
                if not x or not output:
                    continue
                yield RawPair(x=x, y=output, source=record.get("source", default_source))


def save_triples(triples: Iterable[MltTriple], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for triple in triples:
            fh.write(
                json.dumps(
                    {"x": triple.x, "mlt": triple.mlt.surface, "y": triple.y},
                    ensure_ascii=False,
                )
            )
            fh.write("\n")


def load_triples(path: str | Path) -> list[MltTriple]:
    triples: list[MltTriple] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                token = token_for_surface(record["mlt"])
                if token is None:
                    raise DatasetFormatError(
                        f"unknown token surface {record['mlt']!r}", lineno
                    )
                triples.append(MltTriple(x=record["x"], mlt=token, y=record["y"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DatasetFormatError(f"bad triple record: {exc}", lineno) from exc
    return triples


def save_histogram(histogram: dict[MetaLengthToken, int], path: str | Path) -> None:
    data = {token.surface: histogram.get(token, 0) for token in MLT_TOKENS}
    data["total"] = sum(histogram.values())
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
