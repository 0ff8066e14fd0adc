"""Corpus loading and tokenization with prompt masking.

Each triples-file record {"x", "mlt", "y"} becomes one training sequence

    pre_user + x + post_user + mlt + y + eos

with labels masked to -100 over the prompt span, so the objective covers
exactly the assistant span (mlt + y + eos): the model maximizes
log p(mlt, y | x). Sequences longer than the model window are truncated
from the right; the length token itself is never truncated (a prompt that
leaves no room for it is an error). An alternative, training on the full
sequence including the prompt, would optimize a different objective and is
deliberately not offered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from torch.utils.data import Dataset

from .errors import CorruptTripleError, EmptyCorpusError
from .templates import ChatTemplate
from .tokens import MLT_SURFACES, in_band, word_count

LABEL_IGNORE = -100


@dataclass(frozen=True)
class Triple:
    x: str
    mlt: str
    y: str


def load_triples(path: str | Path) -> list[Triple]:
    """Read a triples file, validating each record's length invariant."""
    triples: list[Triple] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            triple = Triple(x=record["x"], mlt=record["mlt"], y=record["y"])
            if triple.mlt not in MLT_SURFACES:
                raise CorruptTripleError(
                    f"line {lineno}: unknown token surface {triple.mlt!r}"
                )
            if not in_band(triple.mlt, word_count(triple.y)):
                raise CorruptTripleError(
                    f"line {lineno}: response has {word_count(triple.y)} words, "
                    f"outside the {triple.mlt} band"
                )
            triples.append(triple)
    if not triples:
        raise EmptyCorpusError(f"no triples in {path}")
    return triples


def render_text(triple: Triple, template: ChatTemplate) -> str:
    return f"{template.prompt(triple.x)}{triple.mlt}{triple.y}{template.eos}"


@dataclass
class Example:
    input_ids: list[int]
    labels: list[int]

    def __len__(self) -> int:
        return len(self.input_ids)


class MltCorpus(Dataset):
    """Tokenized corpus; indexable by example."""

    def __init__(self, examples: list[Example]):
        if not examples:
            raise EmptyCorpusError("tokenized corpus is empty")
        self.examples = examples

    def __len__(self) -> int:
        return len(self.examples)

    def __getitem__(self, index: int) -> Example:
        return self.examples[index]


def prepare_corpus(
    triples: list[Triple],
    tokenizer,
    template: ChatTemplate,
    max_seq_len: int = 256,
) -> MltCorpus:
    examples = []
    for triple in triples:
        prompt_ids = tokenizer.encode(template.prompt(triple.x), add_special_tokens=False)
        full_ids = tokenizer.encode(render_text(triple, template), add_special_tokens=False)
        # special-token segmentation keeps the prompt a stable prefix
        assert full_ids[: len(prompt_ids)] == prompt_ids
        if len(prompt_ids) + 1 > max_seq_len:
            raise CorruptTripleError(
                f"prompt occupies the whole window ({len(prompt_ids)} tokens), "
                "the length token would be truncated"
            )
        full_ids = full_ids[:max_seq_len]
        labels = [LABEL_IGNORE] * len(prompt_ids) + full_ids[len(prompt_ids):]
        examples.append(Example(input_ids=full_ids, labels=labels))
    return MltCorpus(examples)


def collate(batch: list[Example], pad_token_id: int) -> dict[str, torch.Tensor]:
    width = max(len(e) for e in batch)
    input_ids = torch.full((len(batch), width), pad_token_id, dtype=torch.long)
    labels = torch.full((len(batch), width), LABEL_IGNORE, dtype=torch.long)
    attention = torch.zeros((len(batch), width), dtype=torch.long)
    for i, example in enumerate(batch):
        n = len(example)
        input_ids[i, :n] = torch.tensor(example.input_ids, dtype=torch.long)
        labels[i, :n] = torch.tensor(example.labels, dtype=torch.long)
        attention[i, :n] = 1
    return {"input_ids": input_ids, "labels": labels, "attention_mask": attention}
