"""Checkpoint verification on held-out prompts.

Three measurements: the fraction of generations whose first emitted token
is a length-token id, the mean stripped-response word count under each
forced token, and the strict ordering of those means for the 10/80/150
bands.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import GPT2LMHeadModel, PreTrainedTokenizerFast

from .templates import ChatTemplate
from .tokenizing import mlt_token_ids
from .tokens import strip_leading_surfaces, word_count

ORDERING_SURFACES = ("[MLT:10]", "[MLT:80]", "[MLT:150]")


@dataclass(frozen=True)
class VerificationReport:
    first_token_mlt_rate: float
    mean_lengths: dict[str, float]
    ordering_ok: bool
    prompts_n: int

    def to_json_dict(self) -> dict:
        return {
            "first_token_mlt_rate": self.first_token_mlt_rate,
            "mean_lengths": self.mean_lengths,
            "ordering_ok": self.ordering_ok,
            "prompts_n": self.prompts_n,
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")


def load_checkpoint(path: str | Path):
    model = GPT2LMHeadModel.from_pretrained(path)
    tokenizer = PreTrainedTokenizerFast.from_pretrained(path)
    model.eval()
    return model, tokenizer


@torch.no_grad()
def _first_token(model, tokenizer, prompt: str) -> int:
    ids = tokenizer.encode(prompt, add_special_tokens=False)
    logits = model(torch.tensor([ids])).logits
    return int(logits[0, -1].argmax())


@torch.no_grad()
def _generate(model, tokenizer, prompt: str, max_new_tokens: int) -> str:
    ids = tokenizer.encode(prompt, add_special_tokens=False)
    output = model.generate(
        torch.tensor([ids]),
        max_new_tokens=max_new_tokens,
        do_sample=False,
        eos_token_id=tokenizer.eos_token_id,
        pad_token_id=tokenizer.pad_token_id,
    )
    continuation = output[0][len(ids):]
    return tokenizer.decode(continuation, skip_special_tokens=True)


def verify_toy(
    checkpoint: str | Path,
    held_out_prompts: list[str],
    template: ChatTemplate,
    forced_prompts_per_token: int = 6,
    max_new_tokens: int = 200,
) -> VerificationReport:
    model, tokenizer = load_checkpoint(checkpoint)
    token_ids = mlt_token_ids(tokenizer)

    hits = sum(
        1
        for prompt in held_out_prompts
        if _first_token(model, tokenizer, template.prompt(prompt)) in token_ids
    )

    mean_lengths: dict[str, float] = {}
    probes = held_out_prompts[:forced_prompts_per_token]
    for surface in ORDERING_SURFACES:
        lengths = []
        for prompt in probes:
            text = _generate(
                model, tokenizer, template.prompt(prompt) + surface, max_new_tokens
            )
            lengths.append(word_count(strip_leading_surfaces(text)))
        mean_lengths[surface] = sum(lengths) / len(lengths)

    means = [mean_lengths[s] for s in ORDERING_SURFACES]
    return VerificationReport(
        first_token_mlt_rate=hits / len(held_out_prompts),
        mean_lengths=mean_lengths,
        ordering_ok=means[0] < means[1] < means[2],
        prompts_n=len(held_out_prompts),
    )
