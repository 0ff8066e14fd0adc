"""Model construction for the toy flow.

``base_model_id`` is either a preset ("toy", ~10M parameters, or
"toy-mini" for fast tests) built fresh from a GPT-2 architecture config,
or a local checkpoint directory to continue from.
"""

from __future__ import annotations

from pathlib import Path

import torch
from transformers import GPT2Config, GPT2LMHeadModel

PRESETS = {
    "toy": dict(n_embd=320, n_layer=8, n_head=8, n_positions=256),
    "toy-mini": dict(n_embd=64, n_layer=2, n_head=2, n_positions=256),
}


def build_model(base_model_id: str, vocab_size: int, eos_token_id: int, seed: int | None = None):
    """Build or load the model; pass a seed for reproducible random init."""
    if base_model_id in PRESETS:
        if seed is not None:
            torch.manual_seed(seed)
        config = GPT2Config(
            vocab_size=vocab_size,
            bos_token_id=eos_token_id,
            eos_token_id=eos_token_id,
            **PRESETS[base_model_id],
        )
        return GPT2LMHeadModel(config)
    if Path(base_model_id).is_dir():
        return GPT2LMHeadModel.from_pretrained(base_model_id)
    raise ValueError(
        f"base_model_id must be a preset {sorted(PRESETS)} or a checkpoint dir, "
        f"got {base_model_id!r}"
    )


def parameter_count(model) -> int:
    return sum(p.numel() for p in model.parameters())
