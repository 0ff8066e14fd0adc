"""Base tokenizer training and vocabulary extension.

The toy flow has no pretrained base, so a byte-level BPE is trained on the
corpus text first (with the length-token surfaces removed, so they stay
multi-token until extension). Extension then registers the nine surfaces
as special tokens and widens the model embedding matrix, initializing the
new rows to the mean of the existing ones.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import torch
from tokenizers import Tokenizer, decoders, models, pre_tokenizers, trainers
from transformers import PreTrainedTokenizerFast

from .errors import VocabCollisionError
from .tokens import MLT_SURFACES

EOS_TOKEN = "<|endoftext|>"
PAD_TOKEN = "<|pad|>"


def train_base_tokenizer(texts: Iterable[str], vocab_size: int = 1000) -> PreTrainedTokenizerFast:
    """Train a byte-level BPE on raw corpus text (no length tokens)."""
    tokenizer = Tokenizer(models.BPE(unk_token=None))
    tokenizer.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tokenizer.decoder = decoders.ByteLevel()
    trainer = trainers.BpeTrainer(
        vocab_size=vocab_size,
        special_tokens=[EOS_TOKEN, PAD_TOKEN],
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
    )
    tokenizer.train_from_iterator(texts, trainer)
    return PreTrainedTokenizerFast(
        tokenizer_object=tokenizer, eos_token=EOS_TOKEN, pad_token=PAD_TOKEN
    )


def extend_vocab(
    model,
    tokenizer: PreTrainedTokenizerFast,
    surfaces: Sequence[str] = MLT_SURFACES,
):
    """Add the token surfaces as single-id specials and widen embeddings.

    Idempotent: surfaces already registered by a previous call are left
    alone. A surface that resolves to a single id without being one of our
    added tokens collides with the base vocabulary and is refused.
    """
    added_vocab = tokenizer.get_added_vocab()
    missing = []
    for surface in surfaces:
        if surface in added_vocab:
            continue
        if len(tokenizer.encode(surface, add_special_tokens=False)) == 1:
            raise VocabCollisionError(
                f"surface {surface!r} already tokenizes to a single id"
            )
        missing.append(surface)
    if not missing:
        return model, tokenizer

    # the extra-specials list is owned by this function: pass the full set
    # so re-invocation replaces it with an identical list
    tokenizer.add_special_tokens({"additional_special_tokens": list(surfaces)})

    old_rows = model.get_input_embeddings().weight.shape[0]
    model.resize_token_embeddings(len(tokenizer), mean_resizing=False)
    with torch.no_grad():
        embeddings = model.get_input_embeddings().weight
        embeddings[old_rows:] = embeddings[:old_rows].mean(dim=0)
    return model, tokenizer


def mlt_token_ids(tokenizer: PreTrainedTokenizerFast) -> set[int]:
    ids = set()
    for surface in MLT_SURFACES:
        encoded = tokenizer.encode(surface, add_special_tokens=False)
        if len(encoded) == 1:
            ids.add(encoded[0])
    return ids
