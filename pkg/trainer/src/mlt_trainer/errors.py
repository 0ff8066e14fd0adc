from __future__ import annotations


class TrainerError(Exception):
    code = "TRAINER_ERROR"


class VocabCollisionError(TrainerError):
    """A token surface already resolves to a single foreign vocabulary id."""

    code = "VOCAB_COLLISION"


class CorruptTripleError(TrainerError):
    """A corpus triple's response length falls outside its token's band."""

    code = "CORRUPT_TRIPLE"


class EmptyCorpusError(TrainerError):
    code = "EMPTY_CORPUS"


class DivergenceError(TrainerError):
    """Training loss became non-finite."""

    code = "DIVERGENCE"
