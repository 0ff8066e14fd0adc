"""Benchmark toolkit for length-targeted text generation.

Builds evaluation datasets with per-item target lengths, drives
chat/completions backends over them in three protocols (prompt-stated
constraint, forced length token, self-generated length token), scores the
outputs with precise and flexible word-count matching, and renders the
comparison tables. A deterministic mock backend makes the whole pipeline
testable offline.
"""

from .client import BackendConfig
from .dataset import TlgEntry, augment_instruction, build_tlg, load_tlg, save_tlg
from .dmlt import (
    MltTriple,
    RawPair,
    build_dmlt,
    format_training_example,
    mlt_histogram,
    select_longest_answer,
)
from .lengths import (
    Level,
    MatchRange,
    MetaLengthToken,
    TargetLength,
    fm_range,
    level_of,
    mlt_for_length,
    mlt_for_target,
    parse_leading_mlt,
    pm_range,
)
from .metrics import ScoreReport, match_flexible, match_precise, score, word_count
from .orchestrator import (
    GenerationMode,
    GenerationRecord,
    run_forced_mlt,
    run_multi_mlt,
    run_non_tlg,
    run_prompt_tlg,
)
from .templates import ChatTemplate, get_template, render, strip_eos

__version__ = "0.1.0"
