"""Synthetic length-correlated corpus for toy-scale runs.

Responses are cycles over a small filler vocabulary with exactly
center-many words, so the end-of-sequence position is a sharp function of
the length token and greedy decoding reproduces it. Instructions carry no
length hint: the token is the model's only length cue, which is what the
forced-token verification needs. The output file uses the triples format
the real corpus builder emits.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from .templates import ChatTemplate, save_template
from .tokenizing import EOS_TOKEN

FILLERS = (
    "alder ash aspen bay beech birch cedar cherry chestnut cypress elm fig "
    "fir hazel hemlock hickory holly juniper larch laurel linden locust "
    "magnolia maple mulberry oak olive palm pear pine plane poplar quince "
    "redwood rowan spruce sycamore tamarack teak walnut willow yew"
).split()

# band -> share of the corpus; long responses are rarer to keep toy runs fast
BAND_WEIGHTS = ((10, 0.35), (30, 0.25), (80, 0.25), (150, 0.15))

TOY_TEMPLATE = ChatTemplate(
    name="toy",
    pre_user="User: ",
    post_user="\nAssistant:",
    eos_tokens=(EOS_TOKEN,),
    system_preamble=None,
)


def filler_text(n_words: int, rng: random.Random) -> str:
    start = rng.randrange(len(FILLERS))
    return " ".join(FILLERS[(start + i) % len(FILLERS)] for i in range(n_words))


def make_instruction(rng: random.Random) -> str:
    # three topic words keep prompts unique but token-length constant
    topics = " ".join(rng.choice(FILLERS) for _ in range(3))
    return f"write a piece about {topics}"


def make_triples(n: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    bands: list[int] = []
    for band, weight in BAND_WEIGHTS:
        bands.extend([band] * int(n * weight))
    while len(bands) < n:
        bands.append(BAND_WEIGHTS[0][0])
    rng.shuffle(bands)
    return [
        {
            "x": make_instruction(rng),
            "mlt": f"[MLT:{band}]",
            "y": filler_text(band, rng),
        }
        for band in bands[:n]
    ]


def make_held_out_prompts(n: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    return [make_instruction(rng) for _ in range(n)]


def write_synthetic_dataset(out_dir: str | Path, n: int = 2000, seed: int = 42) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "dmlt.jsonl", "w", encoding="utf-8") as fh:
        for record in make_triples(n, seed):
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
    with open(out_dir / "held_out_prompts.txt", "w", encoding="utf-8") as fh:
        for prompt in make_held_out_prompts(100, seed + 1):
            fh.write(prompt + "\n")
    save_template(TOY_TEMPLATE, out_dir / "template.json")
