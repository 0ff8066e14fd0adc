"""Secondary acceptance: one full toy-scale run, then the stated checks.

The training fixture is module-scoped so the ~10M-parameter model trains
once; expect several minutes on CPU. Run with ``-s`` to see the
per-criterion lines.
"""

import re
from pathlib import Path

import pytest

from mlt_trainer.corpus import load_triples, prepare_corpus, render_text
from mlt_trainer.modeling import build_model, parameter_count
from mlt_trainer.synth import TOY_TEMPLATE, make_held_out_prompts, write_synthetic_dataset
from mlt_trainer.tokenizing import extend_vocab, train_base_tokenizer
from mlt_trainer.tokens import MLT_SURFACES
from mlt_trainer.training import TrainConfig, train
from mlt_trainer.verification import load_checkpoint, verify_toy

CONFIG_PATH = Path(__file__).parent.parent / "configs" / "toy.json"
SURFACE_FORMAT = re.compile(r"^\[MLT:(10|30|50|80|150|300|500|700|>800)\]$")


@pytest.fixture(scope="module")
def toy_run(tmp_path_factory):
    workdir = tmp_path_factory.mktemp("toy_run")
    write_synthetic_dataset(workdir, n=2000, seed=42)
    triples = load_triples(workdir / "dmlt.jsonl")
    template = TOY_TEMPLATE

    config = TrainConfig.from_file(CONFIG_PATH)
    base_texts = (render_text(t, template).replace(t.mlt, "", 1) for t in triples)
    tokenizer = train_base_tokenizer(base_texts, vocab_size=config.vocab_size)
    model = build_model(
        config.base_model_id, len(tokenizer), tokenizer.eos_token_id, seed=config.seed
    )
    model, tokenizer = extend_vocab(model, tokenizer)

    corpus = prepare_corpus(triples, tokenizer, template, max_seq_len=config.max_seq_len)
    checkpoint, log = train(config, corpus, model, tokenizer, workdir / "ckpt")
    prompts = make_held_out_prompts(100, seed=43)
    report = verify_toy(checkpoint, prompts, template, forced_prompts_per_token=6)
    return {
        "model": model,
        "checkpoint": checkpoint,
        "log": log,
        "report": report,
    }


def test_toy_model_scale(toy_run):
    params = parameter_count(toy_run["model"])
    assert 8e6 < params < 12e6
    print(f"[PASS] toy model has {params / 1e6:.1f}M parameters")


def test_final_loss_below_half_of_initial(toy_run):
    log = toy_run["log"]
    assert log[-1].loss < 0.5 * log[0].loss
    print(f"[PASS] loss {log[0].loss:.3f} -> {log[-1].loss:.3f} (< 0.5x)")


def test_first_generated_token_is_a_length_token(toy_run):
    report = toy_run["report"]
    assert report.prompts_n == 100
    assert report.first_token_mlt_rate >= 0.95
    print(f"[PASS] first-token rate {report.first_token_mlt_rate:.2f} on 100 held-out prompts")


def test_forced_token_mean_length_ordering(toy_run):
    means = toy_run["report"].mean_lengths
    assert means["[MLT:10]"] < means["[MLT:80]"] < means["[MLT:150]"]
    print(
        "[PASS] mean lengths "
        f"{means['[MLT:10]']:.1f} < {means['[MLT:80]']:.1f} < {means['[MLT:150]']:.1f}"
    )


def test_checkpoint_vocabulary_round_trip(toy_run):
    _, tokenizer = load_checkpoint(toy_run["checkpoint"])
    for surface in MLT_SURFACES:
        ids = tokenizer.encode(surface, add_special_tokens=False)
        assert len(ids) == 1
        assert tokenizer.decode(ids) == surface
        # the surfaces are the wire format the benchmark pipeline parses
        assert SURFACE_FORMAT.match(surface)
    print("[PASS] all nine surfaces are single tokens and decode exactly")
