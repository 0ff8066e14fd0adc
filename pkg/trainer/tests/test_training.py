import pytest

from mlt_trainer.corpus import Triple, prepare_corpus, render_text
from mlt_trainer.modeling import build_model, parameter_count
from mlt_trainer.synth import TOY_TEMPLATE, make_triples
from mlt_trainer.tokenizing import extend_vocab, train_base_tokenizer
from mlt_trainer.training import TrainConfig, train


def small_setup(n=64, seed=0, vocab=400):
    triples = [Triple(**t) for t in make_triples(n, seed=seed)]
    texts = [render_text(t, TOY_TEMPLATE).replace(t.mlt, "", 1) for t in triples]
    tokenizer = train_base_tokenizer(texts, vocab_size=vocab)
    model = build_model("toy-mini", len(tokenizer), tokenizer.eos_token_id, seed=seed)
    model, tokenizer = extend_vocab(model, tokenizer)
    corpus = prepare_corpus(triples, tokenizer, TOY_TEMPLATE)
    return model, tokenizer, corpus


def test_config_defaults_match_the_recipe():
    config = TrainConfig()
    assert config.learning_rate == 2e-5
    assert config.scheduler == "cosine"
    assert config.warmup_ratio == 0.05
    assert config.epochs == 3
    assert config.per_device_batch == 4
    assert config.grad_accum == 8
    assert config.log_every == 5


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(warmup_ratio=1.0)
    with pytest.raises(ValueError):
        TrainConfig(scheduler="linear")


def test_loss_decreases_on_smoke_run(tmp_path):
    model, tokenizer, corpus = small_setup()
    config = TrainConfig(
        base_model_id="toy-mini",
        learning_rate=1e-3,
        epochs=2,
        per_device_batch=8,
        grad_accum=1,
        log_every=2,
        seed=7,
        vocab_size=400,
    )
    ckpt, log = train(config, corpus, model, tokenizer, tmp_path / "ckpt")
    assert log[-1].loss < log[0].loss
    assert (ckpt / "loss_log.csv").exists()
    assert (ckpt / "train_config.json").exists()
    header = (ckpt / "loss_log.csv").read_text().splitlines()[0]
    assert header == "step,epoch,loss,lr"


def test_fixed_seed_runs_produce_identical_loss_logs(tmp_path):
    logs = []
    for name in ("a", "b"):
        model, tokenizer, corpus = small_setup()
        config = TrainConfig(
            base_model_id="toy-mini",
            learning_rate=5e-4,
            epochs=1,
            per_device_batch=8,
            grad_accum=2,
            log_every=1,
            seed=13,
            vocab_size=400,
        )
        _, log = train(config, corpus, model, tokenizer, tmp_path / name)
        logs.append(log)
    assert logs[0] == logs[1]
    assert (tmp_path / "a" / "loss_log.csv").read_bytes() == (
        tmp_path / "b" / "loss_log.csv"
    ).read_bytes()


def test_grad_accum_changes_step_count(tmp_path):
    model, tokenizer, corpus = small_setup(n=32)
    config = TrainConfig(
        base_model_id="toy-mini",
        epochs=1,
        per_device_batch=4,
        grad_accum=4,
        log_every=1,
        vocab_size=400,
    )
    _, log = train(config, corpus, model, tokenizer, tmp_path / "ckpt")
    # 32 examples / batch 4 = 8 micro-batches -> 2 optimizer steps
    assert log[-1].step == 2


def test_toy_preset_parameter_count():
    model, tokenizer, _ = small_setup(n=16)
    del model
    toy = build_model("toy", len(tokenizer), tokenizer.eos_token_id)
    assert 8e6 < parameter_count(toy) < 12e6
