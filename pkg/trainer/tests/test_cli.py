import json

from mlt_trainer.cli import main


def test_cli_end_to_end_mini(tmp_path, capsys):
    data_dir = tmp_path / "data"
    assert main(["synth", "--out-dir", str(data_dir), "--n", "64", "--seed", "5"]) == 0
    assert (data_dir / "dmlt.jsonl").exists()
    assert (data_dir / "template.json").exists()
    assert len((data_dir / "held_out_prompts.txt").read_text().splitlines()) == 100

    config = {
        "base_model_id": "toy-mini",
        "learning_rate": 1e-3,
        "epochs": 1,
        "per_device_batch": 8,
        "grad_accum": 1,
        "log_every": 2,
        "seed": 3,
        "vocab_size": 400,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))

    ckpt = tmp_path / "ckpt"
    assert main([
        "train",
        "--dmlt", str(data_dir / "dmlt.jsonl"),
        "--template", str(data_dir / "template.json"),
        "--config", str(config_path),
        "--out", str(ckpt),
    ]) == 0
    assert (ckpt / "loss_log.csv").exists()

    report_path = tmp_path / "verification.json"
    assert main([
        "verify",
        "--checkpoint", str(ckpt),
        "--prompts", str(data_dir / "held_out_prompts.txt"),
        "--template", str(data_dir / "template.json"),
        "--out", str(report_path),
    ]) == 0
    report = json.loads(report_path.read_text())
    assert set(report) == {"first_token_mlt_rate", "mean_lengths", "ordering_ok", "prompts_n"}
    out = capsys.readouterr().out
    assert "checkpoint written" in out


def test_cli_reports_corpus_errors(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"x": "q", "mlt": "[MLT:10]", "y": "too short"}\n')
    template = tmp_path / "template.json"
    template.write_text(json.dumps({
        "templates": [{
            "name": "t", "pre_user": "U: ", "post_user": "\nA:",
            "system_preamble": None, "eos_tokens": ["<|endoftext|>"],
        }]
    }))
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"base_model_id": "toy-mini", "vocab_size": 400}))
    ret = main([
        "train", "--dmlt", str(bad), "--template", str(template),
        "--config", str(config), "--out", str(tmp_path / "ckpt"),
    ])
    assert ret == 1
    assert "CORRUPT_TRIPLE" in capsys.readouterr().err
