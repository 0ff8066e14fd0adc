import json

import pytest

from tlgkit.cli import main
from tlgkit.mockserver import MockKind, MockProfile, serve
from tlgkit.lengths import token_for_surface


@pytest.fixture()
def questions_file(tmp_path):
    path = tmp_path / "questions.txt"
    path.write_text("".join(f"Please explain concept {i}\n" for i in range(200)))
    return path


def write_backend(tmp_path, server, **extra):
    config = {
        "endpoint_url": server.base_url,
        "api_style": "completion",
        "model_name": "mock",
        "max_parallel": 8,
        "retry_limit": 2,
        "retry_backoff": 0.01,
        "timeout": 10.0,
    }
    config.update(extra)
    path = tmp_path / "backend.json"
    path.write_text(json.dumps(config))
    return path


def run_cli(*args):
    assert main([str(a) for a in args]) == 0


def test_full_pipeline_via_cli(tmp_path, questions_file, capsys):
    dataset = tmp_path / "tlg.jsonl"
    run_cli("build-tlg", "--questions", questions_file, "--n", 45, "--seed", 42,
            "--out", dataset)

    with serve(MockProfile(kind=MockKind.EXACT)) as server:
        backend = write_backend(tmp_path, server)
        records = tmp_path / "records.jsonl"
        run_cli("run", "--mode", "prompt", "--dataset", dataset,
                "--backend", backend, "--template", "deepseek", "--out", records)

        scores = tmp_path / "scores.json"
        csv_path = tmp_path / "scores.csv"
        run_cli("score", "--records", records, "--out", scores, "--csv", csv_path)

        table = tmp_path / "report.txt"
        run_cli("report", "--scores", scores, "--baseline", scores,
                "--format", "text", "--out", table, "--label", "mock")

    data = json.loads(scores.read_text())
    assert data["all_level"]["pm"] == 100.00
    assert csv_path.read_text().splitlines()[0] == "target,level,n,pm,fm"
    text = table.read_text()
    assert "mock" in text and "(+0.00)" in text
    out = capsys.readouterr().out
    assert "all-level PM 100.00" in out


def test_cli_multi_and_distribution(tmp_path, questions_file):
    with serve(MockProfile(kind=MockKind.MLT_AWARE)) as server:
        backend = write_backend(tmp_path, server)
        records = tmp_path / "multi.jsonl"
        run_cli("run", "--mode", "multi", "--dataset", questions_file,
                "--backend", backend, "--template", "mistral", "--out", records)
        assert len(records.read_text().splitlines()) == 1800

        table = tmp_path / "targets.csv"
        run_cli("target-table", "--records", records, "--format", "csv", "--out", table)
        header = table.read_text().splitlines()[0]
        assert header == "model,10,30,50,80,150,300,500,700,>800,avg_fm"

    token = token_for_surface("[MLT:300]")
    with serve(MockProfile(kind=MockKind.SELF_MLT, fixed_mlt=token)) as server:
        backend = write_backend(tmp_path, server)
        records = tmp_path / "non_tlg.jsonl"
        run_cli("run", "--mode", "non-tlg", "--dataset", questions_file,
                "--backend", backend, "--template", "mistral", "--out", records)
        dist = tmp_path / "dist.csv"
        run_cli("mlt-dist", "--records", records, "--out", dist)
        assert "[MLT:300],1.0000" in dist.read_text()


def test_cli_build_dmlt(tmp_path):
    source = tmp_path / "pairs.jsonl"
    lines = []
    for i in range(40):
        y = " ".join(["word"] * (12 if i % 2 else 20))  # 20 falls in a gap
        lines.append(json.dumps({"input": f"q{i}", "output": y}))
    source.write_text("\n".join(lines) + "\n")

    out = tmp_path / "dmlt.jsonl"
    hist = tmp_path / "hist.json"
    run_cli("build-dmlt", "--in", source, "--cap", 15, "--seed", 0,
            "--out", out, "--histogram", hist)
    data = json.loads(hist.read_text())
    assert data["[MLT:10]"] == 15  # 20 matching pairs, capped at 15
    assert data["total"] == 15


def test_cli_reports_tool_errors(tmp_path, questions_file, capsys):
    ret = main([
        "build-tlg", "--questions", str(questions_file), "--n", "9999",
        "--seed", "1", "--out", str(tmp_path / "x.jsonl"),
    ])
    assert ret == 1
    assert "INSUFFICIENT_SOURCE" in capsys.readouterr().err


def test_cli_rerun_is_byte_identical(tmp_path, questions_file):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (a, b):
        run_cli("build-tlg", "--questions", questions_file, "--n", 90,
                "--seed", 7, "--out", out)
    assert a.read_bytes() == b.read_bytes()
