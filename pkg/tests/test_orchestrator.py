import pytest

from tlgkit.client import BackendConfig
from tlgkit.dataset import TlgEntry, build_tlg
from tlgkit.errors import (
    BackendConfigError,
    EmptyEvaluationError,
    PrefillUnsupportedError,
)
from tlgkit.lengths import ALL_TARGETS, TargetLength, token_for_surface
from tlgkit.metrics import score
from tlgkit.mockserver import MockKind, MockProfile, serve
from tlgkit.orchestrator import (
    BACKEND_FAILURE,
    GenerationMode,
    load_records,
    records_to_items,
    run_forced_mlt,
    run_multi_mlt,
    run_non_tlg,
    run_prompt_tlg,
    save_records,
)
from tlgkit.templates import get_template

TEMPLATE = get_template("deepseek")
QUESTIONS = [f"Please describe topic {i}" for i in range(40)]


def backend_for(server, **overrides):
    defaults = dict(
        endpoint_url=server.base_url,
        api_style="completion",
        model_name="mock",
        max_parallel=8,
        retry_limit=2,
        retry_backoff=0.01,
        timeout=10.0,
    )
    defaults.update(overrides)
    return BackendConfig(**defaults)


@pytest.fixture(scope="module")
def exact_server():
    with serve(MockProfile(kind=MockKind.EXACT)) as server:
        yield server


@pytest.fixture(scope="module")
def mlt_server():
    with serve(MockProfile(kind=MockKind.MLT_AWARE)) as server:
        yield server


def test_prompt_tlg_all_precise(exact_server):
    entries = build_tlg(QUESTIONS, n=36, seed=42)
    records = run_prompt_tlg(entries, backend_for(exact_server), TEMPLATE)
    assert [r.entry_id for r in records] == [e.id for e in entries]
    assert all(r.error is None for r in records)
    assert all(r.mode is GenerationMode.PROMPT_TLG for r in records)
    report = score(records_to_items(records))
    assert report.all_level.pm == 100.00
    assert report.all_level.fm == 100.00


def test_prompt_tlg_open_ended_target(exact_server):
    entries = [TlgEntry(id="0", instruction="Write", target_length=TargetLength.OVER_800)]
    (record,) = run_prompt_tlg(entries, backend_for(exact_server), TEMPLATE)
    # the mock answers 850 words only when the prompt says "more than 800"
    assert record.length == 850


def test_record_lengths_are_word_counts(exact_server):
    entries = build_tlg(QUESTIONS, n=10, seed=1)
    records = run_prompt_tlg(entries, backend_for(exact_server), TEMPLATE)
    for record in records:
        assert record.length == len(record.response_text.split())


def test_forced_mlt_hits_every_finite_target(mlt_server):
    entries = [
        TlgEntry(id=t.label, instruction="Describe a forest", target_length=t)
        for t in ALL_TARGETS
    ]
    records = run_forced_mlt(entries, backend_for(mlt_server), TEMPLATE)
    report = score(records_to_items(records))
    for target in ALL_TARGETS:
        assert report.per_target[target].pm == 100.00
    for record in records:
        assert record.parsed_mlt is token_for_surface(f"[MLT:{record.entry_id}]")


def test_forced_mlt_over_chat_prefill(mlt_server):
    entries = [TlgEntry(id="0", instruction="Hi", target_length=TargetLength.W300)]
    backend = backend_for(mlt_server, api_style="chat", supports_prefill=True)
    (record,) = run_forced_mlt(entries, backend, TEMPLATE)
    assert record.length == 300
    assert record.parsed_mlt is token_for_surface("[MLT:300]")


def test_forced_mlt_requires_prefill_capability(mlt_server):
    entries = [TlgEntry(id="0", instruction="Hi", target_length=TargetLength.W300)]
    backend = backend_for(mlt_server, api_style="chat", supports_prefill=False)
    with pytest.raises(PrefillUnsupportedError):
        run_forced_mlt(entries, backend, TEMPLATE)


def test_non_tlg_with_self_mlt():
    token = token_for_surface("[MLT:150]")
    with serve(MockProfile(kind=MockKind.SELF_MLT, fixed_mlt=token)) as server:
        records = run_non_tlg(QUESTIONS[:12], backend_for(server), TEMPLATE)
    assert all(r.parsed_mlt is token for r in records)
    assert all(r.target is TargetLength.W150 for r in records)
    report = score(records_to_items(records))
    assert report.all_level.fm == 100.00
    # stripping is complete: no token surface survives in response text
    for record in records:
        assert "[MLT:" not in record.response_text


def test_non_tlg_without_mlt_is_unscoreable():
    with serve(MockProfile(kind=MockKind.NO_MLT)) as server:
        records = run_non_tlg(QUESTIONS[:5], backend_for(server), TEMPLATE)
    assert all(r.parsed_mlt is None and r.target is None for r in records)
    assert records_to_items(records) == []
    with pytest.raises(EmptyEvaluationError):
        score(records_to_items(records))


def test_multi_mlt_cross_product(mlt_server):
    records = run_multi_mlt(QUESTIONS[:4], backend_for(mlt_server), TEMPLATE)
    assert len(records) == 36
    assert records[0].entry_id == "0:10"
    assert records[9].entry_id == "1:10"
    assert [r.target for r in records[:9]] == list(ALL_TARGETS)


def test_single_question_multi_mlt(mlt_server):
    records = run_multi_mlt(QUESTIONS[:1], backend_for(mlt_server), TEMPLATE)
    assert len(records) == 9


def test_backend_down_marks_every_record():
    backend = BackendConfig(
        endpoint_url="http://127.0.0.1:9",  # discard port, nothing listens
        api_style="completion",
        retry_limit=2,
        retry_backoff=0.01,
        timeout=2.0,
    )
    entries = build_tlg(QUESTIONS, n=4, seed=0)
    records = run_prompt_tlg(entries, backend, TEMPLATE)
    assert all(r.error == BACKEND_FAILURE for r in records)
    assert records_to_items(records) == []
    with pytest.raises(EmptyEvaluationError):
        score(records_to_items(records))


def test_invalid_endpoint_is_run_level():
    with pytest.raises(BackendConfigError):
        BackendConfig(endpoint_url="not-a-url")


def test_serial_rerun_is_byte_identical(exact_server, tmp_path):
    entries = build_tlg(QUESTIONS, n=12, seed=3)
    backend = backend_for(exact_server, max_parallel=1)
    for name in ("a.jsonl", "b.jsonl"):
        save_records(run_prompt_tlg(entries, backend, TEMPLATE), tmp_path / name)
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def test_parallel_run_keeps_input_order(exact_server):
    entries = build_tlg(QUESTIONS, n=30, seed=4)
    records = run_prompt_tlg(entries, backend_for(exact_server, max_parallel=8), TEMPLATE)
    assert [r.entry_id for r in records] == [str(i) for i in range(30)]


def test_records_round_trip(exact_server, tmp_path):
    entries = build_tlg(QUESTIONS, n=6, seed=5)
    records = run_prompt_tlg(entries, backend_for(exact_server), TEMPLATE)
    path = tmp_path / "records.jsonl"
    save_records(records, path)
    assert load_records(path) == records
