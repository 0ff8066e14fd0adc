import json

import pytest
import requests

from tlgkit.errors import AddressInUseError
from tlgkit.mockserver import (
    MockKind,
    MockProfile,
    profile_from_args,
    respond,
    serve,
)
from tlgkit.lengths import token_for_surface
from tlgkit.metrics import word_count


def completion_request(prompt):
    return {"model": "m", "prompt": prompt, "temperature": 0, "max_tokens": 2048}


def chat_request(user, prefill=None):
    messages = [{"role": "user", "content": user}]
    if prefill is not None:
        messages.append({"role": "assistant", "content": prefill})
    return {"model": "m", "messages": messages, "temperature": 0, "max_tokens": 2048}


def text_of(response):
    choice = response["choices"][0]
    return choice["text"] if "text" in choice else choice["message"]["content"]


EXACT = MockProfile(kind=MockKind.EXACT)


def test_exact_profile_emits_requested_count():
    req = completion_request(
        "Tell me a story The response should have a word count of 50 words."
    )
    assert word_count(text_of(respond(EXACT, req))) == 50


def test_exact_profile_open_ended():
    req = completion_request("x The response should have a word count of more than 800 words.")
    assert word_count(text_of(respond(EXACT, req))) == 850


def test_exact_profile_fallback_flagged():
    response = respond(EXACT, completion_request("no constraint here"))
    assert word_count(text_of(response)) == 30
    assert response["mock"] == {"fallback": True}


def test_offset_profile():
    profile = MockProfile(kind=MockKind.OFFSET, offset=15)
    req = completion_request("x The response should have a word count of 80 words.")
    assert word_count(text_of(respond(profile, req))) == 95


def test_mlt_aware_reads_trailing_token():
    profile = MockProfile(kind=MockKind.MLT_AWARE)
    req = completion_request("<s>[INST] Hi [/INST][MLT:300]")
    assert word_count(text_of(respond(profile, req))) == 300


def test_mlt_aware_reads_chat_prefill():
    profile = MockProfile(kind=MockKind.MLT_AWARE)
    req = chat_request("Hi", prefill="[MLT:80]")
    assert word_count(text_of(respond(profile, req))) == 80


def test_self_mlt_profile():
    token = token_for_surface("[MLT:150]")
    profile = MockProfile(kind=MockKind.SELF_MLT, fixed_mlt=token)
    text = text_of(respond(profile, chat_request("Hi")))
    assert text.startswith("[MLT:150]")
    assert word_count(text[len("[MLT:150]"):]) == 150


def test_no_mlt_profile():
    profile = MockProfile(kind=MockKind.NO_MLT)
    text = text_of(respond(profile, chat_request("Hi")))
    assert "[MLT:" not in text
    assert word_count(text) == 25


def test_profile_invariants():
    with pytest.raises(ValueError):
        MockProfile(kind=MockKind.EXACT, offset=3)
    with pytest.raises(ValueError):
        MockProfile(kind=MockKind.OFFSET)
    with pytest.raises(ValueError):
        MockProfile(kind=MockKind.SELF_MLT)


def test_profile_from_args():
    profile = profile_from_args("self-mlt", fixed_mlt="[MLT:300]", seed=4)
    assert profile.fixed_mlt is token_for_surface("[MLT:300]")
    with pytest.raises(ValueError):
        profile_from_args("offset")
    with pytest.raises(ValueError):
        profile_from_args("self-mlt", fixed_mlt="[MLT:999]")


def test_responses_are_deterministic():
    req = completion_request("x The response should have a word count of 30 words.")
    a = json.dumps(respond(EXACT, req), sort_keys=True)
    b = json.dumps(respond(EXACT, req), sort_keys=True)
    assert a == b


def test_serve_health_and_wire(tmp_path):
    with serve(EXACT) as server:
        health = requests.get(f"http://{server.host}:{server.port}/health", timeout=5)
        assert health.status_code == 200
        req = completion_request("x The response should have a word count of 10 words.")
        resp = requests.post(f"{server.base_url}/completions", json=req, timeout=5)
        assert resp.status_code == 200
        assert word_count(text_of(resp.json())) == 10
        chat = requests.post(
            f"{server.base_url}/chat/completions", json=chat_request("no constraint"), timeout=5
        )
        assert chat.status_code == 200
        assert chat.json()["mock"] == {"fallback": True}


def test_serve_rejects_bad_requests():
    with serve(EXACT) as server:
        resp = requests.post(
            f"{server.base_url}/completions",
            data=b"not json",
            headers={"Content-Type": "application/json"},
            timeout=5,
        )
        assert resp.status_code == 400
        missing = requests.post(f"{server.base_url}/nowhere", json={}, timeout=5)
        assert missing.status_code == 404


def test_stop_then_rebind_same_port():
    server = serve(EXACT)
    port = server.port
    server.stop()
    again = serve(EXACT, port=port)
    try:
        assert again.port == port
    finally:
        again.stop()


def test_double_bind_is_an_error():
    with serve(EXACT) as server:
        with pytest.raises(AddressInUseError):
            serve(EXACT, port=server.port)
