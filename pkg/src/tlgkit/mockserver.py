"""Deterministic in-repo generation server for end-to-end testing.

The server speaks the same completions / chat-completions wire shapes the
orchestrator emits and answers from one of five length-behavior profiles,
so the full pipeline can be exercised with analytically known outcomes and
no real model. Identical (profile, request) pairs always produce identical
response bytes.
"""

from __future__ import annotations

import errno
import json
import re
import threading
import zlib
from dataclasses import dataclass
from enum import Enum
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .errors import AddressInUseError
from .lengths import MLT_TOKENS, MetaLengthToken, TargetLength, token_for_surface

__all__ = ["MockKind", "MockProfile", "respond", "serve", "MockServer"]

# Emitted when a prompt asks for "more than 800" words; any value over 800
# satisfies the open-ended interval, this one keeps fixtures stable.
OPEN_ENDED_WORDS = 850
FALLBACK_WORDS = 30
NO_MLT_WORDS = 25

# 64 plain lowercase words: whitespace-only separation keeps word counts
# exact by construction.
FILLER_WORDS = (
    "alder ash aspen bay beech birch cedar cherry chestnut cypress elm fig "
    "fir hazel hemlock hickory holly juniper larch laurel linden locust "
    "magnolia maple mulberry oak olive palm pear pine plane poplar quince "
    "redwood rowan spruce sycamore tamarack teak walnut willow yew acacia "
    "almond apple apricot baobab buckeye catalpa dogwood ebony ginkgo guava "
    "hawthorn ironwood kapok lemon mango medlar myrtle nutmeg osier pawpaw "
    "persimmon"
).split()
assert len(FILLER_WORDS) == 64

_CONSTRAINT_RE = re.compile(r"word count of (more than 800|\d+) words")


class MockKind(str, Enum):
    EXACT = "exact"
    OFFSET = "offset"
    MLT_AWARE = "mlt-aware"
    SELF_MLT = "self-mlt"
    NO_MLT = "no-mlt"


@dataclass(frozen=True)
class MockProfile:
    kind: MockKind
    offset: int | None = None
    fixed_mlt: MetaLengthToken | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if (self.offset is not None) != (self.kind is MockKind.OFFSET):
            raise ValueError("offset is required for OFFSET and forbidden otherwise")
        if self.kind is MockKind.SELF_MLT and self.fixed_mlt is None:
            raise ValueError("SELF_MLT needs a fixed token")


def _filler(n: int, seed: int, prompt: str) -> str:
    start = (seed + zlib.crc32(prompt.encode("utf-8"))) % len(FILLER_WORDS)
    return " ".join(FILLER_WORDS[(start + i) % len(FILLER_WORDS)] for i in range(n))


def _request_texts(request: dict) -> tuple[str, str]:
    """(full prompt text, forced-continuation tail) for either wire shape."""
    if "prompt" in request:
        prompt = str(request["prompt"])
        return prompt, prompt
    messages = request.get("messages") or []
    parts = [str(m.get("content", "")) for m in messages]
    tail = ""
    if messages and messages[-1].get("role") == "assistant":
        tail = str(messages[-1].get("content", ""))
    return "\n".join(parts), tail


def _requested_words(prompt: str) -> int | None:
    match = _CONSTRAINT_RE.search(prompt)
    if not match:
        return None
    phrase = match.group(1)
    return OPEN_ENDED_WORDS if phrase == "more than 800" else int(phrase)


def _trailing_mlt(tail: str) -> MetaLengthToken | None:
    tail = tail.rstrip()
    for token in MLT_TOKENS:
        if tail.endswith(token.surface):
            return token
    return None


def _center_words(token: MetaLengthToken) -> int:
    if token.center is TargetLength.OVER_800:
        return OPEN_ENDED_WORDS
    words = token.center.words
    assert words is not None
    return words


def respond(profile: MockProfile, request: dict) -> dict:
    """Build the wire response for one well-formed request (pure)."""
    prompt, tail = _request_texts(request)
    fallback = False

    if profile.kind in (MockKind.EXACT, MockKind.OFFSET):
        wanted = _requested_words(prompt)
        if wanted is None:
            text = _filler(FALLBACK_WORDS, profile.seed, prompt)
            fallback = True
        elif profile.kind is MockKind.EXACT:
            text = _filler(wanted, profile.seed, prompt)
        else:
            assert profile.offset is not None
            text = _filler(max(wanted + profile.offset, 0), profile.seed, prompt)
    elif profile.kind is MockKind.MLT_AWARE:
        token = _trailing_mlt(tail)
        if token is None:
            text = _filler(FALLBACK_WORDS, profile.seed, prompt)
            fallback = True
        else:
            text = _filler(_center_words(token), profile.seed, prompt)
    elif profile.kind is MockKind.SELF_MLT:
        assert profile.fixed_mlt is not None
        body = _filler(_center_words(profile.fixed_mlt), profile.seed, prompt)
        text = f"{profile.fixed_mlt.surface}{body}"
    else:  # NO_MLT
        text = _filler(NO_MLT_WORDS, profile.seed, prompt)

    model = str(request.get("model", "mock"))
    if "prompt" in request:
        response: dict = {
            "object": "text_completion",
            "model": model,
            "choices": [{"index": 0, "text": text, "finish_reason": "stop"}],
        }
    else:
        response = {
            "object": "chat.completion",
            "model": model,
            "choices": [
                {
                    "index": 0,
                    "message": {"role": "assistant", "content": text},
                    "finish_reason": "stop",
                }
            ],
        }
    if fallback:
        response["mock"] = {"fallback": True}
    return response


class _Server(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], profile: MockProfile):
        super().__init__(address, _Handler)
        self.profile = profile


class _Handler(BaseHTTPRequestHandler):
    server: _Server

    def log_message(self, *args) -> None:  # keep test output quiet
        pass

    def _send_json(self, status: int, body: dict) -> None:
        payload = json.dumps(body, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self) -> None:
        if self.path.rstrip("/").endswith("/health") or self.path == "/health":
            self._send_json(200, {"status": "ok"})
        else:
            self._send_json(404, {"error": "not found"})

    def do_POST(self) -> None:
        if not self.path.endswith(("/completions", "/chat/completions")):
            self._send_json(404, {"error": "not found"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            request = json.loads(self.rfile.read(length))
            if not isinstance(request, dict):
                raise ValueError("request body must be an object")
        except (ValueError, json.JSONDecodeError) as exc:
            self._send_json(400, {"error": str(exc)})
            return
        self._send_json(200, respond(self.server.profile, request))


class MockServer:
    """Handle for a running server; supports clean stop and restart on the
    same port."""

    def __init__(self, httpd: _Server):
        self._httpd = httpd
        self._thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        self._thread.start()

    @property
    def host(self) -> str:
        return self._httpd.server_address[0]

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def base_url(self) -> str:
        """Endpoint base the orchestrator's BackendConfig should point at."""
        return f"http://{self.host}:{self.port}/v1"

    def join(self, timeout: float | None = None) -> None:
        """Block on the serving thread (foreground CLI use)."""
        self._thread.join(timeout)

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "MockServer":
        return self

    def __exit__(self, *exc_info) -> None:
        self.stop()


def serve(profile: MockProfile, host: str = "127.0.0.1", port: int = 0) -> MockServer:
    """Start serving in a background thread; port 0 picks a free port."""
    try:
        httpd = _Server((host, port), profile)
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            raise AddressInUseError(f"address {host}:{port} is in use") from exc
        raise
    return MockServer(httpd)


def profile_from_args(
    kind: str,
    offset: int | None = None,
    fixed_mlt: str | None = None,
    seed: int = 0,
) -> MockProfile:
    """Build a profile from CLI-style string arguments."""
    mock_kind = MockKind(kind)
    token = None
    if fixed_mlt is not None:
        token = token_for_surface(fixed_mlt)
        if token is None:
            raise ValueError(f"not a token surface: {fixed_mlt!r}")
    if mock_kind is not MockKind.OFFSET:
        offset = None
    elif offset is None:
        raise ValueError("offset profile needs --offset")
    return MockProfile(kind=mock_kind, offset=offset, fixed_mlt=token, seed=seed)
