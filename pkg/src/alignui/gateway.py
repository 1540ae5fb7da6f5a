"""Provider-agnostic chat-completion access.

Two providers: an HTTP client for OpenAI-style chat endpoints and a scripted
mock that replays canned responses for deterministic tests. The gateway owns
the retry policy and an optional call budget; requests are stateless, so
concurrent use needs no coordination beyond the mock's internal queue lock.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

import httpx

API_KEY_ENV = "ALIGNUI_API_KEY"

DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_BACKOFF_BASE = 1.0  # seconds: 1, 2, 4


class GatewayError(RuntimeError):
    pass


class TransportError(GatewayError):
    """Transient transport failure (after retries when raised by complete)."""


class AuthError(GatewayError):
    pass


class BudgetExceeded(GatewayError):
    pass


class ScriptExhausted(BudgetExceeded):
    """The mock's script queue ran dry."""


class NoJsonFound(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, offset: int, detail: str):
        super().__init__(f"JSON parse failure at byte {offset}: {detail}")
        self.offset = offset


@dataclass(frozen=True)
class ChatRequest:
    system_prompt: str
    user_prompt: str
    temperature: float = 0.0
    max_output_tokens: int = 2048
    model_id: str = "gpt-4o"

    def __post_init__(self):
        if not self.system_prompt or not self.user_prompt:
            raise ValueError("prompts must be non-empty")
        if not 0 <= self.temperature <= 2:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")


@dataclass(frozen=True)
class TokenUsage:
    prompt_tokens: int = 0
    completion_tokens: int = 0


@dataclass(frozen=True)
class ChatResponse:
    text: str
    usage: TokenUsage = TokenUsage()
    latency: float = 0.0


class Provider(Protocol):
    def send(self, request: ChatRequest) -> ChatResponse: ...


class MockProvider:
    """Replays scripted responses in FIFO order; never touches the network.

    Entries with a ``match`` substring form per-fingerprint queues consulted
    before the default queue (the fingerprint is the request's user prompt).
    ``network_ops`` stays 0 by construction and is asserted in tests.
    """

    def __init__(self, script: Optional[list] = None):
        self._default: list[str] = []
        self._keyed: list[tuple[str, str]] = []
        self._lock = threading.Lock()
        self.requests: list[ChatRequest] = []
        self.network_ops = 0
        for entry in script or []:
            self.push(entry)

    def push(self, entry) -> None:
        if isinstance(entry, str):
            with self._lock:
                self._default.append(entry)
            return
        response = entry["response"]
        match = entry.get("match")
        with self._lock:
            if match:
                self._keyed.append((match, response))
            else:
                self._default.append(response)

    def remaining(self) -> int:
        with self._lock:
            return len(self._default) + len(self._keyed)

    def send(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            self.requests.append(request)
            for i, (match, response) in enumerate(self._keyed):
                if match in request.user_prompt:
                    del self._keyed[i]
                    return ChatResponse(text=response)
            if self._default:
                return ChatResponse(text=self._default.pop(0))
        raise ScriptExhausted("mock script exhausted")


class HttpProvider:
    """OpenAI-style chat completion client; key from ALIGNUI_API_KEY."""

    def __init__(
        self,
        endpoint: str,
        model_id: str = "gpt-4o",
        api_key: Optional[str] = None,
        timeout: float = 60.0,
        client: Optional[httpx.Client] = None,
    ):
        self.endpoint = endpoint
        self.model_id = model_id
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self._client = client or httpx.Client(timeout=timeout)
        self.network_ops = 0

    def send(self, request: ChatRequest) -> ChatResponse:
        payload = {
            "model": request.model_id or self.model_id,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
        }
        started = time.monotonic()
        self.network_ops += 1
        try:
            reply = self._client.post(
                self.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {self.api_key}"},
            )
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if reply.status_code in (401, 403):
            raise AuthError(f"provider rejected credentials ({reply.status_code})")
        if reply.status_code >= 500 or reply.status_code == 429:
            raise TransportError(f"provider returned {reply.status_code}")
        if reply.status_code != 200:
            raise GatewayError(f"provider returned {reply.status_code}: {reply.text[:200]}")
        body = reply.json()
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise GatewayError(f"malformed provider response: {exc}") from exc
        usage = body.get("usage", {})
        return ChatResponse(
            text=text,
            usage=TokenUsage(
                prompt_tokens=usage.get("prompt_tokens", 0),
                completion_tokens=usage.get("completion_tokens", 0),
            ),
            latency=time.monotonic() - started,
        )


@dataclass
class Gateway:
    """Retrying front over a provider, with an optional total-call budget."""

    provider: Provider
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    backoff_base: float = DEFAULT_BACKOFF_BASE
    max_calls: Optional[int] = None
    sleeper: Callable[[float], None] = time.sleep
    calls: int = field(default=0, init=False)

    def complete(self, request: ChatRequest) -> ChatResponse:
        if self.max_calls is not None and self.calls >= self.max_calls:
            raise BudgetExceeded(f"call budget of {self.max_calls} exhausted")
        self.calls += 1
        last: Optional[TransportError] = None
        for attempt in range(self.max_attempts):
            try:
                return self.provider.send(request)
            except ScriptExhausted:
                raise
            except TransportError as exc:
                last = exc
                if attempt + 1 < self.max_attempts:
                    self.sleeper(self.backoff_base * (2**attempt))
        raise TransportError(f"gave up after {self.max_attempts} attempts: {last}")


def load_mock_script(path) -> list:
    """Read a mock script file: one JSON object per line, {response, match?}."""
    entries = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


def gateway_from_config(config: dict) -> Gateway:
    """Build a gateway from the {provider, endpoint, model_id, ...} mapping."""
    provider_name = config.get("provider", "mock")
    if provider_name == "http":
        provider: Provider = HttpProvider(
            endpoint=config["endpoint"],
            model_id=config.get("model_id", "gpt-4o"),
        )
    elif provider_name == "mock":
        script = []
        script_path = config.get("mock_script")
        if script_path:
            script = load_mock_script(script_path)
        provider = MockProvider(script)
    else:
        raise ValueError(f"unknown provider {provider_name!r}")
    return Gateway(provider=provider, max_calls=config.get("max_calls"))


# --- JSON extraction -----------------------------------------------------------

_SMART_QUOTES = {"“": '"', "”": '"', "‘": "'", "’": "'"}


def _repair(candidate: str) -> str:
    for smart, plain in _SMART_QUOTES.items():
        candidate = candidate.replace(smart, plain)
    # trailing commas before a closing brace/bracket
    out = []
    in_string = False
    escaped = False
    i = 0
    while i < len(candidate):
        ch = candidate[i]
        if in_string:
            out.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            i += 1
            continue
        if ch == '"':
            in_string = True
            out.append(ch)
            i += 1
            continue
        if ch == ",":
            j = i + 1
            while j < len(candidate) and candidate[j] in " \t\r\n":
                j += 1
            if j < len(candidate) and candidate[j] in "}]":
                i += 1  # drop the trailing comma
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _scan_objects(text: str):
    """Try to decode an object at every '{' position, leftmost first."""
    decoder = json.JSONDecoder()
    for i, ch in enumerate(text):
        if ch != "{":
            continue
        try:
            value, _ = decoder.raw_decode(text[i:])
        except json.JSONDecodeError as exc:
            yield i, None, ParseError(i + exc.pos, exc.msg)
            continue
        yield i, value, None


def extract_json(text: str) -> dict:
    """Pull the first parseable top-level JSON object out of model text.

    Tolerates code fences, leading/trailing prose, smart quotes, and trailing
    commas (one repair pass). Raises NoJsonFound when the text contains no
    candidate object, ParseError (with byte offset) when candidates exist but
    none parses even after repair.
    """
    first_error: Optional[ParseError] = None
    for _, value, error in _scan_objects(text):
        if value is not None:
            return value
        if first_error is None:
            first_error = error
    for _, value, error in _scan_objects(_repair(text)):
        if value is not None:
            return value
    if first_error is not None:
        raise first_error
    raise NoJsonFound("no JSON object in text")
