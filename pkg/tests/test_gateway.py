import json
import random
import string

import pytest

from alignui.gateway import (
    ChatRequest,
    ChatResponse,
    Gateway,
    MockProvider,
    NoJsonFound,
    ParseError,
    ScriptExhausted,
    BudgetExceeded,
    TransportError,
    extract_json,
)


def request(user="hello"):
    return ChatRequest(system_prompt="system", user_prompt=user)


def test_chat_request_validation():
    with pytest.raises(ValueError):
        ChatRequest(system_prompt="", user_prompt="x")
    with pytest.raises(ValueError):
        ChatRequest(system_prompt="x", user_prompt="x", temperature=2.5)
    with pytest.raises(ValueError):
        ChatRequest(system_prompt="x", user_prompt="x", max_output_tokens=0)


def test_mock_scripted_echo():
    gateway = Gateway(provider=MockProvider(["A"]), sleeper=lambda _: None)
    assert gateway.complete(request()).text == "A"


def test_mock_fifo_order():
    gateway = Gateway(provider=MockProvider(["first", "second"]), sleeper=lambda _: None)
    assert gateway.complete(request()).text == "first"
    assert gateway.complete(request()).text == "second"


def test_mock_empty_script_exhausts():
    gateway = Gateway(provider=MockProvider([]), sleeper=lambda _: None)
    with pytest.raises(ScriptExhausted):
        gateway.complete(request())


def test_script_exhausted_is_budget_style():
    assert issubclass(ScriptExhausted, BudgetExceeded)


def test_mock_keyed_entries_match_fingerprint():
    provider = MockProvider(
        [{"match": "saturation", "response": "S"}, {"response": "default"}]
    )
    gateway = Gateway(provider=provider, sleeper=lambda _: None)
    assert gateway.complete(request("adjust saturation please")).text == "S"
    assert gateway.complete(request("anything else")).text == "default"


def test_mock_performs_zero_network_operations():
    provider = MockProvider(["A", "B"])
    gateway = Gateway(provider=provider, sleeper=lambda _: None)
    gateway.complete(request())
    gateway.complete(request())
    assert provider.network_ops == 0


def test_call_budget():
    gateway = Gateway(provider=MockProvider(["a", "b"]), max_calls=1, sleeper=lambda _: None)
    gateway.complete(request())
    with pytest.raises(BudgetExceeded):
        gateway.complete(request())


class FlakyProvider:
    def __init__(self, failures, text="ok"):
        self.failures = failures
        self.text = text
        self.attempts = 0

    def send(self, req):
        self.attempts += 1
        if self.attempts <= self.failures:
            raise TransportError("boom")
        return ChatResponse(text=self.text)


def test_retries_with_exponential_backoff():
    sleeps = []
    provider = FlakyProvider(failures=2)
    gateway = Gateway(provider=provider, sleeper=sleeps.append)
    assert gateway.complete(request()).text == "ok"
    assert provider.attempts == 3
    assert sleeps == [1.0, 2.0]


def test_retry_exhaustion_raises_transport_error():
    provider = FlakyProvider(failures=10)
    gateway = Gateway(provider=provider, sleeper=lambda _: None)
    with pytest.raises(TransportError):
        gateway.complete(request())
    assert provider.attempts == 3


# --- extract_json ----------------------------------------------------------------


def test_extract_json_code_fence():
    assert extract_json('```json\n{"a":1}\n```') == {"a": 1}


def test_extract_json_trailing_comma_repair():
    assert extract_json('Here is the result: {"a":[1,2,]}') == {"a": [1, 2]}


def test_extract_json_smart_quotes_repair():
    assert extract_json("{“a”: 1}") == {"a": 1}


def test_extract_json_no_braces():
    with pytest.raises(NoJsonFound):
        extract_json("no braces here")


def test_extract_json_unparseable_reports_offset():
    with pytest.raises(ParseError) as err:
        extract_json("prefix {this is not json}")
    assert err.value.offset >= len("prefix ")


def test_extract_json_skips_unbalanced_prefix():
    assert extract_json("open { never closes... {\"a\": 2}") == {"a": 2}


def test_extract_json_embedded_documents_round_trip():
    rng = random.Random(99)
    for _ in range(200):
        doc = {
            "".join(rng.choices(string.ascii_lowercase, k=5)): rng.choice(
                [rng.randint(-5, 5), "text with spaces", [1, 2, 3], {"k": None}, True]
            )
            for _ in range(rng.randint(1, 4))
        }
        blob = json.dumps(doc)
        prose_before = "".join(rng.choices(string.ascii_letters + " .,!\n", k=rng.randint(0, 40)))
        prose_after = "".join(rng.choices(string.ascii_letters + " .,!\n", k=rng.randint(0, 40)))
        assert extract_json(prose_before + blob + prose_after) == doc
        assert extract_json(f"```json\n{blob}\n```") == doc
