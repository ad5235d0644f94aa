from __future__ import annotations

import json
import os

import httpx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posterforge.errors import (
    BackendUnavailableError,
    ConfigurationError,
    ContractError,
    JSONParseError,
    SchemaValidationError,
)
from posterforge.gateway import (
    BackendDescriptor,
    Gateway,
    MockBackend,
    ModelRequest,
    OpenAIChatBackend,
    TokenLedger,
    TokenUsage,
    compute_cost,
    export_ledger,
    extract_json,
)
from posterforge.gateway.backends import make_backend

TEXT = BackendDescriptor("txt", "text", {"kind": "mock"}, price_in=5.0, price_out=20.0)
VISION = BackendDescriptor("vis", "vision", {"kind": "mock"}, price_in=0.2, price_out=0.2)


def request(role="commenter.critique", images=(), user="hello"):
    return ModelRequest(role, "system", user, images=images)


def fixture_gateway(fixtures, routing=None, **kwargs):
    text = BackendDescriptor("txt", "text", {"kind": "mock", "fixtures": fixtures})
    vision = BackendDescriptor("vis", "vision", {"kind": "mock", "fixtures": fixtures})
    return Gateway([text, vision], routing or {}, retry_wait=0.0, **kwargs)


# -- complete -------------------------------------------------------------


def test_mock_returns_scripted_reply_with_zero_usage():
    gw = fixture_gateway({"commenter.critique": "3"}, {"commenter.critique": "vis"})
    response = gw.complete(request(images=(b"png",)))
    assert response.text == "3"
    assert response.usage == TokenUsage()
    assert gw.ledger.calls == 1


def test_images_to_text_backend_is_a_contract_error():
    gw = fixture_gateway({"*": "x"}, {"commenter.critique": "txt"})
    with pytest.raises(ContractError):
        gw.complete(request(images=(b"png",)))
    assert gw.ledger.calls == 0


def test_ledger_sums_two_calls():
    ledger = TokenLedger()
    ledger.record("txt", "parser.summarize", TokenUsage(10, 5, 0, 0))
    ledger.record("txt", "parser.filter", TokenUsage(3, 2, 0, 0))
    assert ledger.total() == TokenUsage(13, 7, 0, 0)
    assert ledger.by_role()["parser.filter"] == TokenUsage(3, 2, 0, 0)


def test_list_fixture_advances_per_role_and_repeats_last():
    gw = fixture_gateway({"painter.compose": ["a", "b"], "parser.filter": ["z"]}, {"painter.compose": "txt", "parser.filter": "txt"})
    got = [gw.complete(request("painter.compose")).text for _ in range(3)]
    assert got == ["a", "b", "b"]
    assert gw.complete(request("parser.filter")).text == "z"


def test_hash_keyed_fixture_and_default():
    req = request("painter.compose", user="special")
    gw = fixture_gateway(
        {"painter.compose": {"by_hash": {req.prompt_hash(): "hashed"}, "default": "fallback"}},
        {"painter.compose": "txt"},
    )
    assert gw.complete(req).text == "hashed"
    assert gw.complete(request("painter.compose", user="other")).text == "fallback"


def test_mock_is_deterministic_for_identical_prompts():
    req = request("painter.compose", user="same")
    assert req.prompt_hash() == request("painter.compose", user="same").prompt_hash()
    fixtures = {"painter.compose": {"by_hash": {req.prompt_hash(): "fixed"}}}
    a = fixture_gateway(fixtures, {"painter.compose": "txt"}).complete(req).text
    b = fixture_gateway(fixtures, {"painter.compose": "txt"}).complete(req).text
    assert a == b == "fixed"


def test_missing_fixture_is_backend_unavailable():
    gw = fixture_gateway({}, {"painter.compose": "txt"})
    with pytest.raises(BackendUnavailableError):
        gw.complete(request("painter.compose"))


def test_unrouted_role_and_unknown_backend_are_configuration_errors():
    gw = fixture_gateway({"*": "x"}, {"painter.compose": "txt"})
    with pytest.raises(ConfigurationError, match="missing backend for role 'commenter.critique'"):
        gw.require_roles(["painter.compose", "commenter.critique"])
    with pytest.raises(ConfigurationError):
        gw.complete(request("parser.summarize"))
    with pytest.raises(ConfigurationError):
        Gateway([TEXT], {"a": "nope"})


def test_explicit_backend_overrides_routing():
    gw = fixture_gateway({"*": "x"}, {"quiz.answer": "vis"})
    gw.complete(request("quiz.answer"), backend="txt")
    assert set(gw.ledger.by_backend()) == {"txt"}


def test_count_tokens_charges_images_at_fixed_cost():
    desc = BackendDescriptor("vis", "vision", {"kind": "mock", "count_tokens": True, "fixtures": {"*": "one two"}}, image_token_cost=765)
    gw = Gateway([desc], {"judge.clarity": "vis"})
    usage = gw.complete(ModelRequest("judge.clarity", "a b", "c", images=(b"x", b"y"))).usage
    assert usage == TokenUsage(in_v=3 + 2 * 765, out_v=2)


# -- retries over HTTP ----------------------------------------------------


def openai_gateway(handler, max_retries=2, **endpoint):
    desc = BackendDescriptor(
        "remote", "text", {"kind": "openai", "base_url": "http://model.test/v1", "model": "m", **endpoint}, max_retries=max_retries
    )
    backend = OpenAIChatBackend(desc, client=httpx.Client(base_url="http://model.test/v1", transport=httpx.MockTransport(handler)))
    gw = Gateway([desc], {"parser.summarize": "remote"}, retry_wait=0.0)
    gw._backends["remote"] = backend
    return gw


def chat_reply(text, prompt=7, completion=3):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}], "usage": {"prompt_tokens": prompt, "completion_tokens": completion}})


def test_transient_errors_are_retried_then_succeed():
    calls = []

    def handler(req):
        calls.append(json.loads(req.content))
        return httpx.Response(503) if len(calls) < 3 else chat_reply("ok")

    gw = openai_gateway(handler)
    response = gw.complete(request("parser.summarize"))
    assert response.text == "ok" and len(calls) == 3
    assert response.usage == TokenUsage(in_t=7, out_t=3)
    assert gw.ledger.calls == 1


def test_retry_budget_exhausted_raises_backend_unavailable():
    calls = []

    def handler(req):
        calls.append(1)
        return httpx.Response(500)

    gw = openai_gateway(handler, max_retries=1)
    with pytest.raises(BackendUnavailableError):
        gw.complete(request("parser.summarize"))
    assert len(calls) == 2


def test_client_errors_are_not_retried():
    calls = []

    def handler(req):
        calls.append(1)
        return httpx.Response(401, text="bad key")

    with pytest.raises(BackendUnavailableError):
        openai_gateway(handler).complete(request("parser.summarize"))
    assert len(calls) == 1


def test_images_are_sent_as_data_urls():
    seen = {}

    def handler(req):
        seen.update(json.loads(req.content))
        return chat_reply("3")

    desc = BackendDescriptor("remote", "vision", {"kind": "openai", "base_url": "http://x", "model": "m"})
    backend = OpenAIChatBackend(desc, client=httpx.Client(base_url="http://x", transport=httpx.MockTransport(handler)))
    response = backend.send(ModelRequest("commenter.critique", "s", "u", images=(b"\x89PNGdata",)))
    content = seen["messages"][1]["content"]
    assert content[1]["image_url"]["url"].startswith("data:image/png;base64,")
    assert response.usage == TokenUsage(in_v=7, out_v=3)


def test_api_key_comes_from_named_environment_variable(monkeypatch):
    monkeypatch.setenv("POSTERFORGE_TEST_KEY", "sekret")
    desc = BackendDescriptor("remote", "text", {"kind": "openai", "base_url": "http://x", "model": "m", "api_key_env": "POSTERFORGE_TEST_KEY"})
    backend = make_backend(desc)
    assert backend.client.headers["Authorization"] == "Bearer sekret"
    assert "POSTERFORGE_TEST_KEY" in os.environ


def test_openai_endpoint_requires_base_url_and_model():
    with pytest.raises(ConfigurationError):
        make_backend(BackendDescriptor("r", "text", {"kind": "openai"}))


# -- JSON extraction and repair -------------------------------------------


def test_fenced_json_is_unwrapped():
    assert extract_json('```json\n{"answer":"B"}\n```') == {"answer": "B"}


def test_prose_around_json_is_stripped():
    assert extract_json('Sure! Here it is: {"reason": "ok", "score": 4} Hope that helps.', "judge").score == 4


def test_empty_object_fails_painter_schema_on_title():
    with pytest.raises(SchemaValidationError) as err:
        extract_json("{}", "painter")
    assert any(f.startswith("title") for f in err.value.fields)


def test_unequal_textbox_lengths_rejected():
    item = {"alignment": "left", "bullet": True, "level": 0, "font_size": 20, "runs": [{"text": "x"}]}
    raw = json.dumps({"title": [item], "textbox1": [item] * 3, "textbox2": [item] * 2})
    with pytest.raises(SchemaValidationError, match="unequal textbox lengths"):
        extract_json(raw, "painter")


def test_unparseable_output_carries_raw_text():
    with pytest.raises(JSONParseError) as err:
        extract_json("no json here", "judge")
    assert err.value.raw == "no json here"


@given(st.dictionaries(st.text(min_size=1, max_size=5), st.integers() | st.text(max_size=5), max_size=5))
def test_extract_json_is_idempotent_on_clean_json(obj):
    once = extract_json(json.dumps(obj))
    assert once == obj
    assert extract_json(json.dumps(once)) == once


def test_complete_json_reprompts_once_with_the_error():
    prompts = []

    def responder(req):
        prompts.append(req.user_prompt)
        return "not json" if len(prompts) == 1 else '{"reason": "fine", "score": 5}'

    gw = Gateway([VISION], {"judge.clarity": "vis"}, responders={"vis": responder})
    result = gw.complete_json(request("judge.clarity"), "judge")
    assert result.score == 5
    assert "Your previous answer was rejected" in prompts[1]
    assert gw.ledger.calls == 2


def test_complete_json_gives_up_after_second_failure():
    gw = Gateway([VISION], {"judge.clarity": "vis"}, responders={"vis": lambda r: '{"score": 9}'})
    with pytest.raises(SchemaValidationError):
        gw.complete_json(request("judge.clarity"), "judge")
    assert gw.ledger.calls == 2


def test_complete_json_check_failures_surface_as_validation_errors():
    gw = Gateway([VISION], {"judge.clarity": "vis"}, responders={"vis": lambda r: '{"score": 2}'})
    with pytest.raises(SchemaValidationError) as err:
        gw.complete_json(request("judge.clarity"), "judge", check=lambda v: ["too low"] if v.score < 3 else [])
    assert err.value.fields == ["too low"]


# -- cost -----------------------------------------------------------------


def test_cost_of_single_backend_run():
    ledger = TokenLedger()
    ledger.record("txt", "parser.summarize", TokenUsage(in_t=28_850, out_t=2_950))
    ledger.record("txt", "commenter.critique", TokenUsage(in_v=69_250, out_v=50))
    assert compute_cost(ledger, [TEXT]) == pytest.approx(0.5505, abs=1e-9)


def test_cost_of_split_text_and_vision_backends():
    text = BackendDescriptor("small-text", "text", price_in=0.04, price_out=0.1)
    vision = BackendDescriptor("small-vl", "vision", price_in=0.2, price_out=0.2)
    ledger = TokenLedger()
    ledger.record("small-text", "painter.compose", TokenUsage(in_t=29_220, out_t=3_560))
    ledger.record("small-vl", "commenter.critique", TokenUsage(in_v=14_760, out_v=20))
    assert compute_cost(ledger, [text, vision]) == pytest.approx(0.0044808, abs=1e-9)


def test_empty_ledger_costs_nothing():
    assert compute_cost(TokenLedger(), [TEXT]) == 0.0


def test_unknown_backend_in_ledger_is_configuration_error():
    ledger = TokenLedger()
    ledger.record("ghost", "x", TokenUsage(1, 1))
    with pytest.raises(ConfigurationError):
        compute_cost(ledger, [TEXT])


def test_export_ledger_round_trips(tmp_path):
    ledger = TokenLedger()
    ledger.record("txt", "parser.summarize", TokenUsage(1000, 100))
    payload = export_ledger(ledger, [TEXT], tmp_path / "tokens.json")
    saved = json.loads((tmp_path / "tokens.json").read_text())
    assert saved == payload
    assert saved["cost_by_backend"]["txt"] == pytest.approx(0.007)
    again = TokenLedger.from_dict(saved)
    assert again.total() == ledger.total() and again.calls == 1


usages = st.builds(
    TokenUsage, *(st.integers(0, 10**6) for _ in range(4))
)
records = st.lists(st.tuples(st.sampled_from(["txt", "vis"]), st.sampled_from(["a", "b", "c"]), usages), max_size=30)


@settings(max_examples=100)
@given(records)
def test_ledger_totals_equal_elementwise_sums(recs):
    ledger = TokenLedger()
    for backend, role, usage in recs:
        ledger.record(backend, role, usage)
    expected = tuple(sum(u.as_tuple()[i] for _, _, u in recs) for i in range(4))
    assert ledger.total().as_tuple() == expected
    by_role = TokenUsage()
    for usage in ledger.by_role().values():
        by_role = by_role + usage
    assert by_role == ledger.total()


@settings(max_examples=100)
@given(records, records)
def test_cost_is_linear_in_the_ledger(a, b):
    la, lb = TokenLedger(), TokenLedger()
    for backend, role, usage in a:
        la.record(backend, role, usage)
    for backend, role, usage in b:
        lb.record(backend, role, usage)
    backends = [TEXT, VISION]
    merged = la.merge(lb)
    assert compute_cost(merged, backends) == pytest.approx(compute_cost(la, backends) + compute_cost(lb, backends), rel=1e-12, abs=1e-12)


def test_mock_backend_class_uses_responder_first():
    backend = MockBackend(TEXT, fixtures={"*": "fixture"}, responder=lambda r: "responder")
    assert backend.send(request("x")).text == "responder"
