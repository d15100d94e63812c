from __future__ import annotations

import pytest

from tasktutor.errors import MalformedResponse, RefusedAfterRetries
from tasktutor.subroutines import (
    MockBackend,
    PromptLibrary,
    ReplayBackend,
    ScriptedBackend,
    SubroutineRunner,
    detect_refusal,
    with_scolding,
)
from tasktutor.subroutines import parsing

PROMPTS = PromptLibrary()


def make_prompt(subroutine: str = "map", **payload) -> dict:
    payload.setdefault("segment", "go to the onion")
    payload.setdefault("candidates", ["moveTo", "pressSpace"])
    return PROMPTS.render(subroutine, payload)


class TestParsing:
    def test_strict_object(self) -> None:
        assert parsing.extract_json_object('{"action": "moveTo"}') == {"action": "moveTo"}

    def test_lenient_first_object_substring(self) -> None:
        text = 'Sure! Here you go: {"steps": ["get an onion"]} hope that helps'
        assert parsing.parse_segments(text) == ["get an onion"]

    def test_nested_braces_survive_extraction(self) -> None:
        text = 'noise {"args": ["pot"], "why": {"n": 1}} trailing'
        assert parsing.parse_grounding(text) == ["pot"]

    def test_garbage_is_malformed(self) -> None:
        with pytest.raises(MalformedResponse):
            parsing.extract_json_object("washTheKnife")
        with pytest.raises(MalformedResponse):
            parsing.parse_segments('{"steps": []}')
        with pytest.raises(MalformedResponse):
            parsing.parse_mapping('{"verb": "x"}')

    def test_paraphrase_accepts_string_booleans(self) -> None:
        assert parsing.parse_paraphrase('{"match": "true"}') is True
        assert parsing.parse_paraphrase('{"match": false}') is False

    def test_sanitize_identifier(self) -> None:
        assert parsing.sanitize_identifier("put it in the pot and turn it on") == (
            "putItInThePotAndTurnItOn"
        )
        assert " " not in parsing.sanitize_identifier("cook an onion")
        with pytest.raises(MalformedResponse):
            parsing.sanitize_identifier("!!!")


class TestDetectRefusal:
    def test_ai_language_model_phrase(self) -> None:
        assert detect_refusal("As an AI language model, I cannot cook") is True

    def test_plain_answer(self) -> None:
        assert detect_refusal("moveTo") is False

    def test_apology_words(self) -> None:
        assert detect_refusal("I'm sorry, but I can't choose") is True

    def test_word_boundaries(self) -> None:
        # "sorry" inside another word is not an apology.
        assert detect_refusal("the sorryless parser") is False


class TestScolding:
    def test_refusal_then_answer(self) -> None:
        backend = ScriptedBackend(
            ["I'm sorry, I cannot do that.", '{"action": "moveTo"}']
        )
        text, attempts, scolds = with_scolding(backend, make_prompt())
        assert text == '{"action": "moveTo"}'
        assert len(attempts) == 2 and scolds == 1
        # The scold message was appended to the retried conversation.
        assert any(
            "culturally insensitive" in m["content"]
            for m in backend.consumed[1]["messages"]
        )

    def test_no_refusal_no_scold(self) -> None:
        backend = ScriptedBackend(['{"action": null}'])
        _, attempts, scolds = with_scolding(backend, make_prompt())
        assert attempts == ['{"action": null}'] and scolds == 0

    def test_budget_exhaustion(self) -> None:
        backend = ScriptedBackend(["I apologize."] * 5)
        with pytest.raises(RefusedAfterRetries):
            with_scolding(backend, make_prompt(), max_scolds=2)
        assert len(backend.consumed) == 3  # initial try + two scolded retries


class TestRunnerValidation:
    def test_map_out_of_vocabulary_coerced(self) -> None:
        backend = ScriptedBackend(['{"action": "washTheKnife"}'])
        runner = SubroutineRunner(backend)
        exchange = runner.map_action("wash the knife", ["moveTo", "pressSpace"])
        assert exchange.ok and exchange.result is None
        assert "washTheKnife" in (exchange.note or "")

    def test_ground_invalid_object_flagged(self) -> None:
        backend = ScriptedBackend(['{"args": ["knife"]}'])
        runner = SubroutineRunner(backend)
        exchange = runner.ground("use the knife", "moveTo", ["target"], ["onion", "pot"])
        assert not exchange.ok and exchange.outcome == "invalid_object"

    def test_generalize_filters_to_subset(self) -> None:
        backend = ScriptedBackend(['{"generalize": ["onion", "knife"]}'])
        runner = SubroutineRunner(backend)
        exchange = runner.generalize("cook an onion", ["onion", "pot"])
        assert exchange.ok and exchange.result == ["onion"]
        assert "knife" in (exchange.note or "")

    def test_generalize_empty_input_stays_empty(self) -> None:
        backend = ScriptedBackend(['{"generalize": ["anything"]}'])
        runner = SubroutineRunner(backend)
        exchange = runner.generalize("do it", [])
        assert exchange.ok and exchange.result == []

    def test_refused_exchange_outcome(self) -> None:
        backend = ScriptedBackend(["sorry"] * 3)
        runner = SubroutineRunner(backend)
        exchange = runner.segment("Cook an onion.", ["onion"])
        assert exchange.outcome == "refused"

    def test_every_exchange_logged_once(self) -> None:
        seen: list = []
        backend = MockBackend()
        runner = SubroutineRunner(backend, on_exchange=seen.append)
        runner.segment("Cook an onion.", ["onion"])
        runner.map_action("cook an onion", ["moveTo"])
        bad = SubroutineRunner(ScriptedBackend(["garbage"]), on_exchange=seen.append)
        bad.verbalize("moveTo", ["onion"])
        assert [e.subroutine for e in seen] == ["segment", "map", "verbalize"]
        assert seen[-1].outcome == "malformed"


class TestReplayBackend:
    def test_feeds_logged_attempts_in_order(self) -> None:
        exchanges = [
            {"subroutine": "map", "attempts": ["I'm sorry.", '{"action": "moveTo"}']},
            {"subroutine": "ground", "attempts": ['{"args": ["onion"]}']},
        ]
        backend = ReplayBackend(exchanges)
        runner = SubroutineRunner(backend)
        first = runner.map_action("go to the onion", ["moveTo"])
        assert first.result == "moveTo" and first.scolds == 1
        second = runner.ground("go to the onion", "moveTo", ["target"], ["onion"])
        assert second.result == ["onion"]

    def test_subroutine_mismatch_detected(self) -> None:
        backend = ReplayBackend([{"subroutine": "ground", "attempts": ["{}"]}])
        with pytest.raises(MalformedResponse):
            backend.complete(make_prompt("map"))


class TestPromptLibrary:
    def test_payload_rendered_into_messages(self) -> None:
        prompt = make_prompt("map", segment="hit space", candidates=["pressSpace"])
        assert prompt["version"] == PROMPTS.version
        assert "pressSpace" in prompt["messages"][0]["content"]
        assert "hit space" in prompt["messages"][1]["content"]
        # Literal JSON braces in the instructions survive rendering.
        assert '{"action":' in prompt["messages"][0]["content"]
