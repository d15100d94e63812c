from __future__ import annotations

from pathlib import Path

import pytest

from tasktutor.dialog import DialogSession, SessionConfig
from tasktutor.errors import MalformedDocument
from tasktutor.scripts import bundled_script, run_script
from tasktutor.subroutines import ScriptedBackend
from tasktutor.transcripts import (
    header_record,
    read_transcript,
    rebuild_session,
    transcript_text,
    verify_replay,
)


def onion_records() -> tuple[dict, list[dict]]:
    result = run_script(bundled_script("onion_soup"), SessionConfig())
    assert result.ok
    return result.header, result.records


class TestRoundTrip:
    def test_write_then_read(self, tmp_path) -> None:
        header, records = onion_records()
        path = tmp_path / "session.jsonl"
        path.write_text(transcript_text(header, records))
        got_header, got_records = read_transcript(path)
        assert got_header == header
        assert got_records == records

    def test_empty_transcript_rejected(self, tmp_path) -> None:
        path = tmp_path / "empty.jsonl"
        path.write_text("\n")
        with pytest.raises(MalformedDocument):
            read_transcript(path)

    def test_headerless_rejected(self, tmp_path) -> None:
        path = tmp_path / "bad.jsonl"
        path.write_text('{"type": "user_message"}\n')
        with pytest.raises(MalformedDocument):
            read_transcript(path)


GOLDEN = Path(__file__).parent / "data" / "golden_onion_soup.transcript.jsonl"


class TestGoldenFile:
    """The committed golden pins wording and field order across changes.

    After a deliberate behavior change, regenerate it with:
    tasktutor teach --script onion_soup --transcript-out tests/data/golden_onion_soup.transcript.jsonl
    """

    def test_current_run_matches_committed_golden(self) -> None:
        header, records = onion_records()
        assert transcript_text(header, records) == GOLDEN.read_text()

    def test_committed_golden_replays_clean(self) -> None:
        header, records = read_transcript(GOLDEN)
        report = verify_replay(header, records)
        assert report.equal, report.to_dict()


class TestReplay:
    def test_golden_replay_is_equal(self) -> None:
        header, records = onion_records()
        report = verify_replay(header, records)
        assert report.equal, report.to_dict()
        assert report.checked == len(records)

    def test_edited_event_detected_at_index(self) -> None:
        header, records = onion_records()
        tampered = [dict(r) for r in records]
        victim = next(
            i for i, r in enumerate(tampered) if r["type"] == "action_dispatched"
        )
        tampered[victim] = dict(tampered[victim], args=["knife"])
        report = verify_replay(header, tampered)
        assert not report.equal
        assert report.mismatch_index == victim

    def test_rebuilt_session_matches_original_state(self) -> None:
        header, records = onion_records()
        rebuilt = rebuild_session(header, records)
        fresh = run_script(bundled_script("onion_soup"), SessionConfig()).session
        assert rebuilt.kb == fresh.kb
        assert rebuilt.world == fresh.world
        assert rebuilt.mode == fresh.mode
        assert rebuilt.export_metrics() == fresh.export_metrics()

    def test_replay_uses_logged_responses_not_backend(self) -> None:
        # Simulate a remote-style session: scripted one-off responses that no
        # offline backend could regenerate. Replay must succeed from the log.
        backend = ScriptedBackend(
            [
                '{"steps": ["go to the onion"]}',
                '{"action": "moveTo"}',
                '{"args": ["onion"]}',
            ]
        )
        config = SessionConfig(confirmations=True)
        session = DialogSession(config=config, backend=backend)
        session.process_utterance("Please head over to that onion thing.")
        session.resolve_confirmation("approve")
        session.resolve_confirmation("approve")
        session.resolve_confirmation("approve")
        header = header_record(config, session.layout_text)
        report = verify_replay(header, session.events)
        assert report.equal, report.to_dict()
