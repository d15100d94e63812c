"""Transcript persistence and deterministic replay.

A transcript is one header line followed by every session record as JSON
lines (canonical key order, compact separators), so identical runs produce
byte-identical files. Replay re-drives the recorded inputs through a fresh
session whose backend feeds back the logged raw responses, which makes
replay work offline for remote-model transcripts too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .dialog import DialogSession, SessionConfig
from .errors import MalformedDocument
from .subroutines import ReplayBackend

FORMAT_VERSION = 1


def dumps_record(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def header_record(config: SessionConfig, layout_text: str) -> dict[str, Any]:
    return {
        "type": "header",
        "version": FORMAT_VERSION,
        "config": config.to_dict(),
        "layout": layout_text,
    }


def transcript_text(header: dict[str, Any], records: list[dict[str, Any]]) -> str:
    lines = [dumps_record(header)]
    lines.extend(dumps_record(record) for record in records)
    return "\n".join(lines) + "\n"


def write_transcript(
    path: str | Path, header: dict[str, Any], records: list[dict[str, Any]]
) -> None:
    Path(path).write_text(transcript_text(header, records))


def read_transcript(path: str | Path) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    lines = [line for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines:
        raise MalformedDocument("empty transcript")
    try:
        parsed = [json.loads(line) for line in lines]
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"bad transcript line: {exc}") from exc
    header = parsed[0]
    if not isinstance(header, dict) or header.get("type") != "header":
        raise MalformedDocument("transcript must start with a header record")
    return header, parsed[1:]


def session_from_header(header: dict[str, Any], backend: Any) -> DialogSession:
    config = SessionConfig.from_dict(header.get("config", {}))
    return DialogSession(
        config=config, backend=backend, layout_text=header.get("layout")
    )


def drive_inputs(session: DialogSession, records: list[dict[str, Any]]) -> None:
    """Re-issue every recorded input against ``session`` in order."""
    for record in records:
        if record.get("type") != "input":
            continue
        channel = record.get("channel")
        if channel == "message":
            session.process_utterance(record.get("text", ""))
        elif channel == "confirm":
            session.resolve_confirmation(
                record.get("verdict", "approve"), record.get("correction")
            )
        elif channel == "undo":
            session.undo()


def rebuild_session(
    header: dict[str, Any], records: list[dict[str, Any]]
) -> DialogSession:
    """Reconstruct a session from its transcript, replaying logged responses."""
    exchanges = [r for r in records if r.get("type") == "exchange"]
    session = session_from_header(header, ReplayBackend(exchanges))
    drive_inputs(session, records)
    return session


@dataclass
class ReplayReport:
    equal: bool
    checked: int
    mismatch_index: int | None = None
    recorded: dict[str, Any] | None = None
    reproduced: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "equal": self.equal,
            "checked": self.checked,
            "mismatch_index": self.mismatch_index,
            "recorded": self.recorded,
            "reproduced": self.reproduced,
        }


def verify_replay(
    header: dict[str, Any], records: list[dict[str, Any]]
) -> ReplayReport:
    """Re-derive the event stream and compare it record-by-record."""
    session = rebuild_session(header, records)
    reproduced = session.events
    for index, recorded in enumerate(records):
        if index >= len(reproduced) or reproduced[index] != recorded:
            return ReplayReport(
                equal=False,
                checked=len(records),
                mismatch_index=index,
                recorded=recorded,
                reproduced=reproduced[index] if index < len(reproduced) else None,
            )
    if len(reproduced) != len(records):
        return ReplayReport(
            equal=False,
            checked=len(records),
            mismatch_index=len(records),
            recorded=None,
            reproduced=reproduced[len(records)],
        )
    return ReplayReport(equal=True, checked=len(records))
