#!/usr/bin/env python3
"""Export a golden event stream plus server-state checkpoints for UI tests.

The checkpoint after each input is exactly what GET /state would return at
that sequence number; the client fold must reproduce the knowledge list and
pending widget at every one of them.
"""

from __future__ import annotations

import json
from pathlib import Path

from tasktutor.dialog import DialogSession, SessionConfig
from tasktutor.scripts import bundled_script, parse_script
from tasktutor.subroutines import MockBackend

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "golden_stream.json"


def main() -> None:
    session = DialogSession(config=SessionConfig(), backend=MockBackend())
    initial = session.describe()
    checkpoints = []
    for directive in parse_script(bundled_script("onion_soup")):
        if directive.op == "say":
            session.process_utterance(directive.arg)
        elif directive.op == "approve":
            session.resolve_confirmation("approve")
        elif directive.op == "correct":
            session.resolve_confirmation("correct", directive.arg)
        elif directive.op == "undo":
            session.undo()
        else:
            continue
        state = session.describe()
        checkpoints.append(
            {
                "seq": state["last_seq"],
                "mode": state["mode"],
                "knowledge": state["knowledge"],
                "pending": state["pending"],
            }
        )
    # One undo at the very end so the fixture also covers the rollback fold.
    session.undo()
    state = session.describe()
    checkpoints.append(
        {
            "seq": state["last_seq"],
            "mode": state["mode"],
            "knowledge": state["knowledge"],
            "pending": state["pending"],
        }
    )
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(
        json.dumps(
            {
                "bootstrap": initial,
                "events": session.events,
                "checkpoints": checkpoints,
            },
            indent=1,
            sort_keys=True,
        )
    )
    print(f"wrote {OUT} ({len(session.events)} events, {len(checkpoints)} checkpoints)")


if __name__ == "__main__":
    main()
