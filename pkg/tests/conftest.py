from __future__ import annotations

import copy

import pytest

from tasktutor.dialog import DialogSession, SessionConfig
from tasktutor.subroutines import MockBackend


@pytest.fixture
def mock_backend() -> MockBackend:
    return MockBackend()


@pytest.fixture
def session() -> DialogSession:
    return DialogSession(config=SessionConfig(), backend=MockBackend())


@pytest.fixture
def gate_session() -> DialogSession:
    """Confirmations off: the verbalize/paraphrase gate decides matches."""
    return DialogSession(
        config=SessionConfig(confirmations=False), backend=MockBackend()
    )


def state_tuple(session: DialogSession) -> tuple:
    """The undo-relevant state: kb, world, mode, pending request, frames."""
    return (
        session.kb,
        session.world,
        session.mode,
        copy.deepcopy(session.pending),
        copy.deepcopy(session.frames),
    )


def drive(session: DialogSession, inputs: list) -> None:
    """Apply ('say', text) / ('approve',) / ('correct', v) / ('undo',) tuples."""
    for item in inputs:
        kind = item[0]
        if kind == "say":
            session.process_utterance(item[1])
        elif kind == "approve":
            session.resolve_confirmation("approve")
        elif kind == "correct":
            session.resolve_confirmation("correct", item[1])
        elif kind == "undo":
            session.undo()
        else:
            raise AssertionError(f"unknown input {item!r}")
