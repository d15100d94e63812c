"""Line-oriented teaching scripts: parse, run, and check expectations.

One directive per line, diff-friendly:

    say <utterance>          drive a user message
    approve                  approve the pending confirmation
    correct <value>          correct it (segments 'a | b', args 'x,y', name, or 'none')
    undo                     click undo
    expect_milestone <Name>  assert a milestone has been reached
    expect_knowledge <a,b>   assert all names appear in the knowledge display
    expect_question <text>   assert the agent asked this since the last input

Runs stop at the first unmet expectation and report its line and event index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .dialog import DialogSession, SessionConfig, make_backend
from .errors import BadConfig, ScriptError
from .transcripts import header_record

INPUT_OPS = ("say", "approve", "correct", "undo")
EXPECT_OPS = ("expect_milestone", "expect_knowledge", "expect_question")
NO_ARG_OPS = ("approve", "undo")


@dataclass(frozen=True)
class Directive:
    op: str
    arg: str
    line: int


@dataclass
class ScriptResult:
    ok: bool
    failures: list[dict[str, Any]] = field(default_factory=list)
    session: DialogSession | None = None
    header: dict[str, Any] | None = None

    @property
    def records(self) -> list[dict[str, Any]]:
        return self.session.events if self.session else []


def parse_script(text: str) -> list[Directive]:
    directives: list[Directive] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        op = parts[0]
        arg = parts[1].strip() if len(parts) > 1 else ""
        if op not in INPUT_OPS + EXPECT_OPS:
            raise ScriptError(f"unknown directive {op!r}", line=number)
        if op in NO_ARG_OPS and arg:
            raise ScriptError(f"{op} takes no argument", line=number)
        if op not in NO_ARG_OPS and op != "correct" and not arg:
            raise ScriptError(f"{op} needs an argument", line=number)
        directives.append(Directive(op=op, arg=arg, line=number))
    return directives


def load_layout(config: SessionConfig) -> str | None:
    if config.layout_path is None:
        return None
    path = Path(config.layout_path)
    if not path.is_file():
        raise BadConfig(f"layout file not found: {path}")
    return path.read_text()


def bundled_script(name: str) -> str:
    """Read a teaching script shipped with the package (e.g. 'onion_soup')."""
    return resources.files("tasktutor.data.scripts").joinpath(f"{name}.script").read_text()


def run_script(
    text: str,
    config: SessionConfig | None = None,
    backend: Any = None,
    session: DialogSession | None = None,
) -> ScriptResult:
    """Drive a fresh (or provided) in-process session through the script."""
    directives = parse_script(text)
    config = config or SessionConfig()
    if session is None:
        session = DialogSession(
            config=config,
            backend=backend if backend is not None else make_backend(config),
            layout_text=load_layout(config),
        )
    result = ScriptResult(
        ok=True,
        session=session,
        header=header_record(session.config, session.layout_text),
    )
    window_start = 0

    def fail(directive: Directive, reason: str) -> None:
        result.ok = False
        result.failures.append(
            {
                "line": directive.line,
                "directive": f"{directive.op} {directive.arg}".strip(),
                "reason": reason,
                "event_index": len(session.events),
            }
        )

    for directive in directives:
        if directive.op in INPUT_OPS:
            window_start = len(session.events)
            if directive.op == "say":
                session.process_utterance(directive.arg)
            elif directive.op == "approve":
                session.resolve_confirmation("approve")
            elif directive.op == "correct":
                session.resolve_confirmation("correct", directive.arg)
            else:
                session.undo()
            continue
        if directive.op == "expect_milestone":
            if directive.arg not in session.world.milestones:
                fail(directive, f"milestone {directive.arg} not reached")
                break
        elif directive.op == "expect_knowledge":
            names = {schema.name for schema in session.kb}
            missing = [n.strip() for n in directive.arg.split(",") if n.strip() not in names]
            if missing:
                fail(directive, f"knowledge missing {', '.join(missing)}")
                break
        elif directive.op == "expect_question":
            window = session.events[window_start:]
            texts = [
                event.get("text", "")
                for event in window
                if event.get("type") == "agent_message"
            ] + [
                event.get("question", "")
                for event in window
                if event.get("type") == "confirmation_issued"
            ]
            if not any(directive.arg in text for text in texts):
                fail(directive, f"agent never asked {directive.arg!r}")
                break
    return result
