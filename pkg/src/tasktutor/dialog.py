"""Dialog-driven task learning: the session state machine.

A session owns a knowledge base and a world. Each user utterance is split
into atomic segments, and each segment is mapped to a known action, grounded
in world objects, and executed; segments that match nothing push a pending
definition and the agent asks "How do I <segment>?". Definitions nest
depth-first and, once complete, are generalized and stored as new schemas.

Primitives dispatch to the environment one at a time as steps resolve, so
the world progresses live during teaching. Every prompt for user input
pushes a full snapshot, and undo restores the previous one exactly.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Callable

from . import environment as env
from .errors import InvalidCorrection, MalformedResponse, TaskTutorError
from .htn import (
    LEARNED,
    PRIMITIVE,
    ActionSchema,
    Const,
    KnowledgeBase,
    Step,
    Var,
    add_schema,
    expand,
    to_document,
    unique_name,
)
from .subroutines import (
    DEFAULT_APOLOGY_WORDS,
    MockBackend,
    PromptLibrary,
    RemoteBackend,
    SubroutineRunner,
)
from .subroutines.parsing import sanitize_identifier

MODE_COMMAND = "awaiting_command"
MODE_CONFIRM = "awaiting_confirmation"
MODE_DEFINITION = "awaiting_definition"

KIND_SEGMENTATION = "segmentation"
KIND_MAPPING = "mapping"
KIND_NEW_ACTION = "new_action"
KIND_GROUNDING = "grounding"
KIND_GENERALIZATION = "generalization"
KIND_TASK_CORRECTNESS = "task_correctness"
CONFIRMATION_KINDS = (
    KIND_SEGMENTATION,
    KIND_MAPPING,
    KIND_NEW_ACTION,
    KIND_GROUNDING,
    KIND_GENERALIZATION,
    KIND_TASK_CORRECTNESS,
)

STAGE_MAP = "map"
STAGE_GATE = "gate"
STAGE_GROUND = "ground"
STAGE_COMMIT = "commit"


@dataclass(frozen=True)
class SessionConfig:
    backend: str = "mock"  # "mock" | "remote"
    confirmations: bool = True
    layout_path: str | None = None
    scold_budget: int = 2
    max_depth: int = 8
    pot_capacity: int = 3
    cook_ticks: int = 0
    lm_timeout: float = 30.0
    apology_words: tuple[str, ...] = DEFAULT_APOLOGY_WORDS

    def to_dict(self) -> dict[str, Any]:
        return {
            "backend": self.backend,
            "confirmations": self.confirmations,
            "layout_path": self.layout_path,
            "scold_budget": self.scold_budget,
            "max_depth": self.max_depth,
            "pot_capacity": self.pot_capacity,
            "cook_ticks": self.cook_ticks,
            "lm_timeout": self.lm_timeout,
            "apology_words": list(self.apology_words),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "SessionConfig":
        fields = {k: doc[k] for k in cls().to_dict() if k in doc}
        if "apology_words" in fields:
            fields["apology_words"] = tuple(fields["apology_words"])
        return cls(**fields)


@dataclass
class ConfirmationRequest:
    kind: str
    question: str
    payload: dict[str, Any]
    options: list[str] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "question": self.question,
            "payload": self.payload,
            "options": self.options,
        }


@dataclass
class SegmentTask:
    text: str
    stage: str = STAGE_MAP
    action: str | None = None
    args: list[str] | None = None


@dataclass
class Frame:
    """One level of work: the root command or a pending definition."""

    kind: str  # "command" | "definition"
    name: str | None = None
    source_segment: str | None = None
    queue: list[SegmentTask] = field(default_factory=list)
    steps: list[Step] = field(default_factory=list)


@dataclass
class Snapshot:
    kb: KnowledgeBase
    world: env.WorldState
    mode: str
    pending: ConfirmationRequest | None
    frames: list[Frame]


@dataclass
class Metrics:
    subroutines: dict[str, dict[str, int]] = field(
        default_factory=lambda: {
            kind: {"approved": 0, "corrected": 0} for kind in CONFIRMATION_KINDS
        }
    )
    undos: int = 0
    scolds: int = 0

    def count(self, kind: str, approved: bool) -> None:
        bucket = self.subroutines.setdefault(kind, {"approved": 0, "corrected": 0})
        bucket["approved" if approved else "corrected"] += 1


def make_backend(config: SessionConfig, map_overrides: dict[str, str | None] | None = None):
    if config.backend == "mock":
        return MockBackend(map_overrides=map_overrides)
    if config.backend == "remote":
        return RemoteBackend.from_env(timeout=config.lm_timeout)
    raise TaskTutorError(f"unknown backend kind {config.backend!r}")


def initial_kb() -> KnowledgeBase:
    kb = KnowledgeBase()
    for name, params in env.PRIMITIVE_ACTIONS.items():
        kb = add_schema(
            kb, ActionSchema(name=name, params=tuple(params), kind=PRIMITIVE)
        )
    return kb


class DialogSession:
    """A single teaching dialog: one logical actor, inputs processed in order."""

    def __init__(
        self,
        config: SessionConfig | None = None,
        backend: Any = None,
        layout_text: str | None = None,
        prompts: PromptLibrary | None = None,
    ) -> None:
        self.config = config or SessionConfig()
        self.layout_text = layout_text or env.default_layout_text()
        self.kb = initial_kb()
        self.world = env.initial_state(
            self.layout_text,
            env.EnvRules(
                pot_capacity=self.config.pot_capacity,
                cook_ticks=self.config.cook_ticks,
            ),
        )
        self.mode = MODE_COMMAND
        self.pending: ConfirmationRequest | None = None
        self.frames: list[Frame] = []
        self.snapshots: list[Snapshot] = []
        self.events: list[dict[str, Any]] = []
        self.listeners: list[Callable[[dict[str, Any]], None]] = []
        self.metrics = Metrics()
        self._seq = 0
        self.runner = SubroutineRunner(
            backend if backend is not None else make_backend(self.config),
            prompts=prompts,
            max_scolds=self.config.scold_budget,
            apology_words=self.config.apology_words,
            on_exchange=self._record_exchange,
        )

    # -- event plumbing -------------------------------------------------------

    def _emit(self, type_: str, **fields: Any) -> dict[str, Any]:
        self._seq += 1
        event: dict[str, Any] = {"seq": self._seq, "type": type_}
        event.update(fields)
        self.events.append(event)
        for listener in self.listeners:
            listener(event)
        return event

    def _record_exchange(self, exchange: Any) -> None:
        self.metrics.scolds += exchange.scolds
        record = exchange.to_record()
        record.pop("type", None)
        self._emit("exchange", **record)

    def _world_summary(self) -> dict[str, Any]:
        view = env.render(self.world)
        return {
            "agent": view["agent"],
            "pots": view["pots"],
            "milestones": view["milestones"],
            "tick": view["tick"],
        }

    def _objects(self) -> list[str]:
        return env.list_objects(self.world)

    # -- snapshots and undo -----------------------------------------------------

    def _push_snapshot(self) -> None:
        self.snapshots.append(
            Snapshot(
                kb=self.kb,
                world=self.world,
                mode=self.mode,
                pending=copy.deepcopy(self.pending),
                frames=copy.deepcopy(self.frames),
            )
        )

    def undo(self) -> list[dict[str, Any]]:
        """Rewind knowledge, world, mode, and pending work to the previous prompt."""
        mark = len(self.events)
        self._emit("input", channel="undo")
        if not self.snapshots:
            self._emit("agent_message", text="Nothing to undo yet.")
            return self.events[mark:]
        snap = self.snapshots.pop()
        self.kb = snap.kb
        self.world = snap.world
        self.mode = snap.mode
        self.pending = snap.pending
        self.frames = snap.frames
        self.metrics.undos += 1
        self._emit(
            "undo_applied",
            depth=len(self.snapshots),
            mode=self.mode,
            world=self._world_summary(),
            knowledge=self.knowledge_display(),
            pending=self.pending.to_dict() if self.pending else None,
        )
        self._emit("agent_message", text="Rewound to the previous prompt.")
        return self.events[mark:]

    # -- inputs ----------------------------------------------------------------

    def process_utterance(self, text: str) -> list[dict[str, Any]]:
        mark = len(self.events)
        self._emit("input", channel="message", text=text)
        if self.mode == MODE_CONFIRM:
            self._emit("user_message", text=text.strip())
            self._emit(
                "agent_message",
                text="Please answer the pending confirmation first, or undo.",
            )
            return self.events[mark:]
        stripped = text.strip()
        if not stripped:
            self._emit(
                "agent_message",
                text='Say something like "Cook an onion." to get started.',
            )
            return self.events[mark:]
        self._push_snapshot()
        self._emit("user_message", text=stripped)
        if self.mode == MODE_COMMAND:
            self.frames = [Frame(kind="command", source_segment=stripped)]
        exchange = self.runner.segment(stripped, self._objects())
        if not exchange.ok:
            self._issue(
                ConfirmationRequest(
                    kind=KIND_SEGMENTATION,
                    question=(
                        "I had trouble splitting that into steps. "
                        f"Should I treat it as one step: \"{stripped}\"?"
                    ),
                    payload={"segments": [stripped]},
                )
            )
            return self.events[mark:]
        segments = exchange.result
        if self.config.confirmations:
            listing = "; ".join(segments)
            self._issue(
                ConfirmationRequest(
                    kind=KIND_SEGMENTATION,
                    question=f"I broke that into {len(segments)} step(s): {listing}. Correct?",
                    payload={"segments": segments},
                )
            )
            return self.events[mark:]
        self._accept_segments(segments)
        self._drive()
        return self.events[mark:]

    def resolve_confirmation(
        self, verdict: str, correction: Any = None
    ) -> list[dict[str, Any]]:
        mark = len(self.events)
        self._emit("input", channel="confirm", verdict=verdict, correction=correction)
        if self.mode != MODE_CONFIRM or self.pending is None:
            self._emit("agent_message", text="There is nothing to confirm right now.")
            return self.events[mark:]
        request = self.pending
        approved = verdict == "approve"
        value: Any = None
        if approved:
            try:
                self._validate_approval(request)
            except InvalidCorrection as exc:
                self._emit(
                    "agent_message",
                    text=f"I cannot use that as-is ({exc}). {request.question}",
                )
                return self.events[mark:]
        else:
            try:
                value = self._validate_correction(request, correction)
            except InvalidCorrection as exc:
                self._emit(
                    "agent_message",
                    text=f"That correction does not work ({exc}). {request.question}",
                )
                return self.events[mark:]
        self._push_snapshot()
        self.metrics.count(request.kind, approved)
        self._emit(
            "confirmation_resolved",
            kind=request.kind,
            verdict="approved" if approved else "corrected",
            value=value,
        )
        self.pending = None
        self._apply_resolution(request, approved, value)
        return self.events[mark:]

    # -- confirmation handling ---------------------------------------------------

    def _issue(self, request: ConfirmationRequest) -> None:
        self.pending = request
        self.mode = MODE_CONFIRM
        self._emit("confirmation_issued", **request.to_dict())

    def _head_task(self) -> SegmentTask:
        return self.frames[-1].queue[0]

    def _check_args(self, action: str, args: Any) -> list[str]:
        schema = self.kb.get(action)
        if schema is None:
            raise InvalidCorrection(f"unknown action {action!r}")
        if not isinstance(args, list) or not all(isinstance(a, str) for a in args):
            raise InvalidCorrection("arguments must be a list of object names")
        objects = self._objects()
        bad = [a for a in args if a not in objects]
        if bad:
            raise InvalidCorrection(f"unknown objects {', '.join(bad)}")
        if len(args) != schema.arity:
            raise InvalidCorrection(
                f"{action} takes {schema.arity} argument(s), got {len(args)}"
            )
        return list(args)

    def _validate_approval(self, request: ConfirmationRequest) -> None:
        if request.kind == KIND_GROUNDING:
            self._check_args(request.payload["action"], request.payload["args"])

    def _validate_correction(self, request: ConfirmationRequest, correction: Any) -> Any:
        kind = request.kind
        if kind == KIND_SEGMENTATION:
            if isinstance(correction, str):
                correction = [part.strip() for part in correction.split("|")]
            if (
                not isinstance(correction, list)
                or not correction
                or not all(isinstance(s, str) and s.strip() for s in correction)
            ):
                raise InvalidCorrection("give one or more steps separated by '|'")
            return [s.strip() for s in correction]
        if kind in (KIND_MAPPING, KIND_NEW_ACTION):
            if correction is None or (
                isinstance(correction, str) and correction.strip().lower() in ("", "none")
            ):
                if kind == KIND_NEW_ACTION:
                    raise InvalidCorrection("approve instead to teach it as new")
                return None
            if not isinstance(correction, str) or correction.strip() not in self.kb:
                raise InvalidCorrection(f"not a known action: {correction!r}")
            return correction.strip()
        if kind == KIND_GROUNDING:
            if isinstance(correction, str):
                correction = [a.strip() for a in correction.split(",") if a.strip()]
            return self._check_args(request.payload["action"], correction)
        if kind == KIND_GENERALIZATION:
            if isinstance(correction, str):
                correction = [a.strip() for a in correction.split(",") if a.strip()]
            if not isinstance(correction, list):
                raise InvalidCorrection("give a comma-separated subset of used arguments")
            used = request.payload["used_args"]
            bad = [a for a in correction if a not in used]
            if bad:
                raise InvalidCorrection(
                    f"{', '.join(bad)} not among used arguments {', '.join(used) or '(none)'}"
                )
            chosen = set(correction)
            return [a for a in used if a in chosen]
        if kind == KIND_TASK_CORRECTNESS:
            return None
        raise InvalidCorrection(f"unknown confirmation kind {kind!r}")

    def _apply_resolution(
        self, request: ConfirmationRequest, approved: bool, value: Any
    ) -> None:
        kind = request.kind
        if kind == KIND_SEGMENTATION:
            segments = request.payload["segments"] if approved else value
            self._accept_segments(segments)
            self._drive()
            return
        if kind == KIND_MAPPING:
            task = self._head_task()
            name = request.payload["action"] if approved else value
            if name is None:
                if not self._begin_definition():
                    self._drive()
                return
            task.action = name
            task.stage = STAGE_GROUND
            self._drive()
            return
        if kind == KIND_NEW_ACTION:
            task = self._head_task()
            if approved:
                if not self._begin_definition():
                    self._drive()
                return
            task.action = value
            task.stage = STAGE_GROUND
            self._drive()
            return
        if kind == KIND_GROUNDING:
            task = self._head_task()
            task.args = request.payload["args"] if approved else value
            task.stage = STAGE_COMMIT
            self._drive()
            return
        if kind == KIND_GENERALIZATION:
            chosen = request.payload["proposal"] if approved else value
            if self._commit_definition(chosen):
                self._drive()
            return
        if kind == KIND_TASK_CORRECTNESS:
            if approved:
                self._emit("agent_message", text="Great, glad that worked.")
            else:
                self._emit(
                    "agent_message",
                    text="Noted, that was wrong. You can undo or teach me again.",
                )
            self.frames = []
            self.mode = MODE_COMMAND
            return

    # -- the main pipeline -------------------------------------------------------

    def _accept_segments(self, segments: list[str]) -> None:
        frame = self.frames[-1]
        frame.queue.extend(SegmentTask(text=s) for s in segments)

    def _drive(self) -> None:
        """Pump the pipeline until it pauses for user input or finishes."""
        while True:
            if not self.frames:
                self.mode = MODE_COMMAND
                return
            frame = self.frames[-1]
            if not frame.queue:
                if frame.kind == "definition":
                    if not frame.steps:
                        self._emit(
                            "agent_message",
                            text=(
                                "None of those steps worked out. "
                                f"How do I {frame.source_segment}?"
                            ),
                        )
                        self.mode = MODE_DEFINITION
                        return
                    used = self._used_args(frame.steps)
                    exchange = self.runner.generalize(frame.source_segment or "", used)
                    proposal = exchange.result if exchange.ok else []
                    if self.config.confirmations or not exchange.ok:
                        shown = ", ".join(proposal) or "(none)"
                        self._issue(
                            ConfirmationRequest(
                                kind=KIND_GENERALIZATION,
                                question=(
                                    f"For the new action '{frame.name}', I will make "
                                    f"these arguments variable: {shown}. Correct?"
                                ),
                                payload={
                                    "name": frame.name,
                                    "proposal": proposal,
                                    "used_args": used,
                                },
                                options=used,
                            )
                        )
                        return
                    if not self._commit_definition(proposal):
                        return
                    continue
                if self.config.confirmations:
                    self._issue(
                        ConfirmationRequest(
                            kind=KIND_TASK_CORRECTNESS,
                            question=f"Did I do \"{frame.source_segment}\" correctly?",
                            payload={"utterance": frame.source_segment},
                        )
                    )
                    return
                self._emit("agent_message", text="Done.")
                self.frames = []
                self.mode = MODE_COMMAND
                return

            task = frame.queue[0]
            if task.stage == STAGE_MAP:
                exchange = self.runner.map_action(task.text, self.kb.names())
                name = exchange.result if exchange.ok else None
                if self.config.confirmations:
                    if name is not None:
                        self._issue(
                            ConfirmationRequest(
                                kind=KIND_MAPPING,
                                question=(
                                    f"Does \"{task.text}\" match the known action "
                                    f"'{name}'?"
                                ),
                                payload={"segment": task.text, "action": name},
                                options=self.kb.names() + ["none"],
                            )
                        )
                    else:
                        self._issue(
                            ConfirmationRequest(
                                kind=KIND_NEW_ACTION,
                                question=(
                                    f"I don't know how to \"{task.text}\". "
                                    "Should I learn it as a new action?"
                                ),
                                payload={"segment": task.text},
                                options=self.kb.names() + ["none"],
                            )
                        )
                    return
                if name is None:
                    if self._begin_definition():
                        return
                    continue
                task.action = name
                task.stage = STAGE_GATE
                continue

            if task.stage == STAGE_GATE:
                # Confirmations are off: fill slots, then verbalize and compare.
                schema = self.kb.get(task.action)
                assert schema is not None
                if task.args is None:
                    if schema.arity == 0:
                        task.args = []
                    else:
                        grounded = self.runner.ground(
                            task.text, schema.name, list(schema.params), self._objects()
                        )
                        if not grounded.ok:
                            self._issue_ground_fallback(task, grounded.result)
                            return
                        task.args = grounded.result
                verbalized = self.runner.verbalize(task.action, task.args)
                accepted = False
                if verbalized.ok:
                    judged = self.runner.is_paraphrase(task.text, verbalized.result)
                    accepted = bool(judged.result) if judged.ok else False
                if accepted:
                    task.stage = STAGE_COMMIT
                    continue
                if self._begin_definition():
                    return
                continue

            if task.stage == STAGE_GROUND:
                schema = self.kb.get(task.action)
                assert schema is not None
                if schema.arity == 0:
                    task.args = []
                    task.stage = STAGE_COMMIT
                    continue
                grounded = self.runner.ground(
                    task.text, schema.name, list(schema.params), self._objects()
                )
                proposal = grounded.result if isinstance(grounded.result, list) else []
                shown = ", ".join(proposal) or "(nothing)"
                self._issue(
                    ConfirmationRequest(
                        kind=KIND_GROUNDING,
                        question=(
                            f"For \"{task.text}\", should '{task.action}' "
                            f"use: {shown}?"
                        ),
                        payload={
                            "segment": task.text,
                            "action": task.action,
                            "args": proposal,
                            "params": list(schema.params),
                        },
                        options=self._objects(),
                    )
                )
                return

            if task.stage == STAGE_COMMIT:
                step = Step(
                    action=task.action or "",
                    args=tuple(Const(ref) for ref in (task.args or [])),
                )
                if frame.kind == "definition":
                    frame.steps.append(step)
                error = self._execute_step(step)
                frame.queue.pop(0)
                if error and frame.queue:
                    self.mode = (
                        MODE_DEFINITION if frame.kind == "definition" else MODE_COMMAND
                    )
                    return
                continue

    def _issue_ground_fallback(self, task: SegmentTask, partial: Any) -> None:
        """Grounding failed closed; ask the user to pick arguments."""
        schema = self.kb.get(task.action or "")
        proposal = partial if isinstance(partial, list) else []
        self._issue(
            ConfirmationRequest(
                kind=KIND_GROUNDING,
                question=(
                    f"I could not pick arguments for \"{task.text}\" "
                    f"('{task.action}'). Which objects should it use?"
                ),
                payload={
                    "segment": task.text,
                    "action": task.action,
                    "args": proposal,
                    "params": list(schema.params) if schema else [],
                },
                options=self._objects(),
            )
        )

    # -- definitions ---------------------------------------------------------------

    def _definition_depth(self) -> int:
        return sum(1 for frame in self.frames if frame.kind == "definition")

    def _begin_definition(self) -> bool:
        """Push a pending definition for the head task; True if we paused to ask."""
        frame = self.frames[-1]
        task = frame.queue[0]
        if self._definition_depth() >= self.config.max_depth:
            self._emit(
                "error",
                code="recursion_limit",
                message=(
                    f"Definition depth limit ({self.config.max_depth}) reached; "
                    f"skipping \"{task.text}\"."
                ),
            )
            self._emit(
                "agent_message",
                text=(
                    f"We are too many definitions deep; I am skipping "
                    f"\"{task.text}\". Consider undoing."
                ),
            )
            frame.queue.pop(0)
            return False
        named = self.runner.name_action(task.text, self.kb.names())
        base: str | None = named.result if named.ok else None
        if base is None:
            try:
                base = sanitize_identifier(task.text)
            except MalformedResponse:
                base = "task"
        name = unique_name(self.kb, base)
        frame.queue.pop(0)
        self.frames.append(
            Frame(kind="definition", name=name, source_segment=task.text)
        )
        self._emit("agent_message", text=f"How do I {task.text}?")
        self.mode = MODE_DEFINITION
        return True

    def _used_args(self, steps: list[Step]) -> list[str]:
        """Object references used in the full expansion, in first-use order."""
        seen: list[str] = []
        for step in steps:
            for call in expand(self.kb, step, {}):
                for ref in call.args:
                    if ref not in seen:
                        seen.append(ref)
        return seen

    def _commit_definition(self, chosen: list[str]) -> bool:
        """Store the finished definition; False if it failed and we re-asked."""
        frame = self.frames[-1]
        used = self._used_args(frame.steps)
        generalized = [ref for ref in used if ref in set(chosen)]
        gen_set = set(generalized)
        body = tuple(
            Step(
                action=step.action,
                args=tuple(
                    Var(term.ref)
                    if isinstance(term, Const) and term.ref in gen_set
                    else term
                    for term in step.args
                ),
            )
            for step in frame.steps
        )
        schema = ActionSchema(
            name=frame.name or "task",
            params=tuple(generalized),
            kind=LEARNED,
            body=body,
            source_text=frame.source_segment or "",
        )
        try:
            self.kb = add_schema(self.kb, schema)
        except TaskTutorError as exc:
            self._emit("error", code="schema_rejected", message=str(exc))
            self._issue(
                ConfirmationRequest(
                    kind=KIND_GENERALIZATION,
                    question=(
                        f"Storing '{frame.name}' failed ({exc}). "
                        "Pick the arguments to make variable."
                    ),
                    payload={"name": frame.name, "proposal": [], "used_args": used},
                    options=used,
                )
            )
            return False
        self._emit(
            "action_learned",
            name=schema.name,
            params=list(schema.params),
            kind=schema.kind,
        )
        self.frames.pop()
        if self.frames and self.frames[-1].kind == "definition":
            self.frames[-1].steps.append(
                Step(action=schema.name, args=tuple(Const(ref) for ref in generalized))
            )
        return True

    # -- execution -------------------------------------------------------------------

    def execute_known(self, action: str, args: list[str]) -> str | None:
        """Expand and dispatch a known schema with ground arguments."""
        return self._execute_step(
            Step(action=action, args=tuple(Const(ref) for ref in args))
        )

    def _execute_step(self, step: Step) -> str | None:
        try:
            calls = expand(self.kb, step, {})
        except TaskTutorError as exc:
            self._emit("error", code="expand_failed", message=str(exc))
            return str(exc)
        for call in calls:
            detail: dict[str, Any] = {}
            try:
                if call.action == env.MOVE_TO:
                    self.world, path = env.move_to(self.world, call.args[0])
                    detail["path"] = path
                    milestones: list[str] = []
                elif call.action == env.PRESS_SPACE:
                    self.world, milestones = env.press_space(self.world)
                else:
                    self._emit(
                        "error",
                        code="unknown_primitive",
                        message=f"cannot dispatch action {call.action!r}",
                    )
                    return f"unknown primitive {call.action!r}"
            except TaskTutorError as exc:
                self._emit("error", code="environment", message=str(exc))
                self._emit(
                    "agent_message",
                    text=f"I could not do that ({exc}). What should I do?",
                )
                return str(exc)
            if self.config.cook_ticks > 0:
                self.world = env.tick_pots(self.world, 1)
            self._emit(
                "action_dispatched",
                action=call.action,
                args=list(call.args),
                world=self._world_summary(),
                **detail,
            )
            for milestone in milestones:
                self._emit("milestone", name=milestone, tick=self.world.tick)
        return None

    # -- views ---------------------------------------------------------------------

    def knowledge_display(self) -> list[dict[str, Any]]:
        return [
            {"name": s.name, "params": list(s.params), "kind": s.kind}
            for s in self.kb
        ]

    def describe(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "knowledge": self.knowledge_display(),
            "world": env.render(self.world),
            "pending": self.pending.to_dict() if self.pending else None,
            "last_seq": self._seq,
        }

    def export_metrics(self) -> dict[str, Any]:
        return {
            "subroutines": copy.deepcopy(self.metrics.subroutines),
            "undos": self.metrics.undos,
            "scolds": self.metrics.scolds,
            "milestones": sorted(self.world.milestones),
            "crashes": 0,
        }

    def kb_document(self) -> dict[str, Any]:
        return to_document(self.kb)
