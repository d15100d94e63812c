"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Everything runs in-process against the deterministic mock backend; no
network, no UI.
"""

from __future__ import annotations

import heapq
import json
import random
import time
from typing import Any

from click.testing import CliRunner

from conftest import state_tuple
from tasktutor import environment as env
from tasktutor.cli import main as cli_main
from tasktutor.dialog import (
    MODE_CONFIRM,
    MODE_DEFINITION,
    DialogSession,
    SessionConfig,
)
from tasktutor.errors import RefusedAfterRetries
from tasktutor.htn import PRIMITIVE, from_document
from tasktutor.scripts import bundled_script, parse_script, run_script
from tasktutor.subroutines import (
    MockBackend,
    PromptLibrary,
    ScriptedBackend,
    SubroutineRunner,
    with_scolding,
)
from tasktutor.transcripts import read_transcript, verify_replay

ALL_MILESTONES = {
    "PickedUpOnion",
    "OnionInPot",
    "PotTurnedOn",
    "SoupPlated",
    "SoupDelivered",
}


def report(criterion: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[ACCEPTANCE] {criterion}: {status}{suffix}")
    assert passed, f"{criterion}{suffix}"


def soup_result():
    return run_script(bundled_script("onion_soup"), SessionConfig())


def script_inputs(name: str) -> list[tuple]:
    inputs: list[tuple] = []
    for directive in parse_script(bundled_script(name)):
        if directive.op == "say":
            inputs.append(("say", directive.arg))
        elif directive.op == "approve":
            inputs.append(("approve",))
        elif directive.op == "correct":
            inputs.append(("correct", directive.arg))
        elif directive.op == "undo":
            inputs.append(("undo",))
    return inputs


def apply_input(session: DialogSession, item: tuple) -> None:
    if item[0] == "say":
        session.process_utterance(item[1])
    elif item[0] == "approve":
        session.resolve_confirmation("approve")
    elif item[0] == "correct":
        session.resolve_confirmation("correct", item[1])
    else:
        session.undo()


def test_onion_soup_end_to_end() -> None:
    started = time.perf_counter()
    result = soup_result()
    elapsed = time.perf_counter() - started
    session = result.session
    ok = result.ok
    ok &= session.world.milestones == ALL_MILESTONES
    names = {k["name"] for k in session.knowledge_display()}
    ok &= {"cook", "get", "put", "turnOn"} <= names
    # cook decomposes through learned subtasks down to the primitives.
    cook = session.kb.get("cook")
    ok &= cook is not None and all(
        session.kb.get(step.action).kind == "learned" for step in cook.body
    )
    for step in cook.body:
        child = session.kb.get(step.action)
        ok &= all(
            session.kb.get(s.action).kind == PRIMITIVE for s in child.body
        )
    ok &= elapsed < 5.0
    report(
        "onion-soup end-to-end",
        ok,
        f"milestones={len(session.world.milestones)}/5, {elapsed:.2f}s",
    )


def test_generalization_cook_a_tomato() -> None:
    result = soup_result()
    events = result.records
    tomato_at = max(
        i
        for i, e in enumerate(events)
        if e["type"] == "user_message" and e["text"] == "Cook a tomato."
    )
    tail = events[tomato_at:]
    clarifications = [
        e
        for e in tail
        if e["type"] == "agent_message" and "How do I" in e.get("text", "")
    ]
    learned = [e for e in tail if e["type"] == "action_learned"]
    dispatched = [
        (e["action"], tuple(e["args"]))
        for e in tail
        if e["type"] == "action_dispatched"
    ]
    ok = clarifications == [] and learned == []
    ok &= dispatched == [
        ("moveTo", ("tomato",)),
        ("pressSpace", ()),
        ("moveTo", ("pot",)),
        ("pressSpace", ()),
        ("moveTo", ("pot",)),
        ("pressSpace", ()),
    ]
    report(
        "generalization (cook a tomato)",
        ok,
        f"{len(clarifications)} clarifications, {len(learned)} new actions",
    )


def test_undo_exactness_over_prefixes() -> None:
    rng = random.Random(20240601)
    scripts = ["onion_soup", "name_collision"]
    checks = 0
    failures = 0

    # Every prefix of each bundled script, via undo-then-redo on one session.
    for name in scripts:
        session = DialogSession(config=SessionConfig(), backend=MockBackend())
        for item in script_inputs(name):
            expected = state_tuple(session)
            apply_input(session, item)
            session.undo()
            checks += 1
            if state_tuple(session) != expected:
                failures += 1
            apply_input(session, item)  # redo and continue

    # Random prefixes on fresh sessions until we pass 200 checks.
    while checks < 200:
        name = rng.choice(scripts)
        inputs = script_inputs(name)
        k = rng.randint(1, len(inputs))
        session = DialogSession(config=SessionConfig(), backend=MockBackend())
        for item in inputs[: k - 1]:
            apply_input(session, item)
        expected = state_tuple(session)
        apply_input(session, inputs[k - 1])
        session.undo()
        checks += 1
        if state_tuple(session) != expected:
            failures += 1
    report("undo exactness", failures == 0, f"{checks} prefixes, {failures} mismatches")


def test_paraphrase_gate() -> None:
    # The canonical inexact match: mapped to moveTo, the gate must reject it
    # and take the new-action path.
    backend = MockBackend(map_overrides={"get an onion": "moveTo"})
    session = DialogSession(config=SessionConfig(confirmations=False), backend=backend)
    events = session.process_utterance("Get an onion.")
    inexact_rejected = (
        session.mode == MODE_DEFINITION
        and any(
            e["type"] == "agent_message" and "How do I get an onion?" in e["text"]
            for e in events
        )
        and not any(e["type"] == "action_dispatched" for e in events)
    )

    clean = DialogSession(config=SessionConfig(confirmations=False), backend=MockBackend())
    accepted = any(
        e["type"] == "action_dispatched"
        for e in clean.process_utterance("Go to the onion.")
    )

    # Consistency: the committed/rejected decision equals the paraphrase
    # subroutine's own verdict on randomized fixtures.
    rng = random.Random(7)
    objects = ["onion", "tomato", "pot", "plate", "delivery"]
    verbs = ["go to the", "walk to the", "move to the", "head to the"]
    space = ["hit space", "press space", "press the space bar", "push space"]
    inexact = ["get an onion", "grab the tomato", "fetch a plate"]
    mismatches = 0
    for _ in range(100):
        kind = rng.random()
        overrides: dict[str, str | None] = {}
        if kind < 0.5:
            segment = f"{rng.choice(verbs)} {rng.choice(objects)}"
        elif kind < 0.75:
            segment = rng.choice(space)
        else:
            segment = rng.choice(inexact)
            overrides = {segment: "moveTo"}
        backend = MockBackend(map_overrides=overrides)
        probe = SubroutineRunner(backend, prompts=PromptLibrary())
        mapped = probe.map_action(segment, ["moveTo", "pressSpace"]).result
        if mapped is None:
            continue
        schema_params = ["target"] if mapped == "moveTo" else []
        grounded = probe.ground(segment, mapped, schema_params, objects)
        if not grounded.ok:
            continue
        sentence = probe.verbalize(mapped, grounded.result)
        expected = (
            bool(probe.is_paraphrase(segment, sentence.result).result)
            if sentence.ok
            else False
        )
        trial = DialogSession(
            config=SessionConfig(confirmations=False), backend=backend
        )
        events = trial.process_utterance(segment)
        committed = any(e["type"] == "action_dispatched" for e in events)
        if committed != expected:
            mismatches += 1
    ok = inexact_rejected and accepted and mismatches == 0
    report(
        "paraphrase gate",
        ok,
        f"inexact rejected={inexact_rejected}, correct accepted={accepted}, "
        f"mismatches={mismatches}/100",
    )


ADVERSARIAL_RESPONSES = [
    '{"action": "washTheKnife"}',
    '{"action": "selfDestruct"}',
    '{"action": 42}',
    '{"args": ["knife"]}',
    '{"args": ["onion", "knife", "spoon"]}',
    '{"args": "onion"}',
    '{"steps": ["wash the knife", "dance a jig"]}',
    '{"steps": []}',
    '{"steps": 5}',
    '{"generalize": ["knife", "spatula"]}',
    '{"name": "!!!"}',
    '{"name": ["x"]}',
    '{"match": "perhaps"}',
    '{"sentence": ""}',
    "I'm sorry, I cannot help with cooking tasks.",
    "As an AI language model, I do not have a physical body.",
    '{"broken": json',
    "null",
    "[]",
    "",
    "washTheKnife",
    "robot noises beep boop {{{",
]

FUZZ_UTTERANCES = [
    "Cook an onion.",
    "Go to the pot and hit space.",
    "Wash the knife twice.",
    "Do the thing with the stuff.",
    "Get a plate. Then deliver the soup.",
    "Turn the pot on after putting an onion in there.",
]


class AdversarialBackend:
    """Mixes garbage responses with valid mock answers; counts the garbage."""

    def __init__(self, seed: int) -> None:
        self.rng = random.Random(seed)
        self.mock = MockBackend()
        self.adversarial_served = 0

    def complete(self, prompt: dict[str, Any]) -> str:
        if self.rng.random() < 0.55:
            self.adversarial_served += 1
            return self.rng.choice(ADVERSARIAL_RESPONSES)
        return self.mock.complete(prompt)


def test_out_of_vocabulary_safety() -> None:
    rng = random.Random(99)
    backend = AdversarialBackend(seed=101)
    crashes = 0
    sessions: list[DialogSession] = []
    session = DialogSession(config=SessionConfig(), backend=backend)
    sessions.append(session)
    steps = 0
    while backend.adversarial_served < 1000 and steps < 20000:
        steps += 1
        if steps % 150 == 0:
            session = DialogSession(config=SessionConfig(), backend=backend)
            sessions.append(session)
        try:
            if session.mode == MODE_CONFIRM:
                roll = rng.random()
                if roll < 0.5:
                    session.resolve_confirmation("approve")
                elif roll < 0.75:
                    kind = session.pending.kind
                    correction: Any
                    if kind == "segmentation":
                        correction = "go to the onion | hit space"
                    elif kind in ("mapping", "new_action"):
                        correction = rng.choice(["moveTo", "none"])
                        if kind == "new_action" and correction == "none":
                            correction = "moveTo"
                    elif kind == "grounding":
                        params = session.pending.payload.get("params", [])
                        correction = ",".join(["onion"] * len(params))
                    elif kind == "generalization":
                        correction = ""
                    else:
                        correction = "no"
                    session.resolve_confirmation("correct", correction)
                else:
                    session.undo()
            else:
                session.process_utterance(rng.choice(FUZZ_UTTERANCES))
        except Exception:  # noqa: BLE001 - any escape is a crash by definition
            crashes += 1

    bad_dispatch = 0
    bad_kb = 0
    for s in sessions:
        objects = set(env.list_objects(s.world))
        for event in s.events:
            if event["type"] == "action_dispatched":
                if event["action"] not in ("moveTo", "pressSpace"):
                    bad_dispatch += 1
                if not set(event["args"]) <= objects:
                    bad_dispatch += 1
        try:
            from_document(s.kb_document())  # re-validates every reference
        except Exception:  # noqa: BLE001
            bad_kb += 1
    ok = crashes == 0 and bad_dispatch == 0 and bad_kb == 0
    report(
        "out-of-vocabulary safety",
        ok,
        f"{backend.adversarial_served} adversarial responses, "
        f"crashes={crashes}, bad dispatches={bad_dispatch}, bad KBs={bad_kb}",
    )


def test_scolding() -> None:
    prompts = PromptLibrary()

    def seg_prompt():
        return prompts.render("segment", {"utterance": "Cook an onion.", "objects": []})

    # Refusal with the AI-model phrase, then an answer: one scold, success.
    backend = ScriptedBackend(
        ["As an AI language model, I cannot cook.", '{"steps": ["cook an onion"]}']
    )
    text, attempts, scolds = with_scolding(backend, seg_prompt())
    phrase_ok = scolds == 1 and json.loads(text)["steps"] == ["cook an onion"]

    # Apology lexeme refusal, retry answers.
    backend = ScriptedBackend(["I'm sorry, but no.", '{"steps": ["hit space"]}'])
    _, _, scolds2 = with_scolding(backend, seg_prompt())
    apology_ok = scolds2 == 1

    # Exchange logging carries the scold count into session metrics.
    session = DialogSession(
        config=SessionConfig(),
        backend=ScriptedBackend(
            ["I apologize, I cannot.", '{"steps": ["go to the onion"]}']
        ),
    )
    session.process_utterance("Go to the onion.")
    logged_ok = session.export_metrics()["scolds"] == 1

    # Budget exhaustion: RefusedAfterRetries from the primitive, a degraded
    # confirmation (not a crash) from the session.
    exhausted = False
    try:
        with_scolding(ScriptedBackend(["sorry"] * 10), seg_prompt(), max_scolds=2)
    except RefusedAfterRetries:
        exhausted = True
    stubborn = DialogSession(
        config=SessionConfig(), backend=ScriptedBackend(["I am sorry."] * 10)
    )
    events = stubborn.process_utterance("Cook an onion.")
    degraded = (
        stubborn.mode == MODE_CONFIRM
        and stubborn.pending.kind == "segmentation"
        and len(events) > 0
    )
    ok = phrase_ok and apology_ok and logged_ok and exhausted and degraded
    report(
        "programmatic scolding",
        ok,
        f"phrase={phrase_ok}, apology={apology_ok}, logged={logged_ok}, "
        f"exhaustion={exhausted}, degraded={degraded}",
    )


def random_grid(rng: random.Random) -> env.Grid:
    width, height = 12, 8
    kinds = [env.COUNTER, env.POT, env.ONION_DISPENSER, env.DELIVERY]
    cells = []
    for y in range(height):
        row = []
        for x in range(width):
            if x in (0, width - 1) or y in (0, height - 1):
                row.append(env.COUNTER)
            elif rng.random() < 0.62:
                row.append(env.FLOOR)
            else:
                row.append(rng.choice(kinds))
        cells.append(tuple(row))
    return env.Grid(width=width, height=height, cells=tuple(cells))


def oracle_shortest(grid: env.Grid, start, target) -> int | None:
    goals = {
        (target[0] + dx, target[1] + dy)
        for _, dx, dy in env.DIRECTIONS
        if grid.is_floor(target[0] + dx, target[1] + dy)
    }
    if not goals:
        return None
    dist = {start: 0}
    heap = [(0, start)]
    while heap:
        d, cell = heapq.heappop(heap)
        if cell in goals:
            return d
        if d > dist.get(cell, 1 << 30):
            continue
        for _, dx, dy in env.DIRECTIONS:
            nxt = (cell[0] + dx, cell[1] + dy)
            if grid.is_floor(*nxt) and d + 1 < dist.get(nxt, 1 << 30):
                dist[nxt] = d + 1
                heapq.heappush(heap, (d + 1, nxt))
    return None


def test_bfs_optimality() -> None:
    rng = random.Random(424242)
    tested = 0
    mismatches = 0
    while tested < 500:
        grid = random_grid(rng)
        floors = [
            (x, y)
            for y in range(grid.height)
            for x in range(grid.width)
            if grid.is_floor(x, y)
        ]
        if not floors:
            continue
        start = rng.choice(floors)
        target = (
            rng.randrange(grid.width),
            rng.randrange(grid.height),
        )
        if target == start:
            continue
        tested += 1
        expected = oracle_shortest(grid, start, target)
        try:
            path = env.bfs_path(grid, start, target)
            actual: int | None = len(path)
        except env.Unreachable:
            actual = None
        except Exception:  # noqa: BLE001
            actual = -1
        if actual != expected:
            mismatches += 1
    report("bfs optimality", mismatches == 0, f"{tested} grids, {mismatches} mismatches")


def test_name_collision() -> None:
    result = run_script(bundled_script("name_collision"), SessionConfig())
    names = [k["name"] for k in result.session.knowledge_display()]
    ok = result.ok and "get" in names and "get2" in names
    get2 = result.session.kb.get("get2")
    ok &= get2 is not None and get2.source_text == "acquire a tomato"
    report("name collision", ok, f"names={names}")


def test_determinism_and_replay(tmp_path) -> None:
    runner = CliRunner()
    paths = [tmp_path / "run_a.jsonl", tmp_path / "run_b.jsonl"]
    for path in paths:
        outcome = runner.invoke(
            cli_main,
            [
                "teach",
                "--script",
                "onion_soup",
                "--backend",
                "mock",
                "--confirmations",
                "on",
                "--transcript-out",
                str(path),
            ],
        )
        assert outcome.exit_code == 0, outcome.output
    byte_identical = paths[0].read_bytes() == paths[1].read_bytes()

    header, records = read_transcript(paths[0])
    replay_report = verify_replay(header, records)

    cli_replay = runner.invoke(cli_main, ["replay", "--transcript", str(paths[0])])
    ok = byte_identical and replay_report.equal and cli_replay.exit_code == 0
    report(
        "determinism & replay",
        ok,
        f"byte-identical={byte_identical}, replay equal={replay_report.equal}",
    )


METRICS_SCRIPT = """
say Go to the tomato.
undo
say Go to the tomato.
approve
undo
approve
correct moveTo
correct onion
undo
approve
undo
approve
undo
approve
undo
approve
approve
"""


def test_metrics_shape() -> None:
    result = run_script(METRICS_SCRIPT, SessionConfig())
    metrics = result.session.export_metrics()
    expected_subroutines = {
        "segmentation": {"approved": 2, "corrected": 0},
        "mapping": {"approved": 0, "corrected": 1},
        "new_action": {"approved": 0, "corrected": 0},
        "grounding": {"approved": 4, "corrected": 1},
        "generalization": {"approved": 0, "corrected": 0},
        "task_correctness": {"approved": 1, "corrected": 0},
    }
    ok = metrics["subroutines"] == expected_subroutines
    ok &= metrics["undos"] == 6
    ok &= metrics["scolds"] == 0 and metrics["crashes"] == 0
    total_corrections = sum(v["corrected"] for v in metrics["subroutines"].values())
    ok &= total_corrections == 2
    report(
        "metrics shape",
        ok,
        f"undos={metrics['undos']}, corrections={total_corrections}",
    )
