"""Simulated kitchen: grid world, the two primitives, milestones, snapshots.

The world is a small Overcooked-style kitchen. Agents interact through
exactly two primitives: ``moveTo`` (breadth-first search to a cell adjacent
to the target, then face it) and ``pressSpace`` (context-dependent
interaction with the faced cell). All operations are pure: they take a
world value and return a new one, which makes snapshot/restore exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from importlib import resources

from .errors import BadConfig, UnknownObject, Unreachable

FLOOR = "floor"
COUNTER = "counter"
ONION_DISPENSER = "onion_dispenser"
TOMATO_DISPENSER = "tomato_dispenser"
PLATE_DISPENSER = "plate_dispenser"
POT = "pot"
DELIVERY = "delivery"

LEGEND = {
    " ": FLOOR,
    ".": FLOOR,
    "X": COUNTER,
    "O": ONION_DISPENSER,
    "T": TOMATO_DISPENSER,
    "D": PLATE_DISPENSER,
    "P": POT,
    "S": DELIVERY,
}
LEGEND_CHARS = {
    FLOOR: ".",
    COUNTER: "X",
    ONION_DISPENSER: "O",
    TOMATO_DISPENSER: "T",
    PLATE_DISPENSER: "D",
    POT: "P",
    DELIVERY: "S",
}

# Object class published for each interactable cell kind.
OBJECT_CLASSES = {
    ONION_DISPENSER: "onion",
    TOMATO_DISPENSER: "tomato",
    PLATE_DISPENSER: "plate",
    POT: "pot",
    DELIVERY: "delivery",
}

# Expansion order N, S, E, W; x grows east, y grows south.
DIRECTIONS = (("N", 0, -1), ("S", 0, 1), ("E", 1, 0), ("W", -1, 0))
FACING_DELTA = {name: (dx, dy) for name, dx, dy in DIRECTIONS}

HOLD_NONE = None
HOLD_ONION = "onion"
HOLD_TOMATO = "tomato"
HOLD_CLEAN_PLATE = "clean_plate"
HOLD_SOUP_PLATE = "soup_plate"

POT_IDLE = "idle"
POT_COOKING = "cooking"
POT_READY = "ready"

MILESTONE_PICKED_UP_ONION = "PickedUpOnion"
MILESTONE_ONION_IN_POT = "OnionInPot"
MILESTONE_POT_TURNED_ON = "PotTurnedOn"
MILESTONE_SOUP_PLATED = "SoupPlated"
MILESTONE_SOUP_DELIVERED = "SoupDelivered"
MILESTONES = (
    MILESTONE_PICKED_UP_ONION,
    MILESTONE_ONION_IN_POT,
    MILESTONE_POT_TURNED_ON,
    MILESTONE_SOUP_PLATED,
    MILESTONE_SOUP_DELIVERED,
)

# Primitive actions the environment provides, with their parameter slots.
PRIMITIVE_ACTIONS = {"moveTo": ("target",), "pressSpace": ()}

MOVE_TO = "moveTo"
PRESS_SPACE = "pressSpace"


@dataclass(frozen=True)
class Grid:
    width: int
    height: int
    cells: tuple[tuple[str, ...], ...]  # rows, cells[y][x]

    def kind_at(self, x: int, y: int) -> str:
        return self.cells[y][x]

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_floor(self, x: int, y: int) -> bool:
        return self.in_bounds(x, y) and self.cells[y][x] == FLOOR

    def find(self, kind: str) -> list[tuple[int, int]]:
        """All cells of ``kind`` in row-major scan order."""
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if self.cells[y][x] == kind
        ]


@dataclass(frozen=True)
class AgentState:
    pos: tuple[int, int]
    facing: str
    holding: str | None = HOLD_NONE


@dataclass(frozen=True)
class PotState:
    contents: tuple[str, ...] = ()
    phase: str = POT_IDLE
    ticks_left: int = 0


@dataclass(frozen=True)
class EnvRules:
    pot_capacity: int = 3
    cook_ticks: int = 0


@dataclass(frozen=True)
class WorldState:
    grid: Grid
    agent: AgentState
    pots: tuple[tuple[tuple[int, int], PotState], ...]
    milestones: frozenset[str]
    tick: int
    rules: EnvRules

    def pot_at(self, cell: tuple[int, int]) -> PotState | None:
        for pos, pot in self.pots:
            if pos == cell:
                return pot
        return None


def parse_layout(text: str) -> tuple[Grid, tuple[int, int]]:
    """Parse a character map into a grid plus the agent start cell."""
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise BadConfig("empty layout")
    width = max(len(row) for row in rows)
    start: tuple[int, int] | None = None
    cells: list[tuple[str, ...]] = []
    for y, row in enumerate(rows):
        parsed: list[str] = []
        for x in range(width):
            char = row[x] if x < len(row) else "X"
            if char == "1":
                if start is not None:
                    raise BadConfig("multiple agent start cells")
                start = (x, y)
                char = "."
            if char not in LEGEND:
                raise BadConfig(f"unknown layout character {char!r} at {(x, y)}")
            parsed.append(LEGEND[char])
        cells.append(tuple(parsed))
    grid = Grid(width=width, height=len(rows), cells=tuple(cells))
    if start is None:
        raise BadConfig("layout has no agent start cell ('1')")
    for x in range(grid.width):
        if grid.is_floor(x, 0) or grid.is_floor(x, grid.height - 1):
            raise BadConfig("border cells must not be floor")
    for y in range(grid.height):
        if grid.is_floor(0, y) or grid.is_floor(grid.width - 1, y):
            raise BadConfig("border cells must not be floor")
    if not grid.find(POT):
        raise BadConfig("layout needs at least one pot")
    return grid, start


def default_layout_text() -> str:
    return (
        resources.files("tasktutor.data.layouts").joinpath("default.layout").read_text()
    )


def initial_state(layout_text: str | None = None, rules: EnvRules | None = None) -> WorldState:
    grid, start = parse_layout(layout_text or default_layout_text())
    pots = tuple((cell, PotState()) for cell in grid.find(POT))
    return WorldState(
        grid=grid,
        agent=AgentState(pos=start, facing="S"),
        pots=pots,
        milestones=frozenset(),
        tick=0,
        rules=rules or EnvRules(),
    )


def _object_table(grid: Grid) -> list[tuple[str, str, tuple[int, int]]]:
    """(name, class, cell) for every interactable cell, scan-ordered.

    Repeated classes get numeric suffixes starting at 2 (pot, pot2, ...).
    """
    counts: dict[str, int] = {}
    table: list[tuple[str, str, tuple[int, int]]] = []
    for y in range(grid.height):
        for x in range(grid.width):
            cls = OBJECT_CLASSES.get(grid.kind_at(x, y))
            if cls is None:
                continue
            counts[cls] = counts.get(cls, 0) + 1
            name = cls if counts[cls] == 1 else f"{cls}{counts[cls]}"
            table.append((name, cls, (x, y)))
    return table


def list_objects(state: WorldState) -> list[str]:
    """Published object references for the loaded grid, in stable scan order."""
    return [name for name, _, _ in _object_table(state.grid)]


def object_cells(state: WorldState, ref: str) -> list[tuple[int, int]]:
    """Candidate cells for a reference: one for instance names, all for a class."""
    table = _object_table(state.grid)
    exact = [cell for name, _, cell in table if name == ref]
    by_class = [cell for _, cls, cell in table if cls == ref]
    if ref in OBJECT_CLASSES.values() and by_class:
        return by_class
    if exact:
        return exact
    raise UnknownObject(ref)


def _adjacent_floor(grid: Grid, cell: tuple[int, int]) -> list[tuple[int, int]]:
    x, y = cell
    return [
        (x + dx, y + dy)
        for _, dx, dy in DIRECTIONS
        if grid.is_floor(x + dx, y + dy)
    ]


def bfs_path(
    grid: Grid, start: tuple[int, int], target: tuple[int, int]
) -> list[str]:
    """Shortest move sequence from ``start`` to a floor cell adjacent to ``target``.

    Deterministic: neighbors expand in N, S, E, W order through a FIFO queue.
    """
    if not grid.is_floor(*start):
        raise Unreachable(f"start {start} is not a floor cell")
    if not grid.in_bounds(*target):
        raise Unreachable(f"target {target} out of bounds")
    goals = set(_adjacent_floor(grid, target))
    if start in goals or start == target:
        return []
    if not goals:
        raise Unreachable(f"no floor cell adjacent to {target}")
    came_from: dict[tuple[int, int], tuple[tuple[int, int], str] | None] = {start: None}
    queue: deque[tuple[int, int]] = deque([start])
    while queue:
        current = queue.popleft()
        if current in goals:
            moves: list[str] = []
            cursor = current
            while came_from[cursor] is not None:
                prev, move = came_from[cursor]  # type: ignore[misc]
                moves.append(move)
                cursor = prev
            moves.reverse()
            return moves
        cx, cy = current
        for move, dx, dy in DIRECTIONS:
            nxt = (cx + dx, cy + dy)
            if nxt not in came_from and grid.is_floor(*nxt):
                came_from[nxt] = (current, move)
                queue.append(nxt)
    raise Unreachable(f"no path from {start} to a cell adjacent to {target}")


def _facing_toward(pos: tuple[int, int], target: tuple[int, int]) -> str:
    dx, dy = target[0] - pos[0], target[1] - pos[1]
    for name, fx, fy in DIRECTIONS:
        if (fx, fy) == (dx, dy):
            return name
    raise Unreachable(f"{target} is not adjacent to {pos}")


def move_to(state: WorldState, ref: str) -> tuple[WorldState, list[str]]:
    """Walk to the nearest instance of ``ref`` and face it.

    Returns the new state and the move sequence taken. Tick advances by the
    path length, plus one if a final turn was needed. Already adjacent and
    facing means a no-op.
    """
    candidates = object_cells(state, ref)
    best: tuple[int, tuple[int, int], list[str]] | None = None
    for cell in candidates:  # scan order; strict < keeps the first on ties
        try:
            path = bfs_path(state.grid, state.agent.pos, cell)
        except Unreachable:
            continue
        if best is None or len(path) < best[0]:
            best = (len(path), cell, path)
    if best is None:
        raise Unreachable(ref)
    _, target_cell, path = best
    pos = state.agent.pos
    facing = state.agent.facing
    ticks = 0
    for move in path:
        dx, dy = FACING_DELTA[move]
        pos = (pos[0] + dx, pos[1] + dy)
        facing = move
        ticks += 1
    final_facing = _facing_toward(pos, target_cell)
    if final_facing != facing:
        facing = final_facing
        ticks += 1
    new_state = replace(
        state,
        agent=replace(state.agent, pos=pos, facing=facing),
        tick=state.tick + ticks,
    )
    return new_state, path


def _set_pot(state: WorldState, cell: tuple[int, int], pot: PotState) -> WorldState:
    pots = tuple((pos, pot if pos == cell else old) for pos, old in state.pots)
    return replace(state, pots=pots)


def press_space(state: WorldState) -> tuple[WorldState, list[str]]:
    """Interact with the faced cell; no-op in inapplicable contexts.

    Effects by (faced cell, held item, pot phase): dispensers hand over an
    item to an empty hand; a pot accepts a held ingredient while idle, starts
    cooking when idle and non-empty with an empty hand, and fills a clean
    plate once ready; the delivery station accepts a soup plate.
    Returns the new state and any newly reached milestones.
    """
    x, y = state.agent.pos
    dx, dy = FACING_DELTA[state.agent.facing]
    faced = (x + dx, y + dy)
    kind = state.grid.kind_at(*faced) if state.grid.in_bounds(*faced) else COUNTER
    agent = state.agent
    new_state = replace(state, tick=state.tick + 1)
    gained: list[str] = []

    if kind == ONION_DISPENSER and agent.holding is HOLD_NONE:
        new_state = replace(new_state, agent=replace(agent, holding=HOLD_ONION))
        gained.append(MILESTONE_PICKED_UP_ONION)
    elif kind == TOMATO_DISPENSER and agent.holding is HOLD_NONE:
        new_state = replace(new_state, agent=replace(agent, holding=HOLD_TOMATO))
    elif kind == PLATE_DISPENSER and agent.holding is HOLD_NONE:
        new_state = replace(new_state, agent=replace(agent, holding=HOLD_CLEAN_PLATE))
    elif kind == POT:
        pot = state.pot_at(faced)
        assert pot is not None
        if (
            agent.holding in (HOLD_ONION, HOLD_TOMATO)
            and pot.phase == POT_IDLE
            and len(pot.contents) < state.rules.pot_capacity
        ):
            new_state = _set_pot(
                replace(new_state, agent=replace(agent, holding=HOLD_NONE)),
                faced,
                replace(pot, contents=pot.contents + (agent.holding,)),
            )
            if agent.holding == HOLD_ONION:
                gained.append(MILESTONE_ONION_IN_POT)
        elif agent.holding is HOLD_NONE and pot.phase == POT_IDLE and pot.contents:
            if state.rules.cook_ticks <= 0:
                cooked = replace(pot, phase=POT_READY, ticks_left=0)
            else:
                cooked = replace(pot, phase=POT_COOKING, ticks_left=state.rules.cook_ticks)
            new_state = _set_pot(new_state, faced, cooked)
            gained.append(MILESTONE_POT_TURNED_ON)
        elif agent.holding == HOLD_CLEAN_PLATE and pot.phase == POT_READY:
            new_state = _set_pot(
                replace(new_state, agent=replace(agent, holding=HOLD_SOUP_PLATE)),
                faced,
                PotState(),
            )
            gained.append(MILESTONE_SOUP_PLATED)
    elif kind == DELIVERY and agent.holding == HOLD_SOUP_PLATE:
        new_state = replace(new_state, agent=replace(agent, holding=HOLD_NONE))
        gained.append(MILESTONE_SOUP_DELIVERED)

    new_milestones = [m for m in gained if m not in state.milestones]
    if new_milestones:
        new_state = replace(
            new_state, milestones=state.milestones | set(new_milestones)
        )
    return new_state, new_milestones


def tick_pots(state: WorldState, ticks: int = 1) -> WorldState:
    """Advance cooking timers; Ready is absorbing until plated."""
    if ticks <= 0:
        return state
    pots = []
    for cell, pot in state.pots:
        if pot.phase == POT_COOKING:
            left = max(0, pot.ticks_left - ticks)
            pot = (
                replace(pot, phase=POT_READY, ticks_left=0)
                if left == 0
                else replace(pot, ticks_left=left)
            )
        pots.append((cell, pot))
    return replace(state, pots=tuple(pots))


def snapshot(state: WorldState) -> WorldState:
    """World states are immutable values; the state is its own snapshot."""
    return state


def restore(snap: WorldState) -> WorldState:
    return snap


def render(state: WorldState) -> dict:
    """JSON-safe view of the world for clients."""
    rows = ["".join(LEGEND_CHARS[k] for k in row) for row in state.grid.cells]
    return {
        "width": state.grid.width,
        "height": state.grid.height,
        "rows": rows,
        "agent": {
            "x": state.agent.pos[0],
            "y": state.agent.pos[1],
            "facing": state.agent.facing,
            "holding": state.agent.holding,
        },
        "pots": [
            {
                "x": cell[0],
                "y": cell[1],
                "contents": list(pot.contents),
                "phase": pot.phase,
                "ticks_left": pot.ticks_left,
            }
            for cell, pot in state.pots
        ],
        "milestones": sorted(state.milestones),
        "tick": state.tick,
        "objects": list_objects(state),
    }
