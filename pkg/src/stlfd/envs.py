"""Environments: grid worlds from text maps and an abstracted Mountain Car.

Grid states are (row, col) with the origin at the top left.  Actions U/D/L/R
move one cell and clamp at the border.  Obstacle cells are ordinary cells as
far as the dynamics go; walking into one is possible and it is the training
loop's monitor that ends an episode there.  This keeps `step` a pure function
of (state, action).

Mountain Car is discretized onto a uniform bins_pos x bins_vel grid over the
canonical position and velocity ranges.  The abstract `step` applies the
closed-form dynamics to the bin center and re-discretizes; the continuous
dynamics are also exposed directly since sub-bin velocity increments vanish
under repeated center-snapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

GRID_ACTIONS = ("U", "D", "L", "R")
_GRID_DELTAS = {"U": (-1, 0), "D": (1, 0), "L": (0, -1), "R": (0, 1)}

MC_ACTIONS = (0, 1, 2)  # push left, no push, push right


class MapError(Exception):
    """Raised for malformed map text."""


@dataclass(frozen=True)
class GridEnv:
    env_id: str
    width: int
    height: int
    start: tuple[int, int]
    goals: tuple[tuple[int, int], ...]
    obstacles: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    @property
    def actions(self) -> tuple[str, ...]:
        return GRID_ACTIONS

    @property
    def goal(self) -> tuple[int, int]:
        return self.goals[0]

    def in_bounds(self, state: tuple[int, int]) -> bool:
        r, c = state
        return 0 <= r < self.height and 0 <= c < self.width

    def step(self, state: tuple[int, int], action: str) -> tuple[int, int]:
        """Deterministic move; walking off the edge leaves the state unchanged."""
        try:
            dr, dc = _GRID_DELTAS[action]
        except KeyError:
            raise MapError(f"unknown action {action!r} for grid") from None
        r, c = state[0] + dr, state[1] + dc
        if not self.in_bounds((r, c)):
            return state
        return (r, c)

    def states(self) -> Iterator[tuple[int, int]]:
        for r in range(self.height):
            for c in range(self.width):
                yield (r, c)

    def reached(self, state: tuple[int, int], goal: tuple[int, int]) -> bool:
        return state == goal


@dataclass(frozen=True)
class MountainCarEnv:
    env_id: str
    bins_pos: int = 50
    bins_vel: int = 50

    MIN_POS = -1.2
    MAX_POS = 0.6
    MAX_SPEED = 0.07
    GOAL_POS = 0.5
    FORCE = 0.001
    GRAVITY = 0.0025

    @property
    def actions(self) -> tuple[int, ...]:
        return MC_ACTIONS

    @property
    def start(self) -> tuple[int, int]:
        return self.discretize((-0.5, 0.0))

    @property
    def flag_bin(self) -> int:
        return self.discretize((self.GOAL_POS, 0.0))[0]

    @property
    def goal(self) -> tuple[int, int]:
        # representative goal cell: the flag column at zero velocity
        return (self.flag_bin, self.discretize((self.GOAL_POS, 0.0))[1])

    def discretize(self, cont: tuple[float, float]) -> tuple[int, int]:
        x, v = cont
        dx = (self.MAX_POS - self.MIN_POS) / self.bins_pos
        dv = (2 * self.MAX_SPEED) / self.bins_vel
        bp = min(self.bins_pos - 1, max(0, int((x - self.MIN_POS) / dx)))
        bv = min(self.bins_vel - 1, max(0, int((v + self.MAX_SPEED) / dv)))
        return (bp, bv)

    def bin_center(self, state: tuple[int, int]) -> tuple[float, float]:
        bp, bv = state
        dx = (self.MAX_POS - self.MIN_POS) / self.bins_pos
        dv = (2 * self.MAX_SPEED) / self.bins_vel
        return (self.MIN_POS + (bp + 0.5) * dx, -self.MAX_SPEED + (bv + 0.5) * dv)

    def step_continuous(
        self, cont: tuple[float, float], action: int
    ) -> tuple[float, float]:
        """One step of the classic dynamics x'' = 0.001*(a-1) - 0.0025*cos(3x)."""
        if action not in MC_ACTIONS:
            raise MapError(f"unknown action {action!r} for mountain car")
        x, v = cont
        v = v + (action - 1) * self.FORCE - self.GRAVITY * math.cos(3 * x)
        v = max(-self.MAX_SPEED, min(self.MAX_SPEED, v))
        x = x + v
        if x < self.MIN_POS:
            x, v = self.MIN_POS, 0.0
        if x > self.MAX_POS:
            x = self.MAX_POS
        return (x, v)

    def step(self, state: tuple[int, int], action: int) -> tuple[int, int]:
        """Abstract transition: dynamics applied at the bin center.

        Note that the velocity gained in one step is usually smaller than a
        velocity bin, so chains of abstract steps lose sub-bin progress;
        rollouts that need faithful motion should track the continuous state
        with step_continuous and discretize for observation only.
        """
        return self.discretize(self.step_continuous(self.bin_center(state), action))

    def states(self) -> Iterator[tuple[int, int]]:
        for bp in range(self.bins_pos):
            for bv in range(self.bins_vel):
                yield (bp, bv)

    def reached(self, state: tuple[int, int], goal: tuple[int, int]) -> bool:
        """The flag is a position threshold; any velocity counts."""
        return state[0] >= self.flag_bin


# --------------------------------------------------------------------------
# Map text
# --------------------------------------------------------------------------

_CELL_TOKENS = {"S", "G", "#", ".", "G1", "G2", "G3", "G4"}


def load_map(text: str, env_id: str = "custom") -> GridEnv:
    """Parse a rectangular map into a GridEnv.

    Cells are S (start), G (single goal) or G1..G4 (ordered goals), # (an
    obstacle or hole), and . (free ice/floor).  Rows may be written as
    whitespace-separated tokens or, when no multi-character goal labels are
    needed, as contiguous single characters.
    """
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise MapError("map text is empty")
    rows: list[list[str]] = []
    for ln in lines:
        rows.append(ln.split() if any(ch.isspace() for ch in ln) else list(ln))
    width = len(rows[0])
    start: tuple[int, int] | None = None
    goals: dict[int, tuple[int, int]] = {}
    obstacles: set[tuple[int, int]] = set()
    for r, row in enumerate(rows):
        if len(row) != width:
            raise MapError(f"row {r} has {len(row)} cells, expected {width}")
        for c, token in enumerate(row):
            if token not in _CELL_TOKENS:
                raise MapError(f"unknown cell {token!r} at row {r}, column {c}")
            if token == "S":
                if start is not None:
                    raise MapError("map has more than one start cell")
                start = (r, c)
            elif token == "G":
                goals[0] = (r, c)
            elif token.startswith("G"):
                index = int(token[1:])
                if index in goals:
                    raise MapError(f"duplicate goal label {token!r}")
                goals[index] = (r, c)
            elif token == "#":
                obstacles.add((r, c))
    if start is None:
        raise MapError("map has no start cell")
    if not goals:
        raise MapError("map has no goal cell")
    if 0 in goals and len(goals) > 1:
        raise MapError("mix of unnumbered G and numbered G1/G2 goals")
    if 0 not in goals and sorted(goals) != list(range(1, len(goals) + 1)):
        raise MapError("numbered goals must be G1, G2, ... without gaps")
    ordered = tuple(goals[k] for k in sorted(goals))
    for g in ordered:
        if g in obstacles:
            raise MapError(f"goal {g} is an obstacle cell")
    if start in obstacles:
        raise MapError(f"start {start} is an obstacle cell")
    return GridEnv(
        env_id=env_id,
        width=width,
        height=len(rows),
        start=start,
        goals=ordered,
        obstacles=frozenset(obstacles),
    )


def format_map(env: GridEnv) -> str:
    """The inverse of load_map, always in token form."""
    labels: dict[tuple[int, int], str] = {env.start: "S"}
    if len(env.goals) == 1:
        labels[env.goals[0]] = "G"
    else:
        for i, g in enumerate(env.goals, start=1):
            labels[g] = f"G{i}"
    for o in env.obstacles:
        labels[o] = "#"
    lines = []
    for r in range(env.height):
        lines.append(" ".join(labels.get((r, c), ".") for c in range(env.width)))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Registry
# --------------------------------------------------------------------------

GRID5_MAP = """\
. . . . G
. # # . .
. . . . .
. . . . .
S . . . .
"""

GRID7_MAP = """\
. . . . . . G
. . . . . . .
. # # . . . .
. # # . . . .
. . . . . . .
. . . . . . .
S . . . . . .
"""

GRID7_MULTI_MAP = """\
. . . . . . G1
. . . . . . .
. . # . . . .
. . . # . . .
. . . . . . .
. . . . . . .
S . . . . . G2
"""

GRID10_MAP = """\
. . . . . . . . . G
. . . . . . . . . .
. . # # . . . . . .
. . # # . . . . . .
. . . . . . # . . .
. . . . . . # . . .
. . . . # . . . . .
. . . . # . . . . .
. . . . . . . . . .
S . . . . . . . . .
"""

FROZENLAKE4_MAP = """\
S . # #
. . # #
. . . .
. . . G
"""

FROZENLAKE4_TEST_MAP = """\
S . . .
. . . .
# # . .
# # . G
"""

FROZENLAKE8_MAP = """\
S . . . . . . .
. . . . # . . .
. . # . . . # .
. . . . # . . .
. . # . . # . .
. . . # . . # .
. . . . . . . .
. . . . . . . G
"""

FROZENLAKE8_TEST_MAP = """\
S . . . . . . .
. . # . . # . .
. . . # . . . .
. . . # . . # .
. . . . # . . .
. . # . . # . .
. . . . . . . .
. . . . . . . G
"""

_GRID_MAPS = {
    "grid5": GRID5_MAP,
    "grid7": GRID7_MAP,
    "grid7_multi": GRID7_MULTI_MAP,
    "grid10": GRID10_MAP,
    "frozenlake4": FROZENLAKE4_MAP,
    "frozenlake4_test": FROZENLAKE4_TEST_MAP,
    "frozenlake8": FROZENLAKE8_MAP,
    "frozenlake8_test": FROZENLAKE8_TEST_MAP,
}

_MC_BINS = {"mountaincar50": 50, "mountaincar75": 75, "mountaincar100": 100}

ENV_IDS = tuple(_GRID_MAPS) + tuple(_MC_BINS)


def get_env(env_id: str) -> GridEnv | MountainCarEnv:
    if env_id in _GRID_MAPS:
        return load_map(_GRID_MAPS[env_id], env_id=env_id)
    if env_id in _MC_BINS:
        n = _MC_BINS[env_id]
        return MountainCarEnv(env_id=env_id, bins_pos=n, bins_vel=n)
    raise MapError(f"unknown environment {env_id!r}; known: {', '.join(ENV_IDS)}")
