"""Trajectories and the named signal channels specs are written against.

A Trace is the raw recorded object: visited states plus the actions taken
between them.  Feature channels turn a trace into a Signal the monitor can
evaluate.  Grid channels:

    d_obs    Manhattan distance to the nearest obstacle cell
    dist_red alias of d_obs (obstacles are drawn red in the recorder)
    d_goal   Manhattan distance to the nearest goal, or to goal_override
    d_goal_i Manhattan distance to the i-th declared goal (1-based)
    t        the step index, starting at 0

Mountain Car channels:

    d_flag   flag position bin minus current position bin; 0 or below
             means the car is at or past the flag
    t        the step index, starting at 0
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path

from .envs import GridEnv, MountainCarEnv, get_env
from .stl import Signal


class FeatureError(Exception):
    """Raised for unknown channels or malformed demonstration files."""


class UnreachableGoalError(FeatureError):
    """Raised when no obstacle-free path connects start and goal."""


@dataclass(frozen=True)
class Trace:
    """A visited-state sequence and the actions between consecutive states."""

    states: tuple
    actions: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if len(self.states) < 1:
            raise FeatureError("a trace needs at least one state")
        if self.actions and len(self.actions) != len(self.states) - 1:
            raise FeatureError(
                f"{len(self.states)} states need {len(self.states) - 1} actions, "
                f"got {len(self.actions)}"
            )

    def __len__(self) -> int:
        return len(self.states)


def manhattan(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


# --------------------------------------------------------------------------
# Channels
# --------------------------------------------------------------------------


def available_channels(env) -> tuple[str, ...]:
    if isinstance(env, GridEnv):
        per_goal = tuple(f"d_goal_{i}" for i in range(1, len(env.goals) + 1))
        return ("d_obs", "dist_red", "d_goal") + per_goal + ("t",)
    if isinstance(env, MountainCarEnv):
        return ("d_flag", "t")
    raise FeatureError(f"no channels defined for {type(env).__name__}")


def channel_value(env, channel: str, state, index: int, *, goal_override=None) -> float:
    """One sample of one channel; extract_signal maps this over a trace."""
    if channel == "t":
        return float(index)
    if isinstance(env, GridEnv):
        if channel in ("d_obs", "dist_red"):
            if not env.obstacles:
                # farther than any reachable cell, so avoidance is vacuous
                return float(env.width + env.height)
            return float(min(manhattan(state, o) for o in env.obstacles))
        if channel == "d_goal":
            targets = (goal_override,) if goal_override is not None else env.goals
            return float(min(manhattan(state, g) for g in targets))
        if channel.startswith("d_goal_"):
            try:
                i = int(channel[len("d_goal_") :])
            except ValueError:
                raise FeatureError(f"unknown channel {channel!r}") from None
            if not 1 <= i <= len(env.goals):
                raise FeatureError(
                    f"channel {channel!r} out of range for {len(env.goals)} goal(s)"
                )
            return float(manhattan(state, env.goals[i - 1]))
    if isinstance(env, MountainCarEnv) and channel == "d_flag":
        return float(env.flag_bin - state[0])
    raise FeatureError(f"unknown channel {channel!r} for {env.env_id}")


def extract_signal(env, trace: Trace, channels=None, *, goal_override=None) -> Signal:
    names = tuple(channels) if channels is not None else available_channels(env)
    data = {
        name: [
            channel_value(env, name, s, i, goal_override=goal_override)
            for i, s in enumerate(trace.states)
        ]
        for name in names
    }
    return Signal(data)


# --------------------------------------------------------------------------
# Shortest-path time bounds
# --------------------------------------------------------------------------


def bfs_time_bound(env: GridEnv, start=None, goal=None) -> int:
    """Length in steps of the shortest obstacle-avoiding path.

    Used as the T_goal budget a timely demonstration has to meet, so the
    search refuses to cut through obstacle cells even though the raw
    dynamics would allow it.
    """
    if not isinstance(env, GridEnv):
        raise FeatureError("shortest-path bounds are only defined on grids")
    src = start if start is not None else env.start
    dst = goal if goal is not None else env.goal
    dist = {src: 0}
    queue = deque([src])
    while queue:
        cell = queue.popleft()
        if cell == dst:
            return dist[cell]
        for action in env.actions:
            nxt = env.step(cell, action)
            if nxt in dist or nxt in env.obstacles:
                continue
            dist[nxt] = dist[cell] + 1
            queue.append(nxt)
    raise UnreachableGoalError(f"no path from {src} to {dst} in {env.env_id}")


def goal_sequence_bound(env: GridEnv, order: tuple[int, ...]) -> int:
    """Steps to visit the 1-based goal indices in the given order."""
    at = env.start
    total = 0
    for i in order:
        goal = env.goals[i - 1]
        total += bfs_time_bound(env, start=at, goal=goal)
        at = goal
    return total


def best_goal_order(env: GridEnv) -> tuple[tuple[int, ...], int]:
    """The visiting order with the smallest summed leg bound."""
    indices = range(1, len(env.goals) + 1)
    best: tuple[tuple[int, ...], int] | None = None
    for order in permutations(indices):
        bound = goal_sequence_bound(env, order)
        if best is None or bound < best[1]:
            best = (order, bound)
    assert best is not None
    return best


# --------------------------------------------------------------------------
# Demonstration files
# --------------------------------------------------------------------------


def trace_to_json(env, trace: Trace) -> dict:
    steps = []
    n = len(trace.states)
    for i, state in enumerate(trace.states):
        if isinstance(env, GridEnv):
            entry: dict = {"x": state[0], "y": state[1]}
        else:
            entry = {"bin_pos": state[0], "bin_vel": state[1]}
        if i < n - 1 and trace.actions:
            entry["action"] = trace.actions[i]
        steps.append(entry)
    return {"env_id": env.env_id, "steps": steps}


def trace_from_json(payload: dict, env=None) -> tuple[str, Trace]:
    """Parse one demonstration object; returns its env_id and the trace.

    The last step carries no action (or an explicit null); every earlier
    step must name one.  When env is given, or the env_id is a registered
    name, states and actions are validated against it.
    """
    if not isinstance(payload, dict) or "steps" not in payload:
        raise FeatureError("demonstration must be an object with a 'steps' list")
    env_id = payload.get("env_id", env.env_id if env is not None else None)
    if env_id is None:
        raise FeatureError("demonstration is missing 'env_id'")
    if env is None:
        try:
            env = get_env(env_id)
        except Exception:
            env = None  # unregistered map: keep coordinates unchecked
    steps = payload["steps"]
    if not isinstance(steps, list) or not steps:
        raise FeatureError("'steps' must be a non-empty list")
    states = []
    actions = []
    grid_like = not (isinstance(env, MountainCarEnv) or "bin_pos" in steps[0])
    for i, entry in enumerate(steps):
        last = i == len(steps) - 1
        try:
            if grid_like:
                state = (int(entry["x"]), int(entry["y"]))
            else:
                state = (int(entry["bin_pos"]), int(entry["bin_vel"]))
        except (KeyError, TypeError, ValueError):
            keys = "x/y" if grid_like else "bin_pos/bin_vel"
            raise FeatureError(f"step {i} is missing integer {keys}") from None
        action = entry.get("action")
        if last:
            if action is not None:
                raise FeatureError("the final step must not carry an action")
        else:
            if action is None:
                raise FeatureError(f"step {i} is missing its action")
            actions.append(action)
        states.append(state)
    trace = Trace(states=tuple(states), actions=tuple(actions))
    if env is not None:
        _validate_against_env(env, trace, env_id)
    return env_id, trace


def _validate_against_env(env, trace: Trace, env_id: str) -> None:
    for i, s in enumerate(trace.states):
        if isinstance(env, GridEnv):
            ok = env.in_bounds(s)
        else:
            ok = 0 <= s[0] < env.bins_pos and 0 <= s[1] < env.bins_vel
        if not ok:
            raise FeatureError(f"step {i} state {s} is outside {env_id}")
    for i, a in enumerate(trace.actions):
        if a not in env.actions:
            raise FeatureError(f"step {i} action {a!r} is not one of {env.actions}")


def load_demos(source, env=None) -> list[tuple[str, Trace]]:
    """Read one file holding either a single demonstration or a list."""
    text = Path(source).read_text() if not isinstance(source, dict) else None
    payload = json.loads(text) if text is not None else source
    items = payload if isinstance(payload, list) else [payload]
    return [trace_from_json(item, env=env) for item in items]


def save_demos(path, env, traces) -> None:
    items = [trace_to_json(env, t) for t in traces]
    payload = items if len(items) != 1 else items[0]
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
