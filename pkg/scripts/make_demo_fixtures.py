#!/usr/bin/env python3
"""Regenerate the demonstration fixtures under fixtures/.

Grid demonstrations are short hand-picked walks: a couple of safe runs per
map, one crash, one run that stops early.  Mountain car demonstrations come
from rolling a bang-bang controller (push in the direction of the current
velocity) through the continuous dynamics and recording the visited bins.
The script is deterministic, so rerunning it reproduces the files byte for
byte.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from stlfd.envs import format_map, get_env
from stlfd.features import Trace, save_demos

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def walk(env, actions):
    """Roll a scripted action sequence into a Trace."""
    states = [env.start]
    for action in actions:
        states.append(env.step(states[-1], action))
    return Trace(states=tuple(states), actions=tuple(actions))


def bang_bang_trace(env, coast_steps=0, cap=200):
    """Push along the current velocity until the flag bin is passed."""
    cont = env.bin_center(env.start)
    states = [env.start]
    actions = []
    for _ in range(cap):
        if coast_steps > 0:
            action = 1
            coast_steps -= 1
        else:
            action = 2 if cont[1] >= 0 else 0
        cont = env.step_continuous(cont, action)
        actions.append(action)
        states.append(env.discretize(cont))
        if states[-1][0] > env.flag_bin:
            break
    return Trace(states=tuple(states), actions=tuple(actions))


def main():
    FIXTURES.mkdir(exist_ok=True)
    maps_dir = FIXTURES / "maps"
    maps_dir.mkdir(exist_ok=True)

    grid5 = get_env("grid5")
    save_demos(
        FIXTURES / "demos_grid5.json",
        grid5,
        [
            # the safe corridor along the right edge, shortest possible
            walk(grid5, ["R", "R", "R", "R", "U", "U", "U", "U"]),
            # same corridor with one backtrack, still safe
            walk(grid5, ["R", "R", "R", "R", "U", "D", "U", "U", "U", "U"]),
            # cuts through the obstacle column
            walk(grid5, ["U", "U", "R", "U", "L", "U"]),
        ],
    )

    grid7 = get_env("grid7")
    save_demos(
        FIXTURES / "demos_grid7.json",
        grid7,
        [
            # bottom edge, then straight up the right edge
            walk(grid7, ["R"] * 6 + ["U"] * 6),
            # same route with one backtrack on the bottom edge
            walk(grid7, ["R", "R", "R", "L", "R", "R", "R", "R"] + ["U"] * 6),
            # walks into the obstacle block
            walk(grid7, ["U", "U", "U", "R"]),
            # safe but gives up halfway along the bottom edge
            walk(grid7, ["R", "R", "R", "R"]),
        ],
    )

    multi = get_env("grid7_multi")
    save_demos(
        FIXTURES / "demos_grid7_multi.json",
        multi,
        [
            # second goal first: bottom edge to (6,6), one backtrack, then up
            walk(multi, ["R", "R", "R", "L", "R", "R", "R", "R"] + ["U"] * 6),
            # first goal first: up the left edge, across the top, back down
            walk(multi, ["U"] * 6 + ["R"] * 6 + ["D"] * 6),
        ],
    )

    mc = get_env("mountaincar50")
    save_demos(
        FIXTURES / "demos_mountaincar50.json",
        mc,
        [
            bang_bang_trace(mc),
            bang_bang_trace(mc, coast_steps=5),
        ],
    )

    for env_id in ("grid5", "grid7", "grid7_multi", "frozenlake4", "frozenlake8"):
        env = get_env(env_id)
        (maps_dir / f"{env_id}.txt").write_text(format_map(env))

    print(f"wrote fixtures under {FIXTURES}")


if __name__ == "__main__":
    main()
