#!/usr/bin/env python3
"""Exploration comparison on the frozenlake maps: monitored vs unmonitored.

Both runs use the same sparse goal reward, seeds, and hyperparameters.  The
monitored run carries a hard avoid-the-holes requirement, so episodes that
touch a hole end immediately; the baseline graph has no hard requirement
and episodes only end at the goal or the step cap.  The quantity compared
is the mean number of steps per episode near the end of training, i.e. how
much of the state space the agent still wanders through.

Writes a per-episode step curve (mean over seeds) for both variants to
--out so the narrowing is plottable, and prints the tail means.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from stlfd.envs import get_env
from stlfd.features import bfs_time_bound
from stlfd.qstl import TrainConfig, q_stl_train
from stlfd.specgraph import load_spec_json

MONITORED = """\
[{"name": "phi1", "kind": "hard", "formula": "G[0,%(cap)d](d_obs >= 1)"},
 {"name": "phi2", "kind": "soft", "formula": "F[0,%(cap)d](d_goal < 1)",
  "depends_on": ["phi1"]}]
"""

BARE = """\
[{"name": "phi2", "kind": "soft", "formula": "F[0,%(cap)d](d_goal < 1)"}]
"""


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--env", default="frozenlake8",
                        choices=("frozenlake4", "frozenlake8"))
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--episodes", type=int, default=2000)
    parser.add_argument("--tail", type=int, default=500,
                        help="episodes from the end used for the tail mean")
    parser.add_argument("--out", default="results/frozenlake")
    args = parser.parse_args()

    env = get_env(args.env)
    cap = 4 * bfs_time_bound(env)
    graphs = {
        "monitored": load_spec_json(MONITORED % {"cap": cap}),
        "bare": load_spec_json(BARE % {"cap": cap}),
    }
    reward = {env.goal: 1.0}

    curves = {}
    tails = {}
    for label, graph in graphs.items():
        per_seed = []
        for seed in range(args.seeds):
            cfg = TrainConfig(episodes=args.episodes, rng_seed=seed)
            res = q_stl_train(env, graph, reward, cfg)
            per_seed.append([rec.steps for rec in res.episodes])
        curve = np.mean(per_seed, axis=0)
        curves[label] = curve
        tails[label] = float(np.mean(curve[-args.tail:]))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.env}_steps.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "monitored", "bare"])
        for i, (m, b) in enumerate(zip(curves["monitored"], curves["bare"])):
            writer.writerow([i, repr(float(m)), repr(float(b))])

    print(f"{args.env}: step cap {cap}, {args.seeds} seeds, "
          f"{args.episodes} episodes")
    print(f"  tail mean over last {args.tail} episodes:")
    print(f"    monitored  {tails['monitored']:8.2f}")
    print(f"    bare       {tails['bare']:8.2f}")
    verdict = "narrower" if tails["monitored"] < tails["bare"] else "NOT narrower"
    print(f"  monitored exploration is {verdict}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
