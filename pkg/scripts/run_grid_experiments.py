#!/usr/bin/env python3
"""Single-goal and two-goal grid experiments over the shipped fixtures.

For each grid: infer a reward table from the demonstration file, train one
policy per seed, and tabulate convergence, greedy path length against the
shortest-path bound, and the per-requirement verdicts.  The two-goal map
additionally runs the order composer and reports which visiting order won.

Outputs land in --out (default results/grids): one stats CSV per seed plus
a summary.csv per environment.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from stlfd.envs import get_env
from stlfd.features import Trace, best_goal_order, bfs_time_bound, load_demos
from stlfd.inference import infer_reward
from stlfd.qstl import TrainConfig, multi_goal_policy, q_stl_train, save_stats_csv
from stlfd.specgraph import load_spec_json
from stlfd.stl import robustness
from stlfd.features import extract_signal

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run_single(env_id: str, seeds: int, episodes: int, out: Path) -> None:
    env = get_env(env_id)
    bound = bfs_time_bound(env)
    graph = load_spec_json(
        FIXTURES / "specs_grid_single.json", {"T": 4 * bound, "T_goal": bound}
    )
    traces = [t for _, t in load_demos(FIXTURES / f"demos_{env_id}.json", env)]
    rewards = infer_reward(graph, env, traces).rewards

    print(f"\n{env_id}: shortest path {bound} steps, {len(traces)} demos")
    print(f"  {'seed':>4}  {'reached':>7}  {'steps':>5}  verdicts")
    rows = []
    for seed in range(seeds):
        t0 = time.monotonic()
        res = q_stl_train(
            env, graph, rewards, TrainConfig(episodes=episodes, rng_seed=seed)
        )
        elapsed = time.monotonic() - t0
        verdicts = "-"
        steps = "-"
        if res.reached:
            sig = extract_signal(env, Trace(states=res.states, actions=res.policy))
            marks = [
                "+" if robustness(n.formula, sig).value > 0 else "-"
                for n in graph.nodes
            ]
            verdicts = "".join(marks)
            steps = len(res.policy)
        print(f"  {seed:>4}  {str(res.reached):>7}  {steps:>5}  {verdicts}")
        save_stats_csv(out / f"{env_id}_seed{seed}_stats.csv", res.episodes)
        rows.append([seed, res.reached, steps, verdicts, f"{elapsed:.2f}"])
    with open(out / f"{env_id}_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "reached", "steps", "verdicts", "seconds"])
        writer.writerows(rows)


def run_two_goal(seeds: int, episodes: int, out: Path) -> None:
    env = get_env("grid7_multi")
    order, bound = best_goal_order(env)
    graph = load_spec_json(
        FIXTURES / "specs_grid_multi.json", {"T": 4 * bound, "T_goal": bound}
    )
    traces = [t for _, t in load_demos(FIXTURES / "demos_grid7_multi.json", env)]
    rewards = infer_reward(graph, env, traces).rewards

    print(f"\ngrid7_multi: best order {order}, bound {bound} steps")
    rows = []
    for seed in range(seeds):
        res = multi_goal_policy(
            env, graph, rewards, TrainConfig(episodes=episodes, rng_seed=seed)
        )
        picked = "-".join(map(str, res.order))
        print(f"  seed {seed}: picked {picked}, {len(res.trace.actions)} steps")
        rows.append([seed, picked, len(res.trace.actions)])
    with open(out / "grid7_multi_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "order", "steps"])
        writer.writerows(rows)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--episodes", type=int, default=2000)
    parser.add_argument("--out", default="results/grids")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for env_id in ("grid5", "grid7"):
        run_single(env_id, args.seeds, args.episodes, out)
    run_two_goal(args.seeds, args.episodes, out)
    print(f"\nwrote per-seed stats and summaries to {out}")


if __name__ == "__main__":
    main()
