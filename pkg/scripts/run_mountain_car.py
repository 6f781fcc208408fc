#!/usr/bin/env python3
"""Mountain car on the 50x50 bin abstraction, trained from two demos.

Infers the reward table from the recorded demonstrations, then trains one
policy per seed with the configuration that handles this reward landscape:
demonstration states as exploring starts, demonstration replay before the
first episode, and a high exploration rate.  Reports the per-seed outcome
and the overall reach rate within the step cap.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from stlfd.envs import get_env
from stlfd.features import load_demos
from stlfd.inference import infer_reward
from stlfd.qstl import MC_STEP_BUDGET, TrainConfig, q_stl_train, save_stats_csv
from stlfd.specgraph import load_spec_json

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--episodes", type=int, default=6000)
    parser.add_argument("--epsilon", type=float, default=0.7)
    parser.add_argument("--replay", type=int, default=200)
    parser.add_argument("--out", default="results/mountaincar")
    args = parser.parse_args()

    env = get_env("mountaincar50")
    graph = load_spec_json(
        FIXTURES / "specs_mountaincar.json", {"T": MC_STEP_BUDGET}
    )
    traces = [
        t for _, t in load_demos(FIXTURES / "demos_mountaincar50.json", env)
    ]
    rewards = infer_reward(graph, env, traces).rewards
    reset_states = tuple(s for t in traces for s in t.states)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"mountaincar50: {len(traces)} demos "
          f"({', '.join(str(len(t.actions)) for t in traces)} steps), "
          f"cap {MC_STEP_BUDGET}")
    reached = 0
    for seed in range(args.seeds):
        cfg = TrainConfig(
            episodes=args.episodes,
            epsilon=args.epsilon,
            rng_seed=seed,
            reset_states=reset_states,
            replay_passes=args.replay,
        )
        t0 = time.monotonic()
        res = q_stl_train(env, graph, rewards, cfg, demos=traces)
        elapsed = time.monotonic() - t0
        goals = sum(1 for rec in res.episodes if rec.termination == "goal")
        steps = len(res.policy) if res.reached else "-"
        reached += bool(res.reached)
        print(f"  seed {seed}: reached={res.reached} steps={steps} "
              f"goal episodes={goals} ({elapsed:.1f}s)")
        save_stats_csv(out / f"seed{seed}_stats.csv", res.episodes)
    print(f"reach rate: {reached}/{args.seeds}")
    print(f"wrote per-seed stats to {out}")


if __name__ == "__main__":
    main()
