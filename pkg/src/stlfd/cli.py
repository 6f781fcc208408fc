"""Command-line pipeline tying the file formats together.

Subcommands cover the whole workflow: record a demonstration by walking an
environment, rank demonstrations against a requirement graph, infer a state
reward table, train a monitored policy (single goal or multi-goal compose),
evaluate a saved policy against every requirement, and export reward tables
to CSV.  All outputs are plain JSON/CSV and byte-stable for fixed inputs and
seed, so reruns can be diffed.

Exit codes: 0 success, 2 invalid inputs, 3 training did not converge,
4 a policy failed a requirement verdict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .envs import ENV_IDS, MapError, MountainCarEnv, get_env
from .features import (
    FeatureError,
    Trace,
    UnreachableGoalError,
    best_goal_order,
    bfs_time_bound,
    extract_signal,
    goal_sequence_bound,
    load_demos,
    save_demos,
)
from .inference import InferenceError, infer_reward, load_reward, save_reward, save_reward_csv
from .qstl import (
    MC_STEP_BUDGET,
    TrainConfig,
    TrainError,
    load_policy,
    multi_goal_policy,
    q_stl_train,
    save_policy,
    save_stats_csv,
)
from .specgraph import GraphError, load_spec_json
from .stl import ParseError, StlError, robustness

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_CONVERGENCE = 3
EXIT_FAILED_VERDICT = 4

_GRID_KEYS = {"U": "U", "D": "D", "L": "L", "R": "R"}


class CliError(Exception):
    """Input problem the user can fix; carries the exit code."""

    def __init__(self, message, code=EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


def spec_substitutions(env, order=None) -> dict:
    """Numbers substituted for T / T_goal placeholders in spec files.

    The monitoring horizon T is the training step cap; T_goal is the BFS
    bound used as the deadline in time-bounded requirements.
    """
    if isinstance(env, MountainCarEnv):
        return {"T": MC_STEP_BUDGET}
    if len(env.goals) > 1:
        if order is not None:
            bound = goal_sequence_bound(env, order)
        else:
            _, bound = best_goal_order(env)
    else:
        bound = bfs_time_bound(env)
    return {"T": 4 * bound, "T_goal": bound}


def _resolve_env(env_id):
    try:
        return get_env(env_id)
    except (KeyError, MapError) as exc:
        raise CliError(f"unknown environment {env_id!r}: {exc}") from exc


def _load_graph(path, env, order=None):
    try:
        return load_spec_json(Path(path), spec_substitutions(env, order))
    except FileNotFoundError as exc:
        raise CliError(f"spec file not found: {path}") from exc
    except (GraphError, ParseError, StlError) as exc:
        raise CliError(f"{path}: {exc}") from exc


def _load_demo_traces(path, env):
    try:
        entries = load_demos(path, env)
    except FileNotFoundError as exc:
        raise CliError(f"demo file not found: {path}") from exc
    except (FeatureError, ValueError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    traces = []
    for env_id, trace in entries:
        if env_id != env.env_id:
            raise CliError(
                f"{path}: demonstration is for {env_id!r}, not {env.env_id!r}"
            )
        traces.append(trace)
    if not traces:
        raise CliError(f"{path}: no demonstrations found")
    return traces


def _out_dir(args) -> Path:
    out = os.environ.get("STLFD_OUT_DIR") or args.out or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _train_config(args, demo_traces=()) -> TrainConfig:
    # demonstrations, when supplied, double as exploring starts and as
    # replay material; without them both knobs stay off
    reset_states = tuple(s for t in demo_traces for s in t.states)
    return TrainConfig(
        episodes=args.episodes,
        alpha=args.alpha,
        gamma=args.gamma,
        epsilon=args.epsilon,
        rng_seed=args.seed,
        slip=args.slip,
        reward_mode=args.reward_mode,
        reset_states=reset_states,
        replay_passes=args.replay if demo_traces else 0,
    )


def _parse_order(text, env):
    try:
        order = tuple(int(part) for part in text.replace(",", " ").split())
    except ValueError as exc:
        raise CliError(f"--goal-order must be integers, got {text!r}") from exc
    if sorted(order) != list(range(1, len(env.goals) + 1)):
        raise CliError(
            f"--goal-order must be a permutation of 1..{len(env.goals)}"
        )
    return order


# --------------------------------------------------------------------------
# record
# --------------------------------------------------------------------------


def _record_moves(env, tokens, interactive):
    """Replay move tokens (or prompt for them) and return the walked Trace."""
    continuous = isinstance(env, MountainCarEnv)
    states = [env.start]
    conts = [env.bin_center(env.start)] if continuous else None
    actions: list = []

    def show():
        print(f"  at {states[-1]} after {len(actions)} steps")

    if interactive:
        legend = "0/1/2" if continuous else "U/D/L/R"
        print(f"walking {env.env_id} from {states[-1]}")
        print(f"enter {legend}, 'undo', or 'done' to finish")

    stream = iter(tokens) if not interactive else None
    while True:
        if interactive:
            try:
                raw = input("> ")
            except EOFError:
                break
        else:
            raw = next(stream, None)
            if raw is None:
                break
        token = raw.strip()
        if not token:
            continue
        word = token.upper()
        if word in ("DONE", "QUIT", "Q"):
            break
        if word == "UNDO":
            if actions:
                actions.pop()
                states.pop()
                if continuous:
                    conts.pop()
                if interactive:
                    show()
            continue
        if continuous:
            if word not in ("0", "1", "2"):
                message = f"invalid action {token!r}: expected 0, 1, or 2"
                if not interactive:
                    raise CliError(message)
                print(message)
                continue
            action: object = int(word)
            conts.append(env.step_continuous(conts[-1], action))
            states.append(env.discretize(conts[-1]))
        else:
            if word not in _GRID_KEYS:
                message = f"invalid action {token!r}: expected U, D, L, or R"
                if not interactive:
                    raise CliError(message)
                print(message)
                continue
            action = _GRID_KEYS[word]
            states.append(env.step(states[-1], action))
        actions.append(action)
        if interactive:
            show()
    return Trace(states=tuple(states), actions=tuple(actions))


def cmd_record(args) -> int:
    env = _resolve_env(args.env)
    if args.steps is not None:
        tokens = args.steps.replace(",", " ").split()
        trace = _record_moves(env, tokens, interactive=False)
    else:
        trace = _record_moves(env, (), interactive=True)
    out = _out_dir(args) / (args.name or "demo.json")
    save_demos(out, env, [trace])
    print(f"recorded {len(trace.actions)} steps to {out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# rank / infer
# --------------------------------------------------------------------------


def _score_table(result) -> str:
    names = sorted(result.scores[0].robustness) if result.scores else []
    header = ["demo"] + names + ["total", "class", "rank"]
    rows = [header]
    for score in result.scores:
        rows.append(
            [str(score.index)]
            + [f"{score.robustness[n]:+.4f}" for n in names]
            + [f"{score.total:+.4f}", "good" if score.good else "bad", str(score.rank)]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


def _run_inference(args):
    env = _resolve_env(args.env)
    graph = _load_graph(args.specs, env)
    traces = _load_demo_traces(args.demos, env)
    try:
        return env, infer_reward(graph, env, traces)
    except InferenceError as exc:
        raise CliError(str(exc)) from exc


def cmd_rank(args) -> int:
    env, result = _run_inference(args)
    print(_score_table(result))
    out = _out_dir(args) / "ranking.json"
    payload = {
        "env_id": env.env_id,
        "demos": [
            {
                "index": s.index,
                "robustness": dict(sorted(s.robustness.items())),
                "total": s.total,
                "good": s.good,
                "rank": s.rank,
            }
            for s in result.scores
        ],
    }
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_infer(args) -> int:
    env, result = _run_inference(args)
    out = _out_dir(args)
    save_reward(out / "reward.json", env, result.rewards)
    save_reward_csv(out / "reward.csv", env, result.rewards)
    peak = max(result.rewards.values(), default=0.0)
    print(
        f"inferred rewards over {len(result.rewards)} states "
        f"(peak {peak:.3f}) from {len(result.scores)} demonstrations"
    )
    print(f"wrote {out / 'reward.json'} and {out / 'reward.csv'}")
    return EXIT_OK


# --------------------------------------------------------------------------
# train / compose
# --------------------------------------------------------------------------


def _load_reward_table(path, env):
    try:
        env_id, rewards = load_reward(path)
    except FileNotFoundError as exc:
        raise CliError(f"reward file not found: {path}") from exc
    except (InferenceError, ValueError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    if env_id != env.env_id:
        raise CliError(f"{path}: reward table is for {env_id!r}, not {env.env_id!r}")
    return rewards


def cmd_train(args) -> int:
    env = _resolve_env(args.env)
    graph = _load_graph(args.specs, env)
    rewards = _load_reward_table(args.reward, env)
    demo_traces = _load_demo_traces(args.demos, env) if args.demos else ()
    cfg = _train_config(args, demo_traces)
    result = q_stl_train(env, graph, rewards, cfg, demos=demo_traces)
    out = _out_dir(args)
    stats = out / "stats.csv"
    save_stats_csv(stats, result.episodes)
    if not result.reached:
        print(f"training did not converge; episode log in {stats}")
        return EXIT_NO_CONVERGENCE
    policy = out / "policy.json"
    save_policy(policy, env, Trace(states=result.states, actions=result.policy))
    goals = sum(1 for rec in result.episodes if rec.termination == "goal")
    print(
        f"trained {cfg.episodes} episodes ({goals} reached the goal); "
        f"greedy policy takes {len(result.policy)} steps"
    )
    print(f"wrote {policy} and {stats}")
    return EXIT_OK


def cmd_compose(args) -> int:
    env = _resolve_env(args.env)
    order = _parse_order(args.goal_order, env) if args.goal_order else None
    graph = _load_graph(args.specs, env, order)
    rewards = _load_reward_table(args.reward, env)
    cfg = _train_config(args)
    try:
        result = multi_goal_policy(env, graph, rewards, cfg, order=order)
    except TrainError as exc:
        print(f"composition failed: {exc}")
        return EXIT_NO_CONVERGENCE
    out = _out_dir(args)
    policy = out / "policy.json"
    save_policy(policy, env, result.trace)
    for cand in result.candidates:
        status = "ok" if cand.reached and cand.hard_ok else "rejected"
        print(
            f"  order {'-'.join(map(str, cand.order))}: {status}, "
            f"{len(cand.trace.actions)} steps, soft total {cand.soft_total:+.4f}"
        )
    print(
        f"picked order {'-'.join(map(str, result.order))} "
        f"({len(result.trace.actions)} steps)"
    )
    print(f"wrote {policy}")
    return EXIT_OK


# --------------------------------------------------------------------------
# eval / export
# --------------------------------------------------------------------------


def cmd_eval(args) -> int:
    env = _resolve_env(args.env)
    graph = _load_graph(args.specs, env)
    try:
        env_id, trace = load_policy(args.policy)
    except FileNotFoundError as exc:
        raise CliError(f"policy file not found: {args.policy}") from exc
    except (TrainError, ValueError) as exc:
        raise CliError(f"{args.policy}: {exc}") from exc
    if env_id != env.env_id:
        raise CliError(f"{args.policy}: policy is for {env_id!r}, not {env.env_id!r}")
    signal = extract_signal(env, trace)
    rows = []
    all_pass = True
    for node in graph.nodes:
        rho = robustness(node.formula, signal).value
        verdict = rho > 0
        all_pass = all_pass and verdict
        rows.append((node.name, node.kind, rho, "pass" if verdict else "FAIL"))
    width = max(len(name) for name, _, _, _ in rows)
    for name, kind, rho, verdict in rows:
        print(f"  {name.ljust(width)}  {kind:<4}  rho {rho:+10.4f}  {verdict}")
    if not all_pass:
        return EXIT_FAILED_VERDICT
    print("all requirements satisfied")
    return EXIT_OK


def cmd_export(args) -> int:
    env = _resolve_env(args.env)
    rewards = _load_reward_table(args.reward, env)
    out = _out_dir(args) / "reward.csv"
    save_reward_csv(out, env, rewards)
    print(f"wrote {out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# argument wiring
# --------------------------------------------------------------------------


def _add_common(sub, *, specs=True, demos=False, reward=False):
    sub.add_argument("--env", required=True, choices=sorted(ENV_IDS))
    if specs:
        sub.add_argument("--specs", required=True, help="requirement graph JSON")
    if demos:
        sub.add_argument("--demos", required=True, help="demonstration JSON")
    if reward:
        sub.add_argument("--reward", required=True, help="reward table JSON")
    sub.add_argument("--out", default=None, help="output directory (default: .)")


def _add_train_flags(sub):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--episodes", type=int, default=2000)
    sub.add_argument("--alpha", type=float, default=0.1)
    sub.add_argument("--gamma", type=float, default=0.99)
    sub.add_argument("--epsilon", type=float, default=0.4)
    sub.add_argument("--slip", type=float, default=0.0)
    sub.add_argument(
        "--reward-mode", choices=("shaped", "additive"), default="shaped"
    )
    sub.add_argument(
        "--replay", type=int, default=200,
        help="demo replay passes before training (needs --demos)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stlfd",
        description="demonstration ranking, reward inference, and monitored training",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    rec = subs.add_parser("record", help="walk an environment and save a demo")
    rec.add_argument("--env", required=True, choices=sorted(ENV_IDS))
    rec.add_argument("--steps", default=None, help="scripted moves, e.g. 'R,R,U'")
    rec.add_argument("--name", default=None, help="output file name (demo.json)")
    rec.add_argument("--out", default=None, help="output directory (default: .)")
    rec.set_defaults(func=cmd_record)

    rank = subs.add_parser("rank", help="score and rank demonstrations")
    _add_common(rank, demos=True)
    rank.set_defaults(func=cmd_rank)

    infer = subs.add_parser("infer", help="infer a reward table from demos")
    _add_common(infer, demos=True)
    infer.set_defaults(func=cmd_infer)

    train = subs.add_parser("train", help="train a monitored policy")
    _add_common(train, reward=True)
    _add_train_flags(train)
    train.add_argument(
        "--demos", default=None,
        help="demonstration JSON; enables exploring starts and replay",
    )
    train.set_defaults(func=cmd_train)

    compose = subs.add_parser("compose", help="train and stitch multi-goal legs")
    _add_common(compose, reward=True)
    _add_train_flags(compose)
    compose.add_argument("--goal-order", default=None, help="e.g. '2,1'")
    compose.set_defaults(func=cmd_compose)

    ev = subs.add_parser("eval", help="check a saved policy against the specs")
    _add_common(ev)
    ev.add_argument("--policy", required=True, help="policy JSON")
    ev.set_defaults(func=cmd_eval)

    export = subs.add_parser("export", help="re-export a reward table as CSV")
    export.add_argument("--env", required=True, choices=sorted(ENV_IDS))
    export.add_argument("--reward", required=True, help="reward table JSON")
    export.add_argument("--out", default=None, help="output directory (default: .)")
    export.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (MapError, FeatureError, UnreachableGoalError, GraphError,
            ParseError, StlError, InferenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except TrainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
