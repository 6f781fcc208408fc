"""Monitored tabular Q-learning and sequential multi-goal composition.

The training loop is plain epsilon-greedy Q-learning over a state reward
table, with a requirement monitor in the loop: every episode keeps the
prefix robustness of each hard spec up to date, ends the episode the moment
one goes negative, and folds the monitor's verdict into the observed reward.

How the state reward table enters the per-step reward is governed by
reward_mode:

  * "shaped" (default): en route, the positive part of the table acts as a
    potential, r = gamma*max(R(s'),0) - max(R(s),0), with negative entries
    added on every visit; the terminating step pays R(s') itself, plus the
    (negative) robustness of whichever hard spec ended the episode.  Cycles
    then never profit, so the optimum is reaching the goal fast rather than
    orbiting high-reward cells.
  * "additive": r = R(s') plus the full signed prefix margin of every hard
    spec, every step.  The straightforward reading, kept because the
    experiment scripts measure how it inflates Q-values until the greedy
    policy farms reward loops instead of finishing.

With no hard specs and a goal-only reward the shaped mode is textbook
Q-learning, bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from itertools import permutations
from pathlib import Path

import numpy as np

from .envs import GridEnv, MountainCarEnv
from .features import Trace, bfs_time_bound, channel_value, extract_signal
from .specgraph import SpecGraph
from .stl import (
    ROB_CAP,
    Always,
    Eventually,
    Predicate,
    predicate_margin,
    robustness,
    robustness_prefix,
)

MC_STEP_BUDGET = 200

_PERPENDICULAR = {"U": ("L", "R"), "D": ("L", "R"), "L": ("U", "D"), "R": ("U", "D")}


class TrainError(Exception):
    """Raised when training cannot produce a usable policy."""


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 2000
    alpha: float = 0.1
    gamma: float = 0.99
    epsilon: float = 0.4
    max_steps: int | None = None  # grids: 4x the shortest path; mountain car: 200
    rng_seed: int = 0
    slip: float = 0.0
    reward_mode: str = "shaped"  # "shaped" or "additive", see module docstring
    q_init: float = 0.0  # optimistic values drive exploration on sparse rewards
    reset_states: tuple = ()  # episode starts drawn from here when non-empty
    replay_passes: int = 0  # demonstration replay sweeps before training


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    steps: int
    reward: float
    termination: str  # goal | violation | cap


@dataclass(frozen=True)
class TrainResult:
    q: dict
    policy: tuple
    states: tuple
    reached: bool
    episodes: tuple[EpisodeRecord, ...]


# --------------------------------------------------------------------------
# Prefix monitoring
# --------------------------------------------------------------------------


class _RunningExtremum:
    """Incremental prefix robustness for G(pred) / F(pred) shapes."""

    def __init__(self, lo, hi, margin_fn, minimize):
        self.lo = lo
        self.hi = hi
        self.margin_fn = margin_fn
        self.minimize = minimize
        self.count = 0
        self.current = math.inf if minimize else -math.inf

    def observe(self, state) -> float:
        index = self.count
        self.count += 1
        if self.lo <= index <= self.hi:
            margin = self.margin_fn(state, index)
            if self.minimize:
                self.current = min(self.current, margin)
            else:
                self.current = max(self.current, margin)
        return max(-ROB_CAP, min(ROB_CAP, self.current))


class _FullRecompute:
    """Fallback for nested formulas: re-evaluate the whole prefix."""

    def __init__(self, env, formula, goal_override):
        self.env = env
        self.formula = formula
        self.goal_override = goal_override
        self.states: list = []

    def observe(self, state) -> float:
        self.states.append(state)
        signal = extract_signal(
            self.env,
            Trace(states=tuple(self.states)),
            channels=self.formula.channels(),
            goal_override=self.goal_override,
        )
        return robustness_prefix(self.formula, signal).value


class PrefixMonitor:
    """Tracks prefix robustness of every hard spec along one episode."""

    def __init__(self, graph: SpecGraph, env, goal_override=None):
        self.trackers = {}
        for node in graph.hard:
            f = node.formula
            if isinstance(f, (Always, Eventually)) and isinstance(f.arg, Predicate):
                pred = f.arg

                def margin_fn(state, index, pred=pred):
                    sample = channel_value(
                        env, pred.channel, state, index, goal_override=goal_override
                    )
                    return predicate_margin(pred.op, sample, pred.threshold)

                self.trackers[node.name] = _RunningExtremum(
                    f.interval.lo, f.interval.hi, margin_fn, isinstance(f, Always)
                )
            else:
                self.trackers[node.name] = _FullRecompute(env, f, goal_override)

    def observe(self, state) -> dict[str, float]:
        return {name: tr.observe(state) for name, tr in self.trackers.items()}


# --------------------------------------------------------------------------
# Training
# --------------------------------------------------------------------------


def _default_max_steps(env, start, goal) -> int:
    if isinstance(env, MountainCarEnv):
        return MC_STEP_BUDGET
    return max(1, 4 * bfs_time_bound(env, start=start, goal=goal))


def _step_reward(cfg, reward, rhos, s, s2, done, violated) -> float:
    """Observed reward for the transition s -> s2, per reward_mode."""
    r_state = reward.get(s2, 0.0)
    if cfg.reward_mode == "additive":
        return r_state + sum(rhos.values())
    if done or violated:
        return r_state + sum(rho for rho in rhos.values() if rho < 0)
    return (cfg.gamma * max(r_state, 0.0)
            - max(reward.get(s, 0.0), 0.0)
            + min(r_state, 0.0))


def _replay_demos(env, graph, reward, cfg, q, demos, goal, actions) -> None:
    """Seed the Q-table by replaying demonstration transitions.

    Each pass applies the ordinary update along every demonstration, with
    the monitor running as it would during a live episode (a violating
    demonstration is replayed only up to its violation).  Values propagate
    one transition backward per pass, so the number of passes should be on
    the order of the longest demonstration.
    """
    for _ in range(cfg.replay_passes):
        for trace in demos:
            monitor = PrefixMonitor(graph, env, goal_override=goal)
            s = trace.states[0]
            rhos = monitor.observe(s)
            if any(rho < 0 for rho in rhos.values()):
                continue
            for action, s2 in zip(trace.actions, trace.states[1:]):
                a_idx = actions.index(action)
                rhos = monitor.observe(s2)
                done = env.reached(s2, goal)
                violated = any(rho < 0 for rho in rhos.values())
                r = _step_reward(cfg, reward, rhos, s, s2, done, violated)
                q[s][a_idx] += cfg.alpha * (
                    r + cfg.gamma * float(np.max(q[s2])) - q[s][a_idx]
                )
                s = s2
                if done or violated:
                    break


def q_stl_train(env, graph: SpecGraph, reward: dict, cfg: TrainConfig | None = None,
                *, start=None, goal=None, rng=None, demos=()) -> TrainResult:
    """Train one Q-table toward `goal` and extract the greedy policy.

    The d_goal channel seen by the monitor points at `goal`, which matters
    when training a leg of a multi-goal run toward an intermediate waypoint.
    RNG discipline: one uniform draw per step for the exploration coin, one
    integer draw only when it comes up explore, and (only when slip > 0)
    one extra uniform for the slip; nothing else consumes randomness, except
    one integer draw per episode when reset_states is non-empty.

    reset_states implements exploring starts: episodes begin at states drawn
    from the list (typically demonstration states), which reaches parts of
    the state space the epsilon coin alone never would; the greedy policy is
    still extracted from `start`.  `demos` with cfg.replay_passes > 0 seeds
    the table by replaying demonstration transitions before any episode runs
    (no randomness involved).  Both matter on the mountain car, where a
    200-step random swing essentially never finds the flag.
    """
    cfg = cfg or TrainConfig()
    if cfg.reward_mode not in ("shaped", "additive"):
        raise TrainError(f"unknown reward_mode: {cfg.reward_mode!r}")
    start = start if start is not None else env.start
    goal = goal if goal is not None else env.goal
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    actions = env.actions
    continuous = isinstance(env, MountainCarEnv)
    max_steps = cfg.max_steps or _default_max_steps(env, start, goal)

    q = {s: np.full(len(actions), cfg.q_init, dtype=float) for s in env.states()}
    if cfg.replay_passes > 0 and demos:
        _replay_demos(env, graph, reward, cfg, q, demos, goal, actions)
    records = []
    for episode in range(cfg.episodes):
        monitor = PrefixMonitor(graph, env, goal_override=goal)
        if cfg.reset_states:
            s = cfg.reset_states[int(rng.integers(len(cfg.reset_states)))]
        else:
            s = start
        cont = env.bin_center(s) if continuous else None
        rhos = monitor.observe(s)
        total = 0.0
        steps = 0
        termination = "cap"
        if any(rho < 0 for rho in rhos.values()):
            records.append(EpisodeRecord(episode, 0, 0.0, "violation"))
            continue
        for _ in range(max_steps):
            if rng.random() < cfg.epsilon:
                a_idx = int(rng.integers(len(actions)))
            else:
                a_idx = int(np.argmax(q[s]))
            action = actions[a_idx]
            if cfg.slip > 0 and not continuous:
                u = rng.random()
                if u < cfg.slip / 2:
                    action = _PERPENDICULAR[action][0]
                elif u < cfg.slip:
                    action = _PERPENDICULAR[action][1]
            if continuous:
                cont = env.step_continuous(cont, action)
                s2 = env.discretize(cont)
            else:
                s2 = env.step(s, action)
            steps += 1
            rhos = monitor.observe(s2)
            done = env.reached(s2, goal)
            violated = any(rho < 0 for rho in rhos.values())
            r = _step_reward(cfg, reward, rhos, s, s2, done, violated)
            total += r

            q[s][a_idx] += cfg.alpha * (
                r + cfg.gamma * float(np.max(q[s2])) - q[s][a_idx]
            )
            s = s2
            if done:
                termination = "goal"
                break
            if violated:
                termination = "violation"
                break
        records.append(EpisodeRecord(episode, steps, total, termination))

    policy, states, reached = greedy_policy(env, q, start, goal, max_steps)
    return TrainResult(
        q=q,
        policy=policy,
        states=states,
        reached=reached,
        episodes=tuple(records),
    )


def greedy_policy(env, q: dict, start, goal, max_steps: int):
    """Roll out argmax actions from start; ties go to the first action."""
    actions = env.actions
    continuous = isinstance(env, MountainCarEnv)
    s = start
    cont = env.bin_center(start) if continuous else None
    visited = [s]
    taken = []
    reached = env.reached(s, goal)
    for _ in range(max_steps):
        if reached:
            break
        a_idx = int(np.argmax(q[s]))
        action = actions[a_idx]
        taken.append(action)
        if continuous:
            cont = env.step_continuous(cont, action)
            s = env.discretize(cont)
        else:
            s = env.step(s, action)
        visited.append(s)
        reached = env.reached(s, goal)
    return tuple(taken), tuple(visited), reached


# --------------------------------------------------------------------------
# Sequential goals
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    order: tuple[int, ...]  # 1-based goal indices in visiting order
    trace: Trace
    soft_total: float
    hard_ok: bool
    reached: bool


@dataclass(frozen=True)
class MultiGoalResult:
    trace: Trace
    order: tuple[int, ...]
    soft_total: float
    candidates: tuple[Candidate, ...]


def multi_goal_policy(env, graph: SpecGraph, reward: dict,
                      cfg: TrainConfig | None = None, *, start=None,
                      order: tuple[int, ...] | None = None) -> MultiGoalResult:
    """Train toward every goal order (or one fixed order) and pick the best.

    Each leg is its own training run seeded from (seed, order, leg), and the
    stitched policies are re-monitored as whole trajectories: orders whose
    policy breaks a hard spec, or whose legs never reach their waypoint, are
    dropped.  Among the rest the largest summed soft robustness wins, with
    the shorter trajectory breaking ties.
    """
    cfg = cfg or TrainConfig()
    start = start if start is not None else env.start
    goals = env.goals
    if len(goals) == 1 and order is None:
        result = q_stl_train(env, graph, reward, cfg, start=start, goal=goals[0])
        trace = Trace(states=result.states, actions=result.policy)
        if not result.reached:
            raise TrainError("training never reached the goal")
        soft = _soft_total(graph, env, trace)
        cand = Candidate((1,), trace, soft, True, True)
        return MultiGoalResult(trace, (1,), soft, (cand,))

    orders = [tuple(order)] if order is not None else [
        tuple(i + 1 for i in p) for p in permutations(range(len(goals)))
    ]
    # each leg is its own task, "reach this waypoint safely": penalties carry
    # over from the full map, but positive entries do not, because ramps
    # inferred for the whole run point at the final goal and would pull a leg
    # toward the wrong waypoint (a non-terminal attractor the leg can never
    # cash in).  Optimistic initialization replaces the exploration push the
    # ramp would otherwise provide.
    payout = max((v for v in reward.values() if v > 0), default=1.0)
    penalties = {s: v for s, v in reward.items() if v < 0}
    leg_cfg = replace(cfg, q_init=payout)

    candidates = []
    for order_idx, visiting in enumerate(orders):
        seg_start = start
        all_states: list = []
        all_actions: list = []
        ok = True
        for leg_idx, goal_index in enumerate(visiting):
            goal = goals[goal_index - 1]
            leg_reward = dict(penalties)
            leg_reward[goal] = payout
            rng = np.random.default_rng([cfg.rng_seed, order_idx, leg_idx])
            res = q_stl_train(
                env, graph, leg_reward, leg_cfg, start=seg_start, goal=goal, rng=rng
            )
            if not res.reached:
                ok = False
                break
            if all_states:
                # the leg starts where the previous one ended
                all_states.extend(res.states[1:])
            else:
                all_states.extend(res.states)
            all_actions.extend(res.policy)
            seg_start = goal
        if not ok:
            candidates.append(
                Candidate(visiting, Trace(states=(start,)), -math.inf, False, False)
            )
            continue
        trace = Trace(states=tuple(all_states), actions=tuple(all_actions))
        hard_ok = _hard_satisfied(graph, env, trace)
        soft = _soft_total(graph, env, trace)
        candidates.append(Candidate(visiting, trace, soft, hard_ok, True))

    viable = [c for c in candidates if c.reached and c.hard_ok]
    if not viable:
        raise TrainError(
            "no goal order produced a policy satisfying the hard specs"
        )
    best = min(viable, key=lambda c: (-c.soft_total, len(c.trace)))
    return MultiGoalResult(best.trace, best.order, best.soft_total, tuple(candidates))


def _soft_total(graph: SpecGraph, env, trace: Trace) -> float:
    signal = extract_signal(env, trace)
    return sum(robustness(n.formula, signal).value for n in graph.soft)


def _hard_satisfied(graph: SpecGraph, env, trace: Trace) -> bool:
    signal = extract_signal(env, trace)
    return all(robustness(n.formula, signal).value > 0 for n in graph.hard)


# --------------------------------------------------------------------------
# Files
# --------------------------------------------------------------------------


def save_policy(path, env, trace: Trace) -> None:
    if isinstance(env, MountainCarEnv):
        start = {"bin_pos": trace.states[0][0], "bin_vel": trace.states[0][1]}
    else:
        start = {"x": trace.states[0][0], "y": trace.states[0][1]}
    steps = []
    n = len(trace.states)
    for i, state in enumerate(trace.states):
        if isinstance(env, MountainCarEnv):
            entry: dict = {"bin_pos": state[0], "bin_vel": state[1]}
        else:
            entry = {"x": state[0], "y": state[1]}
        if i < n - 1:
            entry["action"] = trace.actions[i]
        steps.append(entry)
    payload = {"env_id": env.env_id, "start": start, "steps": steps}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_policy(path) -> tuple[str, Trace]:
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, dict) or "steps" not in payload:
        raise TrainError("policy file must be an object with a 'steps' list")
    env_id = payload.get("env_id")
    if env_id is None:
        raise TrainError("policy file is missing 'env_id'")
    states = []
    actions = []
    for i, entry in enumerate(payload["steps"]):
        if "bin_pos" in entry:
            states.append((int(entry["bin_pos"]), int(entry["bin_vel"])))
        else:
            states.append((int(entry["x"]), int(entry["y"])))
        if i < len(payload["steps"]) - 1:
            actions.append(entry["action"])
    return env_id, Trace(states=tuple(states), actions=tuple(actions))


def save_stats_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "steps", "reward", "termination"])
        for rec in records:
            writer.writerow([rec.episode, rec.steps, repr(rec.reward), rec.termination])
