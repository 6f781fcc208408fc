"""Reward inference from ranked demonstrations.

Every demonstration is scored against the whole requirement graph: its
robustness on each spec, weighted by the graph's softmax weights, gives one
scalar.  Demonstrations that strictly satisfy every hard spec (robustness
above zero, not merely at it) count as good; the rest are bad.  Good ones
spread their score along the visited states as a ramp that grows toward the
end of the trace, bad ones concentrate theirs (a negative number, if the
weighting is sane) on the exact states where a hard requirement broke.
Summing the per-demonstration maps scaled by rank and normalizing to unit
peak yields the state reward the learner trains on.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .envs import GridEnv, MountainCarEnv
from .features import Trace, extract_signal
from .specgraph import SpecGraph
from .stl import Always, Predicate, robustness


class InferenceError(Exception):
    """Raised when demonstrations cannot be turned into a coherent reward."""


@dataclass(frozen=True)
class DemoScore:
    """How one demonstration fared against the requirement graph."""

    index: int
    robustness: dict[str, float]
    total: float
    good: bool
    rank: int = 0


@dataclass(frozen=True)
class RewardResult:
    rewards: dict
    scores: tuple[DemoScore, ...]
    weights: dict[str, float]
    normalizer: float


def _graph_channels(graph: SpecGraph) -> tuple[str, ...]:
    names: set[str] = set()
    for node in graph.nodes:
        names |= set(node.formula.channels())
    return tuple(sorted(names))


def score_demo(graph: SpecGraph, env, trace: Trace, *, index: int = 0,
               temperature: float = 1.0) -> DemoScore:
    signal = extract_signal(env, trace, channels=_graph_channels(graph))
    weights = graph.softmax_weights(temperature)
    robs = {n.name: robustness(n.formula, signal).value for n in graph.nodes}
    total = sum(weights[name] * robs[name] for name in graph.names)
    good = all(robs[n.name] > 0 for n in graph.hard)
    return DemoScore(index=index, robustness=robs, total=total, good=good)


def rank_demos(graph: SpecGraph, env, traces, *, temperature: float = 1.0
               ) -> tuple[DemoScore, ...]:
    """Score all demonstrations and attach ranks 1..m, m being the best.

    The sort is stable on the input order, so of two equally scored
    demonstrations the one given first gets the higher rank.
    """
    if not traces:
        raise InferenceError("no demonstrations to rank")
    scored = [
        score_demo(graph, env, t, index=i, temperature=temperature)
        for i, t in enumerate(traces)
    ]
    by_total = sorted(scored, key=lambda s: -s.total)
    m = len(scored)
    ranked = {s.index: m - pos for pos, s in enumerate(by_total)}
    return tuple(
        DemoScore(
            index=s.index,
            robustness=s.robustness,
            total=s.total,
            good=s.good,
            rank=ranked[s.index],
        )
        for s in scored
    )


def violation_states(graph: SpecGraph, env, trace: Trace) -> tuple:
    """States where a failed hard spec demonstrably went wrong.

    For an invariant G(pred) these are the steps whose predicate margin is
    negative inside the window.  Hard specs of any other shape have no
    single culpable step, so the end of the trace stands in for them.
    """
    signal = extract_signal(env, trace, channels=_graph_channels(graph))
    bad: list = []
    seen = set()
    for node in graph.hard:
        if robustness(node.formula, signal).value > 0:
            continue
        f = node.formula
        if isinstance(f, Always) and isinstance(f.arg, Predicate):
            lo = f.interval.lo
            hi = min(f.interval.hi, len(trace) - 1)
            for i in range(lo, hi + 1):
                if robustness(f.arg, signal, i).value < 0:
                    state = trace.states[i]
                    if state not in seen:
                        seen.add(state)
                        bad.append(state)
        else:
            state = trace.states[-1]
            if state not in seen:
                seen.add(state)
                bad.append(state)
    return tuple(bad)


def demo_reward(graph: SpecGraph, env, trace: Trace, score: DemoScore) -> dict:
    """The per-state reward contribution of a single demonstration."""
    rewards: dict = {}
    if score.good:
        length = len(trace)
        for position, state in enumerate(trace.states, start=1):
            value = (position / length) * score.total
            # a revisited state keeps its latest, larger ramp value
            if state not in rewards or value > rewards[state]:
                rewards[state] = value
    else:
        for state in violation_states(graph, env, trace):
            rewards[state] = score.total
    return rewards


def infer_reward(graph: SpecGraph, env, traces, *, temperature: float = 1.0
                 ) -> RewardResult:
    """Rank demonstrations and combine their reward maps.

    Raises InferenceError when some bad demonstration scores at least as
    high as a good one; rank-weighting the maps is meaningless in that
    case and the spec weights or the demonstrations need a second look.
    """
    scores = rank_demos(graph, env, traces, temperature=temperature)
    good_totals = [s.total for s in scores if s.good]
    bad_totals = [s.total for s in scores if not s.good]
    if good_totals and bad_totals and min(good_totals) <= max(bad_totals):
        raise InferenceError(
            f"ranking is inverted: a failing demonstration scored "
            f"{max(bad_totals):.4f}, at or above a passing one at "
            f"{min(good_totals):.4f}"
        )
    combined: dict = {}
    for score, trace in zip(scores, traces):
        for state, value in demo_reward(graph, env, trace, score).items():
            combined[state] = combined.get(state, 0.0) + score.rank * value
    peak = max((abs(v) for v in combined.values()), default=0.0)
    if peak > 0:
        combined = {s: v / peak for s, v in combined.items()}
    return RewardResult(
        rewards=combined,
        scores=scores,
        weights=graph.softmax_weights(temperature),
        normalizer=peak,
    )


# --------------------------------------------------------------------------
# Reward map files
# --------------------------------------------------------------------------


def _state_fields(env) -> tuple[str, str]:
    if isinstance(env, MountainCarEnv):
        return ("bin_pos", "bin_vel")
    return ("x", "y")


def reward_to_json(env, rewards: dict) -> dict:
    fa, fb = _state_fields(env)
    entries = [
        {fa: s[0], fb: s[1], "value": rewards[s]} for s in sorted(rewards)
    ]
    return {"env_id": env.env_id, "rewards": entries}


def reward_from_json(payload: dict) -> tuple[str, dict]:
    if not isinstance(payload, dict) or "rewards" not in payload:
        raise InferenceError("reward file must be an object with a 'rewards' list")
    env_id = payload.get("env_id")
    if env_id is None:
        raise InferenceError("reward file is missing 'env_id'")
    rewards: dict = {}
    for i, entry in enumerate(payload["rewards"]):
        try:
            if "bin_pos" in entry:
                state = (int(entry["bin_pos"]), int(entry["bin_vel"]))
            else:
                state = (int(entry["x"]), int(entry["y"]))
            rewards[state] = float(entry["value"])
        except (KeyError, TypeError, ValueError):
            raise InferenceError(f"reward entry {i} is malformed: {entry!r}") from None
    return env_id, rewards


def save_reward(path, env, rewards: dict) -> None:
    payload = reward_to_json(env, rewards)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_reward(path) -> tuple[str, dict]:
    return reward_from_json(json.loads(Path(path).read_text()))


def save_reward_csv(path, env, rewards: dict) -> None:
    fa, fb = _state_fields(env)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([fa, fb, "value"])
        for state in sorted(rewards):
            writer.writerow([state[0], state[1], repr(rewards[state])])
