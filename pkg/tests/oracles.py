"""Independent reference implementations used as test oracles.

Everything in here is deliberately written from the definitions, not by
calling into the package, so the tests compare two separate derivations.
Keep it slow and obvious.
"""

from __future__ import annotations

import numpy as np

from stlfd import stl


# --------------------------------------------------------------------------
# Boolean STL semantics, by exhaustive expansion
# --------------------------------------------------------------------------


def boolean_sat(f: stl.Formula, sig: stl.Signal, t: int = 0) -> bool:
    """Classic true/false STL semantics with clipped windows.

    A vacuous (fully clipped away) G window is True, a vacuous F or U
    window is False, matching the +inf / -inf conventions of the
    quantitative evaluator.  Predicates compare strictly as written.
    """
    if isinstance(f, stl.Predicate):
        x = sig.value(f.channel, t)
        c = f.threshold
        return {
            ">": x > c,
            ">=": x >= c,
            "<": x < c,
            "<=": x <= c,
            "==": x == c,
        }[f.op]
    if isinstance(f, stl.Not):
        return not boolean_sat(f.arg, sig, t)
    if isinstance(f, stl.And):
        return boolean_sat(f.left, sig, t) and boolean_sat(f.right, sig, t)
    if isinstance(f, stl.Or):
        return boolean_sat(f.left, sig, t) or boolean_sat(f.right, sig, t)
    if isinstance(f, stl.Implies):
        return (not boolean_sat(f.left, sig, t)) or boolean_sat(f.right, sig, t)
    window = range(t + f.interval.lo, min(t + f.interval.hi, sig.length - 1) + 1)
    if isinstance(f, stl.Always):
        return all(boolean_sat(f.arg, sig, tau) for tau in window)
    if isinstance(f, stl.Eventually):
        return any(boolean_sat(f.arg, sig, tau) for tau in window)
    if isinstance(f, stl.Until):
        for tau1 in window:
            if boolean_sat(f.right, sig, tau1) and all(
                boolean_sat(f.left, sig, tau2) for tau2 in range(t, tau1)
            ):
                return True
        return False
    raise AssertionError(f"unhandled node {f!r}")


# --------------------------------------------------------------------------
# Random formula / signal generation for bulk agreement checks
# --------------------------------------------------------------------------

CHANNEL_POOL = ("x", "y", "z")


def random_signal(rng, max_len: int = 12) -> stl.Signal:
    length = rng.randint(1, max_len)
    n_channels = rng.randint(1, len(CHANNEL_POOL))
    channels = {}
    for name in CHANNEL_POOL[:n_channels]:
        # Mix a coarse value grid with continuous draws so exact threshold
        # ties (skipped by the sign check) actually occur now and then.
        channels[name] = [
            float(rng.choice([-2, -1, 0, 1, 2])) if rng.random() < 0.3 else rng.uniform(-5, 5)
            for _ in range(length)
        ]
    return stl.Signal(channels)


def random_formula(rng, sig: stl.Signal, depth: int = 4) -> stl.Formula:
    names = sorted(sig.channels)
    if depth == 0 or rng.random() < 0.3:
        return stl.Predicate(
            rng.choice(names),
            rng.choice(list(stl.COMPARATORS)),
            float(rng.choice([-2, -1, 0, 1, 2])) if rng.random() < 0.4 else rng.uniform(-5, 5),
        )
    kind = rng.choice(["not", "and", "or", "implies", "G", "F", "U"])
    if kind == "not":
        return stl.Not(random_formula(rng, sig, depth - 1))
    if kind in ("and", "or", "implies"):
        left = random_formula(rng, sig, depth - 1)
        right = random_formula(rng, sig, depth - 1)
        cls = {"and": stl.And, "or": stl.Or, "implies": stl.Implies}[kind]
        return cls(left, right)
    lo = rng.randint(0, sig.length)
    hi = lo + rng.randint(0, sig.length)
    interval = stl.Interval(lo, hi)
    if kind == "G":
        return stl.Always(interval, random_formula(rng, sig, depth - 1))
    if kind == "F":
        return stl.Eventually(interval, random_formula(rng, sig, depth - 1))
    return stl.Until(
        interval, random_formula(rng, sig, depth - 1), random_formula(rng, sig, depth - 1)
    )


# --------------------------------------------------------------------------
# Exhaustive shortest path on small grids
# --------------------------------------------------------------------------


def exhaustive_shortest_path(env, start, goal) -> int | None:
    """Shortest obstacle-avoiding path length by depth-limited enumeration.

    Tries every move sequence of increasing length, so only suitable for
    grids up to about 7x7.  Returns None when no path exists.
    """
    if start == goal:
        return 0
    limit = env.width * env.height
    frontier = {start}
    seen = {start}
    for depth in range(1, limit + 1):
        nxt = set()
        for state in frontier:
            for action in env.actions:
                succ = env.step(state, action)
                if succ in env.obstacles or succ in seen:
                    continue
                if succ == goal:
                    return depth
                nxt.add(succ)
        seen |= nxt
        if not nxt:
            return None
        frontier = nxt
    return None


# --------------------------------------------------------------------------
# Textbook tabular Q-learning, for the baseline-reduction check
# --------------------------------------------------------------------------


def textbook_q_learning(env, reward, start, goal, cfg, max_steps):
    """Plain epsilon-greedy Q-learning over a state-based reward table.

    Mirrors the exact RNG draw discipline of the package trainer (one
    uniform per step, one integer draw only on exploration) so trajectories
    can be compared bit for bit when no STL machinery is active.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    actions = env.actions
    q = {s: np.zeros(len(actions)) for s in env.states()}
    for _ in range(cfg.episodes):
        s = start
        for _ in range(max_steps):
            if rng.random() < cfg.epsilon:
                a_idx = int(rng.integers(len(actions)))
            else:
                a_idx = int(np.argmax(q[s]))
            s2 = env.step(s, actions[a_idx])
            r = reward.get(s2, 0.0)
            done = s2 == goal
            target = r if done else r + cfg.gamma * float(np.max(q[s2]))
            q[s][a_idx] += cfg.alpha * (target - q[s][a_idx])
            s = s2
            if done:
                break
    return q
